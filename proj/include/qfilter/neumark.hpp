// Copyright 2026 The qfilter Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file neumark.hpp
 * Explicit dilation of the optimal filtering POVM.
 *
 * The system space C^D is embedded in C^(D+1); coordinate D is the one
 * dimensional failure (ancilla) direction. A unitary U is built with
 *
 *     U|psi_i> = sqrt(p_i) |psi'_i> + sqrt(q_i) e^{i theta_i} |anc>,
 *
 * where the success parts |psi'_i> of the complement states are orthogonal
 * to the success part of the target. Measuring along the target success
 * direction, the ancilla, and everything else yields the three outcomes.
 *
 * Construction: the success Gram matrix G_ij - sqrt(q_i q_j) e^{i(theta_j -
 * theta_i)} is factored by eigendecomposition, the ancilla amplitudes are
 * appended, the linear map from span{psi_i} onto those outputs is solved, and
 * both domain and codomain are completed to orthonormal bases. The completion
 * is not unique; measurement statistics depend only on the isometry block.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qfilter/ensemble.hpp"
#include "qfilter/error.hpp"
#include "qfilter/linalg.hpp"
#include "qfilter/strategies.hpp"

namespace qfilter {

inline constexpr double kPsdTolerance = 1e-9;
inline constexpr double kEigenKeepThreshold = 1e-10;
inline constexpr double kDependencyResidual = 1e-8;
inline constexpr double kAllocationSlack = 1e-12;
/// Largest ensemble for which the N x N success Gram matrix is formed.
inline constexpr std::size_t kMaxNeumarkStates = 4096;

struct FailureAllocation {
    double q1 = 0.0;
    std::vector<double> failure;  // q_i
    std::vector<double> phase;    // theta_i
};

/// q_i = |<psi_1|psi_i>|^2 / q1 and theta_i = arg <psi_1|psi_i> (theta_1 = 0).
inline FailureAllocation failure_allocations(const FilteringProblem &problem, double q1) {
    const double f = decompose_target(problem).parallel_norm_sq;
    if (!(q1 >= f - kAllocationSlack && q1 <= 1.0 + kAllocationSlack))
        fail(ErrorKind::Infeasible, "target failure probability q1 = " + std::to_string(q1) +
                                        " must lie in [f, 1] = [" + std::to_string(f) + ", 1]");
    q1 = std::clamp(q1, 0.0, 1.0);
    const CVector overlaps = target_overlaps(problem);

    FailureAllocation a;
    a.q1 = q1;
    a.failure = per_state_failures(overlaps, q1);
    a.phase.assign(problem.size(), 0.0);
    for (std::size_t i = 1; i < problem.size(); ++i) {
        const Complex c = overlaps(static_cast<Eigen::Index>(i));
        if (std::abs(c) > 0.0)
            a.phase[i] = std::arg(c);
    }
    return a;
}

/// g_i = sqrt(q_i) e^{i theta_i}, the ancilla amplitude of U|psi_i>.
inline CVector failure_amplitudes(const FailureAllocation &a) {
    CVector g(static_cast<Eigen::Index>(a.failure.size()));
    for (std::size_t i = 0; i < a.failure.size(); ++i)
        g(static_cast<Eigen::Index>(i)) = std::polar(std::sqrt(a.failure[i]), a.phase[i]);
    return g;
}

struct SuccessGram {
    CMatrix matrix;
    double min_eigenvalue = 0.0;
    bool feasible = false;
};

inline SuccessGram success_gram(const FilteringProblem &problem, const FailureAllocation &a) {
    if (a.failure.size() != problem.size() || a.phase.size() != problem.size())
        fail(ErrorKind::InvalidInput, "allocation size does not match the problem");
    if (problem.size() > kMaxNeumarkStates)
        fail(ErrorKind::ResourceLimit, "success Gram matrix limited to " +
                                           std::to_string(kMaxNeumarkStates) + " states");
    const CVector g = failure_amplitudes(a);
    SuccessGram s;
    s.matrix = gram_matrix(problem) - g.conjugate() * g.transpose();
    s.matrix = (s.matrix + s.matrix.adjoint()) * 0.5;
    s.min_eigenvalue = min_eigenvalue(s.matrix);
    s.feasible = s.min_eigenvalue >= -kPsdTolerance;
    return s;
}

struct NeumarkModel {
    CMatrix unitary;                 // (D+1) x (D+1)
    std::size_t ancilla_index = 0;   // == D
    CMatrix outputs;                 // (D+1) x N prescribed U|psi_i>
    CMatrix success_outputs;         // D x N, sqrt(p_i)|psi'_i>
    CVector failure_amplitudes;      // N
    std::vector<double> phases;      // theta_i
    std::vector<double> failure;     // q_i
    std::vector<double> success;     // p_i

    std::size_t system_dimension() const { return ancilla_index; }

    /// The D columns of U acting on the embedded system space.
    CMatrix isometry() const { return unitary.leftCols(static_cast<Eigen::Index>(ancilla_index)); }
};

inline NeumarkModel build_neumark(const FilteringProblem &problem, const FailureAllocation &a) {
    const SuccessGram sg = success_gram(problem, a);
    if (!sg.feasible)
        fail(ErrorKind::Infeasible, "success Gram matrix is not positive semidefinite (min "
                                    "eigenvalue " + std::to_string(sg.min_eigenvalue) + ")");

    const auto dim = static_cast<Eigen::Index>(problem.dimension());
    const auto count = static_cast<Eigen::Index>(problem.size());

    // Success parts: rows of diag(sqrt(lambda)) V^H for the retained eigenpairs.
    const HermitianEigen eig = hermitian_eigen(sg.matrix);
    std::vector<Eigen::Index> kept;
    for (Eigen::Index k = eig.values.size() - 1; k >= 0; --k)
        if (eig.values(k) > kEigenKeepThreshold)
            kept.push_back(k);
    if (static_cast<Eigen::Index>(kept.size()) > dim)
        fail(ErrorKind::Infeasible, "success vectors need " + std::to_string(kept.size()) +
                                        " dimensions but the system space has " +
                                        std::to_string(dim));

    const CVector g = failure_amplitudes(a);
    CMatrix out = CMatrix::Zero(dim + 1, count);
    for (std::size_t r = 0; r < kept.size(); ++r) {
        const Eigen::Index k = kept[r];
        out.row(static_cast<Eigen::Index>(r)) =
            std::sqrt(eig.values(k)) * eig.vectors.col(k).adjoint();
    }
    out.row(dim) = g.transpose();

    // Linear map on span{psi_i}: W C = out with C the coordinates in an
    // orthonormal basis B of the span.
    const CMatrix psi = problem.state_matrix();
    const SpanBasis span = span_basis(psi);
    const CMatrix coords = span.vectors.adjoint() * psi;  // R x N
    CMatrix w = coords.transpose()
                    .colPivHouseholderQr()
                    .solve(out.transpose())
                    .transpose();  // (D+1) x R

    const CMatrix residual = w * coords - out;
    Eigen::Index worst = 0;
    const double res = residual.colwise().norm().maxCoeff(&worst);
    if (res > kDependencyResidual)
        fail(ErrorKind::Infeasible,
             "prescribed outputs violate the linear dependencies of the inputs (state " +
                 std::to_string(problem.original_index(static_cast<std::size_t>(worst))) +
                 ", residual " + std::to_string(res) + ")");

    const CMatrix wtw = w.adjoint() * w;
    const double iso_err = max_abs(wtw - CMatrix::Identity(w.cols(), w.cols()));
    if (iso_err > kDependencyResidual)
        fail(ErrorKind::Numerical,
             "solved map is not isometric (error " + std::to_string(iso_err) + ")");
    // Polar cleanup so the completed matrix is unitary to machine precision.
    Eigen::JacobiSVD<CMatrix> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
    w = svd.matrixU() * svd.matrixV().adjoint();

    const CMatrix domain = orthonormal_completion(span.vectors);  // D x D
    const CMatrix image = orthonormal_completion(w);              // (D+1) x (D+1)
    CMatrix domain_ext = CMatrix::Zero(dim + 1, dim + 1);
    domain_ext.topLeftCorner(dim, dim) = domain;
    domain_ext(dim, dim) = 1.0;

    NeumarkModel m;
    m.unitary = image * domain_ext.adjoint();
    m.ancilla_index = static_cast<std::size_t>(dim);
    m.outputs = out;
    m.success_outputs = out.topRows(dim);
    m.failure_amplitudes = g;
    m.phases = a.phase;
    m.failure = a.failure;
    m.success.reserve(a.failure.size());
    for (double q : a.failure)
        m.success.push_back(1.0 - q);
    return m;
}

enum class SchemeKind { Sqm1, Sqm2, Povm };

inline const char *to_string(SchemeKind k) {
    switch (k) {
    case SchemeKind::Sqm1:
        return "SQM1";
    case SchemeKind::Sqm2:
        return "SQM2";
    case SchemeKind::Povm:
        return "POVM";
    }
    return "?";
}

enum class Outcome { IsTarget = 0, IsComplement = 1, Fail = 2 };
inline constexpr std::size_t kOutcomeCount = 3;

inline const char *to_string(Outcome o) {
    switch (o) {
    case Outcome::IsTarget:
        return "IS_TARGET";
    case Outcome::IsComplement:
        return "IS_COMPLEMENT";
    case Outcome::Fail:
        return "FAIL";
    }
    return "?";
}

struct LabeledOperator {
    Outcome label;
    CMatrix op;  // positive operator on the system space
};

/**
 * A measurement given by labeled positive operators on C^D. For the POVM the
 * operators are the dilated projectors pulled back through the isometry
 * block; acting_dimension records the space the projective measurement
 * actually happens in.
 */
struct MeasurementScheme {
    SchemeKind kind = SchemeKind::Sqm1;
    std::vector<LabeledOperator> outcomes;
    std::size_t system_dimension = 0;
    std::size_t acting_dimension = 0;
    std::optional<std::string> warning;

    const CMatrix *find(Outcome label) const {
        for (const auto &o : outcomes)
            if (o.label == label)
                return &o.op;
        return nullptr;
    }

    /// max |sum_k E_k - I|.
    double completeness_error() const {
        const auto d = static_cast<Eigen::Index>(system_dimension);
        CMatrix sum = CMatrix::Zero(d, d);
        for (const auto &o : outcomes)
            sum += o.op;
        return max_abs(sum - CMatrix::Identity(d, d));
    }
};

inline CMatrix projector(const CVector &v) { return v * v.adjoint(); }

inline CMatrix hermitize(const CMatrix &m) { return (m + m.adjoint()) * 0.5; }

inline MeasurementScheme povm_elements(const NeumarkModel &model) {
    const auto dim = static_cast<Eigen::Index>(model.system_dimension());
    const CMatrix v = model.isometry();

    CVector target_success = CVector::Zero(dim + 1);
    target_success.head(dim) = model.success_outputs.col(0);
    CVector ancilla = CVector::Zero(dim + 1);
    ancilla(dim) = 1.0;

    const CMatrix identity = CMatrix::Identity(dim + 1, dim + 1);
    const CMatrix pi_fail = projector(ancilla);
    CMatrix pi_target = CMatrix::Zero(dim + 1, dim + 1);

    MeasurementScheme s;
    s.kind = SchemeKind::Povm;
    s.system_dimension = static_cast<std::size_t>(dim);
    s.acting_dimension = static_cast<std::size_t>(dim) + 1;

    const double p1 = target_success.squaredNorm();
    if (p1 > 1e-12) {
        pi_target = projector(target_success) / p1;
        s.outcomes.push_back({Outcome::IsTarget, hermitize(v.adjoint() * pi_target * v)});
    } else {
        s.warning = "target success probability is zero; IS_TARGET outcome omitted";
    }
    s.outcomes.push_back(
        {Outcome::IsComplement, hermitize(v.adjoint() * (identity - pi_target - pi_fail) * v)});
    s.outcomes.push_back({Outcome::Fail, hermitize(v.adjoint() * pi_fail * v)});
    return s;
}

inline MeasurementScheme projective_scheme(const FilteringProblem &problem, SchemeKind kind) {
    const auto dim = static_cast<Eigen::Index>(problem.dimension());
    const CMatrix identity = CMatrix::Identity(dim, dim);
    const CVector &target = problem.target().amplitudes();

    MeasurementScheme s;
    s.kind = kind;
    s.system_dimension = static_cast<std::size_t>(dim);
    s.acting_dimension = static_cast<std::size_t>(dim);

    if (kind == SchemeKind::Sqm1) {
        const CMatrix p = projector(target);
        s.outcomes.push_back({Outcome::IsComplement, identity - p});
        s.outcomes.push_back({Outcome::Fail, p});
        return s;
    }
    if (kind != SchemeKind::Sqm2)
        fail(ErrorKind::InvalidInput, "projective_scheme accepts SQM1 or SQM2 only");

    const Decomposition d = decompose_target(problem);
    const double f = d.parallel_norm_sq;
    if (f >= 1.0 - 1e-12)
        fail(ErrorKind::Infeasible,
             "degenerate decomposition: the target lies in the complement span (f = 1), "
             "so SQM2 can never identify it");
    if (f <= 1e-12) {
        const CMatrix p = projector(target);
        s.outcomes.push_back({Outcome::IsTarget, p});
        s.outcomes.push_back({Outcome::IsComplement, identity - p});
        s.outcomes.push_back({Outcome::Fail, CMatrix::Zero(dim, dim)});
        s.warning = "target is orthogonal to the complement span; perfect discrimination";
        return s;
    }
    const CMatrix p_perp = projector(d.perpendicular / d.perpendicular.norm());
    const CMatrix p_par = projector(d.parallel / d.parallel.norm());
    s.outcomes.push_back({Outcome::IsTarget, p_perp});
    s.outcomes.push_back({Outcome::IsComplement, hermitize(identity - p_perp - p_par)});
    s.outcomes.push_back({Outcome::Fail, p_par});
    return s;
}

/// The optimal POVM for @p problem at the q1 chosen by optimal_filtering.
inline MeasurementScheme optimal_povm_scheme(const FilteringProblem &problem) {
    const StrategyReport report = optimal_filtering(problem);
    return povm_elements(build_neumark(problem, failure_allocations(problem, report.optimal_q1)));
}

inline MeasurementScheme make_scheme(const FilteringProblem &problem, SchemeKind kind) {
    return kind == SchemeKind::Povm ? optimal_povm_scheme(problem)
                                    : projective_scheme(problem, kind);
}

}  // namespace qfilter
