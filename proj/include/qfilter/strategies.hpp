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
 * @file strategies.hpp
 * Closed-form failure probabilities for unambiguous filtering of one target
 * state from a set of complement states.
 *
 * Notation used throughout: eta1 is the target prior, f the squared norm of
 * the target's projection onto the complement span, and S the prior-weighted
 * squared overlap between the target and the complement states. Three
 * strategies are compared:
 *
 *  - SQM1: project onto the target. Fails with probability eta1 + S.
 *  - SQM2: project onto the normalized parallel/perpendicular split of the
 *    target. Fails with probability eta1 * f + S / f.
 *  - POVM: generalized measurement with target failure q1. The average failure
 *    eta1 * q1 + S / q1 is minimized at q1 = sqrt(S / eta1), giving
 *    2 * sqrt(eta1 * S), provided f <= q1 <= 1.
 *
 * Outside the POVM window the optimum clamps to one of the projective
 * strategies.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qfilter/ensemble.hpp"
#include "qfilter/error.hpp"

namespace qfilter {

enum class Regime {
    Povm,
    Sqm1Boundary,
    Sqm2Boundary,
};

inline const char *to_string(Regime r) {
    switch (r) {
    case Regime::Povm:
        return "POVM";
    case Regime::Sqm1Boundary:
        return "SQM1_BOUNDARY";
    case Regime::Sqm2Boundary:
        return "SQM2_BOUNDARY";
    }
    return "?";
}

/// Relative slack applied at the window edges so that exact boundary points
/// land in the POVM regime despite roundoff in eta1 * f^2.
inline constexpr double kBoundaryTolerance = 1e-12;

inline double q_sqm1(double eta1, double overlap) { return eta1 + overlap; }

inline double q_sqm2(double eta1, double f, double overlap) {
    if (f == 0.0) {
        if (overlap == 0.0)
            return 0.0;
        fail(ErrorKind::InvalidState, "q_sqm2: S > 0 requires a nonzero parallel component f");
    }
    return eta1 * f + overlap / f;
}

inline double q_povm(double eta1, double overlap) { return 2.0 * std::sqrt(eta1 * overlap); }

/// eta1 * f^2 <= S <= eta1, with ties counted inside.
inline bool in_povm_window(double eta1, double f, double overlap) {
    const double lower = eta1 * f * f;
    return overlap >= lower * (1.0 - kBoundaryTolerance) &&
           overlap <= eta1 * (1.0 + kBoundaryTolerance);
}

inline Regime select_regime(double eta1, double f, double overlap) {
    if (in_povm_window(eta1, f, overlap))
        return Regime::Povm;
    return overlap > eta1 ? Regime::Sqm1Boundary : Regime::Sqm2Boundary;
}

/// Optimal target failure probability q1 in [f, 1].
inline double optimal_q1(double eta1, double f, double overlap) {
    switch (select_regime(eta1, f, overlap)) {
    case Regime::Sqm1Boundary:
        return 1.0;
    case Regime::Sqm2Boundary:
        return f;
    case Regime::Povm:
        break;
    }
    return std::clamp(std::sqrt(overlap / eta1), f, 1.0);
}

/// Piecewise minimum failure probability.
inline double optimal_failure(double eta1, double f, double overlap) {
    switch (select_regime(eta1, f, overlap)) {
    case Regime::Sqm1Boundary:
        return q_sqm1(eta1, overlap);
    case Regime::Sqm2Boundary:
        return q_sqm2(eta1, f, overlap);
    case Regime::Povm:
        break;
    }
    return q_povm(eta1, overlap);
}

inline void check_strategy_inputs(double eta1, double f, double overlap) {
    if (!(eta1 > 0.0 && eta1 < 1.0))
        fail(ErrorKind::InvalidInput, "target prior eta1 must lie in (0, 1)");
    if (!(f >= 0.0 && f <= 1.0))
        fail(ErrorKind::InvalidInput, "parallel norm f must lie in [0, 1]");
    if (!(overlap >= 0.0) || !std::isfinite(overlap))
        fail(ErrorKind::InvalidInput, "average overlap S must be finite and nonnegative");
}

/// S = sum_{i>=2} eta_i |<psi_1|psi_i>|^2.
inline double average_overlap(const FilteringProblem &problem) {
    const CVector c = target_overlaps(problem);
    double s = 0.0;
    for (std::size_t i = 1; i < problem.size(); ++i)
        s += problem.prior(i) * std::norm(c(static_cast<Eigen::Index>(i)));
    return s;
}

struct StrategyReport {
    double q_sqm1 = 0.0;
    double q_sqm2 = 0.0;
    std::optional<double> q_povm;  // absent outside the POVM window
    Regime regime = Regime::Povm;
    double optimal_q1 = 0.0;
    double optimal_Q = 0.0;
    std::vector<double> per_state_failure;
    std::vector<double> per_state_success;
    double average_success = 0.0;
    double overlap_S = 0.0;
    double parallel_norm_f = 0.0;
};

/// q_i = |<psi_1|psi_i>|^2 / q1 for the complement, q1 itself for the target.
inline std::vector<double> per_state_failures(const CVector &overlaps, double q1) {
    std::vector<double> q(static_cast<std::size_t>(overlaps.size()));
    q[0] = q1;
    for (Eigen::Index i = 1; i < overlaps.size(); ++i)
        q[static_cast<std::size_t>(i)] =
            q1 > 0.0 ? std::min(1.0, std::norm(overlaps(i)) / q1) : 0.0;
    return q;
}

inline StrategyReport optimal_filtering(const FilteringProblem &problem) {
    const double eta1 = problem.target_prior();
    if (!(eta1 > 0.0 && eta1 < 1.0))
        fail(ErrorKind::InvalidInput, "optimal_filtering: target prior must lie in (0, 1)");

    StrategyReport r;
    r.parallel_norm_f = decompose_target(problem).parallel_norm_sq;
    const CVector overlaps = target_overlaps(problem);
    for (std::size_t i = 1; i < problem.size(); ++i)
        r.overlap_S += problem.prior(i) * std::norm(overlaps(static_cast<Eigen::Index>(i)));

    const double f = r.parallel_norm_f;
    const double s = r.overlap_S;
    r.q_sqm1 = q_sqm1(eta1, s);
    // An exactly zero f can coexist with S at roundoff level (~1e-34).
    r.q_sqm2 = (f == 0.0 && s <= 1e-24) ? 0.0 : q_sqm2(eta1, f, s);
    r.regime = select_regime(eta1, f, s);
    if (r.regime == Regime::Povm)
        r.q_povm = q_povm(eta1, s);
    r.optimal_q1 = optimal_q1(eta1, f, s);
    r.optimal_Q = optimal_failure(eta1, f, s);
    r.average_success = 1.0 - r.optimal_Q;

    r.per_state_failure = per_state_failures(overlaps, r.optimal_q1);
    r.per_state_success.reserve(r.per_state_failure.size());
    for (double q : r.per_state_failure)
        r.per_state_success.push_back(1.0 - q);
    return r;
}

struct FailureCurveRow {
    double overlap_S = 0.0;
    double q_sqm1 = 0.0;
    double q_sqm2 = 0.0;
    std::optional<double> q_povm;
    double q_opt = 0.0;
    Regime regime = Regime::Povm;
};

/// One row per S value, holding eta1 and f fixed.
inline std::vector<FailureCurveRow> failure_curve(double eta1, double f,
                                                  std::span<const double> overlaps) {
    std::vector<FailureCurveRow> rows;
    rows.reserve(overlaps.size());
    for (double s : overlaps) {
        check_strategy_inputs(eta1, f, s);
        FailureCurveRow row;
        row.overlap_S = s;
        row.q_sqm1 = q_sqm1(eta1, s);
        row.q_sqm2 = q_sqm2(eta1, f, s);
        row.regime = select_regime(eta1, f, s);
        if (row.regime == Regime::Povm)
            row.q_povm = q_povm(eta1, s);
        row.q_opt = optimal_failure(eta1, f, s);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace qfilter
