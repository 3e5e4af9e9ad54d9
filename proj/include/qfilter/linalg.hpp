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
 * @file linalg.hpp
 * Small dense complex linear algebra shared by every module: the vector and
 * matrix aliases, a re-orthogonalized Gram-Schmidt span basis, orthonormal
 * completion, and Hermitian eigen helpers (backed by Eigen).
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace qfilter {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

/// Residual norm below which a Gram-Schmidt candidate is treated as dependent.
inline constexpr double kRankTolerance = 1e-8;

/// Orthonormal basis of a column span together with its rank.
struct SpanBasis {
    CMatrix vectors;  // D x rank, orthonormal columns
    std::size_t rank = 0;
};

/**
 * Two-pass classical Gram-Schmidt over the columns of @p columns.
 *
 * A column whose residual after projecting out the current basis has norm
 * below @p tol contributes nothing. Stops early once the basis spans the whole
 * ambient space.
 */
inline SpanBasis span_basis(const CMatrix &columns, double tol = kRankTolerance) {
    const Eigen::Index dim = columns.rows();
    CMatrix basis(dim, std::min(dim, columns.cols()));
    Eigen::Index rank = 0;
    for (Eigen::Index c = 0; c < columns.cols() && rank < dim; ++c) {
        CVector r = columns.col(c);
        for (int pass = 0; pass < 2; ++pass) {
            if (rank == 0)
                break;
            auto q = basis.leftCols(rank);
            r -= q * (q.adjoint() * r);
        }
        const double norm = r.norm();
        if (norm < tol)
            continue;
        basis.col(rank++) = r / norm;
    }
    return {basis.leftCols(rank), static_cast<std::size_t>(rank)};
}

/// Extends orthonormal columns @p partial to a full unitary of the same row
/// dimension by orthonormalizing residual coordinate vectors. Non-unique.
inline CMatrix orthonormal_completion(const CMatrix &partial) {
    const Eigen::Index dim = partial.rows();
    CMatrix candidates(dim, partial.cols() + dim);
    candidates << partial, CMatrix::Identity(dim, dim);
    // Existing columns are already orthonormal and survive unchanged up to
    // roundoff; the identity columns fill whatever is left.
    SpanBasis full = span_basis(candidates, 1e-6);
    return full.vectors;
}

inline double max_abs(const CMatrix &m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Ascending eigenvalues and matching eigenvectors of a Hermitian matrix.
struct HermitianEigen {
    RVector values;
    CMatrix vectors;
};

inline HermitianEigen hermitian_eigen(const CMatrix &h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
    return {solver.eigenvalues(), solver.eigenvectors()};
}

inline double min_eigenvalue(const CMatrix &h) {
    if (h.size() == 0)
        return 0.0;
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

/// Numerical rank of a Hermitian PSD matrix (eigenvalues above @p tol).
inline std::size_t hermitian_rank(const CMatrix &h, double tol = 1e-9) {
    if (h.size() == 0)
        return 0;
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
    return static_cast<std::size_t>((solver.eigenvalues().array() > tol).count());
}

}  // namespace qfilter
