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
 * @file ensemble.hpp
 * State vectors, filtering problems, Gram matrices and the split of the
 * target state into the part inside the complement span and the part
 * orthogonal to it.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qfilter/error.hpp"
#include "qfilter/linalg.hpp"

namespace qfilter {

inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kPriorSumTolerance = 1e-9;

/// A unit vector of complex amplitudes over a D-dimensional computational basis.
class StateVector {
  public:
    explicit StateVector(CVector amplitudes) : amps_(std::move(amplitudes)) {
        if (amps_.size() < 1)
            fail(ErrorKind::InvalidInput, "state vector must have dimension >= 1");
        const double n2 = amps_.squaredNorm();
        if (!std::isfinite(n2) || std::abs(n2 - 1.0) > kNormTolerance)
            fail(ErrorKind::InvalidInput,
                 "state vector squared norm is " + std::to_string(n2) + ", expected 1");
    }

    /// Rescales @p v to unit norm first. Zero vectors are rejected.
    static StateVector normalized(const CVector &v) {
        const double n = v.norm();
        if (!(n > 0.0) || !std::isfinite(n))
            fail(ErrorKind::InvalidInput, "cannot normalize a zero or non-finite vector");
        return StateVector(v / n);
    }

    static StateVector basis(std::size_t dimension, std::size_t index) {
        if (index >= dimension)
            fail(ErrorKind::InvalidInput, "basis index out of range");
        CVector v = CVector::Zero(static_cast<Eigen::Index>(dimension));
        v(static_cast<Eigen::Index>(index)) = 1.0;
        return StateVector(std::move(v));
    }

    std::size_t dimension() const { return static_cast<std::size_t>(amps_.size()); }
    const CVector &amplitudes() const { return amps_; }
    Complex operator[](std::size_t x) const { return amps_(static_cast<Eigen::Index>(x)); }

  private:
    CVector amps_;
};

/// <a|b>, conjugate-linear in the first argument.
inline Complex inner(const StateVector &a, const StateVector &b) {
    return a.amplitudes().dot(b.amplitudes());
}

/**
 * N states with prior probabilities, one of which is the target to be filtered
 * out from the rest. The target is stored first; original_index() maps back
 * to the caller's ordering.
 */
class FilteringProblem {
  public:
    FilteringProblem(std::vector<StateVector> states, std::vector<double> priors,
                     std::size_t target_index = 0) {
        if (states.size() < 2)
            fail(ErrorKind::InvalidInput, "a filtering problem needs at least 2 states");
        if (priors.size() != states.size())
            fail(ErrorKind::InvalidInput, "number of priors does not match number of states");
        if (target_index >= states.size())
            fail(ErrorKind::InvalidInput, "target index out of range");
        const std::size_t dim = states.front().dimension();
        for (std::size_t i = 0; i < states.size(); ++i) {
            if (states[i].dimension() != dim)
                fail(ErrorKind::InvalidInput, "state " + std::to_string(i) + " has dimension " +
                                                  std::to_string(states[i].dimension()) +
                                                  ", expected " + std::to_string(dim));
            if (!(priors[i] > 0.0 && priors[i] <= 1.0))
                fail(ErrorKind::InvalidInput,
                     "prior " + std::to_string(i) + " must lie in (0, 1]");
        }
        const double total = std::accumulate(priors.begin(), priors.end(), 0.0);
        if (std::abs(total - 1.0) > kPriorSumTolerance)
            fail(ErrorKind::InvalidInput,
                 "priors must sum to 1 (got " + std::to_string(total) + ")");

        order_.resize(states.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::swap(order_[0], order_[target_index]);
        // keep the remaining states in caller order
        if (target_index > 0) {
            auto first = order_.begin() + 1;
            std::rotate(first, first + static_cast<std::ptrdiff_t>(target_index) - 1,
                        first + static_cast<std::ptrdiff_t>(target_index));
        }
        states_.reserve(states.size());
        priors_.reserve(states.size());
        for (std::size_t i : order_) {
            states_.push_back(std::move(states[i]));
            priors_.push_back(priors[i]);
        }
    }

    std::size_t size() const { return states_.size(); }
    std::size_t dimension() const { return states_.front().dimension(); }

    const std::vector<StateVector> &states() const { return states_; }
    const std::vector<double> &priors() const { return priors_; }
    const StateVector &state(std::size_t i) const { return states_.at(i); }
    double prior(std::size_t i) const { return priors_.at(i); }

    const StateVector &target() const { return states_.front(); }
    double target_prior() const { return priors_.front(); }

    /// Position of internal state @p i in the ordering the problem was built from.
    std::size_t original_index(std::size_t i) const { return order_.at(i); }

    /// D x N matrix with the states as columns.
    CMatrix state_matrix() const { return columns(0); }

    /// D x (N-1) matrix of the complement states.
    CMatrix complement_matrix() const { return columns(1); }

  private:
    CMatrix columns(std::size_t first) const {
        CMatrix m(static_cast<Eigen::Index>(dimension()),
                  static_cast<Eigen::Index>(size() - first));
        for (std::size_t i = first; i < size(); ++i)
            m.col(static_cast<Eigen::Index>(i - first)) = states_[i].amplitudes();
        return m;
    }

    std::vector<StateVector> states_;
    std::vector<double> priors_;
    std::vector<std::size_t> order_;
};

/// G_ij = <psi_i|psi_j>.
inline CMatrix gram_matrix(std::span<const StateVector> states) {
    if (states.empty())
        return CMatrix(0, 0);
    const std::size_t dim = states.front().dimension();
    CMatrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(states.size()));
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].dimension() != dim)
            fail(ErrorKind::InvalidInput, "gram_matrix: dimension mismatch among states");
        m.col(static_cast<Eigen::Index>(i)) = states[i].amplitudes();
    }
    return m.adjoint() * m;
}

inline CMatrix gram_matrix(const FilteringProblem &problem) {
    return gram_matrix(std::span<const StateVector>(problem.states()));
}

inline SpanBasis span_basis(std::span<const StateVector> vectors, double tol = kRankTolerance) {
    if (vectors.empty())
        fail(ErrorKind::InvalidInput, "span_basis needs at least one vector");
    CMatrix m(static_cast<Eigen::Index>(vectors.front().dimension()),
              static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].dimension() != vectors.front().dimension())
            fail(ErrorKind::InvalidInput, "span_basis: dimension mismatch");
        m.col(static_cast<Eigen::Index>(i)) = vectors[i].amplitudes();
    }
    return span_basis(m, tol);
}

/// psi_1 = parallel + perpendicular relative to the span of the complement states.
struct Decomposition {
    CVector parallel;
    CVector perpendicular;
    double parallel_norm_sq = 0.0;  // f
};

inline Decomposition decompose_target(const FilteringProblem &problem) {
    const SpanBasis complement = span_basis(problem.complement_matrix());
    const CVector &target = problem.target().amplitudes();
    Decomposition d;
    if (complement.rank == 0) {
        d.parallel = CVector::Zero(target.size());
        d.perpendicular = target;
        return d;
    }
    const CVector coeffs = complement.vectors.adjoint() * target;
    d.parallel = complement.vectors * coeffs;
    d.perpendicular = target - d.parallel;
    d.parallel_norm_sq = std::min(1.0, coeffs.squaredNorm());
    return d;
}

/// c_i = <psi_1|psi_i> for every state (c_0 = 1).
inline CVector target_overlaps(const FilteringProblem &problem) {
    return (problem.state_matrix().adjoint() * problem.target().amplitudes()).conjugate();
}

}  // namespace qfilter
