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
 * @file boolean.hpp
 * Deutsch-Jozsa style encoding of Boolean functions and the biased-vs-balanced
 * filtering problem built on it.
 *
 * A function f on n bits maps to the unit vector sum_x (-1)^f(x) |x> / sqrt(D),
 * D = 2^n. The biased pair W_k consists of the step function that is 0 below
 * (1 - 2^-k) D and 1 above, plus its complement; both encode to +-|w_k>.
 * Balanced encodings span the zero-sum subspace H_b, for which the nonconstant
 * Walsh characters are an orthonormal basis.
 */
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qfilter/ensemble.hpp"
#include "qfilter/error.hpp"
#include "qfilter/strategies.hpp"

namespace qfilter {

inline constexpr unsigned kMaxBooleanBits = 20;
inline constexpr unsigned kMaxEnumerationBits = 4;

enum class FunctionClass { Constant, Balanced, Biased };

class BooleanFunction {
  public:
    BooleanFunction(unsigned n, std::vector<std::uint8_t> truth_table)
        : n_(n), table_(std::move(truth_table)) {
        if (n < 1 || n > kMaxBooleanBits)
            fail(ErrorKind::InvalidInput, "bit count n must lie in [1, 20]");
        if (table_.size() != (std::size_t{1} << n))
            fail(ErrorKind::InvalidInput, "truth table must have 2^n entries");
        for (auto &b : table_) {
            if (b > 1)
                fail(ErrorKind::InvalidInput, "truth table entries must be 0 or 1");
            ones_ += b;
        }
    }

    unsigned bits() const { return n_; }
    std::size_t size() const { return table_.size(); }
    const std::vector<std::uint8_t> &truth_table() const { return table_; }
    std::uint8_t operator()(std::size_t x) const { return table_.at(x); }

    std::size_t zeros() const { return table_.size() - ones_; }  // m0
    std::size_t ones() const { return ones_; }                   // m1

    FunctionClass classification() const {
        if (ones_ == 0 || ones_ == table_.size())
            return FunctionClass::Constant;
        return zeros() == ones_ ? FunctionClass::Balanced : FunctionClass::Biased;
    }

  private:
    unsigned n_;
    std::vector<std::uint8_t> table_;
    std::size_t ones_ = 0;
};

inline std::size_t dimension_for(unsigned n) { return std::size_t{1} << n; }

inline StateVector dj_encode(const BooleanFunction &f) {
    const std::size_t dim = f.size();
    const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
    CVector v(static_cast<Eigen::Index>(dim));
    for (std::size_t x = 0; x < dim; ++x)
        v(static_cast<Eigen::Index>(x)) = f(x) ? -amp : amp;
    return StateVector(std::move(v));
}

inline BooleanFunction constant_function(unsigned n, std::uint8_t value = 0) {
    return BooleanFunction(n, std::vector<std::uint8_t>(dimension_for(n), value));
}

/// (2^k - 1) / 2^(2k - 2).
inline double wk_parallel_norm(unsigned k) {
    return (std::ldexp(1.0, static_cast<int>(k)) - 1.0) / std::ldexp(1.0, 2 * static_cast<int>(k) - 2);
}

struct WkSpec {
    unsigned n = 0;
    unsigned k = 0;
    std::size_t boundary = 0;  // first x with f(x) = 1 for the canonical member
    std::vector<BooleanFunction> members;
    StateVector vector;
    double f_k = 0.0;            // closed form
    double f_k_geometric = 0.0;  // 1 - |<const|w_k>|^2
    bool degenerate = false;     // k = 1: both members are balanced
};

inline WkSpec wk_spec(unsigned n, unsigned k) {
    if (k < 1 || k > n)
        fail(ErrorKind::InvalidInput,
             "W_k needs 1 <= k <= n (got n = " + std::to_string(n) + ", k = " + std::to_string(k) + ")");
    if (n > kMaxBooleanBits)
        fail(ErrorKind::ResourceLimit, "n is limited to 20 bits");
    const std::size_t dim = dimension_for(n);
    const std::size_t boundary = dim - (dim >> k);

    std::vector<std::uint8_t> low_zero(dim), low_one(dim);
    for (std::size_t x = 0; x < dim; ++x) {
        low_zero[x] = x < boundary ? 0 : 1;
        low_one[x] = 1 - low_zero[x];
    }
    BooleanFunction canonical(n, std::move(low_zero));
    StateVector w = dj_encode(canonical);
    const Complex c = inner(dj_encode(constant_function(n)), w);

    WkSpec spec{n, k, boundary, {}, w, wk_parallel_norm(k), 1.0 - std::norm(c), k == 1};
    spec.members.push_back(std::move(canonical));
    spec.members.emplace_back(n, std::move(low_one));
    if (std::abs(spec.f_k - spec.f_k_geometric) > 1e-12)
        fail(ErrorKind::Numerical, "f_k closed form disagrees with the geometric derivation");
    return spec;
}

/// v_r(x) = (-1)^{popcount(r & x)}, as a Boolean function.
inline BooleanFunction walsh_function(unsigned n, std::size_t r) {
    std::vector<std::uint8_t> t(dimension_for(n));
    for (std::size_t x = 0; x < t.size(); ++x)
        t[x] = static_cast<std::uint8_t>(std::popcount(r & x) & 1);
    return BooleanFunction(n, std::move(t));
}

struct BalancedBasis {
    unsigned n = 0;
    std::vector<BooleanFunction> functions;
    std::vector<StateVector> vectors;
};

/// The D - 1 nonconstant Walsh characters, r = 1 .. D - 1.
inline BalancedBasis walsh_balanced_basis(unsigned n) {
    if (n < 1 || n > kMaxBooleanBits)
        fail(ErrorKind::InvalidInput, "bit count n must lie in [1, 20]");
    BalancedBasis b;
    b.n = n;
    const std::size_t dim = dimension_for(n);
    for (std::size_t r = 1; r < dim; ++r) {
        b.functions.push_back(walsh_function(n, r));
        b.vectors.push_back(dj_encode(b.functions.back()));
    }
    return b;
}

/// D! / (D/2)!^2, exact. C(64, 32) is the last value that fits in 64 bits.
inline std::uint64_t balanced_count(unsigned n) {
    if (n < 1 || n > 6)
        fail(ErrorKind::ResourceLimit, "exact balanced count is limited to 1 <= n <= 6");
    const std::uint64_t dim = dimension_for(n);
    unsigned __int128 c = 1;
    for (std::uint64_t i = 1; i <= dim / 2; ++i)
        c = c * (dim / 2 + i) / i;
    return static_cast<std::uint64_t>(c);
}

/// D! / (D/2)!^2 in floating point; finite up to n = 10.
inline double balanced_count_real(unsigned n) {
    if (n < 1 || n > 10)
        fail(ErrorKind::ResourceLimit, "balanced count is limited to 1 <= n <= 10");
    const auto half = static_cast<double>(dimension_for(n) / 2);
    double c = 1.0;
    for (double i = 1.0; i <= half; i += 1.0)
        c = c * (half + i) / i;
    return c;
}

/// Every balanced function on n <= 4 bits, in lexicographic truth-table order.
inline std::vector<BooleanFunction> enumerate_balanced(unsigned n) {
    if (n < 1)
        fail(ErrorKind::InvalidInput, "bit count n must be >= 1");
    if (n > kMaxEnumerationBits)
        fail(ErrorKind::ResourceLimit,
             "enumerating all balanced functions is limited to n <= 4 (" + std::to_string(n) +
                 " requested); use the Walsh basis variant instead");
    const std::size_t dim = dimension_for(n);
    std::vector<std::uint8_t> t(dim, 0);
    std::fill(t.begin() + static_cast<std::ptrdiff_t>(dim / 2), t.end(), 1);
    std::vector<BooleanFunction> out;
    out.reserve(balanced_count(n));
    do {
        out.emplace_back(n, t);
    } while (std::next_permutation(t.begin(), t.end()));
    return out;
}

/// Average overlap of |w_k> with a set of encodings at uniform prior (1 - eta1) / M.
inline double average_overlap_direct(const StateVector &w, const std::vector<StateVector> &set,
                                     double eta1) {
    const double eta = (1.0 - eta1) / static_cast<double>(set.size());
    double s = 0.0;
    for (const auto &v : set)
        s += std::norm(inner(w, v));
    return eta * s;
}

inline double average_overlap_closed_form(unsigned n, unsigned k, double eta1) {
    const auto dim = static_cast<double>(dimension_for(n));
    return (1.0 - eta1) * wk_parallel_norm(k) / (dim - 1.0);
}

struct OverlapPair {
    double closed_form = 0.0;
    double direct = 0.0;
};

inline void check_overlap_args(unsigned n, unsigned k, double eta1) {
    if (k < 2 || k > n)
        fail(ErrorKind::InvalidInput, "average overlap needs 2 <= k <= n");
    if (!(eta1 > 0.0 && eta1 <= 1.0))
        fail(ErrorKind::InvalidInput, "eta1 must lie in (0, 1]");
}

inline OverlapPair average_overlap_basis(unsigned n, unsigned k, double eta1) {
    check_overlap_args(n, k, eta1);
    const WkSpec w = wk_spec(n, k);
    const BalancedBasis basis = walsh_balanced_basis(n);
    OverlapPair p{average_overlap_closed_form(n, k, eta1),
                  average_overlap_direct(w.vector, basis.vectors, eta1)};
    if (std::abs(p.closed_form - p.direct) > 1e-12)
        fail(ErrorKind::Numerical, "basis average overlap disagrees with the closed form");
    return p;
}

inline OverlapPair average_overlap_full(unsigned n, unsigned k, double eta1) {
    check_overlap_args(n, k, eta1);
    const WkSpec w = wk_spec(n, k);
    std::vector<StateVector> encodings;
    for (const auto &f : enumerate_balanced(n))
        encodings.push_back(dj_encode(f));
    OverlapPair p{average_overlap_closed_form(n, k, eta1),
                  average_overlap_direct(w.vector, encodings, eta1)};
    if (std::abs(p.closed_form - p.direct) > 1e-12)
        fail(ErrorKind::Numerical, "full-set average overlap disagrees with the closed form");
    return p;
}

enum class PriorMode { EqualStatesBasis, EqualSets, EqualStatesFull, Custom };
enum class ComplementVariant { Basis, Full };

struct PriorSpec {
    PriorMode mode = PriorMode::EqualStatesBasis;
    double eta1 = 0.0;  // Custom only
};

inline double target_prior_for(unsigned n, PriorSpec prior) {
    switch (prior.mode) {
    case PriorMode::EqualStatesBasis:
        return 1.0 / static_cast<double>(dimension_for(n));
    case PriorMode::EqualSets:
        return 0.5;
    case PriorMode::EqualStatesFull:
        return 1.0 / (balanced_count_real(n) + 1.0);
    case PriorMode::Custom:
        break;
    }
    if (!(prior.eta1 > 0.0 && prior.eta1 < 1.0))
        fail(ErrorKind::InvalidInput, "custom eta1 must lie in (0, 1)");
    return prior.eta1;
}

/// Target |w_k> against the Walsh basis (Basis) or every balanced encoding (Full).
inline FilteringProblem boolean_problem(unsigned n, unsigned k, PriorSpec prior,
                                        ComplementVariant variant) {
    if (k < 2 || k > n)
        fail(ErrorKind::InvalidInput, "boolean problem needs 2 <= k <= n (W_1 is balanced)");
    if (variant == ComplementVariant::Full && n > kMaxEnumerationBits)
        fail(ErrorKind::ResourceLimit, "the full balanced variant is limited to n <= 4");
    if (n > 10)
        fail(ErrorKind::ResourceLimit, "boolean problems are limited to n <= 10");

    const double eta1 = target_prior_for(n, prior);
    std::vector<StateVector> states{wk_spec(n, k).vector};
    if (variant == ComplementVariant::Basis) {
        BalancedBasis b = walsh_balanced_basis(n);
        states.insert(states.end(), b.vectors.begin(), b.vectors.end());
    } else {
        for (const auto &f : enumerate_balanced(n))
            states.push_back(dj_encode(f));
    }
    const double eta = (1.0 - eta1) / static_cast<double>(states.size() - 1);
    std::vector<double> priors(states.size(), eta);
    priors[0] = eta1;
    return FilteringProblem(std::move(states), std::move(priors), 0);
}

/// Informational window 1/2^(k-2) <= D eta1 <= 2^(k-2).
inline bool approximate_povm_window(unsigned n, unsigned k, double eta1) {
    const double x = static_cast<double>(dimension_for(n)) * eta1;
    const double edge = std::ldexp(1.0, static_cast<int>(k) - 2);
    return x >= 1.0 / edge && x <= edge;
}

struct PovmAdvantage {
    double q_povm = 0.0;
    double q_sqm = 0.0;
    double exact_ratio = 0.0;    // q_povm / q_sqm at eta1 = 1/D
    double formula_ratio = 0.0;  // 2 sqrt(f_k (1 - 1/D) D / (D - 1)) / (1 + f_k)
    double approx_ratio = 0.0;   // 4 / 2^(k/2)
    double relative_gap = 0.0;   // |exact - approx| / approx
};

inline PovmAdvantage povm_advantage(unsigned n, unsigned k) {
    if (k < 2 || k > n)
        fail(ErrorKind::InvalidInput, "povm_advantage needs 2 <= k <= n");
    if (n > kMaxBooleanBits)
        fail(ErrorKind::ResourceLimit, "n is limited to 20 bits");
    const auto dim = static_cast<double>(dimension_for(n));
    const double eta1 = 1.0 / dim;
    const double f = wk_parallel_norm(k);
    const double s = average_overlap_closed_form(n, k, eta1);
    PovmAdvantage a;
    a.q_povm = q_povm(eta1, s);
    a.q_sqm = q_sqm1(eta1, s);
    a.exact_ratio = a.q_povm / a.q_sqm;
    a.formula_ratio = 2.0 * std::sqrt(f * (1.0 - 1.0 / dim) * dim / (dim - 1.0)) / (1.0 + f);
    a.approx_ratio = 4.0 / std::pow(2.0, static_cast<double>(k) / 2.0);
    a.relative_gap = std::abs(a.exact_ratio - a.approx_ratio) / a.approx_ratio;
    return a;
}

struct QueryCounts {
    std::uint64_t balanced_vs_constant = 0;  // 2^(n-1) + 1
    std::uint64_t wk_vs_balanced = 0;        // 2^n (1/2 + 1/2^k) + 1
};

inline QueryCounts classical_query_count(unsigned n, unsigned k) {
    if (n < 1 || n > 62 || k < 1 || k > n)
        fail(ErrorKind::InvalidInput, "classical query count needs 1 <= k <= n <= 62");
    const std::uint64_t dim = std::uint64_t{1} << n;
    return {dim / 2 + 1, dim / 2 + (dim >> k) + 1};
}

}  // namespace qfilter
