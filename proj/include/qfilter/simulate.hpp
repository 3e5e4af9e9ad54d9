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
 * @file simulate.hpp
 * Born-rule Monte Carlo of a MeasurementScheme against each state of a
 * FilteringProblem.
 *
 * Every true state draws from its own generator seeded with seed ^ index, so
 * the counts do not depend on how states are split across workers. Outcomes
 * are drawn by inverse CDF over exact partial sums, and probabilities below
 * kZeroProbability are never sampled, which makes the zero-misidentification
 * guarantee exact.
 */
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <thread>
#include <vector>

#include "qfilter/ensemble.hpp"
#include "qfilter/error.hpp"
#include "qfilter/neumark.hpp"

namespace qfilter {

inline constexpr double kZeroProbability = 1e-12;

struct OutcomeProbability {
    Outcome label;
    double probability;
};

struct OutcomeDistribution {
    std::vector<OutcomeProbability> entries;  // in scheme order
    bool renormalized = false;

    double probability(Outcome label) const {
        for (const auto &e : entries)
            if (e.label == label)
                return e.probability;
        return 0.0;
    }
};

inline OutcomeDistribution outcome_distribution(const MeasurementScheme &scheme,
                                                const StateVector &state) {
    const auto dim = static_cast<Eigen::Index>(scheme.system_dimension);
    CVector psi;
    if (state.dimension() == scheme.system_dimension) {
        psi = state.amplitudes();
    } else if (scheme.kind == SchemeKind::Povm &&
               state.dimension() == scheme.system_dimension + 1 &&
               std::abs(state[scheme.system_dimension]) <= 1e-12) {
        psi = state.amplitudes().head(dim);
    } else {
        fail(ErrorKind::InvalidInput, "state dimension " + std::to_string(state.dimension()) +
                                          " does not match the measured space (" +
                                          std::to_string(scheme.system_dimension) + ")");
    }

    OutcomeDistribution d;
    double total = 0.0;
    for (const auto &o : scheme.outcomes) {
        const double p = std::clamp(psi.dot(o.op * psi).real(), 0.0, 1.0);
        d.entries.push_back({o.label, p});
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12 && total > 0.0) {
        for (auto &e : d.entries)
            e.probability /= total;
        d.renormalized = true;
    }
    return d;
}

using OutcomeRow = std::array<double, kOutcomeCount>;
using CountRow = std::array<std::uint64_t, kOutcomeCount>;

struct SimulationStats {
    SchemeKind scheme_kind = SchemeKind::Sqm1;
    std::uint64_t seed = 0;
    std::uint64_t trials_per_state = 0;
    std::vector<CountRow> counts;  // [state][outcome]
    std::vector<OutcomeRow> empirical_rates;
    std::vector<OutcomeRow> analytic_rates;
    std::vector<OutcomeRow> z_scores;

    /// Target reported as complement, or complement reported as target.
    std::uint64_t misidentifications() const {
        std::uint64_t m = 0;
        for (std::size_t i = 0; i < counts.size(); ++i)
            m += counts[i][static_cast<std::size_t>(i == 0 ? Outcome::IsComplement
                                                             : Outcome::IsTarget)];
        return m;
    }
};

namespace detail {

inline double uniform01(std::mt19937_64 &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline CountRow sample_counts(const OutcomeDistribution &dist, std::uint64_t trials,
                              std::uint64_t stream_seed) {
    std::vector<double> cumulative;
    std::vector<std::size_t> labels;
    double running = 0.0;
    for (const auto &e : dist.entries) {
        if (e.probability < kZeroProbability)
            continue;
        running += e.probability;
        cumulative.push_back(running);
        labels.push_back(static_cast<std::size_t>(e.label));
    }
    CountRow counts{};
    if (labels.empty())
        return counts;
    std::mt19937_64 rng(stream_seed);
    for (std::uint64_t t = 0; t < trials; ++t) {
        const double u = uniform01(rng) * running;
        std::size_t k = 0;
        while (k + 1 < cumulative.size() && u >= cumulative[k])
            ++k;
        ++counts[labels[k]];
    }
    return counts;
}

}  // namespace detail

/// @p workers > 1 splits the true states round-robin across threads.
inline SimulationStats simulate(const MeasurementScheme &scheme, const FilteringProblem &problem,
                                std::uint64_t trials_per_state, std::uint64_t seed,
                                unsigned workers = 1) {
    if (trials_per_state < 1)
        fail(ErrorKind::InvalidInput, "trials per state must be at least 1");
    const std::size_t n = problem.size();

    SimulationStats st;
    st.scheme_kind = scheme.kind;
    st.seed = seed;
    st.trials_per_state = trials_per_state;
    st.counts.assign(n, CountRow{});
    st.analytic_rates.assign(n, OutcomeRow{});

    std::vector<OutcomeDistribution> dists;
    dists.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        dists.push_back(outcome_distribution(scheme, problem.state(i)));
        // same zero threshold as the sampler, so roundoff cannot produce z != 0
        for (const auto &e : dists.back().entries) {
            double a = e.probability;
            if (a < kZeroProbability)
                a = 0.0;
            else if (a > 1.0 - kZeroProbability)
                a = 1.0;
            st.analytic_rates[i][static_cast<std::size_t>(e.label)] = a;
        }
    }

    auto run = [&](std::size_t first, std::size_t stride) {
        for (std::size_t i = first; i < n; i += stride)
            st.counts[i] = detail::sample_counts(dists[i], trials_per_state,
                                                 seed ^ static_cast<std::uint64_t>(i));
    };
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
    if (workers == 1) {
        run(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(run, w, workers);
        for (auto &t : pool)
            t.join();
    }

    const auto trials = static_cast<double>(trials_per_state);
    st.empirical_rates.assign(n, OutcomeRow{});
    st.z_scores.assign(n, OutcomeRow{});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < kOutcomeCount; ++k) {
            const double e = static_cast<double>(st.counts[i][k]) / trials;
            const double a = st.analytic_rates[i][k];
            st.empirical_rates[i][k] = e;
            const double var = a * (1.0 - a) / trials;
            if (var > 0.0)
                st.z_scores[i][k] = (e - a) / std::sqrt(var);
            else if (e == a || std::abs(e - a) < kZeroProbability)
                st.z_scores[i][k] = 0.0;
            else
                st.z_scores[i][k] = std::copysign(std::numeric_limits<double>::infinity(), e - a);
        }
    }
    return st;
}

/// sum_i eta_i * (FAIL rate of state i).
inline double aggregate_failure(const std::vector<OutcomeRow> &rates,
                                const std::vector<double> &priors) {
    if (rates.size() != priors.size())
        fail(ErrorKind::InvalidInput, "rates and priors cover different numbers of states");
    double q = 0.0;
    for (std::size_t i = 0; i < rates.size(); ++i)
        q += priors[i] * rates[i][static_cast<std::size_t>(Outcome::Fail)];
    return q;
}

inline double aggregate_failure(const SimulationStats &stats, const std::vector<double> &priors) {
    return aggregate_failure(stats.empirical_rates, priors);
}

}  // namespace qfilter
