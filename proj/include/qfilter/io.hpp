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
 * @file io.hpp
 * Ensemble files (JSON), strategy reports, sweep CSV and simulation tables.
 *
 * Ensemble file schema; unknown keys are rejected at every level:
 *
 *     {
 *       "dimension": D,
 *       "target_index": i,
 *       "states": [ { "amplitudes": [[re, im], ...], "prior": eta }, ... ]
 *     }
 */
#pragma once

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qfilter/ensemble.hpp"
#include "qfilter/error.hpp"
#include "qfilter/simulate.hpp"
#include "qfilter/strategies.hpp"

namespace qfilter::io {

using nlohmann::json;

/// %.12g
inline std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace detail {

inline void reject_unknown_keys(const json &obj, const std::set<std::string> &allowed,
                                const std::string &where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            fail(ErrorKind::InvalidInput, "unknown field '" + it.key() + "' in " + where);
}

inline const json &require(const json &obj, const char *key, const std::string &where) {
    auto it = obj.find(key);
    if (it == obj.end())
        fail(ErrorKind::InvalidInput, std::string("missing field '") + key + "' in " + where);
    return *it;
}

inline double number(const json &v, const std::string &what) {
    if (!v.is_number())
        fail(ErrorKind::InvalidInput, what + " must be a number");
    return v.get<double>();
}

inline std::size_t index(const json &v, const std::string &what) {
    if (!v.is_number_integer() || v.get<long long>() < 0)
        fail(ErrorKind::InvalidInput, what + " must be a nonnegative integer");
    return v.get<std::size_t>();
}

}  // namespace detail

inline FilteringProblem parse_ensemble(const json &doc) {
    using namespace detail;
    if (!doc.is_object())
        fail(ErrorKind::InvalidInput, "ensemble file must be a JSON object");
    reject_unknown_keys(doc, {"dimension", "states", "target_index"}, "ensemble");
    const std::size_t dim = index(require(doc, "dimension", "ensemble"), "dimension");
    if (dim < 1)
        fail(ErrorKind::InvalidInput, "dimension must be >= 1");
    const std::size_t target = index(require(doc, "target_index", "ensemble"), "target_index");
    const json &states = require(doc, "states", "ensemble");
    if (!states.is_array())
        fail(ErrorKind::InvalidInput, "states must be an array");

    std::vector<StateVector> vectors;
    std::vector<double> priors;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const std::string where = "states[" + std::to_string(i) + "]";
        const json &s = states[i];
        if (!s.is_object())
            fail(ErrorKind::InvalidInput, where + " must be an object");
        reject_unknown_keys(s, {"amplitudes", "prior"}, where);
        const json &amps = require(s, "amplitudes", where);
        if (!amps.is_array() || amps.size() != dim)
            fail(ErrorKind::InvalidInput,
                 where + ".amplitudes must be an array of " + std::to_string(dim) + " [re, im] pairs");
        CVector v(static_cast<Eigen::Index>(dim));
        for (std::size_t x = 0; x < dim; ++x) {
            const json &pair = amps[x];
            if (!pair.is_array() || pair.size() != 2)
                fail(ErrorKind::InvalidInput, where + ".amplitudes[" + std::to_string(x) +
                                                  "] must be a [re, im] pair");
            v(static_cast<Eigen::Index>(x)) = Complex(number(pair[0], where + " amplitude"),
                                                      number(pair[1], where + " amplitude"));
        }
        try {
            vectors.emplace_back(std::move(v));
        } catch (const Error &e) {
            fail(ErrorKind::InvalidInput, where + ": " + e.what());
        }
        priors.push_back(number(require(s, "prior", where), where + ".prior"));
    }
    return FilteringProblem(std::move(vectors), std::move(priors), target);
}

inline FilteringProblem parse_ensemble(std::istream &in) {
    json doc;
    try {
        in >> doc;
    } catch (const json::exception &e) {
        fail(ErrorKind::InvalidInput, std::string("malformed JSON: ") + e.what());
    }
    return parse_ensemble(doc);
}

inline FilteringProblem read_ensemble(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::InvalidInput, "cannot open ensemble file '" + path + "'");
    return parse_ensemble(in);
}

/// The problem in internal order, so target_index is always 0. Amplitudes
/// are written at round-trip precision.
inline json ensemble_json(const FilteringProblem &problem) {
    json states = json::array();
    for (std::size_t i = 0; i < problem.size(); ++i) {
        json amps = json::array();
        for (std::size_t x = 0; x < problem.dimension(); ++x) {
            const Complex a = problem.state(i)[x];
            amps.push_back({a.real(), a.imag()});
        }
        states.push_back({{"amplitudes", std::move(amps)}, {"prior", problem.prior(i)}});
    }
    return {{"dimension", problem.dimension()}, {"target_index", 0}, {"states", std::move(states)}};
}

inline void write_ensemble(const FilteringProblem &problem, const std::string &path) {
    std::ofstream out(path);
    if (!out)
        fail(ErrorKind::InvalidInput, "cannot write ensemble file '" + path + "'");
    out << ensemble_json(problem).dump(1) << '\n';
    if (!out)
        fail(ErrorKind::InvalidInput, "failed writing ensemble file '" + path + "'");
}

inline json report_json(const StrategyReport &r) {
    json j;
    j["q_sqm1"] = r.q_sqm1;
    j["q_sqm2"] = r.q_sqm2;
    j["q_povm"] = r.q_povm ? json(*r.q_povm) : json(nullptr);
    j["regime"] = to_string(r.regime);
    j["optimal_q1"] = r.optimal_q1;
    j["optimal_Q"] = r.optimal_Q;
    j["average_success"] = r.average_success;
    j["overlap_S"] = r.overlap_S;
    j["parallel_norm_f"] = r.parallel_norm_f;
    j["per_state_failure"] = r.per_state_failure;
    j["per_state_success"] = r.per_state_success;
    return j;
}

inline void write_report_table(std::ostream &out, const StrategyReport &r) {
    auto row = [&](const char *key, const std::string &value) {
        out << std::left << std::setw(18) << key << value << '\n';
    };
    row("parallel_norm_f", fmt12(r.parallel_norm_f));
    row("overlap_S", fmt12(r.overlap_S));
    row("q_sqm1", fmt12(r.q_sqm1));
    row("q_sqm2", fmt12(r.q_sqm2));
    row("q_povm", r.q_povm ? fmt12(*r.q_povm) : "-");
    row("regime", to_string(r.regime));
    row("optimal_q1", fmt12(r.optimal_q1));
    row("optimal_Q", fmt12(r.optimal_Q));
    row("average_success", fmt12(r.average_success));
    out << "state  failure q_i      success p_i\n";
    for (std::size_t i = 0; i < r.per_state_failure.size(); ++i)
        out << std::left << std::setw(7) << i << std::setw(17) << fmt12(r.per_state_failure[i])
            << fmt12(r.per_state_success[i]) << '\n';
}

inline constexpr const char *kSweepHeader = "S,Q_sqm1,Q_sqm2,Q_povm,Q_opt,regime";

inline void write_sweep_csv(std::ostream &out, const std::vector<FailureCurveRow> &rows) {
    out << kSweepHeader << '\n';
    for (const auto &r : rows)
        out << fmt12(r.overlap_S) << ',' << fmt12(r.q_sqm1) << ',' << fmt12(r.q_sqm2) << ','
            << (r.q_povm ? fmt12(*r.q_povm) : std::string()) << ',' << fmt12(r.q_opt) << ','
            << to_string(r.regime) << '\n';
}

inline json simulation_json(const SimulationStats &st, const FilteringProblem &problem) {
    json states = json::array();
    for (std::size_t i = 0; i < st.counts.size(); ++i) {
        json counts, empirical, analytic, z;
        for (std::size_t k = 0; k < kOutcomeCount; ++k) {
            const char *label = to_string(static_cast<Outcome>(k));
            counts[label] = st.counts[i][k];
            empirical[label] = st.empirical_rates[i][k];
            analytic[label] = st.analytic_rates[i][k];
            z[label] = std::isfinite(st.z_scores[i][k]) ? json(st.z_scores[i][k])
                                                        : json(st.z_scores[i][k] > 0 ? "inf" : "-inf");
        }
        states.push_back({{"state", problem.original_index(i)},
                          {"prior", problem.prior(i)},
                          {"counts", counts},
                          {"empirical_rates", empirical},
                          {"analytic_rates", analytic},
                          {"z_scores", z}});
    }
    return {{"scheme", to_string(st.scheme_kind)},
            {"seed", st.seed},
            {"trials_per_state", st.trials_per_state},
            {"misidentifications", st.misidentifications()},
            {"empirical_Q", aggregate_failure(st, problem.priors())},
            {"analytic_Q", aggregate_failure(st.analytic_rates, problem.priors())},
            {"states", std::move(states)}};
}

inline void write_simulation_csv(std::ostream &out, const SimulationStats &st,
                                 const FilteringProblem &problem) {
    out << "state,prior,outcome,count,empirical,analytic,z\n";
    for (std::size_t i = 0; i < st.counts.size(); ++i)
        for (std::size_t k = 0; k < kOutcomeCount; ++k)
            out << problem.original_index(i) << ',' << fmt12(problem.prior(i)) << ','
                << to_string(static_cast<Outcome>(k)) << ',' << st.counts[i][k] << ','
                << fmt12(st.empirical_rates[i][k]) << ',' << fmt12(st.analytic_rates[i][k]) << ','
                << fmt12(st.z_scores[i][k]) << '\n';
}

inline void write_simulation_table(std::ostream &out, const SimulationStats &st,
                                   const FilteringProblem &problem) {
    out << "scheme " << to_string(st.scheme_kind) << ", seed " << st.seed << ", "
        << st.trials_per_state << " trials per state\n";
    out << std::left << std::setw(7) << "state" << std::setw(15) << "outcome" << std::setw(12)
        << "count" << std::setw(16) << "empirical" << std::setw(16) << "analytic"
        << "z\n";
    for (std::size_t i = 0; i < st.counts.size(); ++i)
        for (std::size_t k = 0; k < kOutcomeCount; ++k)
            out << std::left << std::setw(7) << problem.original_index(i) << std::setw(15)
                << to_string(static_cast<Outcome>(k)) << std::setw(12) << st.counts[i][k]
                << std::setw(16) << fmt12(st.empirical_rates[i][k]) << std::setw(16)
                << fmt12(st.analytic_rates[i][k]) << fmt12(st.z_scores[i][k]) << '\n';
    out << "empirical Q        " << fmt12(aggregate_failure(st, problem.priors())) << '\n';
    out << "analytic Q         " << fmt12(aggregate_failure(st.analytic_rates, problem.priors()))
        << '\n';
    out << "misidentifications " << st.misidentifications() << '\n';
}

}  // namespace qfilter::io
