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
 * @file cli.hpp
 * The `qfilter` command line: strategies, sweep, boolean, simulate.
 *
 * run() drives a whole invocation against caller-supplied streams and returns
 * the process exit code, so the commands are testable in-process.
 */
#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qfilter/boolean.hpp"
#include "qfilter/ensemble.hpp"
#include "qfilter/error.hpp"
#include "qfilter/io.hpp"
#include "qfilter/neumark.hpp"
#include "qfilter/simulate.hpp"
#include "qfilter/strategies.hpp"

namespace qfilter::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitInvalid = 2,
    kExitInfeasible = 3,
    kExitNumerical = 4,
};

inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidInput:
    case ErrorKind::InvalidState:
    case ErrorKind::ResourceLimit:
        return kExitInvalid;
    case ErrorKind::Infeasible:
        return kExitInfeasible;
    case ErrorKind::Numerical:
        return kExitNumerical;
    }
    return kExitInvalid;
}

/// Largest ensemble for which `strategies` verifies POVM constructibility.
inline constexpr std::size_t kConstructionCheckLimit = 1024;

struct PovmCheck {
    bool checked = false;
    bool feasible = true;
    double min_eigenvalue = 0.0;
};

/// Input Gram sanity plus success Gram feasibility at the reported optimum.
inline PovmCheck check_construction(const FilteringProblem &problem, const StrategyReport &r) {
    PovmCheck c;
    if (problem.size() > kConstructionCheckLimit)
        return c;
    c.checked = true;
    const double gmin = min_eigenvalue(gram_matrix(problem));
    if (gmin < -1e-10)
        fail(ErrorKind::Numerical,
             "input Gram matrix is not positive semidefinite (min eigenvalue " +
                 std::to_string(gmin) + ")");
    const SuccessGram sg = success_gram(problem, failure_allocations(problem, r.optimal_q1));
    c.feasible = sg.feasible;
    c.min_eigenvalue = sg.min_eigenvalue;
    return c;
}

namespace detail {

struct Options {
    // strategies / simulate
    std::string input;
    std::string format = "json";
    // sweep
    double eta1 = 0.4;
    double f = 0.25;
    double smin = 0.0;
    double smax = 0.6;
    int steps = 121;
    std::string out;
    // boolean
    unsigned n = 2;
    unsigned k = 2;
    std::string prior_mode = "equal-states-basis";
    double custom_eta1 = 0.0;
    std::string variant = "basis";
    std::string export_path;
    // simulate
    std::string strategy = "povm";
    long long trials = 10000;
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

inline int cmd_strategies(const Options &o, std::ostream &out, std::ostream &err) {
    const FilteringProblem problem = io::read_ensemble(o.input);
    const StrategyReport r = optimal_filtering(problem);
    const PovmCheck check = check_construction(problem, r);
    if (o.format == "table") {
        io::write_report_table(out, r);
        out << std::left << std::setw(18) << "povm_construction"
            << (!check.checked ? "unchecked" : check.feasible ? "feasible" : "infeasible") << '\n';
    } else {
        io::json j = io::report_json(r);
        j["povm_construction"] = !check.checked ? "unchecked" : check.feasible ? "feasible" : "infeasible";
        out << j.dump(2) << '\n';
    }
    if (!check.feasible) {
        err << "error: the optimal allocation q1 = " << io::fmt12(r.optimal_q1)
            << " has no unitary realization (success Gram min eigenvalue "
            << check.min_eigenvalue << ")\n";
        return kExitInfeasible;
    }
    return kExitOk;
}

inline int cmd_sweep(const Options &o, std::ostream &out, std::ostream &) {
    if (!(o.smin >= 0.0) || !(o.smax > o.smin))
        fail(ErrorKind::InvalidInput, "sweep needs 0 <= smin < smax");
    if (o.steps < 2)
        fail(ErrorKind::InvalidInput, "sweep needs at least 2 steps");
    check_strategy_inputs(o.eta1, o.f, o.smin);
    std::vector<double> grid(static_cast<std::size_t>(o.steps));
    for (int i = 0; i < o.steps; ++i)
        grid[static_cast<std::size_t>(i)] = o.smin + (o.smax - o.smin) * i / (o.steps - 1);
    grid.back() = o.smax;
    const auto rows = failure_curve(o.eta1, o.f, grid);
    if (o.out.empty()) {
        io::write_sweep_csv(out, rows);
        return kExitOk;
    }
    std::ofstream file(o.out);
    if (!file)
        fail(ErrorKind::InvalidInput, "cannot write '" + o.out + "'");
    io::write_sweep_csv(file, rows);
    file.flush();
    if (!file)
        fail(ErrorKind::InvalidInput, "failed writing '" + o.out + "'");
    return kExitOk;
}

inline PriorSpec parse_prior(const Options &o) {
    static const std::map<std::string, PriorMode> modes{
        {"equal-states-basis", PriorMode::EqualStatesBasis},
        {"equal-sets", PriorMode::EqualSets},
        {"equal-states-full", PriorMode::EqualStatesFull},
        {"custom", PriorMode::Custom},
    };
    auto it = modes.find(o.prior_mode);
    if (it == modes.end())
        fail(ErrorKind::InvalidInput, "unknown prior mode '" + o.prior_mode + "'");
    return {it->second, o.custom_eta1};
}

inline int cmd_boolean(const Options &o, std::ostream &out, std::ostream &) {
    const ComplementVariant variant =
        o.variant == "full" ? ComplementVariant::Full : ComplementVariant::Basis;
    if (o.variant != "full" && o.variant != "basis")
        fail(ErrorKind::InvalidInput, "variant must be 'basis' or 'full'");
    const PriorSpec prior = parse_prior(o);
    const FilteringProblem problem = boolean_problem(o.n, o.k, prior, variant);
    const StrategyReport r = optimal_filtering(problem);
    const WkSpec w = wk_spec(o.n, o.k);
    const double eta1 = problem.target_prior();
    const double s_closed = average_overlap_closed_form(o.n, o.k, eta1);
    const PovmAdvantage adv = povm_advantage(o.n, o.k);
    const QueryCounts counts = classical_query_count(o.n, o.k);
    const bool approx_window = approximate_povm_window(o.n, o.k, eta1);

    if (!o.export_path.empty())
        io::write_ensemble(problem, o.export_path);

    if (o.format == "table") {
        auto row = [&](const char *key, const std::string &value) {
            out << std::left << std::setw(26) << key << value << '\n';
        };
        row("n", std::to_string(o.n));
        row("k", std::to_string(o.k));
        row("variant", o.variant);
        row("complement_states", std::to_string(problem.size() - 1));
        row("eta1", io::fmt12(eta1));
        row("f_k", io::fmt12(w.f_k));
        row("S_closed_form", io::fmt12(s_closed));
        io::write_report_table(out, r);
        row("approx_povm_window", approx_window ? "yes" : "no");
        row("advantage_exact_ratio", io::fmt12(adv.exact_ratio));
        row("advantage_approx_ratio", io::fmt12(adv.approx_ratio));
        row("advantage_relative_gap", io::fmt12(adv.relative_gap));
        row("classical_dj_queries", std::to_string(counts.balanced_vs_constant));
        row("classical_wk_queries", std::to_string(counts.wk_vs_balanced));
        return kExitOk;
    }
    io::json j;
    j["n"] = o.n;
    j["k"] = o.k;
    j["variant"] = o.variant;
    j["prior_mode"] = o.prior_mode;
    j["complement_states"] = problem.size() - 1;
    j["eta1"] = eta1;
    j["f_k"] = w.f_k;
    j["f_k_geometric"] = w.f_k_geometric;
    j["S_closed_form"] = s_closed;
    j["report"] = io::report_json(r);
    j["approx_povm_window"] = approx_window;
    j["povm_advantage"] = {{"q_povm", adv.q_povm},
                           {"q_sqm", adv.q_sqm},
                           {"exact_ratio", adv.exact_ratio},
                           {"approx_ratio", adv.approx_ratio},
                           {"relative_gap", adv.relative_gap}};
    j["classical_queries"] = {{"balanced_vs_constant", counts.balanced_vs_constant},
                              {"wk_vs_balanced", counts.wk_vs_balanced}};
    out << j.dump(2) << '\n';
    return kExitOk;
}

inline int cmd_simulate(const Options &o, std::ostream &out, std::ostream &) {
    if (o.trials < 1)
        fail(ErrorKind::InvalidInput, "--trials must be at least 1");
    static const std::map<std::string, SchemeKind> kinds{
        {"sqm1", SchemeKind::Sqm1}, {"sqm2", SchemeKind::Sqm2}, {"povm", SchemeKind::Povm}};
    auto it = kinds.find(o.strategy);
    if (it == kinds.end())
        fail(ErrorKind::InvalidInput, "unknown strategy '" + o.strategy + "'");
    const FilteringProblem problem = io::read_ensemble(o.input);
    const MeasurementScheme scheme = make_scheme(problem, it->second);
    const SimulationStats st =
        simulate(scheme, problem, static_cast<std::uint64_t>(o.trials), o.seed, o.workers);
    if (o.format == "table")
        io::write_simulation_table(out, st, problem);
    else if (o.format == "csv")
        io::write_simulation_csv(out, st, problem);
    else
        out << io::simulation_json(st, problem).dump(2) << '\n';
    return kExitOk;
}

}  // namespace detail

inline int run(std::vector<std::string> args, std::ostream &out, std::ostream &err) {
    detail::Options o;
    CLI::App app{"Optimal unambiguous quantum state filtering", "qfilter"};
    app.require_subcommand(1);

    auto *strategies = app.add_subcommand("strategies", "failure probabilities of every strategy");
    strategies->add_option("input", o.input, "ensemble JSON file")->required();
    strategies->add_option("--format", o.format)->check(CLI::IsMember({"json", "table"}));

    auto *sweep = app.add_subcommand("sweep", "failure probability versus S as CSV");
    sweep->add_option("--eta1", o.eta1, "target prior")->capture_default_str();
    sweep->add_option("--f", o.f, "squared parallel norm of the target")->capture_default_str();
    sweep->add_option("--smin", o.smin)->capture_default_str();
    sweep->add_option("--smax", o.smax)->capture_default_str();
    sweep->add_option("--steps", o.steps)->capture_default_str();
    sweep->add_option("--out", o.out, "output CSV path (stdout if omitted)");
    sweep->add_option("--format", o.format)->check(CLI::IsMember({"csv"}));

    auto *boolean = app.add_subcommand("boolean", "W_k versus balanced functions");
    boolean->add_option("--n", o.n)->capture_default_str();
    boolean->add_option("--k", o.k)->capture_default_str();
    boolean->add_option("--prior-mode", o.prior_mode)
        ->check(CLI::IsMember({"equal-states-basis", "equal-sets", "equal-states-full", "custom"}))
        ->capture_default_str();
    boolean->add_option("--eta1", o.custom_eta1, "target prior for --prior-mode custom");
    boolean->add_option("--variant", o.variant)
        ->check(CLI::IsMember({"basis", "full"}))
        ->capture_default_str();
    boolean->add_option("--export", o.export_path, "write the ensemble file here");
    boolean->add_option("--format", o.format)->check(CLI::IsMember({"json", "table"}));

    auto *sim = app.add_subcommand("simulate", "Monte Carlo of one measurement scheme");
    sim->add_option("input", o.input, "ensemble JSON file")->required();
    sim->add_option("--strategy", o.strategy)
        ->check(CLI::IsMember({"sqm1", "sqm2", "povm"}))
        ->capture_default_str();
    sim->add_option("--trials", o.trials, "trials per state")->capture_default_str();
    sim->add_option("--seed", o.seed)->capture_default_str();
    sim->add_option("--workers", o.workers)->capture_default_str();
    sim->add_option("--format", o.format)->check(CLI::IsMember({"json", "table", "csv"}));

    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    }

    try {
        if (strategies->parsed())
            return detail::cmd_strategies(o, out, err);
        if (sweep->parsed())
            return detail::cmd_sweep(o, out, err);
        if (boolean->parsed())
            return detail::cmd_boolean(o, out, err);
        return detail::cmd_simulate(o, out, err);
    } catch (const Error &e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return exit_code_for(e.kind());
    }
}

inline int run(int argc, const char *const *argv, std::ostream &out = std::cout,
               std::ostream &err = std::cerr) {
    return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace qfilter::cli
