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

#include "qfilter/cli.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"

#include "test_support.hpp"

using namespace qfilter;
namespace fs = std::filesystem;
using io::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

std::string sample(const char *name) { return std::string(QFILTER_SAMPLES_DIR) + "/" + name; }

class TempDir {
  public:
    TempDir() {
        path_ = fs::temp_directory_path() /
                ("qfilter_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                 ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string &name) const { return (path_ / name).string(); }

  private:
    fs::path path_;
};

std::string write_text(const TempDir &dir, const std::string &name, const std::string &text) {
    const std::string p = dir.file(name);
    std::ofstream(p) << text;
    return p;
}

std::vector<std::string> split_lines(const std::string &s) {
    std::vector<std::string> lines;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);)
        lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string &line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ','))
        cells.push_back(cell);
    if (!line.empty() && line.back() == ',')
        cells.emplace_back();
    return cells;
}

int run_binary(const std::string &args) {
    const std::string cmd = std::string(QFILTER_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(CliStrategies, json_report_schema) {
    const Result r = run_cli({"strategies", sample("three_state.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    for (const char *key : {"q_sqm1", "q_sqm2", "q_povm", "regime", "optimal_Q", "optimal_q1"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_NEAR(j["q_sqm1"].get<double>(), 0.5, 1e-12);
    EXPECT_NEAR(j["q_povm"].get<double>(), 0.4, 1e-12);
    EXPECT_EQ(j["povm_construction"], "feasible");
}

TEST(CliStrategies, table_format_and_outside_window) {
    TempDir dir;
    const std::string two = write_text(
        dir, "two.json",
        R"({"dimension": 2, "target_index": 0, "states": [
             {"amplitudes": [[1, 0], [0, 0]], "prior": 0.1},
             {"amplitudes": [[0.9, 0], [0.4358898943540674, 0]], "prior": 0.9}]})");
    const Result t = run_cli({"strategies", two, "--format", "table"});
    ASSERT_EQ(t.code, 0) << t.err;
    EXPECT_NE(t.out.find("SQM1_BOUNDARY"), std::string::npos);
    const Result j = run_cli({"strategies", two});
    EXPECT_TRUE(json::parse(j.out)["q_povm"].is_null());
}

TEST(CliStrategies, invalid_inputs_exit_2) {
    TempDir dir;
    const std::string bad_priors = write_text(
        dir, "priors.json",
        R"({"dimension": 2, "target_index": 0, "states": [
             {"amplitudes": [[1, 0], [0, 0]], "prior": 0.4},
             {"amplitudes": [[0, 0], [1, 0]], "prior": 0.5}]})");
    const Result r = run_cli({"strategies", bad_priors});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("prior"), std::string::npos) << r.err;

    const std::string unknown = write_text(
        dir, "unknown.json",
        R"({"dimension": 2, "target_index": 0, "comment": "x", "states": [
             {"amplitudes": [[1, 0], [0, 0]], "prior": 0.5},
             {"amplitudes": [[0, 0], [1, 0]], "prior": 0.5}]})");
    const Result u = run_cli({"strategies", unknown});
    EXPECT_EQ(u.code, 2);
    EXPECT_NE(u.err.find("comment"), std::string::npos) << u.err;

    const std::string unknown_state = write_text(
        dir, "unknown_state.json",
        R"({"dimension": 2, "target_index": 0, "states": [
             {"amplitudes": [[1, 0], [0, 0]], "prior": 0.5, "label": "a"},
             {"amplitudes": [[0, 0], [1, 0]], "prior": 0.5}]})");
    EXPECT_EQ(run_cli({"strategies", unknown_state}).code, 2);

    EXPECT_EQ(run_cli({"strategies", write_text(dir, "broken.json", "{\"dimension\": ")}).code, 2);
    EXPECT_EQ(run_cli({"strategies", dir.file("missing.json")}).code, 2);

    const std::string unnormalized = write_text(
        dir, "norm.json",
        R"({"dimension": 2, "target_index": 0, "states": [
             {"amplitudes": [[1, 0], [1, 0]], "prior": 0.5},
             {"amplitudes": [[0, 0], [1, 0]], "prior": 0.5}]})");
    EXPECT_EQ(run_cli({"strategies", unnormalized}).code, 2);

    const std::string bad_target = write_text(
        dir, "target.json",
        R"({"dimension": 2, "target_index": 5, "states": [
             {"amplitudes": [[1, 0], [0, 0]], "prior": 0.5},
             {"amplitudes": [[0, 0], [1, 0]], "prior": 0.5}]})");
    EXPECT_EQ(run_cli({"strategies", bad_target}).code, 2);
}

TEST(CliStrategies, target_index_and_complex_amplitudes) {
    const Result r = run_cli({"strategies", sample("complex_three.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    // target (1+i, 1, -i)/2 against (0.6, 0.8i, 0) and (0, 0.6, 0.8i)
    const double c1 = std::norm(std::conj(Complex(0.5, 0.5)) * 0.6 + 0.5 * Complex(0, 0.8));
    const double c2 = std::norm(0.5 * 0.6 + std::conj(Complex(0, -0.5)) * Complex(0, 0.8));
    EXPECT_NEAR(j["overlap_S"].get<double>(), 0.3 * c1 + 0.3 * c2, 1e-12);
    EXPECT_NEAR(j["q_sqm1"].get<double>(), 0.4 + 0.3 * c1 + 0.3 * c2, 1e-12);
}

TEST(CliBoolean, export_round_trip) {
    TempDir dir;
    const std::string path = dir.file("w22.json");
    const Result b = run_cli({"boolean", "--n", "2", "--k", "2", "--prior-mode", "equal-states-basis",
                              "--export", path});
    ASSERT_EQ(b.code, 0) << b.err;
    const json bj = json::parse(b.out);
    EXPECT_NEAR(bj["report"]["optimal_Q"].get<double>(), std::sqrt(3.0) / 4.0, 1e-12);

    const Result s = run_cli({"strategies", path});
    ASSERT_EQ(s.code, 0) << s.err;
    const json sj = json::parse(s.out);
    EXPECT_NEAR(sj["optimal_Q"].get<double>(), 0.4330127, 1e-6);
    for (const char *key : {"q_sqm1", "q_sqm2", "q_povm", "optimal_Q", "optimal_q1", "overlap_S"})
        EXPECT_NEAR(sj[key].get<double>(), bj["report"][key].get<double>(), 1e-12) << key;
    EXPECT_EQ(sj["regime"], bj["report"]["regime"]);
}

TEST(CliBoolean, round_trip_full_and_custom) {
    TempDir dir;
    for (const std::vector<std::string> &extra :
         {std::vector<std::string>{"--n", "3", "--k", "2", "--variant", "full"},
          std::vector<std::string>{"--n", "4", "--k", "3", "--prior-mode", "custom", "--eta1", "0.07"},
          std::vector<std::string>{"--n", "3", "--k", "3", "--prior-mode", "equal-sets"}}) {
        const std::string path = dir.file("e.json");
        std::vector<std::string> args{"boolean", "--export", path};
        args.insert(args.end(), extra.begin(), extra.end());
        const Result b = run_cli(args);
        ASSERT_EQ(b.code, 0) << b.err;
        const Result s = run_cli({"strategies", path});
        ASSERT_EQ(s.code, 0) << s.err;
        const json bj = json::parse(b.out)["report"];
        const json sj = json::parse(s.out);
        for (const char *key : {"q_sqm1", "q_sqm2", "optimal_Q"})
            EXPECT_NEAR(sj[key].get<double>(), bj[key].get<double>(), 1e-12) << key;
    }
}

TEST(CliBoolean, counts_regimes_and_errors) {
    const Result r = run_cli({"boolean", "--n", "3", "--k", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_EQ(j["classical_queries"]["balanced_vs_constant"], 5);
    EXPECT_EQ(j["classical_queries"]["wk_vs_balanced"], 7);  // 8 * (1/2 + 1/4) + 1
    EXPECT_NEAR(j["f_k"].get<double>(), 0.75, 1e-15);

    const Result full = run_cli(
        {"boolean", "--n", "4", "--k", "2", "--prior-mode", "equal-states-full", "--variant", "full"});
    ASSERT_EQ(full.code, 0) << full.err;
    EXPECT_EQ(json::parse(full.out)["report"]["regime"], "SQM1_BOUNDARY");

    const Result table = run_cli({"boolean", "--n", "2", "--k", "2", "--format", "table"});
    EXPECT_EQ(table.code, 0);
    EXPECT_NE(table.out.find("classical_wk_queries"), std::string::npos);

    EXPECT_EQ(run_cli({"boolean", "--n", "3", "--k", "4"}).code, 2);
    EXPECT_EQ(run_cli({"boolean", "--n", "5", "--k", "2", "--variant", "full"}).code, 2);
    EXPECT_EQ(run_cli({"boolean", "--n", "3", "--k", "1"}).code, 2);
    EXPECT_EQ(run_cli({"boolean", "--prior-mode", "custom", "--eta1", "1.5"}).code, 2);
    EXPECT_EQ(run_cli({"boolean", "--variant", "partial"}).code, 2);
}

TEST(CliSweep, golden_header_and_window_rows) {
    const Result r = run_cli({"sweep", "--eta1", "0.4", "--f", "0.25", "--smin", "0", "--smax", "0.6",
                              "--steps", "121"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto lines = split_lines(r.out);
    ASSERT_EQ(lines.size(), 122u);
    EXPECT_EQ(lines[0], "S,Q_sqm1,Q_sqm2,Q_povm,Q_opt,regime");
    for (std::size_t i = 1; i < lines.size(); ++i)
        EXPECT_EQ(split_csv(lines[i]).size(), 6u) << lines[i];

    // row 21 is S = 0.1
    const auto row = split_csv(lines[21]);
    EXPECT_NEAR(std::stod(row[0]), 0.1, 1e-12);
    EXPECT_NEAR(std::stod(row[3]), 0.4, 1e-12);
    EXPECT_EQ(row[5], "POVM");

    // regime changes between the rows straddling 0.025 and 0.4
    std::vector<std::pair<double, std::string>> changes;
    for (std::size_t i = 2; i < lines.size(); ++i) {
        const auto a = split_csv(lines[i - 1]);
        const auto b = split_csv(lines[i]);
        if (a[5] != b[5])
            changes.emplace_back(std::stod(b[0]), b[5]);
    }
    ASSERT_EQ(changes.size(), 2u);
    EXPECT_NEAR(changes[0].first, 0.025, 1e-12);  // ties resolve to POVM
    EXPECT_EQ(changes[0].second, "POVM");
    EXPECT_NEAR(changes[1].first, 0.405, 1e-12);
    EXPECT_EQ(changes[1].second, "SQM1_BOUNDARY");
    // outside the window Q_povm is empty
    EXPECT_TRUE(split_csv(lines[1])[3].empty());
}

TEST(CliSweep, writes_file_and_validates) {
    TempDir dir;
    const std::string path = dir.file("sweep.csv");
    ASSERT_EQ(run_cli({"sweep", "--out", path, "--steps", "5"}).code, 0);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, io::kSweepHeader);

    EXPECT_EQ(run_cli({"sweep", "--smin", "0", "--smax", "0", "--steps", "2"}).code, 2);
    EXPECT_EQ(run_cli({"sweep", "--steps", "1"}).code, 2);
    EXPECT_EQ(run_cli({"sweep", "--eta1", "1.5"}).code, 2);
    EXPECT_EQ(run_cli({"sweep", "--format", "json"}).code, 2);
    EXPECT_EQ(run_cli({"sweep", "--out", dir.file("no/such/dir/x.csv")}).code, 2);
}

TEST(CliSimulate, deterministic_output) {
    const std::vector<std::string> args{"simulate", sample("walsh_n2.json"), "--strategy", "povm",
                                        "--trials", "5000", "--seed", "17"};
    const Result a = run_cli(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, run_cli(args).out);
    for (const char *fmt : {"table", "csv"}) {
        std::vector<std::string> with = args;
        with.insert(with.end(), {"--format", fmt});
        const Result x = run_cli(with);
        EXPECT_EQ(x.code, 0);
        EXPECT_EQ(x.out, run_cli(with).out);
    }
    std::vector<std::string> parallel = args;
    parallel.insert(parallel.end(), {"--workers", "3"});
    EXPECT_EQ(run_cli(parallel).out, a.out);
}

TEST(CliSimulate, walsh_statistics) {
    const Result r = run_cli({"simulate", sample("walsh_n2.json"), "--strategy", "povm", "--trials",
                              "100000", "--seed", "42"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_NEAR(j["empirical_Q"].get<double>(), 0.4330, 0.005);
    EXPECT_EQ(j["misidentifications"], 0);
    EXPECT_EQ(j["states"].size(), 4u);
}

TEST(CliSimulate, error_exit_codes) {
    EXPECT_EQ(run_cli({"simulate", sample("three_state.json"), "--trials", "0"}).code, 2);
    EXPECT_EQ(run_cli({"simulate", sample("three_state.json"), "--trials", "-3"}).code, 2);
    EXPECT_EQ(run_cli({"simulate", sample("three_state.json"), "--strategy", "best"}).code, 2);
    EXPECT_EQ(run_cli({"simulate", sample("target_in_span.json"), "--strategy", "sqm2"}).code, 3);
    EXPECT_EQ(run_cli({"simulate", sample("target_in_span.json"), "--strategy", "sqm1"}).code, 0);
}

TEST(CliRun, usage_errors_and_help) {
    EXPECT_EQ(run_cli({}).code, 2);
    EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
    EXPECT_EQ(run_cli({"strategies"}).code, 2);
    const Result h = run_cli({"--help"});
    EXPECT_EQ(h.code, 0);
    EXPECT_NE(h.out.find("simulate"), std::string::npos);
}

TEST(CliRun, exit_code_mapping) {
    EXPECT_EQ(cli::exit_code_for(ErrorKind::InvalidInput), 2);
    EXPECT_EQ(cli::exit_code_for(ErrorKind::InvalidState), 2);
    EXPECT_EQ(cli::exit_code_for(ErrorKind::ResourceLimit), 2);
    EXPECT_EQ(cli::exit_code_for(ErrorKind::Infeasible), 3);
    EXPECT_EQ(cli::exit_code_for(ErrorKind::Numerical), 4);
}

TEST(EnsembleIo, round_trip_is_exact) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const FilteringProblem p = qfilter::testing::random_problem(rng, 5, 6, 3);
        const FilteringProblem q = io::parse_ensemble(io::ensemble_json(p));
        ASSERT_EQ(q.size(), p.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            EXPECT_EQ(q.prior(i), p.prior(i));
            EXPECT_EQ((q.state(i).amplitudes() - p.state(i).amplitudes()).norm(), 0.0);
        }
        EXPECT_NEAR(optimal_filtering(q).optimal_Q, optimal_filtering(p).optimal_Q, 1e-12);
    }
}

TEST(Binary, exit_codes) {
    TempDir dir;
    EXPECT_EQ(run_binary("strategies " + sample("three_state.json")), 0);
    EXPECT_EQ(run_binary("sweep --steps 1"), 2);
    EXPECT_EQ(run_binary("simulate " + sample("target_in_span.json") + " --strategy sqm2"), 3);
    EXPECT_EQ(run_binary("simulate " + sample("three_state.json") + " --trials 0"), 2);
    EXPECT_EQ(run_binary("--help"), 0);
    EXPECT_EQ(run_binary(""), 2);
}
