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

// Filters |w_2> out of the n = 2 Walsh basis: compares the three strategies,
// builds the optimal POVM, and checks it by simulation.

#include <cstdio>

#include "qfilter/qfilter.hpp"

int main() {
    using namespace qfilter;

    const FilteringProblem problem =
        boolean_problem(2, 2, {PriorMode::EqualStatesBasis}, ComplementVariant::Basis);
    const StrategyReport r = optimal_filtering(problem);
    std::printf("S = %.6f  f = %.6f\n", r.overlap_S, r.parallel_norm_f);
    std::printf("Q_sqm1 = %.6f  Q_sqm2 = %.6f  Q_povm = %.6f  (%s)\n", r.q_sqm1, r.q_sqm2,
                r.q_povm.value_or(-1.0), to_string(r.regime));

    const FailureAllocation alloc = failure_allocations(problem, r.optimal_q1);
    const NeumarkModel model = build_neumark(problem, alloc);
    const MeasurementScheme povm = povm_elements(model);
    std::printf("POVM completeness error %.2e\n", povm.completeness_error());

    for (std::size_t i = 0; i < problem.size(); ++i) {
        const OutcomeDistribution d = outcome_distribution(povm, problem.state(i));
        std::printf("state %zu:", i);
        for (const auto &e : d.entries)
            std::printf("  %s %.6f", to_string(e.label), e.probability);
        std::printf("\n");
    }

    const SimulationStats st = simulate(povm, problem, 100000, 42);
    std::printf("simulated Q = %.6f, analytic Q = %.6f, misidentifications %llu\n",
                aggregate_failure(st, problem.priors()), r.optimal_Q,
                static_cast<unsigned long long>(st.misidentifications()));
    return 0;
}
