// Copyright 2026 The driftforest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "driftforest/eval.hpp"
#include "driftforest/forest.hpp"
#include "driftforest/stream.hpp"

namespace driftforest {

// The three experiment protocols, shared by the CLI and the acceptance
// suite. Every RNG stream is derived from `seed` by component name:
//   "experiment.split", "experiment.mask" (shared by every fraction),
//   "experiment.batch_forest", "experiment.adaptive_forest".

struct ExperimentConfig {
    ForestConfig forest;  // seed and mode are overridden per model
    double ratio = 0.6;
    int pivot_year = 1;
    std::vector<double> fractions = {0.0, 0.25, 0.5, 0.75, 1.0};
    std::size_t window = 250;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;  // scarcity sweep parallelism
};

ForestConfig batch_forest_config(const ExperimentConfig& config);
ForestConfig adaptive_forest_config(const ExperimentConfig& config);

struct TwoModelResult {
    StreamPlan plan;
    MetricsReport batch;
    MetricsReport online;
    ReportComparison comparison;  // online vs batch
    std::size_t replacements = 0;
};

/// Random split; both models fit on the training part (the adaptive one
/// one instance at a time) and only predict on the test part.
TwoModelResult run_batch_experiment(const std::vector<SnapshotSample>& samples,
                                    const ExperimentConfig& config);

/// Temporal split; the batch forest stays frozen while the adaptive forest
/// runs test-then-train over the later years.
TwoModelResult run_online_experiment(const std::vector<SnapshotSample>& samples,
                                     const ExperimentConfig& config);

struct ScarcityPoint {
    double fraction = 0.0;
    MetricsReport report;
    std::size_t replacements = 0;
};

/// Temporal split with a share of infected evaluation labels revealed, one
/// independent adaptive forest per fraction.
std::vector<ScarcityPoint> run_scarcity_sweep(const std::vector<SnapshotSample>& samples,
                                              const ExperimentConfig& config);

}  // namespace driftforest
