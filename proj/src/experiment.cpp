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

#include "driftforest/experiment.hpp"

#include <future>

#include "driftforest/error.hpp"

namespace driftforest {

ForestConfig batch_forest_config(const ExperimentConfig& config) {
    ForestConfig forest = config.forest;
    forest.mode = ForestMode::Batch;
    forest.seed = derive_seed(config.seed, "experiment.batch_forest");
    return forest;
}

ForestConfig adaptive_forest_config(const ExperimentConfig& config) {
    ForestConfig forest = config.forest;
    forest.mode = ForestMode::Adaptive;
    forest.seed = derive_seed(config.seed, "experiment.adaptive_forest");
    return forest;
}

namespace {

std::size_t width_of(const std::vector<SnapshotSample>& samples) {
    if (samples.empty()) throw Error(ErrorCode::EmptyTable, "dataset is empty");
    return samples.front().features().size();
}

TwoModelResult score_both(StreamPlan plan, const ExperimentConfig& config, bool online_learns) {
    const std::size_t width = plan.pretrain.empty() ? width_of(plan.evaluation)
                                                    : width_of(plan.pretrain);
    TwoModelResult result;
    ForestModel batch = batch_fit(plan.pretrain, batch_forest_config(config));
    result.batch = prequential_run(batch, plan, {.window = config.window});

    ForestModel online = make_adaptive_forest(width, adaptive_forest_config(config));
    arf_pretrain(online, plan.pretrain);
    result.online = prequential_run(online, plan, {.window = config.window, .learn = online_learns});
    result.replacements = online.total_replacements();
    result.comparison = compare_reports(result.online, result.batch);
    result.plan = std::move(plan);
    return result;
}

}  // namespace

TwoModelResult run_batch_experiment(const std::vector<SnapshotSample>& samples,
                                    const ExperimentConfig& config) {
    StreamPlan plan = random_split(samples, config.ratio, derive_seed(config.seed, "experiment.split"));
    plan.seed = config.seed;
    return score_both(std::move(plan), config, false);
}

TwoModelResult run_online_experiment(const std::vector<SnapshotSample>& samples,
                                     const ExperimentConfig& config) {
    StreamPlan plan = temporal_split(samples, config.pivot_year);
    plan.seed = config.seed;
    return score_both(std::move(plan), config, true);
}

std::vector<ScarcityPoint> run_scarcity_sweep(const std::vector<SnapshotSample>& samples,
                                              const ExperimentConfig& config) {
    const StreamPlan plan = temporal_split(samples, config.pivot_year);
    ForestModel pretrained = make_adaptive_forest(width_of(samples), adaptive_forest_config(config));
    arf_pretrain(pretrained, plan.pretrain);

    const auto run_one = [&](std::size_t index) {
        StreamPlan masked = mask_labels(plan, config.fractions[index],
                                        derive_seed(config.seed, "experiment.mask"));
        masked.seed = config.seed;
        ForestModel model = pretrained;
        ScarcityPoint point;
        point.fraction = config.fractions[index];
        point.report = prequential_run(model, masked, {.window = config.window});
        point.replacements = model.total_replacements();
        return point;
    };

    std::vector<ScarcityPoint> points(config.fractions.size());
    const std::size_t jobs = std::max<std::size_t>(1, config.jobs);
    for (std::size_t start = 0; start < points.size(); start += jobs) {
        std::vector<std::future<ScarcityPoint>> batch;
        for (std::size_t i = start; i < std::min(points.size(), start + jobs); ++i) {
            batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                       run_one, i));
        }
        for (std::size_t k = 0; k < batch.size(); ++k) points[start + k] = batch[k].get();
    }
    return points;
}

}  // namespace driftforest
