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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "driftforest/dataset.hpp"

namespace driftforest {

/// An ordered experiment stream. Evaluation labels may only be used for
/// training after prediction, and only when the sample is trainable.
struct StreamPlan {
    std::vector<SnapshotSample> pretrain;
    std::vector<SnapshotSample> evaluation;
    std::string description;
    std::uint64_t seed = 0;
    std::optional<double> mask_fraction;
};

/// Seeded shuffle; the first floor(ratio * N) samples form the pretrain
/// segment. Both segments are then ordered by timestamp_id.
StreamPlan random_split(const std::vector<SnapshotSample>& samples, double ratio,
                        std::uint64_t seed, bool evaluation_trainable = false);

/// Pretrain = years <= pivot_year, evaluation = later years, each ordered by
/// (year, timestamp_id).
StreamPlan temporal_split(const std::vector<SnapshotSample>& samples, int pivot_year);

/// Reveals round-half-up(fraction * #infected) infected evaluation labels,
/// chosen uniformly by seed. Benign evaluation samples stay trainable.
StreamPlan mask_labels(const StreamPlan& plan, double fraction, std::uint64_t seed);

// Manifest: key=value lines recording segment membership, trainable flags,
// seed and mask fraction. rebuild_plan resolves ids against a dataset.
std::string format_manifest(const StreamPlan& plan);

struct PlanManifest {
    std::string description;
    std::uint64_t seed = 0;
    std::optional<double> mask_fraction;
    std::vector<std::uint64_t> pretrain_ids;
    std::vector<std::uint64_t> evaluation_ids;
    std::vector<std::uint64_t> untrainable_ids;
};

PlanManifest parse_manifest(std::string_view contents);
StreamPlan rebuild_plan(const PlanManifest& manifest,
                        const std::vector<SnapshotSample>& samples);

}  // namespace driftforest
