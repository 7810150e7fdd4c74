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
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "driftforest/adwin.hpp"
#include "driftforest/dataset.hpp"
#include "driftforest/hoeffding.hpp"
#include "driftforest/rng.hpp"

namespace driftforest {

enum class ForestMode : std::uint8_t { Batch = 0, Adaptive = 1 };

struct ForestConfig {
    std::size_t n_trees = 10;
    double lambda = 6.0;            // online bagging rate
    std::size_t subspace_size = 0;  // 0 -> round(sqrt(n_features))
    double warning_delta = 0.01;
    double drift_delta = 0.001;
    std::uint64_t seed = 0;
    ForestMode mode = ForestMode::Adaptive;
    TreeConfig tree;                   // adaptive base learner
    std::size_t min_samples_leaf = 2;  // batch trees
    std::size_t weight_window = 200;   // adaptive vote weights
    double weight_floor = 0.01;

    std::size_t resolved_subspace(std::size_t n_features) const;
    void validate(std::size_t n_features) const;
    bool operator==(const ForestConfig&) const = default;
};

/// Greedy top-down tree on a bootstrap sample; leaves store the infected
/// fraction of their training rows.
class BatchTree {
public:
    struct Node {
        bool leaf = true;
        std::size_t feature = 0;
        double threshold = 0.0;
        std::size_t left = 0;
        std::size_t right = 0;
        double p_infected = 0.0;
        double samples = 0.0;
        bool operator==(const Node&) const = default;
    };

    static BatchTree fit(std::span<const SnapshotSample> samples,
                         std::span<const std::size_t> rows, std::size_t subspace_size,
                         std::size_t min_samples_leaf, Rng& rng);

    /// A single leaf voting `p_infected` everywhere.
    static BatchTree constant(double p_infected);

    double p_infected(std::span<const double> x) const;
    const std::vector<Node>& nodes() const { return nodes_; }

    void write(ByteWriter& out) const;
    static BatchTree read(ByteReader& in, std::size_t n_features);

    bool operator==(const BatchTree&) const = default;

private:
    std::vector<Node> nodes_;
};

/// One slot of the adaptive ensemble: foreground learner, optional
/// background replacement, and its two change detectors.
struct AdaptiveMember {
    HoeffdingTree tree;
    std::optional<HoeffdingTree> background;
    Adwin warning;
    Adwin drift;
    Rng rng;
    std::deque<std::uint8_t> recent;  // 1 = correct, oldest first
    std::size_t recent_correct = 0;
    std::size_t warnings = 0;
    std::size_t replacements = 0;

    bool operator==(const AdaptiveMember&) const = default;
};

struct ForestVote {
    Label label = Label::Benign;
    double score = 0.5;  // weighted mean p(infected)
};

class ForestModel {
public:
    /// Untrained adaptive forest; every tree starts as a single empty leaf.
    ForestModel(std::size_t n_features, const ForestConfig& config);

    ForestMode mode() const { return config_.mode; }
    bool adaptive() const { return config_.mode == ForestMode::Adaptive; }
    const ForestConfig& config() const { return config_; }
    std::size_t n_features() const { return n_features_; }
    std::size_t size() const;

    ForestVote predict(std::span<const double> x) const;

    /// Test-then-train update; throws NotAdaptive on a batch model.
    void learn_one(std::span<const double> x, Label label);

    const std::vector<BatchTree>& batch_trees() const { return batch_; }
    const std::vector<AdaptiveMember>& members() const { return members_; }
    std::vector<double> member_weights() const;
    std::size_t total_replacements() const;
    std::size_t total_warnings() const;

    /// Set when a batch forest was fit on a single class.
    std::optional<Label> single_class() const { return single_class_; }

    /// Reorders ensemble members; used to check vote symmetry.
    void permute_members(std::span<const std::size_t> order);

    bool operator==(const ForestModel&) const = default;

private:
    friend ForestModel batch_fit(const std::vector<SnapshotSample>&, const ForestConfig&);
    friend ForestModel assemble_batch_forest(std::size_t, const ForestConfig&,
                                             std::vector<BatchTree>);
    friend std::vector<std::uint8_t> serialize_model(const ForestModel&);
    friend ForestModel deserialize_model(std::span<const std::uint8_t>);

    ForestModel() = default;
    AdaptiveMember make_member(std::size_t index) const;
    HoeffdingTree fresh_tree(Rng& rng) const;
    void check_width(std::span<const double> x) const;

    std::size_t n_features_ = 0;
    ForestConfig config_;
    std::vector<BatchTree> batch_;
    std::vector<AdaptiveMember> members_;
    std::optional<Label> single_class_;
};

/// Bootstrap-bagged batch forest; per-node random feature subspaces.
ForestModel batch_fit(const std::vector<SnapshotSample>& samples, const ForestConfig& config);

/// Frozen forest over the given trees, each voting with weight 1.
ForestModel assemble_batch_forest(std::size_t n_features, const ForestConfig& config,
                                  std::vector<BatchTree> trees);

ForestModel make_adaptive_forest(std::size_t n_features, const ForestConfig& config);

ForestVote forest_predict(const ForestModel& model, std::span<const double> x);

void arf_learn_one(ForestModel& model, std::span<const double> x, Label label);

/// learn_one over every sample in order, regardless of trainable flags.
void arf_pretrain(ForestModel& model, const std::vector<SnapshotSample>& samples);

std::vector<std::uint8_t> serialize_model(const ForestModel& model);
ForestModel deserialize_model(std::span<const std::uint8_t> bytes);

/// FNV-1a over a byte payload; used to fingerprint serialized models.
std::uint64_t payload_hash(std::span<const std::uint8_t> bytes);

}  // namespace driftforest
