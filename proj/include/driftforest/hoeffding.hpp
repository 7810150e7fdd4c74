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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "driftforest/binary_io.hpp"
#include "driftforest/dataset.hpp"
#include "driftforest/rng.hpp"

namespace driftforest {

struct TreeConfig {
    double split_confidence = 1e-7;
    double tie_threshold = 0.05;
    std::size_t grace_period = 50;
    std::optional<std::size_t> max_depth;
    // Candidate features drawn per new leaf; 0 means the whole feature pool.
    std::size_t subspace_size = 0;
    std::uint64_t seed = 0;

    void validate(std::size_t n_features) const;
    bool operator==(const TreeConfig&) const = default;
};

/// eps = sqrt(R^2 ln(1/delta) / (2n)). Throws DomainError unless R > 0,
/// 0 < delta <= 1 and n >= 1.
double hoeffding_bound(double range, double confidence, std::uint64_t n);

/// Weighted running mean/variance (West's update) with the observed range.
struct GaussianEstimator {
    double weight = 0.0;
    double mean = 0.0;
    double m2 = 0.0;
    double min = 0.0;
    double max = 0.0;

    void add(double x, double w);
    double variance() const { return weight > 1.0 ? m2 / (weight - 1.0) : 0.0; }
    /// Estimated weight of observations <= t.
    double weight_at_or_below(double t) const;

    bool operator==(const GaussianEstimator&) const = default;
};

struct FeatureObserver {
    std::array<GaussianEstimator, 2> per_class;
    bool operator==(const FeatureObserver&) const = default;
};

struct LeafNode {
    std::array<double, 2> class_counts{0.0, 0.0};
    std::vector<std::size_t> candidates;
    std::vector<FeatureObserver> observers;  // parallel to candidates
    double weight_at_last_attempt = 0.0;
    std::size_t depth = 0;

    double total_weight() const { return class_counts[0] + class_counts[1]; }
    bool operator==(const LeafNode&) const = default;
};

struct SplitNode {
    std::size_t feature = 0;
    double threshold = 0.0;  // x[feature] <= threshold goes left
    std::size_t left = 0;
    std::size_t right = 0;
    std::size_t depth = 0;
    bool operator==(const SplitNode&) const = default;
};

using TreeNode = std::variant<LeafNode, SplitNode>;

struct Prediction {
    Label label = Label::Benign;
    std::array<double, 2> probabilities{0.5, 0.5};
    double p_infected() const { return probabilities[1]; }
};

struct SplitCandidate {
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
};

struct SplitDecision {
    bool split = false;
    std::optional<SplitCandidate> best;
    double best_gain = 0.0;
    double second_gain = 0.0;
    double epsilon = 0.0;
};

/// Split iff best > 0 and (best - second > eps or eps < tau). Candidates
/// are one best threshold per feature; a missing runner-up counts as gain 0
/// and equal gains resolve to the lower feature id.
SplitDecision decide_split(std::vector<SplitCandidate> candidates, double epsilon,
                           double tie_threshold);

/// Best threshold per candidate feature from 10 evenly spaced probes over
/// the observed range, scored by information gain in bits.
std::vector<SplitCandidate> evaluate_candidates(const LeafNode& leaf);

/// Keep-leaf unless the leaf has seen both classes and decide_split agrees.
SplitDecision attempt_split(const LeafNode& leaf, const TreeConfig& config);

/// Binary entropy of class weights in bits.
double entropy_bits(double benign, double infected);

/// Incremental decision tree over numeric features, binary labels.
class HoeffdingTree {
public:
    /// An empty pool means every feature is eligible.
    HoeffdingTree(std::size_t n_features, TreeConfig config,
                  std::vector<std::size_t> feature_pool = {});

    Prediction predict(std::span<const double> x) const;

    /// Adds the instance with multiplicity `weight` (0 is a no-op) and, once
    /// a grace period of weight has accumulated at the leaf, tries a split.
    void learn(std::span<const double> x, Label label, unsigned weight = 1);

    std::size_t n_features() const { return n_features_; }
    const TreeConfig& config() const { return config_; }
    const std::vector<std::size_t>& feature_pool() const { return pool_; }
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    std::size_t leaf_count() const;
    std::size_t split_count() const { return nodes_.size() - leaf_count(); }
    double total_weight() const { return total_weight_; }

    void write(ByteWriter& out) const;
    static HoeffdingTree read(ByteReader& in);

    bool operator==(const HoeffdingTree&) const = default;

private:
    HoeffdingTree() = default;
    std::size_t route(std::span<const double> x) const;
    LeafNode make_leaf(std::size_t depth);
    void check_width(std::span<const double> x) const;

    std::size_t n_features_ = 0;
    TreeConfig config_;
    std::vector<std::size_t> pool_;
    std::vector<TreeNode> nodes_;
    double total_weight_ = 0.0;
    Rng rng_;
};

std::vector<std::uint8_t> serialize_tree(const HoeffdingTree& tree);
HoeffdingTree deserialize_tree(std::span<const std::uint8_t> bytes);

}  // namespace driftforest
