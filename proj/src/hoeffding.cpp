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

#include "driftforest/hoeffding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "driftforest/error.hpp"

namespace driftforest {

namespace {

constexpr std::size_t kSplitProbes = 10;
constexpr double kMinBranchFraction = 0.01;

constexpr std::array<std::uint8_t, 4> kTreeMagic{'D', 'F', 'H', 'T'};
constexpr std::uint8_t kTreeVersion = 1;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

void write_estimator(ByteWriter& out, const GaussianEstimator& e) {
    out.f64(e.weight);
    out.f64(e.mean);
    out.f64(e.m2);
    out.f64(e.min);
    out.f64(e.max);
}

GaussianEstimator read_estimator(ByteReader& in) {
    GaussianEstimator e;
    e.weight = in.f64();
    e.mean = in.f64();
    e.m2 = in.f64();
    e.min = in.f64();
    e.max = in.f64();
    if (!(e.weight >= 0.0) || !(e.m2 >= 0.0)) {
        throw Error(ErrorCode::CorruptPayload, "invalid gaussian statistics");
    }
    return e;
}

}  // namespace

void TreeConfig::validate(std::size_t n_features) const {
    if (!(split_confidence > 0.0 && split_confidence < 1.0)) {
        throw Error(ErrorCode::BadConfig, "split confidence must lie in (0,1)");
    }
    if (!(tie_threshold >= 0.0)) {
        throw Error(ErrorCode::BadConfig, "tie threshold must be non-negative");
    }
    if (grace_period < 1) throw Error(ErrorCode::BadConfig, "grace period must be >= 1");
    if (subspace_size > n_features) {
        throw Error(ErrorCode::BadConfig, "subspace size exceeds feature count");
    }
}

double hoeffding_bound(double range, double confidence, std::uint64_t n) {
    if (!(range > 0.0) || !(confidence > 0.0 && confidence <= 1.0) || n < 1) {
        throw Error(ErrorCode::DomainError, "hoeffding_bound: need R > 0, 0 < delta <= 1, n >= 1");
    }
    return std::sqrt(range * range * std::log(1.0 / confidence) / (2.0 * static_cast<double>(n)));
}

void GaussianEstimator::add(double x, double w) {
    if (w <= 0.0) return;
    if (weight == 0.0) {
        weight = w;
        mean = x;
        m2 = 0.0;
        min = x;
        max = x;
        return;
    }
    const double new_weight = weight + w;
    const double d = x - mean;
    mean += d * w / new_weight;
    m2 += w * d * (x - mean);
    weight = new_weight;
    min = std::min(min, x);
    max = std::max(max, x);
}

double GaussianEstimator::weight_at_or_below(double t) const {
    if (weight == 0.0 || t < min) return 0.0;
    if (t >= max) return weight;
    const double sd = std::sqrt(variance());
    if (!(sd > 0.0)) return t >= mean ? weight : 0.0;
    return weight * normal_cdf((t - mean) / sd);
}

double entropy_bits(double benign, double infected) {
    const double total = benign + infected;
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (double c : {benign, infected}) {
        if (c > 0.0) {
            const double p = c / total;
            h -= p * std::log2(p);
        }
    }
    return h;
}

SplitDecision decide_split(std::vector<SplitCandidate> candidates, double epsilon,
                           double tie_threshold) {
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const SplitCandidate& a, const SplitCandidate& b) {
                         if (a.gain != b.gain) return a.gain > b.gain;
                         return a.feature < b.feature;
                     });
    SplitDecision decision;
    decision.epsilon = epsilon;
    if (candidates.empty()) return decision;
    decision.best = candidates[0];
    decision.best_gain = candidates[0].gain;
    decision.second_gain = candidates.size() > 1 ? std::max(0.0, candidates[1].gain) : 0.0;
    decision.split = decision.best_gain > 0.0 &&
                     (decision.best_gain - decision.second_gain > epsilon || epsilon < tie_threshold);
    return decision;
}

std::vector<SplitCandidate> evaluate_candidates(const LeafNode& leaf) {
    const double total = leaf.total_weight();
    const double parent_entropy = entropy_bits(leaf.class_counts[0], leaf.class_counts[1]);
    std::vector<SplitCandidate> out;
    out.reserve(leaf.candidates.size());
    for (std::size_t i = 0; i < leaf.candidates.size(); ++i) {
        const auto& obs = leaf.observers[i];
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const auto& e : obs.per_class) {
            if (e.weight > 0.0) {
                lo = std::min(lo, e.min);
                hi = std::max(hi, e.max);
            }
        }
        if (!(hi > lo)) continue;

        SplitCandidate best{leaf.candidates[i], 0.0, -1.0};
        for (std::size_t k = 1; k <= kSplitProbes; ++k) {
            const double t = lo + (hi - lo) * static_cast<double>(k) /
                                      static_cast<double>(kSplitProbes + 1);
            std::array<double, 2> left{};
            std::array<double, 2> right{};
            for (int c = 0; c < 2; ++c) {
                left[c] = std::min(obs.per_class[c].weight_at_or_below(t), leaf.class_counts[c]);
                right[c] = std::max(0.0, leaf.class_counts[c] - left[c]);
            }
            const double wl = left[0] + left[1];
            const double wr = right[0] + right[1];
            if (wl < kMinBranchFraction * total || wr < kMinBranchFraction * total) continue;
            const double gain = parent_entropy - (wl / total) * entropy_bits(left[0], left[1]) -
                                (wr / total) * entropy_bits(right[0], right[1]);
            if (gain > best.gain) {
                best.gain = gain;
                best.threshold = t;
            }
        }
        if (best.gain >= 0.0) out.push_back(best);
    }
    return out;
}

SplitDecision attempt_split(const LeafNode& leaf, const TreeConfig& config) {
    SplitDecision keep;
    if (leaf.class_counts[0] <= 0.0 || leaf.class_counts[1] <= 0.0) return keep;
    const auto n = static_cast<std::uint64_t>(leaf.total_weight());
    if (n < 1) return keep;
    const double epsilon = hoeffding_bound(1.0, config.split_confidence, n);
    return decide_split(evaluate_candidates(leaf), epsilon, config.tie_threshold);
}

HoeffdingTree::HoeffdingTree(std::size_t n_features, TreeConfig config,
                             std::vector<std::size_t> feature_pool)
    : n_features_(n_features), config_(config), pool_(std::move(feature_pool)),
      rng_(config.seed) {
    if (n_features_ == 0) throw Error(ErrorCode::BadConfig, "tree needs at least one feature");
    if (pool_.empty()) {
        pool_.resize(n_features_);
        std::iota(pool_.begin(), pool_.end(), std::size_t{0});
    }
    std::sort(pool_.begin(), pool_.end());
    pool_.erase(std::unique(pool_.begin(), pool_.end()), pool_.end());
    if (pool_.back() >= n_features_) {
        throw Error(ErrorCode::BadConfig, "feature pool references a feature out of range");
    }
    config_.validate(n_features_);
    nodes_.push_back(make_leaf(0));
}

LeafNode HoeffdingTree::make_leaf(std::size_t depth) {
    LeafNode leaf;
    leaf.depth = depth;
    const std::size_t k = config_.subspace_size == 0 ? pool_.size()
                                                      : std::min(config_.subspace_size, pool_.size());
    if (k == pool_.size()) {
        leaf.candidates = pool_;
    } else {
        for (std::size_t pick : rng_.sample_without_replacement(pool_.size(), k)) {
            leaf.candidates.push_back(pool_[pick]);
        }
    }
    leaf.observers.resize(leaf.candidates.size());
    return leaf;
}

void HoeffdingTree::check_width(std::span<const double> x) const {
    if (x.size() != n_features_) {
        throw Error(ErrorCode::WidthMismatch, "vector width " + std::to_string(x.size()) +
                                                  " does not match tree width " +
                                                  std::to_string(n_features_));
    }
}

std::size_t HoeffdingTree::route(std::span<const double> x) const {
    std::size_t index = 0;
    while (const auto* split = std::get_if<SplitNode>(&nodes_[index])) {
        index = x[split->feature] <= split->threshold ? split->left : split->right;
    }
    return index;
}

Prediction HoeffdingTree::predict(std::span<const double> x) const {
    check_width(x);
    const auto& leaf = std::get<LeafNode>(nodes_[route(x)]);
    const double total = leaf.total_weight();
    Prediction p;
    p.probabilities = {(leaf.class_counts[0] + 1.0) / (total + 2.0),
                       (leaf.class_counts[1] + 1.0) / (total + 2.0)};
    p.label = p.probabilities[1] > p.probabilities[0] ? Label::Infected : Label::Benign;
    return p;
}

void HoeffdingTree::learn(std::span<const double> x, Label label, unsigned weight) {
    check_width(x);
    if (weight == 0) return;
    const double w = static_cast<double>(weight);
    const std::size_t index = route(x);
    auto& leaf = std::get<LeafNode>(nodes_[index]);
    const int c = to_int(label);
    leaf.class_counts[c] += w;
    for (std::size_t i = 0; i < leaf.candidates.size(); ++i) {
        leaf.observers[i].per_class[c].add(x[leaf.candidates[i]], w);
    }
    total_weight_ += w;

    if (leaf.total_weight() - leaf.weight_at_last_attempt < static_cast<double>(config_.grace_period)) {
        return;
    }
    leaf.weight_at_last_attempt = leaf.total_weight();
    if (config_.max_depth && leaf.depth >= *config_.max_depth) return;
    const SplitDecision decision = attempt_split(leaf, config_);
    if (!decision.split) return;

    const std::size_t depth = leaf.depth;
    LeafNode left = make_leaf(depth + 1);
    LeafNode right = make_leaf(depth + 1);
    const std::size_t left_index = nodes_.size();
    nodes_.push_back(std::move(left));
    nodes_.push_back(std::move(right));
    nodes_[index] = SplitNode{decision.best->feature, decision.best->threshold, left_index,
                              left_index + 1, depth};
}

std::size_t HoeffdingTree::leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) {
        return std::holds_alternative<LeafNode>(n);
    }));
}

void HoeffdingTree::write(ByteWriter& out) const {
    out.u64(n_features_);
    out.f64(config_.split_confidence);
    out.f64(config_.tie_threshold);
    out.u64(config_.grace_period);
    out.u8(config_.max_depth ? 1 : 0);
    out.u64(config_.max_depth.value_or(0));
    out.u64(config_.subspace_size);
    out.u64(config_.seed);
    out.u64(pool_.size());
    for (auto f : pool_) out.u64(f);
    out.f64(total_weight_);
    out.str(rng_.state());
    out.u64(nodes_.size());
    for (const auto& node : nodes_) {
        if (const auto* leaf = std::get_if<LeafNode>(&node)) {
            out.u8(0);
            out.u64(leaf->depth);
            out.f64(leaf->class_counts[0]);
            out.f64(leaf->class_counts[1]);
            out.f64(leaf->weight_at_last_attempt);
            out.u64(leaf->candidates.size());
            for (std::size_t i = 0; i < leaf->candidates.size(); ++i) {
                out.u64(leaf->candidates[i]);
                for (const auto& e : leaf->observers[i].per_class) write_estimator(out, e);
            }
        } else {
            const auto& split = std::get<SplitNode>(node);
            out.u8(1);
            out.u64(split.depth);
            out.u64(split.feature);
            out.f64(split.threshold);
            out.u64(split.left);
            out.u64(split.right);
        }
    }
}

HoeffdingTree HoeffdingTree::read(ByteReader& in) {
    HoeffdingTree tree;
    tree.n_features_ = in.u64();
    tree.config_.split_confidence = in.f64();
    tree.config_.tie_threshold = in.f64();
    tree.config_.grace_period = in.u64();
    const bool has_depth = in.u8() != 0;
    const auto depth = in.u64();
    if (has_depth) tree.config_.max_depth = depth;
    tree.config_.subspace_size = in.u64();
    tree.config_.seed = in.u64();
    if (tree.n_features_ == 0) throw Error(ErrorCode::CorruptPayload, "tree width is zero");
    try {
        tree.config_.validate(tree.n_features_);
    } catch (const Error& e) {
        throw Error(ErrorCode::CorruptPayload, e.what());
    }
    const auto pool_size = in.count(8);
    for (std::uint64_t i = 0; i < pool_size; ++i) {
        const auto f = in.u64();
        if (f >= tree.n_features_) throw Error(ErrorCode::CorruptPayload, "pool feature out of range");
        tree.pool_.push_back(f);
    }
    tree.total_weight_ = in.f64();
    tree.rng_.set_state(in.str());

    const auto node_count = in.count(1);
    if (node_count == 0) throw Error(ErrorCode::CorruptPayload, "tree has no nodes");
    for (std::uint64_t i = 0; i < node_count; ++i) {
        const auto kind = in.u8();
        if (kind == 0) {
            LeafNode leaf;
            leaf.depth = in.u64();
            leaf.class_counts[0] = in.f64();
            leaf.class_counts[1] = in.f64();
            leaf.weight_at_last_attempt = in.f64();
            const auto candidates = in.count(8 + 2 * 40);
            for (std::uint64_t k = 0; k < candidates; ++k) {
                const auto f = in.u64();
                if (f >= tree.n_features_) {
                    throw Error(ErrorCode::CorruptPayload, "candidate feature out of range");
                }
                leaf.candidates.push_back(f);
                FeatureObserver obs;
                for (auto& e : obs.per_class) e = read_estimator(in);
                leaf.observers.push_back(obs);
            }
            tree.nodes_.emplace_back(std::move(leaf));
        } else if (kind == 1) {
            SplitNode split;
            split.depth = in.u64();
            split.feature = in.u64();
            split.threshold = in.f64();
            split.left = in.u64();
            split.right = in.u64();
            // Children are always appended after their parent.
            if (split.feature >= tree.n_features_ || split.left <= i || split.right <= i ||
                split.left >= node_count || split.right >= node_count) {
                throw Error(ErrorCode::CorruptPayload, "split node references out of range");
            }
            tree.nodes_.emplace_back(split);
        } else {
            throw Error(ErrorCode::CorruptPayload, "unknown tree node kind");
        }
    }
    return tree;
}

std::vector<std::uint8_t> serialize_tree(const HoeffdingTree& tree) {
    ByteWriter out;
    out.raw(kTreeMagic);
    out.u8(kTreeVersion);
    tree.write(out);
    return out.take();
}

HoeffdingTree deserialize_tree(std::span<const std::uint8_t> bytes) {
    ByteReader in(bytes);
    for (auto expected : kTreeMagic) {
        if (in.u8() != expected) throw Error(ErrorCode::CorruptPayload, "not a tree payload");
    }
    if (const auto version = in.u8(); version != kTreeVersion) {
        throw Error(ErrorCode::VersionMismatch, "tree payload version " + std::to_string(version));
    }
    HoeffdingTree tree = HoeffdingTree::read(in);
    if (!in.at_end()) throw Error(ErrorCode::CorruptPayload, "trailing bytes after tree");
    return tree;
}

}  // namespace driftforest
