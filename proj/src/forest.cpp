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

#include "driftforest/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "driftforest/error.hpp"

namespace driftforest {

namespace {

constexpr std::array<std::uint8_t, 4> kModelMagic{'D', 'F', 'F', 'M'};
constexpr std::uint8_t kModelVersion = 1;

struct NodeTask {
    std::size_t node;
    std::size_t begin;
    std::size_t end;
};

void write_config(ByteWriter& out, const ForestConfig& c) {
    out.u64(c.n_trees);
    out.f64(c.lambda);
    out.u64(c.subspace_size);
    out.f64(c.warning_delta);
    out.f64(c.drift_delta);
    out.u64(c.seed);
    out.u8(static_cast<std::uint8_t>(c.mode));
    out.f64(c.tree.split_confidence);
    out.f64(c.tree.tie_threshold);
    out.u64(c.tree.grace_period);
    out.u8(c.tree.max_depth ? 1 : 0);
    out.u64(c.tree.max_depth.value_or(0));
    out.u64(c.tree.subspace_size);
    out.u64(c.tree.seed);
    out.u64(c.min_samples_leaf);
    out.u64(c.weight_window);
    out.f64(c.weight_floor);
}

ForestConfig read_config(ByteReader& in) {
    ForestConfig c;
    c.n_trees = in.u64();
    c.lambda = in.f64();
    c.subspace_size = in.u64();
    c.warning_delta = in.f64();
    c.drift_delta = in.f64();
    c.seed = in.u64();
    const auto mode = in.u8();
    if (mode > 1) throw Error(ErrorCode::CorruptPayload, "unknown forest mode");
    c.mode = static_cast<ForestMode>(mode);
    c.tree.split_confidence = in.f64();
    c.tree.tie_threshold = in.f64();
    c.tree.grace_period = in.u64();
    const bool has_depth = in.u8() != 0;
    const auto depth = in.u64();
    if (has_depth) c.tree.max_depth = depth;
    c.tree.subspace_size = in.u64();
    c.tree.seed = in.u64();
    c.min_samples_leaf = in.u64();
    c.weight_window = in.u64();
    c.weight_floor = in.f64();
    return c;
}

}  // namespace

std::size_t ForestConfig::resolved_subspace(std::size_t n_features) const {
    if (subspace_size != 0) return subspace_size;
    const auto k = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n_features))));
    return std::clamp<std::size_t>(k, 1, n_features);
}

void ForestConfig::validate(std::size_t n_features) const {
    if (n_features == 0) throw Error(ErrorCode::BadConfig, "forest needs at least one feature");
    if (n_trees < 1) throw Error(ErrorCode::BadConfig, "n_trees must be >= 1");
    if (!(lambda > 0.0)) throw Error(ErrorCode::BadConfig, "lambda must be positive");
    if (resolved_subspace(n_features) > n_features) {
        throw Error(ErrorCode::BadConfig, "subspace size exceeds feature count");
    }
    if (!(warning_delta > 0.0 && warning_delta < 1.0) || !(drift_delta > 0.0 && drift_delta < 1.0)) {
        throw Error(ErrorCode::BadConfig, "detector deltas must lie in (0,1)");
    }
    if (min_samples_leaf < 1) throw Error(ErrorCode::BadConfig, "min_samples_leaf must be >= 1");
    if (weight_window < 1) throw Error(ErrorCode::BadConfig, "weight_window must be >= 1");
    if (!(weight_floor > 0.0 && weight_floor <= 1.0)) {
        throw Error(ErrorCode::BadConfig, "weight_floor must lie in (0,1]");
    }
    tree.validate(n_features);
}

// ---------------------------------------------------------------------------
// Batch trees

BatchTree BatchTree::fit(std::span<const SnapshotSample> samples,
                         std::span<const std::size_t> rows_in, std::size_t subspace_size,
                         std::size_t min_samples_leaf, Rng& rng) {
    BatchTree tree;
    if (rows_in.empty()) {
        tree.nodes_.push_back(Node{});
        return tree;
    }
    const std::size_t n_features = samples[rows_in[0]].features().size();
    std::vector<std::size_t> rows(rows_in.begin(), rows_in.end());
    std::vector<std::pair<double, std::uint8_t>> column;

    tree.nodes_.push_back(Node{});
    std::vector<NodeTask> stack{{0, 0, rows.size()}};
    while (!stack.empty()) {
        const NodeTask task = stack.back();
        stack.pop_back();
        const std::size_t n = task.end - task.begin;
        std::size_t infected = 0;
        for (std::size_t i = task.begin; i < task.end; ++i) {
            infected += samples[rows[i]].label == Label::Infected ? 1 : 0;
        }
        Node& node = tree.nodes_[task.node];
        node.samples = static_cast<double>(n);
        node.p_infected = static_cast<double>(infected) / static_cast<double>(n);
        if (infected == 0 || infected == n || n < 2 * min_samples_leaf) continue;

        const double parent_entropy = entropy_bits(static_cast<double>(n - infected),
                                                   static_cast<double>(infected));
        double best_gain = 0.0;
        std::size_t best_feature = 0;
        double best_threshold = 0.0;
        bool found = false;
        for (std::size_t feature : rng.sample_without_replacement(n_features, subspace_size)) {
            column.clear();
            for (std::size_t i = task.begin; i < task.end; ++i) {
                const auto& s = samples[rows[i]];
                column.emplace_back(s.features()[feature], static_cast<std::uint8_t>(to_int(s.label)));
            }
            std::sort(column.begin(), column.end());
            std::size_t left_infected = 0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                left_infected += column[i].second;
                const std::size_t left = i + 1;
                if (left < min_samples_leaf || n - left < min_samples_leaf) continue;
                if (!(column[i].first < column[i + 1].first)) continue;
                const std::size_t right = n - left;
                const std::size_t right_infected = infected - left_infected;
                const double gain =
                    parent_entropy -
                    static_cast<double>(left) / static_cast<double>(n) *
                        entropy_bits(static_cast<double>(left - left_infected),
                                     static_cast<double>(left_infected)) -
                    static_cast<double>(right) / static_cast<double>(n) *
                        entropy_bits(static_cast<double>(right - right_infected),
                                     static_cast<double>(right_infected));
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = feature;
                    const double a = column[i].first;
                    const double b = column[i + 1].first;
                    double mid = a + (b - a) / 2.0;
                    if (!(mid < b)) mid = a;
                    best_threshold = mid;
                    found = true;
                }
            }
        }
        if (!found) continue;

        const auto middle = std::stable_partition(
            rows.begin() + static_cast<std::ptrdiff_t>(task.begin),
            rows.begin() + static_cast<std::ptrdiff_t>(task.end), [&](std::size_t r) {
                return samples[r].features()[best_feature] <= best_threshold;
            });
        const auto split_at = static_cast<std::size_t>(middle - rows.begin());

        const std::size_t left_index = tree.nodes_.size();
        Node& parent = tree.nodes_[task.node];
        parent.leaf = false;
        parent.feature = best_feature;
        parent.threshold = best_threshold;
        parent.left = left_index;
        parent.right = left_index + 1;
        tree.nodes_.push_back(Node{});
        tree.nodes_.push_back(Node{});
        stack.push_back({left_index + 1, split_at, task.end});
        stack.push_back({left_index, task.begin, split_at});
    }
    return tree;
}

BatchTree BatchTree::constant(double p_infected) {
    BatchTree tree;
    Node root;
    root.p_infected = p_infected;
    tree.nodes_.push_back(root);
    return tree;
}

double BatchTree::p_infected(std::span<const double> x) const {
    std::size_t index = 0;
    while (!nodes_[index].leaf) {
        const Node& node = nodes_[index];
        index = x[node.feature] <= node.threshold ? node.left : node.right;
    }
    return nodes_[index].p_infected;
}

void BatchTree::write(ByteWriter& out) const {
    out.u64(nodes_.size());
    for (const auto& node : nodes_) {
        out.u8(node.leaf ? 1 : 0);
        out.u64(node.feature);
        out.f64(node.threshold);
        out.u64(node.left);
        out.u64(node.right);
        out.f64(node.p_infected);
        out.f64(node.samples);
    }
}

BatchTree BatchTree::read(ByteReader& in, std::size_t n_features) {
    BatchTree tree;
    const auto count = in.count(49);
    if (count == 0) throw Error(ErrorCode::CorruptPayload, "batch tree has no nodes");
    for (std::uint64_t i = 0; i < count; ++i) {
        Node node;
        node.leaf = in.u8() != 0;
        node.feature = in.u64();
        node.threshold = in.f64();
        node.left = in.u64();
        node.right = in.u64();
        node.p_infected = in.f64();
        node.samples = in.f64();
        if (!node.leaf && (node.feature >= n_features || node.left <= i || node.right <= i ||
                           node.left >= count || node.right >= count)) {
            throw Error(ErrorCode::CorruptPayload, "batch node references out of range");
        }
        tree.nodes_.push_back(node);
    }
    return tree;
}

// ---------------------------------------------------------------------------
// Forest

ForestModel::ForestModel(std::size_t n_features, const ForestConfig& config)
    : n_features_(n_features), config_(config) {
    config_.validate(n_features_);
    if (adaptive()) {
        members_.reserve(config_.n_trees);
        for (std::size_t i = 0; i < config_.n_trees; ++i) members_.push_back(make_member(i));
    } else {
        // An unfitted batch forest votes 0.5 everywhere.
        batch_.assign(config_.n_trees, BatchTree::constant(0.5));
    }
}

std::size_t ForestModel::size() const { return adaptive() ? members_.size() : batch_.size(); }

HoeffdingTree ForestModel::fresh_tree(Rng& rng) const {
    const std::size_t k = config_.resolved_subspace(n_features_);
    std::vector<std::size_t> subspace = rng.sample_without_replacement(n_features_, k);
    TreeConfig tree_config = config_.tree;
    tree_config.subspace_size = 0;
    tree_config.seed = rng.next();
    return HoeffdingTree(n_features_, tree_config, std::move(subspace));
}

AdaptiveMember ForestModel::make_member(std::size_t index) const {
    Rng rng(derive_seed(config_.seed, "forest.adaptive.member", index));
    HoeffdingTree tree = fresh_tree(rng);
    return AdaptiveMember{std::move(tree),
                          std::nullopt,
                          Adwin(config_.warning_delta),
                          Adwin(config_.drift_delta),
                          rng,
                          {},
                          0,
                          0,
                          0};
}

void ForestModel::check_width(std::span<const double> x) const {
    if (x.size() != n_features_) {
        throw Error(ErrorCode::WidthMismatch, "vector width " + std::to_string(x.size()) +
                                                  " does not match model width " +
                                                  std::to_string(n_features_));
    }
}

std::vector<double> ForestModel::member_weights() const {
    std::vector<double> weights;
    if (!adaptive()) {
        weights.assign(batch_.size(), 1.0);
        return weights;
    }
    for (const auto& m : members_) {
        double w = config_.weight_floor;
        if (!m.recent.empty()) {
            w = std::max(w, static_cast<double>(m.recent_correct) / static_cast<double>(m.recent.size()));
        }
        weights.push_back(w);
    }
    return weights;
}

ForestVote ForestModel::predict(std::span<const double> x) const {
    check_width(x);
    const std::vector<double> weights = member_weights();
    std::vector<std::pair<double, double>> votes;  // (weight, p_infected)
    votes.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
        const double p = adaptive() ? members_[i].tree.predict(x).p_infected()
                                    : batch_[i].p_infected(x);
        votes.emplace_back(weights[i], p);
    }
    // Summing in sorted order makes the score independent of member order.
    std::sort(votes.begin(), votes.end());
    double weighted = 0.0;
    double total = 0.0;
    for (const auto& [w, p] : votes) {
        weighted += w * p;
        total += w;
    }
    ForestVote vote;
    vote.score = total > 0.0 ? weighted / total : 0.5;
    vote.label = vote.score > 0.5 ? Label::Infected : Label::Benign;
    return vote;
}

void ForestModel::learn_one(std::span<const double> x, Label label) {
    if (!adaptive()) throw Error(ErrorCode::NotAdaptive, "batch forests are frozen after fit");
    check_width(x);
    for (auto& m : members_) {
        const bool correct = m.tree.predict(x).label == label;
        m.recent.push_back(correct ? 1 : 0);
        m.recent_correct += correct ? 1 : 0;
        if (m.recent.size() > config_.weight_window) {
            m.recent_correct -= m.recent.front();
            m.recent.pop_front();
        }

        const unsigned weight = m.rng.poisson(config_.lambda);
        m.tree.learn(x, label, weight);
        if (m.background) m.background->learn(x, label, weight);

        const double error = correct ? 0.0 : 1.0;
        // Only a rising error rate counts as a change.
        if (m.warning.update(error) && m.warning.last_change_increased()) {
            ++m.warnings;
            m.background = fresh_tree(m.rng);
            m.warning = Adwin(config_.warning_delta);
        }
        if (m.drift.update(error) && m.drift.last_change_increased()) {
            ++m.replacements;
            m.tree = m.background ? std::move(*m.background) : fresh_tree(m.rng);
            m.background.reset();
            m.warning = Adwin(config_.warning_delta);
            m.drift = Adwin(config_.drift_delta);
            m.recent.clear();
            m.recent_correct = 0;
        }
    }
}

std::size_t ForestModel::total_replacements() const {
    std::size_t total = 0;
    for (const auto& m : members_) total += m.replacements;
    return total;
}

std::size_t ForestModel::total_warnings() const {
    std::size_t total = 0;
    for (const auto& m : members_) total += m.warnings;
    return total;
}

void ForestModel::permute_members(std::span<const std::size_t> order) {
    if (order.size() != size()) throw Error(ErrorCode::DomainError, "permutation size mismatch");
    if (adaptive()) {
        std::vector<AdaptiveMember> next;
        for (auto i : order) next.push_back(members_.at(i));
        members_ = std::move(next);
    } else {
        std::vector<BatchTree> next;
        for (auto i : order) next.push_back(batch_.at(i));
        batch_ = std::move(next);
    }
}

ForestModel batch_fit(const std::vector<SnapshotSample>& samples, const ForestConfig& config) {
    if (samples.empty()) throw Error(ErrorCode::EmptyTraining, "batch_fit needs samples");
    const std::size_t n_features = samples.front().features().size();
    for (const auto& s : samples) {
        if (s.features().size() != n_features) {
            throw Error(ErrorCode::WidthMismatch, "training samples differ in width");
        }
    }
    ForestConfig batch_config = config;
    batch_config.mode = ForestMode::Batch;
    batch_config.validate(n_features);

    ForestModel model;
    model.n_features_ = n_features;
    model.config_ = batch_config;
    const std::size_t infected = static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(),
                      [](const SnapshotSample& s) { return s.label == Label::Infected; }));
    if (infected == 0 || infected == samples.size()) {
        model.single_class_ = infected == 0 ? Label::Benign : Label::Infected;
    }

    const std::size_t k = batch_config.resolved_subspace(n_features);
    for (std::size_t t = 0; t < batch_config.n_trees; ++t) {
        Rng rng(derive_seed(batch_config.seed, "forest.batch.tree", t));
        std::vector<std::size_t> rows(samples.size());
        for (auto& r : rows) r = static_cast<std::size_t>(rng.below(samples.size()));
        model.batch_.push_back(
            BatchTree::fit(samples, rows, k, batch_config.min_samples_leaf, rng));
    }
    return model;
}

ForestModel assemble_batch_forest(std::size_t n_features, const ForestConfig& config,
                                  std::vector<BatchTree> trees) {
    if (trees.empty()) throw Error(ErrorCode::BadConfig, "a batch forest needs at least one tree");
    ForestModel model;
    model.n_features_ = n_features;
    model.config_ = config;
    model.config_.mode = ForestMode::Batch;
    model.config_.n_trees = trees.size();
    model.config_.validate(n_features);
    model.batch_ = std::move(trees);
    return model;
}

ForestModel make_adaptive_forest(std::size_t n_features, const ForestConfig& config) {
    ForestConfig adaptive_config = config;
    adaptive_config.mode = ForestMode::Adaptive;
    return ForestModel(n_features, adaptive_config);
}

ForestVote forest_predict(const ForestModel& model, std::span<const double> x) {
    return model.predict(x);
}

void arf_learn_one(ForestModel& model, std::span<const double> x, Label label) {
    model.learn_one(x, label);
}

void arf_pretrain(ForestModel& model, const std::vector<SnapshotSample>& samples) {
    if (!model.adaptive()) throw Error(ErrorCode::NotAdaptive, "pretraining needs an adaptive forest");
    for (const auto& s : samples) model.learn_one(s.features(), s.label);
}

std::vector<std::uint8_t> serialize_model(const ForestModel& model) {
    ByteWriter out;
    out.raw(kModelMagic);
    out.u8(kModelVersion);
    out.u64(model.n_features_);
    write_config(out, model.config_);
    out.u8(model.single_class_ ? 1 + to_int(*model.single_class_) : 0);
    if (model.adaptive()) {
        out.u64(model.members_.size());
        for (const auto& m : model.members_) {
            m.tree.write(out);
            out.u8(m.background ? 1 : 0);
            if (m.background) m.background->write(out);
            m.warning.write(out);
            m.drift.write(out);
            out.str(m.rng.state());
            out.u64(m.recent.size());
            for (auto bit : m.recent) out.u8(bit);
            out.u64(m.recent_correct);
            out.u64(m.warnings);
            out.u64(m.replacements);
        }
    } else {
        out.u64(model.batch_.size());
        for (const auto& tree : model.batch_) tree.write(out);
    }
    return out.take();
}

ForestModel deserialize_model(std::span<const std::uint8_t> bytes) {
    ByteReader in(bytes);
    for (auto expected : kModelMagic) {
        if (in.u8() != expected) throw Error(ErrorCode::CorruptPayload, "not a forest model payload");
    }
    if (const auto version = in.u8(); version != kModelVersion) {
        throw Error(ErrorCode::VersionMismatch, "model payload version " + std::to_string(version) +
                                                    ", expected " + std::to_string(kModelVersion));
    }
    ForestModel model;
    model.n_features_ = in.u64();
    model.config_ = read_config(in);
    try {
        model.config_.validate(model.n_features_);
    } catch (const Error& e) {
        throw Error(ErrorCode::CorruptPayload, std::string("invalid model config: ") + e.what());
    }
    const auto single = in.u8();
    if (single > 2) throw Error(ErrorCode::CorruptPayload, "invalid single-class marker");
    if (single != 0) model.single_class_ = static_cast<Label>(single - 1);

    const auto count = in.count(1);
    if (count != model.config_.n_trees) {
        throw Error(ErrorCode::CorruptPayload, "ensemble size does not match config");
    }
    for (std::uint64_t i = 0; i < count; ++i) {
        if (model.adaptive()) {
            HoeffdingTree tree = HoeffdingTree::read(in);
            std::optional<HoeffdingTree> background;
            if (in.u8() != 0) background = HoeffdingTree::read(in);
            Adwin warning = Adwin::read(in);
            Adwin drift = Adwin::read(in);
            Rng rng;
            rng.set_state(in.str());
            std::deque<std::uint8_t> recent;
            const auto recent_size = in.count(1);
            std::size_t correct = 0;
            for (std::uint64_t k = 0; k < recent_size; ++k) {
                const auto bit = in.u8();
                if (bit > 1) throw Error(ErrorCode::CorruptPayload, "invalid correctness bit");
                recent.push_back(bit);
                correct += bit;
            }
            const auto recent_correct = in.u64();
            if (recent_correct != correct) {
                throw Error(ErrorCode::CorruptPayload, "correctness window checksum mismatch");
            }
            const auto warnings = in.u64();
            const auto replacements = in.u64();
            if (tree.n_features() != model.n_features_) {
                throw Error(ErrorCode::CorruptPayload, "tree width does not match model");
            }
            model.members_.push_back(AdaptiveMember{std::move(tree), std::move(background),
                                                    std::move(warning), std::move(drift), rng,
                                                    std::move(recent), correct, warnings,
                                                    replacements});
        } else {
            model.batch_.push_back(BatchTree::read(in, model.n_features_));
        }
    }
    if (!in.at_end()) throw Error(ErrorCode::CorruptPayload, "trailing bytes after model");
    return model;
}

std::uint64_t payload_hash(std::span<const std::uint8_t> bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (auto b : bytes) {
        hash ^= b;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

}  // namespace driftforest
