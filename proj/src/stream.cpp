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

#include "driftforest/stream.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "driftforest/error.hpp"
#include "driftforest/rng.hpp"
#include "driftforest/text.hpp"

namespace driftforest {

namespace {

void sort_by_timestamp(std::vector<SnapshotSample>& samples) {
    std::stable_sort(samples.begin(), samples.end(),
                     [](const SnapshotSample& a, const SnapshotSample& b) {
                         return a.timestamp_id < b.timestamp_id;
                     });
}

void sort_chronologically(std::vector<SnapshotSample>& samples) {
    std::stable_sort(samples.begin(), samples.end(),
                     [](const SnapshotSample& a, const SnapshotSample& b) {
                         if (*a.year != *b.year) return *a.year < *b.year;
                         return a.timestamp_id < b.timestamp_id;
                     });
}

std::string format_fraction(double fraction) { return text::format_number(fraction); }

std::string id_list(const std::vector<std::uint64_t>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(ids[i]);
    }
    return out;
}

std::vector<std::uint64_t> parse_id_list(std::string_view value) {
    std::vector<std::uint64_t> ids;
    std::istringstream in{std::string(value)};
    std::string token;
    while (in >> token) {
        const auto id = text::parse_number(token);
        if (!id || *id < 0) throw Error(ErrorCode::MalformedRow, "bad id in manifest: " + token);
        ids.push_back(static_cast<std::uint64_t>(*id));
    }
    return ids;
}

}  // namespace

StreamPlan random_split(const std::vector<SnapshotSample>& samples, double ratio,
                        std::uint64_t seed, bool evaluation_trainable) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw Error(ErrorCode::BadRatio, "split ratio must lie in (0,1)");
    }
    if (samples.empty()) {
        throw Error(ErrorCode::EmptyTable, "cannot split an empty dataset");
    }
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(seed, "stream.random_split"));
    rng.shuffle(order);

    const auto cut = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(samples.size())));
    StreamPlan plan;
    plan.seed = seed;
    plan.description = "random_split ratio=" + text::format_number(ratio);
    for (std::size_t i = 0; i < order.size(); ++i) {
        SnapshotSample sample = samples[order[i]];
        if (i < cut) {
            sample.trainable = true;
            plan.pretrain.push_back(std::move(sample));
        } else {
            sample.trainable = evaluation_trainable;
            plan.evaluation.push_back(std::move(sample));
        }
    }
    sort_by_timestamp(plan.pretrain);
    sort_by_timestamp(plan.evaluation);
    return plan;
}

StreamPlan temporal_split(const std::vector<SnapshotSample>& samples, int pivot_year) {
    StreamPlan plan;
    plan.description = "temporal_split pivot_year=" + std::to_string(pivot_year);
    for (const auto& sample : samples) {
        if (!sample.year) {
            throw Error(ErrorCode::UnknownYear, "sample " + std::to_string(sample.timestamp_id) +
                                                    " has no year");
        }
        SnapshotSample copy = sample;
        copy.trainable = true;
        (*sample.year <= pivot_year ? plan.pretrain : plan.evaluation).push_back(std::move(copy));
    }
    if (plan.pretrain.empty() || plan.evaluation.empty()) {
        throw Error(ErrorCode::EmptySide, "pivot year " + std::to_string(pivot_year) +
                                              " leaves one side of the split empty");
    }
    sort_chronologically(plan.pretrain);
    sort_chronologically(plan.evaluation);
    return plan;
}

StreamPlan mask_labels(const StreamPlan& plan, double fraction, std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
        throw Error(ErrorCode::BadFraction, "label fraction must lie in [0,1]");
    }
    if (plan.evaluation.empty()) {
        throw Error(ErrorCode::EmptyEvaluation, "plan has no evaluation samples");
    }
    StreamPlan masked = plan;
    masked.seed = seed;
    masked.mask_fraction = fraction;

    std::vector<std::size_t> infected;
    for (std::size_t i = 0; i < masked.evaluation.size(); ++i) {
        auto& sample = masked.evaluation[i];
        if (sample.label == Label::Infected) {
            infected.push_back(i);
            sample.trainable = false;
        } else {
            sample.trainable = true;
        }
    }
    const auto keep = static_cast<std::size_t>(
        std::floor(fraction * static_cast<double>(infected.size()) + 0.5));
    // Prefix of one seeded permutation, so under a fixed seed a larger
    // fraction reveals a superset of the labels a smaller one does.
    Rng rng(derive_seed(seed, "stream.mask_labels"));
    rng.shuffle(infected);
    for (std::size_t k = 0; k < keep; ++k) masked.evaluation[infected[k]].trainable = true;
    return masked;
}

std::string format_manifest(const StreamPlan& plan) {
    std::vector<std::uint64_t> pretrain, evaluation, untrainable;
    for (const auto& s : plan.pretrain) pretrain.push_back(s.timestamp_id);
    for (const auto& s : plan.evaluation) {
        evaluation.push_back(s.timestamp_id);
        if (!s.trainable) untrainable.push_back(s.timestamp_id);
    }
    std::ostringstream out;
    out << "description=" << plan.description << '\n';
    out << "seed=" << plan.seed << '\n';
    out << "mask_fraction=" << (plan.mask_fraction ? format_fraction(*plan.mask_fraction) : "")
        << '\n';
    out << "pretrain=" << id_list(pretrain) << '\n';
    out << "evaluation=" << id_list(evaluation) << '\n';
    out << "untrainable=" << id_list(untrainable) << '\n';
    return out.str();
}

PlanManifest parse_manifest(std::string_view contents) {
    PlanManifest manifest;
    for (const auto line : text::lines(contents)) {
        if (text::trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::MalformedRow, "manifest line without '='");
        }
        const auto key = text::trim(line.substr(0, eq));
        const auto value = line.substr(eq + 1);
        if (key == "description") {
            manifest.description = std::string(value);
        } else if (key == "seed") {
            manifest.seed = std::stoull(std::string(text::trim(value)));
        } else if (key == "mask_fraction") {
            manifest.mask_fraction = text::parse_number(value);
        } else if (key == "pretrain") {
            manifest.pretrain_ids = parse_id_list(value);
        } else if (key == "evaluation") {
            manifest.evaluation_ids = parse_id_list(value);
        } else if (key == "untrainable") {
            manifest.untrainable_ids = parse_id_list(value);
        }
    }
    return manifest;
}

StreamPlan rebuild_plan(const PlanManifest& manifest,
                        const std::vector<SnapshotSample>& samples) {
    std::map<std::uint64_t, const SnapshotSample*> by_id;
    for (const auto& s : samples) by_id.emplace(s.timestamp_id, &s);
    const std::set<std::uint64_t> untrainable(manifest.untrainable_ids.begin(),
                                              manifest.untrainable_ids.end());
    const auto lookup = [&](std::uint64_t id) {
        const auto it = by_id.find(id);
        if (it == by_id.end()) {
            throw Error(ErrorCode::BadConfig, "manifest references unknown timestamp " +
                                                  std::to_string(id));
        }
        return *it->second;
    };
    StreamPlan plan;
    plan.description = manifest.description;
    plan.seed = manifest.seed;
    plan.mask_fraction = manifest.mask_fraction;
    for (auto id : manifest.pretrain_ids) {
        auto s = lookup(id);
        s.trainable = true;
        plan.pretrain.push_back(std::move(s));
    }
    for (auto id : manifest.evaluation_ids) {
        auto s = lookup(id);
        s.trainable = !untrainable.contains(id);
        plan.evaluation.push_back(std::move(s));
    }
    return plan;
}

}  // namespace driftforest
