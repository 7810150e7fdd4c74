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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "driftforest/error.hpp"
#include "driftforest/rng.hpp"
#include "driftforest/stream.hpp"

using namespace driftforest;

namespace {

std::vector<SnapshotSample> make_samples(std::size_t n, double infected_share = 0.5,
                                         int years = 0) {
    auto shared = std::make_shared<const std::vector<double>>(std::vector<double>{0.0});
    std::vector<SnapshotSample> out;
    for (std::size_t i = 0; i < n; ++i) {
        SnapshotSample s;
        s.timestamp_id = i;
        s.vector = std::make_shared<const std::vector<double>>(std::vector<double>{double(i)});
        // Infected labels spread evenly: share * n of the first n samples, rounded down.
        const auto before = static_cast<std::size_t>(std::floor(double(i) * infected_share));
        const auto after = static_cast<std::size_t>(std::floor(double(i + 1) * infected_share));
        s.label = after > before ? Label::Infected : Label::Benign;
        if (years > 0) s.year = 1 + static_cast<int>((i * 7919) % years);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<std::uint64_t> ids(const std::vector<SnapshotSample>& v) {
    std::vector<std::uint64_t> out;
    for (const auto& s : v) out.push_back(s.timestamp_id);
    return out;
}

std::size_t trainable_infected(const StreamPlan& p) {
    return static_cast<std::size_t>(std::count_if(p.evaluation.begin(), p.evaluation.end(), [](const auto& s) {
        return s.label == Label::Infected && s.trainable;
    }));
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::Usage;
}

}  // namespace

TEST(RandomSplit, PaperDatasetSizes) {
    const auto plan = random_split(make_samples(28213), 0.6, 1);
    EXPECT_EQ(plan.pretrain.size(), 16927u);
    EXPECT_EQ(plan.evaluation.size(), 11286u);
}

TEST(RandomSplit, SizesAreFloorForAnyRatio) {
    Rng rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(300);
        const double ratio = 0.001 + 0.998 * rng.uniform();
        const auto plan = random_split(make_samples(n), ratio, trial);
        ASSERT_EQ(plan.pretrain.size(), static_cast<std::size_t>(std::floor(ratio * n)));
        ASSERT_EQ(plan.pretrain.size() + plan.evaluation.size(), n);
    }
}

TEST(RandomSplit, SeedsChangeMembershipNotSizes) {
    const auto samples = make_samples(10);
    const auto base = random_split(samples, 0.6, 1);
    bool differs = false;
    for (std::uint64_t seed = 2; seed < 6; ++seed) {
        const auto other = random_split(samples, 0.6, seed);
        EXPECT_EQ(other.pretrain.size(), 6u);
        differs = differs || ids(other.pretrain) != ids(base.pretrain);
    }
    EXPECT_TRUE(differs);
}

TEST(RandomSplit, SameSeedIsIdenticalAndSorted) {
    const auto samples = make_samples(500);
    const auto a = random_split(samples, 0.6, 99);
    const auto b = random_split(samples, 0.6, 99);
    EXPECT_EQ(ids(a.pretrain), ids(b.pretrain));
    EXPECT_EQ(ids(a.evaluation), ids(b.evaluation));
    const auto p = ids(a.pretrain);
    EXPECT_TRUE(std::is_sorted(p.begin(), p.end()));
    const auto e = ids(a.evaluation);
    EXPECT_TRUE(std::is_sorted(e.begin(), e.end()));
    for (const auto& s : a.evaluation) EXPECT_FALSE(s.trainable);
}

TEST(RandomSplit, RatioOutsideOpenIntervalIsRejected) {
    const auto samples = make_samples(10);
    for (double r : {0.0, 1.0, -0.5, 1.5}) {
        EXPECT_EQ(code_of([&] { random_split(samples, r, 1); }), ErrorCode::BadRatio);
    }
}

TEST(TemporalSplit, PivotOneSeparatesFirstYear) {
    const auto plan = temporal_split(make_samples(1000, 0.5, 10), 1);
    for (const auto& s : plan.pretrain) EXPECT_EQ(*s.year, 1);
    for (const auto& s : plan.evaluation) EXPECT_GE(*s.year, 2);
    EXPECT_EQ(plan.pretrain.size() + plan.evaluation.size(), 1000u);
    std::set<int> eval_years;
    for (const auto& s : plan.evaluation) eval_years.insert(*s.year);
    EXPECT_EQ(eval_years.size(), 9u);
}

TEST(TemporalSplit, OutputIsChronological) {
    const auto plan = temporal_split(make_samples(300, 0.5, 5), 2);
    const auto ordered = [](const std::vector<SnapshotSample>& v) {
        return std::is_sorted(v.begin(), v.end(), [](const auto& a, const auto& b) {
            return std::pair(*a.year, a.timestamp_id) < std::pair(*b.year, b.timestamp_id);
        });
    };
    EXPECT_TRUE(ordered(plan.pretrain));
    EXPECT_TRUE(ordered(plan.evaluation));
    EXPECT_LT(*plan.pretrain.back().year, *plan.evaluation.front().year);
}

TEST(TemporalSplit, LastYearPivotLeavesEmptySide) {
    const auto samples = make_samples(100, 0.5, 10);
    EXPECT_EQ(code_of([&] { temporal_split(samples, 10); }), ErrorCode::EmptySide);
    EXPECT_EQ(code_of([&] { temporal_split(samples, 0); }), ErrorCode::EmptySide);
}

TEST(TemporalSplit, MinimalTwoSamples) {
    auto samples = make_samples(2);
    samples[0].year = 1;
    samples[1].year = 2;
    const auto plan = temporal_split(samples, 1);
    ASSERT_EQ(plan.pretrain.size(), 1u);
    ASSERT_EQ(plan.evaluation.size(), 1u);
    EXPECT_EQ(plan.pretrain[0].timestamp_id, 0u);
    EXPECT_EQ(plan.evaluation[0].timestamp_id, 1u);
}

TEST(TemporalSplit, UnknownYearIsRejected) {
    auto samples = make_samples(4, 0.5, 2);
    samples[2].year.reset();
    EXPECT_EQ(code_of([&] { temporal_split(samples, 1); }), ErrorCode::UnknownYear);
}

TEST(MaskLabels, EndpointFractions) {
    const auto plan = temporal_split(make_samples(400, 0.5, 4), 1);
    std::size_t infected = 0;
    for (const auto& s : plan.evaluation) infected += s.label == Label::Infected;
    EXPECT_EQ(trainable_infected(mask_labels(plan, 0.0, 1)), 0u);
    EXPECT_EQ(trainable_infected(mask_labels(plan, 1.0, 1)), infected);
}

TEST(MaskLabels, HalfOfTenIsFive) {
    StreamPlan plan;
    plan.evaluation = make_samples(20, 0.5);
    const auto masked = mask_labels(plan, 0.5, 3);
    EXPECT_EQ(trainable_infected(masked), 5u);
}

TEST(MaskLabels, RoundsHalfUp) {
    StreamPlan plan;
    plan.evaluation = make_samples(10, 0.5);  // 5 infected
    EXPECT_EQ(trainable_infected(mask_labels(plan, 0.5, 3)), 3u);
    EXPECT_EQ(trainable_infected(mask_labels(plan, 0.1, 3)), 1u);
    EXPECT_EQ(trainable_infected(mask_labels(plan, 0.09, 3)), 0u);
}

TEST(MaskLabels, OnlyTrainableFlagsChange) {
    const auto plan = temporal_split(make_samples(500, 0.45, 5), 1);
    const auto masked = mask_labels(plan, 0.3, 17);
    ASSERT_EQ(masked.evaluation.size(), plan.evaluation.size());
    EXPECT_EQ(ids(masked.pretrain), ids(plan.pretrain));
    for (std::size_t i = 0; i < plan.evaluation.size(); ++i) {
        EXPECT_EQ(masked.evaluation[i].timestamp_id, plan.evaluation[i].timestamp_id);
        EXPECT_EQ(masked.evaluation[i].label, plan.evaluation[i].label);
        EXPECT_EQ(masked.evaluation[i].vector, plan.evaluation[i].vector);
        if (plan.evaluation[i].label == Label::Benign) {
            EXPECT_TRUE(masked.evaluation[i].trainable);
        }
    }
    for (const auto& s : masked.pretrain) EXPECT_TRUE(s.trainable);
    EXPECT_EQ(masked.mask_fraction, 0.3);
}

TEST(MaskLabels, SameSeedRevealsNestedSets) {
    const auto plan = temporal_split(make_samples(800, 0.45, 4), 1);
    std::vector<std::set<std::uint64_t>> revealed;
    for (double f : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        std::set<std::uint64_t> r;
        for (const auto& s : mask_labels(plan, f, 5).evaluation) {
            if (s.label == Label::Infected && s.trainable) r.insert(s.timestamp_id);
        }
        revealed.push_back(r);
    }
    for (std::size_t i = 1; i < revealed.size(); ++i) {
        EXPECT_TRUE(std::includes(revealed[i].begin(), revealed[i].end(), revealed[i - 1].begin(),
                                  revealed[i - 1].end()));
    }
}

TEST(MaskLabels, DeterministicPerSeed) {
    const auto plan = temporal_split(make_samples(300, 0.5, 3), 1);
    const auto a = mask_labels(plan, 0.5, 8);
    const auto b = mask_labels(plan, 0.5, 8);
    for (std::size_t i = 0; i < a.evaluation.size(); ++i) {
        EXPECT_EQ(a.evaluation[i].trainable, b.evaluation[i].trainable);
    }
}

TEST(MaskLabels, ErrorsOnBadFractionOrEmptyEvaluation) {
    const auto plan = temporal_split(make_samples(20, 0.5, 2), 1);
    EXPECT_EQ(code_of([&] { mask_labels(plan, -0.1, 1); }), ErrorCode::BadFraction);
    EXPECT_EQ(code_of([&] { mask_labels(plan, 1.5, 1); }), ErrorCode::BadFraction);
    EXPECT_EQ(code_of([&] { mask_labels(StreamPlan{}, 0.5, 1); }), ErrorCode::EmptyEvaluation);
}

TEST(Manifest, RebuildsPlanExactly) {
    const auto samples = make_samples(200, 0.5, 4);
    const auto plan = mask_labels(temporal_split(samples, 2), 0.4, 21);
    const std::string text = format_manifest(plan);
    const auto manifest = parse_manifest(text);
    EXPECT_EQ(manifest.seed, 21u);
    EXPECT_EQ(manifest.mask_fraction, 0.4);
    const auto rebuilt = rebuild_plan(manifest, samples);
    EXPECT_EQ(ids(rebuilt.pretrain), ids(plan.pretrain));
    EXPECT_EQ(ids(rebuilt.evaluation), ids(plan.evaluation));
    for (std::size_t i = 0; i < plan.evaluation.size(); ++i) {
        EXPECT_EQ(rebuilt.evaluation[i].trainable, plan.evaluation[i].trainable);
    }
    EXPECT_EQ(format_manifest(rebuilt), text);
}

TEST(Manifest, UnknownIdIsReported) {
    const auto samples = make_samples(10, 0.5, 2);
    auto manifest = parse_manifest(format_manifest(temporal_split(samples, 1)));
    manifest.evaluation_ids.push_back(999);
    EXPECT_THROW(rebuild_plan(manifest, samples), Error);
}
