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
#include <filesystem>
#include <vector>

#include "driftforest/dataset.hpp"
#include "driftforest/forest.hpp"
#include "driftforest/stream.hpp"

namespace driftforest {

/// Positive class is Infected.
struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const { return tp + fp + tn + fn; }
    void add(Label truth, Label predicted);
    bool operator==(const ConfusionCounts&) const = default;
};

struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
    bool operator==(const Metrics&) const = default;
};

/// Zero denominators give 0 for precision, recall and F. Throws
/// EmptyConfusion when no instance was scored.
Metrics compute_metrics(const ConfusionCounts& confusion);

struct WindowStat {
    std::size_t index = 0;
    std::size_t size = 0;
    double accuracy = 0.0;
    bool operator==(const WindowStat&) const = default;
};

struct InstanceLog {
    std::size_t index = 0;
    Label truth = Label::Benign;
    Label prediction = Label::Benign;
    bool trainable = false;
    bool operator==(const InstanceLog&) const = default;
};

/// Tracks the order of prediction records and label reads. A label read for
/// instance i before its prediction was recorded counts as a violation.
class TestThenTrainGuard {
public:
    void record_prediction(std::size_t index);
    void read_label(std::size_t index);

    std::size_t label_reads() const { return label_reads_; }
    std::size_t violations() const { return violations_; }

private:
    std::size_t predicted_ = 0;  // predictions recorded for [0, predicted_)
    std::size_t label_reads_ = 0;
    std::size_t violations_ = 0;
};

struct MetricsReport {
    ConfusionCounts confusion;
    Metrics metrics;
    std::size_t window = 250;
    std::vector<WindowStat> windows;
    std::vector<double> cumulative;
    std::vector<InstanceLog> instances;
    std::size_t trained = 0;  // evaluation instances used for an update

    // Filled by instrumented runs only.
    std::size_t label_reads = 0;
    std::size_t order_violations = 0;

    /// Fingerprint of the scored sequence (index, truth).
    std::uint64_t sequence_hash() const;
    bool operator==(const MetricsReport&) const = default;
};

struct PrequentialOptions {
    std::size_t window = 250;
    bool instrumented = false;
    bool pretrain = false;  // run arf_pretrain on plan.pretrain first
    bool learn = true;      // false gives predict-only scoring
};

/// Predicts each evaluation instance in order, records the outcome, and
/// only then learns from it when the instance is trainable and the model is
/// adaptive.
MetricsReport prequential_run(ForestModel& model, const StreamPlan& plan,
                              const PrequentialOptions& options = {});

/// Builds every derived series from an instance log.
MetricsReport build_report(std::vector<InstanceLog> instances, std::size_t window);

enum class Dominance { None, FirstDominates, SecondDominates };

struct ReportComparison {
    Metrics first;
    Metrics second;
    Metrics delta;  // first - second
    Dominance verdict = Dominance::None;
};

/// Throws SequenceMismatch unless both reports scored the same sequence.
ReportComparison compare_reports(const MetricsReport& first, const MetricsReport& second);

// summary.csv, instances.csv, windows.csv, cumulative.csv
void write_report(const std::filesystem::path& directory, const MetricsReport& report);
MetricsReport read_report(const std::filesystem::path& directory);
std::string format_summary(const MetricsReport& report);

}  // namespace driftforest
