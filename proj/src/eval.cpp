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

#include "driftforest/eval.hpp"

#include <filesystem>
#include <map>

#include "driftforest/error.hpp"
#include "driftforest/text.hpp"

namespace driftforest {

void ConfusionCounts::add(Label truth, Label predicted) {
    if (truth == Label::Infected) {
        (predicted == Label::Infected ? tp : fn) += 1;
    } else {
        (predicted == Label::Infected ? fp : tn) += 1;
    }
}

Metrics compute_metrics(const ConfusionCounts& c) {
    if (c.total() == 0) throw Error(ErrorCode::EmptyConfusion, "no scored instances");
    const auto ratio = [](std::uint64_t num, std::uint64_t den) {
        return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    Metrics m;
    m.accuracy = ratio(c.tp + c.tn, c.total());
    m.precision = ratio(c.tp, c.tp + c.fp);
    m.recall = ratio(c.tp, c.tp + c.fn);
    const double pr = m.precision + m.recall;
    m.f_measure = pr == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / pr;
    return m;
}

void TestThenTrainGuard::record_prediction(std::size_t index) {
    if (index == predicted_) ++predicted_;
}

void TestThenTrainGuard::read_label(std::size_t index) {
    ++label_reads_;
    if (index >= predicted_) ++violations_;
}

std::uint64_t MetricsReport::sequence_hash() const {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    const auto mix = [&hash](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            hash ^= (v >> (8 * i)) & 0xffU;
            hash *= 0x100000001b3ULL;
        }
    };
    for (const auto& entry : instances) {
        mix(entry.index);
        mix(static_cast<std::uint64_t>(to_int(entry.truth)));
    }
    return hash;
}

MetricsReport build_report(std::vector<InstanceLog> instances, std::size_t window) {
    if (window == 0) throw Error(ErrorCode::BadConfig, "window must be positive");
    if (instances.empty()) throw Error(ErrorCode::EmptyEvaluation, "no evaluation instances");
    MetricsReport report;
    report.window = window;
    report.cumulative.reserve(instances.size());
    std::size_t correct = 0;
    std::size_t window_correct = 0;
    std::size_t window_size = 0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto& entry = instances[i];
        report.confusion.add(entry.truth, entry.prediction);
        const bool hit = entry.truth == entry.prediction;
        correct += hit ? 1 : 0;
        window_correct += hit ? 1 : 0;
        ++window_size;
        report.cumulative.push_back(static_cast<double>(correct) / static_cast<double>(i + 1));
        if (window_size == window || i + 1 == instances.size()) {
            report.windows.push_back(WindowStat{report.windows.size(), window_size,
                                                static_cast<double>(window_correct) /
                                                    static_cast<double>(window_size)});
            window_correct = 0;
            window_size = 0;
        }
    }
    report.metrics = compute_metrics(report.confusion);
    report.instances = std::move(instances);
    return report;
}

MetricsReport prequential_run(ForestModel& model, const StreamPlan& plan,
                              const PrequentialOptions& options) {
    if (plan.evaluation.empty()) {
        throw Error(ErrorCode::EmptyEvaluation, "plan has no evaluation samples");
    }
    if (options.pretrain) arf_pretrain(model, plan.pretrain);

    TestThenTrainGuard guard;
    std::vector<InstanceLog> log;
    log.reserve(plan.evaluation.size());
    std::size_t trained = 0;
    for (std::size_t i = 0; i < plan.evaluation.size(); ++i) {
        const SnapshotSample& sample = plan.evaluation[i];
        const ForestVote vote = model.predict(sample.features());
        log.push_back(InstanceLog{i, Label::Benign, vote.label, sample.trainable});
        if (options.instrumented) guard.record_prediction(i);

        if (options.instrumented) guard.read_label(i);
        const Label truth = sample.label;
        log.back().truth = truth;

        if (options.learn && sample.trainable && model.adaptive()) {
            model.learn_one(sample.features(), truth);
            ++trained;
        }
    }
    MetricsReport report = build_report(std::move(log), options.window);
    report.trained = trained;
    report.label_reads = guard.label_reads();
    report.order_violations = guard.violations();
    return report;
}

ReportComparison compare_reports(const MetricsReport& first, const MetricsReport& second) {
    if (first.instances.size() != second.instances.size() ||
        first.sequence_hash() != second.sequence_hash()) {
        throw Error(ErrorCode::SequenceMismatch, "reports were scored on different sequences");
    }
    ReportComparison cmp;
    cmp.first = first.metrics;
    cmp.second = second.metrics;
    const double a[] = {first.metrics.accuracy, first.metrics.precision, first.metrics.recall,
                        first.metrics.f_measure};
    const double b[] = {second.metrics.accuracy, second.metrics.precision, second.metrics.recall,
                        second.metrics.f_measure};
    cmp.delta = Metrics{a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]};
    bool first_ge = true, second_ge = true, first_gt = false, second_gt = false;
    for (int i = 0; i < 4; ++i) {
        first_ge = first_ge && a[i] >= b[i];
        second_ge = second_ge && b[i] >= a[i];
        first_gt = first_gt || a[i] > b[i];
        second_gt = second_gt || b[i] > a[i];
    }
    if (first_ge && first_gt) {
        cmp.verdict = Dominance::FirstDominates;
    } else if (second_ge && second_gt) {
        cmp.verdict = Dominance::SecondDominates;
    }
    return cmp;
}

std::string format_summary(const MetricsReport& report) {
    const auto& m = report.metrics;
    const auto& c = report.confusion;
    std::string out = "metric,value\n";
    out += "accuracy," + text::format_number(m.accuracy) + "\n";
    out += "precision," + text::format_number(m.precision) + "\n";
    out += "recall," + text::format_number(m.recall) + "\n";
    out += "f_measure," + text::format_number(m.f_measure) + "\n";
    out += "tp," + std::to_string(c.tp) + "\n";
    out += "fp," + std::to_string(c.fp) + "\n";
    out += "tn," + std::to_string(c.tn) + "\n";
    out += "fn," + std::to_string(c.fn) + "\n";
    out += "instances," + std::to_string(c.total()) + "\n";
    out += "trained," + std::to_string(report.trained) + "\n";
    out += "window," + std::to_string(report.window) + "\n";
    return out;
}

void write_report(const std::filesystem::path& directory, const MetricsReport& report) {
    std::filesystem::create_directories(directory);
    text::write_file(directory / "summary.csv", format_summary(report));

    std::string instances = "idx,truth,pred,trainable\n";
    for (const auto& e : report.instances) {
        instances += std::to_string(e.index) + "," + std::to_string(to_int(e.truth)) + "," +
                     std::to_string(to_int(e.prediction)) + "," + (e.trainable ? "1" : "0") + "\n";
    }
    text::write_file(directory / "instances.csv", instances);

    std::string windows = "window_idx,size,accuracy\n";
    for (const auto& w : report.windows) {
        windows += std::to_string(w.index) + "," + std::to_string(w.size) + "," +
                   text::format_number(w.accuracy) + "\n";
    }
    text::write_file(directory / "windows.csv", windows);

    std::string cumulative = "idx,accuracy\n";
    for (std::size_t i = 0; i < report.cumulative.size(); ++i) {
        cumulative += std::to_string(i) + "," + text::format_number(report.cumulative[i]) + "\n";
    }
    text::write_file(directory / "cumulative.csv", cumulative);
}

MetricsReport read_report(const std::filesystem::path& directory) {
    std::map<std::string, std::string> summary;
    const std::string summary_text = text::read_file(directory / "summary.csv");
    for (const auto line : text::lines(summary_text)) {
        const auto fields = text::split_fields(line, ',');
        if (fields.size() == 2) summary[fields[0]] = fields[1];
    }
    std::size_t window = 250;
    if (auto it = summary.find("window"); it != summary.end()) {
        window = static_cast<std::size_t>(text::parse_number(it->second).value_or(250));
    }

    std::vector<InstanceLog> instances;
    const std::string instances_text = text::read_file(directory / "instances.csv");
    const auto all_lines = text::lines(instances_text);
    for (std::size_t i = 1; i < all_lines.size(); ++i) {
        if (text::trim(all_lines[i]).empty()) continue;
        const auto f = text::split_fields(all_lines[i], ',');
        if (f.size() != 4) {
            throw Error(ErrorCode::MalformedRow, "instances.csv line " + std::to_string(i + 1));
        }
        InstanceLog entry;
        entry.index = static_cast<std::size_t>(text::parse_number(f[0]).value_or(0));
        entry.truth = f[1] == "1" ? Label::Infected : Label::Benign;
        entry.prediction = f[2] == "1" ? Label::Infected : Label::Benign;
        entry.trainable = f[3] == "1";
        instances.push_back(entry);
    }
    MetricsReport report = build_report(std::move(instances), window);
    if (auto it = summary.find("trained"); it != summary.end()) {
        report.trained = static_cast<std::size_t>(text::parse_number(it->second).value_or(0));
    }
    return report;
}

}  // namespace driftforest
