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

#include "driftforest/synth.hpp"

#include <algorithm>
#include <cmath>

#include "driftforest/error.hpp"
#include "driftforest/rng.hpp"

namespace driftforest {

namespace {

double quantise(double v) { return std::round(v * 1000.0) / 1000.0; }

}  // namespace

std::size_t SynthConfig::resolved_min_processes() const {
    if (min_processes != 0) return min_processes;
    return std::max<std::size_t>(2, m_max - m_max / 4);
}

std::size_t SynthConfig::resolved_signature_size() const {
    return signature_size == 0 ? n : signature_size;
}

void SynthConfig::validate() const {
    const auto bad = [](const std::string& why) { return Error(ErrorCode::BadConfig, why); };
    if (m_max < 2 || n < 1) throw bad("synthetic shape needs m_max >= 2 and n >= 1");
    if (n_instances == 0) throw bad("n_instances must be positive");
    if (!(infected_fraction >= 0.0 && infected_fraction < 1.0)) {
        throw bad("infected_fraction must lie in [0,1)");
    }
    if (!(noise >= 0.0 && noise <= 0.5)) throw bad("noise must lie in [0,0.5]");
    if (!(mimic_rate >= 0.0 && mimic_rate <= 1.0)) throw bad("mimic_rate must lie in [0,1]");
    if (!(signature_shift > 0.0)) throw bad("signature_shift must be positive");
    if (signature_size > n) throw bad("signature_size exceeds n");
    const std::size_t min_p = resolved_min_processes();
    if (min_p < 2 || min_p > m_max) throw bad("min_processes must lie in [2, m_max]");
    for (std::size_t i = 0; i < concept_shifts.size(); ++i) {
        if (concept_shifts[i].at == 0) throw bad("concept shifts must start after instance 0");
        if (i > 0 && concept_shifts[i].at <= concept_shifts[i - 1].at) {
            throw bad("concept shift indices must be strictly increasing");
        }
    }
    for (std::size_t i = 0; i < year_boundaries.size(); ++i) {
        if (year_boundaries[i] == 0 || (i > 0 && year_boundaries[i] <= year_boundaries[i - 1])) {
            throw bad("year boundaries must be positive and strictly increasing");
        }
    }
}

SynthConfig SynthConfig::paper_shape() {
    SynthConfig config;
    config.m_max = 227;
    config.n = 32;
    return config;
}

double benign_mean(std::size_t feature) { return 1.0 + 0.5 * static_cast<double>(feature % 4); }

ConceptSignature concept_signature(const SynthConfig& config, int concept_id) {
    const std::size_t min_p = config.resolved_min_processes();
    ConceptSignature sig;
    // Block 0 never carries a signature; consecutive concepts use distinct blocks.
    sig.block = 1 + static_cast<std::size_t>(concept_id) % (min_p - 1);
    Rng rng(derive_seed(config.seed, "synth.signature", static_cast<std::uint64_t>(concept_id)));
    sig.features = rng.sample_without_replacement(config.n, config.resolved_signature_size());
    return sig;
}

int concept_at(const SynthConfig& config, std::size_t index) {
    int concept_id = 0;
    for (const auto& shift : config.concept_shifts) {
        if (index >= shift.at) concept_id = shift.concept_id;
    }
    return concept_id;
}

int year_at(const SynthConfig& config, std::size_t index) {
    int year = 1;
    for (auto boundary : config.year_boundaries) {
        if (index >= boundary) ++year;
    }
    return year;
}

std::vector<SnapshotSample> generate_stream(const SynthConfig& config) {
    config.validate();
    const std::size_t n = config.n;
    const std::size_t width = config.m_max * n;
    const std::size_t min_p = config.resolved_min_processes();

    // Exact infected counts per concept segment, positions shuffled.
    std::vector<Label> truth(config.n_instances, Label::Benign);
    {
        Rng rng(derive_seed(config.seed, "synth.labels"));
        std::vector<std::size_t> cuts{0};
        for (const auto& shift : config.concept_shifts) {
            if (shift.at < config.n_instances) cuts.push_back(shift.at);
        }
        cuts.push_back(config.n_instances);
        for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
            const std::size_t length = cuts[s + 1] - cuts[s];
            const auto infected = static_cast<std::size_t>(
                std::floor(config.infected_fraction * static_cast<double>(length) + 0.5));
            for (auto pick : rng.sample_without_replacement(length, infected)) {
                truth[cuts[s] + pick] = Label::Infected;
            }
        }
    }

    Rng rng(derive_seed(config.seed, "synth.features"));
    std::vector<SnapshotSample> stream;
    stream.reserve(config.n_instances);
    for (std::size_t i = 0; i < config.n_instances; ++i) {
        const int concept_id = concept_at(config, i);
        const std::size_t processes =
            min_p + static_cast<std::size_t>(rng.below(config.m_max - min_p + 1));
        std::vector<double> values(width, 0.0);
        for (std::size_t p = 0; p < processes; ++p) {
            for (std::size_t f = 0; f < n; ++f) values[p * n + f] = benign_mean(f) + rng.normal();
        }
        const auto apply = [&](const ConceptSignature& sig) {
            for (auto f : sig.features) values[sig.block * n + f] += config.signature_shift;
        };
        if (truth[i] == Label::Infected) apply(concept_signature(config, concept_id));
        const ConceptShift* latest = nullptr;
        for (const auto& shift : config.concept_shifts) {
            if (shift.at <= i) latest = &shift;
        }
        if (latest != nullptr) {
            // The retired signature is whichever concept preceded the latest shift.
            const int previous = concept_at(config, latest->at - 1);
            if (rng.bernoulli(config.mimic_rate) && previous != concept_id) {
                apply(concept_signature(config, previous));
            }
        }
        for (auto& v : values) v = quantise(v);

        Label label = truth[i];
        if (config.noise > 0.0 && rng.bernoulli(config.noise)) {
            label = label == Label::Infected ? Label::Benign : Label::Infected;
        }
        SnapshotSample sample;
        sample.timestamp_id = i;
        sample.vector = std::make_shared<const std::vector<double>>(std::move(values));
        sample.label = label;
        sample.year = year_at(config, i);
        stream.push_back(std::move(sample));
    }
    return stream;
}

std::vector<Label> majority_oracle(const std::vector<SnapshotSample>& stream) {
    std::vector<Label> predictions;
    predictions.reserve(stream.size());
    std::size_t counts[2] = {0, 0};
    for (const auto& sample : stream) {
        predictions.push_back(counts[1] > counts[0] ? Label::Infected : Label::Benign);
        ++counts[to_int(sample.label)];
    }
    return predictions;
}

}  // namespace driftforest
