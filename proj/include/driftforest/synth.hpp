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
#include <vector>

#include "driftforest/dataset.hpp"

namespace driftforest {

struct ConceptShift {
    std::size_t at = 0;  // first instance of the new concept
    int concept_id = 0;
    bool operator==(const ConceptShift&) const = default;
};

/// Synthetic system-state stream.
///
/// Every process block holds per-feature Gaussians (unit variance, fixed
/// means). An infected snapshot adds `signature_shift` standard deviations
/// to a concept-specific subset of features in one concept-specific block.
/// From the first shift onwards, each snapshot additionally carries the
/// previous concept's signature on a benign process with probability
/// `mimic_rate`, so a model frozen on the old concept starts raising false
/// alarms as well as missing the new signature.
struct SynthConfig {
    std::size_t m_max = 8;
    std::size_t n = 8;
    std::size_t n_instances = 5000;
    double infected_fraction = 0.45;
    std::vector<ConceptShift> concept_shifts;
    // Instance indices starting years 2, 3, ...; year 1 starts at 0.
    std::vector<std::size_t> year_boundaries;
    double noise = 0.0;  // label-flip probability
    std::uint64_t seed = 0;
    std::size_t min_processes = 0;  // 0 -> max(2, m_max - m_max / 4)
    double signature_shift = 3.0;
    double mimic_rate = 0.5;
    std::size_t signature_size = 0;  // features per signature; 0 -> n

    std::size_t resolved_min_processes() const;
    std::size_t resolved_signature_size() const;
    void validate() const;

    /// 227 processes x 32 metrics.
    static SynthConfig paper_shape();
};

struct ConceptSignature {
    std::size_t block = 0;
    std::vector<std::size_t> features;  // within-block feature ids, ascending
};

ConceptSignature concept_signature(const SynthConfig& config, int concept_id);
int concept_at(const SynthConfig& config, std::size_t index);
int year_at(const SynthConfig& config, std::size_t index);

/// Mean of feature `f` (within a block) for benign processes.
double benign_mean(std::size_t feature);

/// Deterministic per config (seed included). Throws BadConfig.
std::vector<SnapshotSample> generate_stream(const SynthConfig& config);

/// Prequential majority-class baseline: predicts the most frequent label
/// seen so far, benign on ties (including the first instance).
std::vector<Label> majority_oracle(const std::vector<SnapshotSample>& stream);

}  // namespace driftforest
