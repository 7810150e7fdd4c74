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
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace driftforest {

enum class Label : std::uint8_t { Benign = 0, Infected = 1 };

inline int to_int(Label label) { return static_cast<int>(label); }

/// The 32 per-process resource metrics, in canonical order.
const std::vector<std::string>& process_metric_names();

struct DatasetSchema {
    std::vector<std::string> feature_names = process_metric_names();
    std::size_t m_max = 227;
    // Identifier and execution-metadata columns; never become features.
    std::vector<std::string> dropped_columns = {
        "sample_no", "exp_no", "vm_id", "pid", "ppid", "sample_time",
        "process_creation_time", "label",
    };
    // Columns whose joint value identifies one system snapshot.
    std::vector<std::string> timestamp_columns = {"exp_no", "sample_no"};
    std::string label_column = "label";
    // Optional column naming the malware sample of the run the row belongs to.
    std::string hash_column = "hash";

    std::size_t n() const { return feature_names.size(); }
    std::size_t width() const { return m_max * n(); }
};

struct ProcessRecord {
    std::uint64_t timestamp_id = 0;
    std::vector<double> features;
    bool is_malicious_row = false;
    std::string run_hash;
};

/// One flattened system state. The feature vector is shared and immutable,
/// so copying samples between plans is cheap.
struct SnapshotSample {
    std::uint64_t timestamp_id = 0;
    std::shared_ptr<const std::vector<double>> vector;
    Label label = Label::Benign;
    std::optional<int> year;
    bool trainable = true;

    std::span<const double> features() const {
        return vector ? std::span<const double>(*vector) : std::span<const double>{};
    }
};

struct MetadataMap {
    std::map<std::string, int> entries;
};

enum class YearFallback { Drop, KeepUnknown };

struct EnrichResult {
    std::vector<SnapshotSample> samples;
    std::size_t dropped = 0;
    std::size_t unknown = 0;
};

/// Parses a delimited table (comma, or tab when the header has no commas)
/// into one record per data row, in row order. Status text maps
/// running -> 1 and anything else -> 0; empty or non-numeric cells become 0.
std::vector<ProcessRecord> parse_process_records(std::string_view raw_table,
                                                 const DatasetSchema& schema);

/// Groups records by timestamp, concatenating per-process blocks in row
/// order and zero-padding to m_max blocks. A snapshot is infected iff any of
/// its rows is malicious. Output is ordered by timestamp_id.
std::vector<SnapshotSample> flatten_snapshots(const std::vector<ProcessRecord>& records,
                                              const DatasetSchema& schema);

/// timestamp_id -> run hash for every record that carries one.
std::map<std::uint64_t, std::string> run_hashes(const std::vector<ProcessRecord>& records);

MetadataMap parse_metadata(std::string_view contents);
MetadataMap load_metadata(const std::filesystem::path& path);

/// Sets each sample's year from the hash of the run it belongs to. Benign
/// snapshots take the year of their run like infected ones; an infected
/// snapshot without a run hash is an error.
EnrichResult enrich_with_year(const std::vector<SnapshotSample>& samples,
                              const std::map<std::uint64_t, std::string>& hash_by_timestamp,
                              const MetadataMap& metadata, YearFallback fallback);

// Flattened dataset file: timestamp_id,year,label,f0000,... with an empty
// year cell for unknown years.
std::string format_flattened(const std::vector<SnapshotSample>& samples, std::size_t width);
std::vector<SnapshotSample> parse_flattened(std::string_view contents);
void write_flattened(const std::filesystem::path& path,
                     const std::vector<SnapshotSample>& samples, std::size_t width);
std::vector<SnapshotSample> read_flattened(const std::filesystem::path& path);

// Run file: timestamp_id,hash
std::string format_runs(const std::map<std::uint64_t, std::string>& hash_by_timestamp);
std::map<std::uint64_t, std::string> parse_runs(std::string_view contents);

}  // namespace driftforest
