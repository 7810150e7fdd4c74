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

#include "driftforest/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_map>

#include "driftforest/error.hpp"
#include "driftforest/text.hpp"

namespace driftforest {

const std::vector<std::string>& process_metric_names() {
    static const std::vector<std::string> names = {
        "cpu_percent",      "cpu_num",          "cpu_sys",
        "cpu_user",         "cpu_children_sys", "cpu_children_user",
        "num_threads",      "mem_shared",       "mem_data",
        "mem_vms",          "mem_rss",          "mem_dirty",
        "mem_swap",         "mem_lib",          "mem_uss",
        "mem_text",         "io_write_bytes",   "io_read_bytes",
        "io_write_chars",   "io_read_chars",    "io_write_count",
        "io_read_count",    "kb_sent",          "kb_received",
        "ionice_ioclass",   "ionice_value",     "nice",
        "ctx_switches_voluntary", "ctx_switches_involuntary", "gid_effective",
        "num_fds",          "status",
    };
    return names;
}

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::optional<bool> parse_label_cell(std::string_view cell) {
    cell = text::trim(cell);
    if (cell.empty()) return false;
    if (auto number = text::parse_number(cell)) return *number != 0.0;
    const std::string word = lower(cell);
    if (word == "malicious" || word == "infected" || word == "malware" ||
        word == "true" || word == "yes") {
        return true;
    }
    if (word == "benign" || word == "clean" || word == "false" || word == "no") {
        return false;
    }
    return std::nullopt;
}

double parse_status_cell(std::string_view cell) {
    cell = text::trim(cell);
    if (auto number = text::parse_number(cell)) return *number == 1.0 ? 1.0 : 0.0;
    return lower(cell) == "running" ? 1.0 : 0.0;
}

std::size_t find_column(const std::vector<std::string>& header, const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw Error(ErrorCode::MissingColumn, "missing column: " + name);
    }
    return static_cast<std::size_t>(it - header.begin());
}

std::string_view cell_at(const std::vector<std::string>& row, std::size_t index) {
    return index < row.size() ? std::string_view(row[index]) : std::string_view{};
}

// Orders snapshot keys numerically when every key cell is a number,
// otherwise by first appearance.
std::vector<std::uint64_t> assign_timestamp_ids(
    const std::vector<std::vector<std::string>>& keys) {
    std::vector<std::size_t> first_index;  // per distinct key, in appearance order
    std::map<std::vector<std::string>, std::size_t> distinct;
    std::vector<std::size_t> key_of_row(keys.size());
    for (std::size_t row = 0; row < keys.size(); ++row) {
        auto [it, inserted] = distinct.try_emplace(keys[row], first_index.size());
        if (inserted) first_index.push_back(row);
        key_of_row[row] = it->second;
    }

    const std::size_t count = first_index.size();
    std::vector<std::vector<double>> numeric(count);
    bool all_numeric = true;
    for (std::size_t k = 0; k < count && all_numeric; ++k) {
        for (const auto& cell : keys[first_index[k]]) {
            auto value = text::parse_number(cell);
            if (!value) {
                all_numeric = false;
                break;
            }
            numeric[k].push_back(*value);
        }
    }

    std::vector<std::size_t> order(count);
    for (std::size_t k = 0; k < count; ++k) order[k] = k;
    if (all_numeric) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return numeric[a] < numeric[b]; });
    }
    std::vector<std::uint64_t> rank(count);
    for (std::size_t pos = 0; pos < count; ++pos) rank[order[pos]] = pos;

    std::vector<std::uint64_t> ids(keys.size());
    for (std::size_t row = 0; row < keys.size(); ++row) ids[row] = rank[key_of_row[row]];
    return ids;
}

std::string feature_column_name(std::size_t index, std::size_t width) {
    std::size_t digits = 4;
    for (std::size_t w = width > 0 ? width - 1 : 0; w >= 10000; w /= 10) ++digits;
    std::string number = std::to_string(index);
    return "f" + std::string(digits > number.size() ? digits - number.size() : 0, '0') + number;
}

}  // namespace

std::vector<ProcessRecord> parse_process_records(std::string_view raw_table,
                                                 const DatasetSchema& schema) {
    const auto all_lines = text::lines(raw_table);
    std::size_t header_line = 0;
    while (header_line < all_lines.size() && text::trim(all_lines[header_line]).empty()) {
        ++header_line;
    }
    if (header_line == all_lines.size()) {
        throw Error(ErrorCode::EmptyTable, "table has no header row");
    }
    const char delimiter = text::detect_delimiter(all_lines[header_line]);
    const auto header = text::split_fields(all_lines[header_line], delimiter);

    std::vector<std::size_t> feature_columns;
    feature_columns.reserve(schema.n());
    for (const auto& name : schema.feature_names) {
        feature_columns.push_back(find_column(header, name));
    }
    std::vector<std::size_t> key_columns;
    for (const auto& name : schema.timestamp_columns) {
        key_columns.push_back(find_column(header, name));
    }
    const std::size_t label_column = find_column(header, schema.label_column);
    std::optional<std::size_t> hash_column;
    if (auto it = std::find(header.begin(), header.end(), schema.hash_column);
        !schema.hash_column.empty() && it != header.end()) {
        hash_column = static_cast<std::size_t>(it - header.begin());
    }

    std::vector<ProcessRecord> records;
    std::vector<std::vector<std::string>> keys;
    for (std::size_t line_no = header_line + 1; line_no < all_lines.size(); ++line_no) {
        if (text::trim(all_lines[line_no]).empty()) continue;
        const auto row = text::split_fields(all_lines[line_no], delimiter);

        ProcessRecord record;
        record.features.resize(schema.n(), 0.0);
        for (std::size_t f = 0; f < schema.n(); ++f) {
            const auto cell = cell_at(row, feature_columns[f]);
            if (schema.feature_names[f] == "status") {
                record.features[f] = parse_status_cell(cell);
            } else {
                record.features[f] = text::parse_number(cell).value_or(0.0);
            }
        }
        const auto label = parse_label_cell(cell_at(row, label_column));
        if (!label) {
            throw Error(ErrorCode::MalformedRow,
                        "unrecognised label on line " + std::to_string(line_no + 1));
        }
        record.is_malicious_row = *label;
        if (hash_column) record.run_hash = std::string(cell_at(row, *hash_column));

        std::vector<std::string> key;
        key.reserve(key_columns.size());
        for (std::size_t column : key_columns) key.emplace_back(cell_at(row, column));
        keys.push_back(std::move(key));
        records.push_back(std::move(record));
    }
    if (records.empty()) {
        throw Error(ErrorCode::EmptyTable, "table has no data rows");
    }

    const auto ids = assign_timestamp_ids(keys);
    for (std::size_t i = 0; i < records.size(); ++i) records[i].timestamp_id = ids[i];
    return records;
}

std::vector<SnapshotSample> flatten_snapshots(const std::vector<ProcessRecord>& records,
                                              const DatasetSchema& schema) {
    const std::size_t n = schema.n();
    struct Pending {
        std::vector<double> values;
        std::size_t processes = 0;
        bool infected = false;
    };
    std::map<std::uint64_t, Pending> snapshots;
    for (const auto& record : records) {
        if (record.features.size() != n) {
            throw Error(ErrorCode::WidthMismatch, "process record has " +
                                                      std::to_string(record.features.size()) +
                                                      " features, expected " + std::to_string(n));
        }
        auto& pending = snapshots[record.timestamp_id];
        if (pending.processes == schema.m_max) {
            throw Error(ErrorCode::TooManyProcesses,
                        "snapshot " + std::to_string(record.timestamp_id) + " exceeds " +
                            std::to_string(schema.m_max) + " processes");
        }
        if (pending.values.empty()) pending.values.assign(schema.width(), 0.0);
        std::copy(record.features.begin(), record.features.end(),
                  pending.values.begin() + static_cast<std::ptrdiff_t>(pending.processes * n));
        ++pending.processes;
        pending.infected = pending.infected || record.is_malicious_row;
    }

    std::vector<SnapshotSample> samples;
    samples.reserve(snapshots.size());
    for (auto& [timestamp, pending] : snapshots) {
        SnapshotSample sample;
        sample.timestamp_id = timestamp;
        sample.vector = std::make_shared<const std::vector<double>>(std::move(pending.values));
        sample.label = pending.infected ? Label::Infected : Label::Benign;
        samples.push_back(std::move(sample));
    }
    return samples;
}

std::map<std::uint64_t, std::string> run_hashes(const std::vector<ProcessRecord>& records) {
    std::map<std::uint64_t, std::string> out;
    for (const auto& record : records) {
        if (!record.run_hash.empty()) out.try_emplace(record.timestamp_id, record.run_hash);
    }
    return out;
}

MetadataMap parse_metadata(std::string_view contents) {
    MetadataMap metadata;
    const auto all_lines = text::lines(contents);
    bool seen_row = false;
    for (std::size_t i = 0; i < all_lines.size(); ++i) {
        const auto line = text::trim(all_lines[i]);
        if (line.empty()) continue;
        const auto fields = text::split_fields(line, text::detect_delimiter(line));
        const std::size_t line_no = i + 1;
        if (!seen_row && fields.size() == 2 && lower(fields[1]) == "year") {
            seen_row = true;  // header
            continue;
        }
        seen_row = true;
        if (fields.size() != 2 || fields[0].empty()) {
            throw Error(ErrorCode::MalformedRow, "metadata line " + std::to_string(line_no));
        }
        const auto year = text::parse_number(fields[1]);
        if (!year || *year != static_cast<int>(*year) || *year < 1) {
            throw Error(ErrorCode::MalformedRow, "metadata line " + std::to_string(line_no) +
                                                     ": year must be a positive integer");
        }
        const int rank = static_cast<int>(*year);
        auto [it, inserted] = metadata.entries.try_emplace(fields[0], rank);
        if (!inserted && it->second != rank) {
            throw Error(ErrorCode::ConflictingYear, "conflicting years for " + fields[0]);
        }
    }
    return metadata;
}

MetadataMap load_metadata(const std::filesystem::path& path) {
    return parse_metadata(text::read_file(path));
}

EnrichResult enrich_with_year(const std::vector<SnapshotSample>& samples,
                              const std::map<std::uint64_t, std::string>& hash_by_timestamp,
                              const MetadataMap& metadata, YearFallback fallback) {
    EnrichResult result;
    result.samples.reserve(samples.size());
    for (const auto& sample : samples) {
        const auto hash = hash_by_timestamp.find(sample.timestamp_id);
        if (hash == hash_by_timestamp.end() && sample.label == Label::Infected) {
            throw Error(ErrorCode::MissingHash, "infected snapshot " +
                                                    std::to_string(sample.timestamp_id) +
                                                    " has no run hash");
        }
        SnapshotSample enriched = sample;
        enriched.year.reset();
        if (hash != hash_by_timestamp.end()) {
            if (auto year = metadata.entries.find(hash->second); year != metadata.entries.end()) {
                enriched.year = year->second;
            }
        }
        if (!enriched.year) {
            if (fallback == YearFallback::Drop) {
                ++result.dropped;
                continue;
            }
            ++result.unknown;
        }
        result.samples.push_back(std::move(enriched));
    }
    return result;
}

std::string format_flattened(const std::vector<SnapshotSample>& samples, std::size_t width) {
    std::string out = "timestamp_id,year,label";
    for (std::size_t i = 0; i < width; ++i) {
        out += ',';
        out += feature_column_name(i, width);
    }
    out += '\n';
    for (const auto& sample : samples) {
        if (sample.features().size() != width) {
            throw Error(ErrorCode::WidthMismatch, "sample width differs from dataset width");
        }
        out += std::to_string(sample.timestamp_id);
        out += ',';
        if (sample.year) out += std::to_string(*sample.year);
        out += ',';
        out += std::to_string(to_int(sample.label));
        for (double value : sample.features()) {
            out += ',';
            out += text::format_number(value);
        }
        out += '\n';
    }
    return out;
}

std::vector<SnapshotSample> parse_flattened(std::string_view contents) {
    const auto all_lines = text::lines(contents);
    if (all_lines.empty() || text::trim(all_lines.front()).empty()) {
        throw Error(ErrorCode::EmptyTable, "flattened dataset has no header");
    }
    const char delimiter = text::detect_delimiter(all_lines.front());
    const auto header = text::split_fields(all_lines.front(), delimiter);
    if (header.size() < 3 || header[0] != "timestamp_id" || header[1] != "year" ||
        header[2] != "label") {
        throw Error(ErrorCode::MissingColumn, "flattened header must start with timestamp_id,year,label");
    }
    const std::size_t width = header.size() - 3;

    std::vector<SnapshotSample> samples;
    for (std::size_t i = 1; i < all_lines.size(); ++i) {
        if (text::trim(all_lines[i]).empty()) continue;
        const auto row = text::split_fields(all_lines[i], delimiter);
        const auto malformed = [&] {
            return Error(ErrorCode::MalformedRow, "flattened line " + std::to_string(i + 1));
        };
        if (row.size() != header.size()) throw malformed();
        const auto id = text::parse_number(row[0]);
        const auto label = text::parse_number(row[2]);
        if (!id || *id < 0 || !label || (*label != 0.0 && *label != 1.0)) throw malformed();

        SnapshotSample sample;
        sample.timestamp_id = static_cast<std::uint64_t>(*id);
        if (!row[1].empty()) {
            const auto year = text::parse_number(row[1]);
            if (!year) throw malformed();
            sample.year = static_cast<int>(*year);
        }
        sample.label = *label == 1.0 ? Label::Infected : Label::Benign;
        std::vector<double> values(width);
        for (std::size_t f = 0; f < width; ++f) {
            values[f] = text::parse_number(row[f + 3]).value_or(0.0);
        }
        sample.vector = std::make_shared<const std::vector<double>>(std::move(values));
        samples.push_back(std::move(sample));
    }
    return samples;
}

void write_flattened(const std::filesystem::path& path,
                     const std::vector<SnapshotSample>& samples, std::size_t width) {
    text::write_file(path, format_flattened(samples, width));
}

std::vector<SnapshotSample> read_flattened(const std::filesystem::path& path) {
    return parse_flattened(text::read_file(path));
}

std::string format_runs(const std::map<std::uint64_t, std::string>& hash_by_timestamp) {
    std::string out = "timestamp_id,hash\n";
    for (const auto& [timestamp, hash] : hash_by_timestamp) {
        out += std::to_string(timestamp) + "," + hash + "\n";
    }
    return out;
}

std::map<std::uint64_t, std::string> parse_runs(std::string_view contents) {
    std::map<std::uint64_t, std::string> out;
    const auto all_lines = text::lines(contents);
    for (std::size_t i = 0; i < all_lines.size(); ++i) {
        const auto line = text::trim(all_lines[i]);
        if (line.empty()) continue;
        const auto fields = text::split_fields(line, text::detect_delimiter(line));
        if (i == 0 && !fields.empty() && fields[0] == "timestamp_id") continue;
        const auto id = fields.size() == 2 ? text::parse_number(fields[0]) : std::nullopt;
        if (!id || *id < 0 || fields[1].empty()) {
            throw Error(ErrorCode::MalformedRow, "run file line " + std::to_string(i + 1));
        }
        out[static_cast<std::uint64_t>(*id)] = fields[1];
    }
    return out;
}

}  // namespace driftforest
