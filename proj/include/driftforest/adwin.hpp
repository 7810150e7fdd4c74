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
#include <deque>
#include <vector>

#include "driftforest/binary_io.hpp"

namespace driftforest {

/// Adaptive-windowing change detector over values in [0, 1].
///
/// The window is kept as an exponential histogram: level i holds at most
/// `max_buckets` buckets summarising 2^i consecutive values each (sum and
/// sum of squared deviations). After every insertion each bucket boundary
/// that leaves at least `min_subwindow` values on both sides is tested; when
/// the sub-window means differ by more than
///
///   eps = sqrt(2/m * var * ln(2/d')) + 2/(3m) * ln(2/d'),
///   m = 1 / (1/n0 + 1/n1),  d' = delta / width,
///
/// the older sub-window is dropped and the test repeats on what remains.
class Adwin {
public:
    explicit Adwin(double delta = 0.002, std::size_t max_buckets = 5,
                   std::size_t min_subwindow = 5);

    /// Appends a value and returns true if any cut happened.
    bool update(double value);

    /// Throws EmptyWindow on an empty window.
    double mean() const;

    double variance() const { return width_ > 0 ? variance_ / static_cast<double>(width_) : 0.0; }
    std::size_t width() const { return width_; }
    std::size_t bucket_count() const;
    std::size_t max_buckets() const { return max_buckets_; }
    double delta() const { return delta_; }
    std::size_t detections() const { return detections_; }

    /// Whether the most recent cut was towards a higher mean.
    bool last_change_increased() const { return last_change_increased_; }

    void write(ByteWriter& out) const;
    static Adwin read(ByteReader& in);

    bool operator==(const Adwin&) const = default;

private:
    struct Bucket {
        double total = 0.0;
        double variance = 0.0;
        bool operator==(const Bucket&) const = default;
    };

    void compress();
    void drop_oldest_bucket();
    bool find_and_apply_cut();

    double delta_;
    std::size_t max_buckets_;
    std::size_t min_subwindow_;
    // levels_[i].front() is the newest bucket of size 2^i.
    std::vector<std::deque<Bucket>> levels_;
    double total_ = 0.0;
    double variance_ = 0.0;
    std::size_t width_ = 0;
    std::size_t detections_ = 0;
    bool last_change_increased_ = false;
};

}  // namespace driftforest
