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

#include "driftforest/adwin.hpp"

#include <cmath>

#include "driftforest/error.hpp"

namespace driftforest {

namespace {

double bucket_size(std::size_t level) { return std::ldexp(1.0, static_cast<int>(level)); }

}  // namespace

Adwin::Adwin(double delta, std::size_t max_buckets, std::size_t min_subwindow)
    : delta_(delta), max_buckets_(max_buckets), min_subwindow_(min_subwindow) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw Error(ErrorCode::DomainError, "adwin delta must lie in (0,1)");
    }
    if (max_buckets < 2 || min_subwindow < 1) {
        throw Error(ErrorCode::DomainError, "adwin needs max_buckets >= 2 and min_subwindow >= 1");
    }
}

bool Adwin::update(double value) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw Error(ErrorCode::DomainError, "adwin input must lie in [0,1]");
    }
    if (width_ > 0) {
        const double w = static_cast<double>(width_);
        const double d = value - total_ / w;
        variance_ += w * d * d / (w + 1.0);
    }
    total_ += value;
    ++width_;
    if (levels_.empty()) levels_.emplace_back();
    levels_[0].push_front(Bucket{value, 0.0});
    compress();

    bool changed = false;
    while (find_and_apply_cut()) changed = true;
    if (changed) ++detections_;
    return changed;
}

double Adwin::mean() const {
    if (width_ == 0) throw Error(ErrorCode::EmptyWindow, "adwin window is empty");
    return total_ / static_cast<double>(width_);
}

std::size_t Adwin::bucket_count() const {
    std::size_t count = 0;
    for (const auto& level : levels_) count += level.size();
    return count;
}

void Adwin::compress() {
    for (std::size_t level = 0; level < levels_.size(); ++level) {
        auto& row = levels_[level];
        if (row.size() <= max_buckets_) break;
        const Bucket older = row.back();
        row.pop_back();
        const Bucket newer = row.back();
        row.pop_back();
        const double n = bucket_size(level);
        const double diff = older.total / n - newer.total / n;
        const Bucket merged{older.total + newer.total,
                            older.variance + newer.variance + n * n * diff * diff / (2.0 * n)};
        if (level + 1 == levels_.size()) levels_.emplace_back();
        levels_[level + 1].push_front(merged);
    }
}

void Adwin::drop_oldest_bucket() {
    while (!levels_.empty() && levels_.back().empty()) levels_.pop_back();
    if (levels_.empty()) return;
    const std::size_t level = levels_.size() - 1;
    const Bucket bucket = levels_[level].back();
    levels_[level].pop_back();

    const double n1 = bucket_size(level);
    width_ -= static_cast<std::size_t>(n1);
    total_ -= bucket.total;
    if (width_ == 0) {
        total_ = 0.0;
        variance_ = 0.0;
    } else {
        const double w = static_cast<double>(width_);
        const double d = bucket.total / n1 - total_ / w;
        variance_ -= bucket.variance + n1 * w * d * d / (n1 + w);
        if (variance_ < 0.0) variance_ = 0.0;
    }
    while (!levels_.empty() && levels_.back().empty()) levels_.pop_back();
}

bool Adwin::find_and_apply_cut() {
    if (width_ < 2 * min_subwindow_) return false;
    const double width = static_cast<double>(width_);
    const double log_term = std::log(2.0 * width / delta_);
    const double var = variance_ / width;

    double n0 = 0.0;
    double total0 = 0.0;
    std::size_t buckets_in_w0 = 0;
    for (std::size_t level = levels_.size(); level-- > 0;) {
        const auto& row = levels_[level];
        for (auto it = row.rbegin(); it != row.rend(); ++it) {
            n0 += bucket_size(level);
            total0 += it->total;
            ++buckets_in_w0;
            const double n1 = width - n0;
            if (n1 < static_cast<double>(min_subwindow_)) return false;
            if (n0 < static_cast<double>(min_subwindow_)) continue;

            const double mean0 = total0 / n0;
            const double mean1 = (total_ - total0) / n1;
            const double m = 1.0 / (1.0 / n0 + 1.0 / n1);
            const double eps = std::sqrt(2.0 / m * var * log_term) + 2.0 / (3.0 * m) * log_term;
            if (std::fabs(mean0 - mean1) > eps) {
                last_change_increased_ = mean1 > mean0;
                for (std::size_t i = 0; i < buckets_in_w0; ++i) drop_oldest_bucket();
                return true;
            }
        }
    }
    return false;
}

void Adwin::write(ByteWriter& out) const {
    out.f64(delta_);
    out.u64(max_buckets_);
    out.u64(min_subwindow_);
    out.f64(total_);
    out.f64(variance_);
    out.u64(width_);
    out.u64(detections_);
    out.u8(last_change_increased_ ? 1 : 0);
    out.u64(levels_.size());
    for (const auto& row : levels_) {
        out.u64(row.size());
        for (const auto& b : row) {
            out.f64(b.total);
            out.f64(b.variance);
        }
    }
}

Adwin Adwin::read(ByteReader& in) {
    const double delta = in.f64();
    const auto max_buckets = in.u64();
    const auto min_subwindow = in.u64();
    if (!(delta > 0.0 && delta < 1.0) || max_buckets < 2 || min_subwindow < 1) {
        throw Error(ErrorCode::CorruptPayload, "invalid adwin parameters");
    }
    Adwin a(delta, max_buckets, min_subwindow);
    a.total_ = in.f64();
    a.variance_ = in.f64();
    a.width_ = in.u64();
    a.detections_ = in.u64();
    a.last_change_increased_ = in.u8() != 0;
    const auto levels = in.count(8);
    std::size_t width = 0;
    for (std::uint64_t level = 0; level < levels; ++level) {
        const auto size = in.count(16);
        if (size > max_buckets || level >= 63) {
            throw Error(ErrorCode::CorruptPayload, "adwin level overflow");
        }
        auto& row = a.levels_.emplace_back();
        for (std::uint64_t i = 0; i < size; ++i) {
            const double total = in.f64();
            const double variance = in.f64();
            row.push_back(Bucket{total, variance});
        }
        width += size << level;
    }
    if (width != a.width_) throw Error(ErrorCode::CorruptPayload, "adwin width mismatch");
    return a;
}

}  // namespace driftforest
