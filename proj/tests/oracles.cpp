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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oracle {

double entropy(double a, double b) {
    const double n = a + b;
    if (n <= 0) return 0.0;
    double h = 0.0;
    if (a > 0) h -= a / n * std::log(a / n) / std::log(2.0);
    if (b > 0) h -= b / n * std::log(b / n) / std::log(2.0);
    return h;
}

namespace {

Cut best_cut_on(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                const std::vector<std::size_t>& idx, std::size_t feature) {
    std::vector<std::size_t> order = idx;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return rows[a][feature] < rows[b][feature]; });
    double total[2] = {0, 0};
    for (auto i : order) total[labels[i]] += 1;
    const double n = total[0] + total[1];
    const double parent = entropy(total[0], total[1]);

    Cut best{feature, 0.0, -1.0};
    double left[2] = {0, 0};
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        left[labels[order[k]]] += 1;
        const double a = rows[order[k]][feature];
        const double b = rows[order[k + 1]][feature];
        if (a == b) continue;
        const double nl = left[0] + left[1];
        const double nr = n - nl;
        const double gain = parent - nl / n * entropy(left[0], left[1]) -
                            nr / n * entropy(total[0] - left[0], total[1] - left[1]);
        if (gain > best.gain) best = {feature, (a + b) / 2, gain};
    }
    return best;
}

}  // namespace

Cut best_cut(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
             std::size_t feature) {
    std::vector<std::size_t> idx(rows.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return best_cut_on(rows, labels, idx, feature);
}

ExhaustiveTree::ExhaustiveTree(const std::vector<std::vector<double>>& rows,
                               const std::vector<int>& labels, std::size_t max_depth) {
    std::vector<std::size_t> idx(rows.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    build(rows, labels, idx, 0, max_depth);
}

int ExhaustiveTree::build(const std::vector<std::vector<double>>& rows,
                          const std::vector<int>& labels, const std::vector<std::size_t>& idx,
                          std::size_t depth, std::size_t max_depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    std::size_t ones = 0;
    for (auto i : idx) ones += labels[i];
    nodes_[id].label = 2 * ones > idx.size() ? 1 : 0;
    if (depth == max_depth || ones == 0 || ones == idx.size()) return id;

    Cut best{0, 0.0, 0.0};
    for (std::size_t f = 0; f < rows.front().size(); ++f) {
        const Cut c = best_cut_on(rows, labels, idx, f);
        if (c.gain > best.gain) best = c;
    }
    if (best.gain <= 0.0) return id;
    std::vector<std::size_t> l, r;
    for (auto i : idx) (rows[i][best.feature] <= best.threshold ? l : r).push_back(i);
    const int left = build(rows, labels, l, depth + 1, max_depth);
    const int right = build(rows, labels, r, depth + 1, max_depth);
    nodes_[id].leaf = false;
    nodes_[id].feature = best.feature;
    nodes_[id].threshold = best.threshold;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

int ExhaustiveTree::predict(const std::vector<double>& x) const {
    int i = 0;
    while (!nodes_[i].leaf) {
        i = x[nodes_[i].feature] <= nodes_[i].threshold ? nodes_[i].left : nodes_[i].right;
    }
    return nodes_[i].label;
}

double hoeffding(double range, double delta, double n) {
    const long double r = range;
    return static_cast<double>(std::sqrt(r * r * std::log(1.0L / delta) / (2.0L * n)));
}

}  // namespace oracle
