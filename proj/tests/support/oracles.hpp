// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Brute-force reference implementations shared by the unit and acceptance tests.
#pragma once

#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "hybridcast/precoder.hpp"
#include "hybridcast/scheduler.hpp"

namespace hybridcast::oracle {

struct NaiveSchedule {
    std::vector<std::vector<Index>> windows;
    double objective = std::numeric_limits<double>::infinity();
    bool found = false;
};

// Every map group -> label in [0, G)^G, relabelled by first appearance.
inline std::set<std::vector<int>> all_set_partitions(int g) {
    std::set<std::vector<int>> out;
    std::vector<int> a(static_cast<std::size_t>(g), 0);
    while (true) {
        std::vector<int> relabel(static_cast<std::size_t>(g), -1), canon(a.size());
        int next = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (relabel[a[i]] < 0) relabel[a[i]] = next++;
            canon[i] = relabel[a[i]];
        }
        out.insert(canon);
        std::size_t pos = 0;
        while (pos < a.size() && ++a[pos] == g) a[pos++] = 0;
        if (pos == a.size()) break;
    }
    return out;
}

inline NaiveSchedule naive_schedule(const RMatrix& rho, double lambda, double omega, Index n_rf) {
    const int g = static_cast<int>(rho.rows());
    NaiveSchedule best;
    for (const auto& labels : all_set_partitions(g)) {
        int blocks = 0;
        for (int l : labels) blocks = std::max(blocks, l + 1);
        std::vector<std::vector<Index>> w(static_cast<std::size_t>(blocks));
        for (int i = 0; i < g; ++i) w[labels[i]].push_back(i);
        bool ok = true;
        double igc = 0.0;
        for (const auto& win : w) {
            if (static_cast<Index>(win.size()) > n_rf) ok = false;
            double s = 0.0;
            for (std::size_t a = 0; a < win.size(); ++a)
                for (std::size_t b = a + 1; b < win.size(); ++b) s += rho(win[a], win[b]);
            if (s > lambda) ok = false;
            igc += s;
        }
        if (!ok) continue;
        const double obj = static_cast<double>(blocks) + omega * igc;
        if (!best.found || obj < best.objective) {
            best.found = true;
            best.objective = obj;
            best.windows = w;
        }
    }
    return best;
}

// Max over all D^n phase vectors of score(f).
template <class Score>
double exhaustive_phase_search(Index n, const precoder::PhaseSet& phases, Score&& score) {
    const int d = phases.levels();
    std::vector<int> code(static_cast<std::size_t>(n), 0);
    double best = -std::numeric_limits<double>::infinity();
    CVector f(n);
    while (true) {
        for (Index i = 0; i < n; ++i) f(i) = phases.value(code[i]);
        best = std::max(best, score(f));
        std::size_t pos = 0;
        while (pos < code.size() && ++code[pos] == d) code[pos++] = 0;
        if (pos == code.size()) break;
    }
    return best;
}

inline RMatrix random_igc(Index g, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RMatrix rho = RMatrix::Zero(g, g);
    for (Index i = 0; i < g; ++i)
        for (Index j = i + 1; j < g; ++j) rho(i, j) = rho(j, i) = u(rng);
    return rho;
}

} // namespace hybridcast::oracle
