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

#include "hybridcast/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <string>

namespace hybridcast::sched {

void Schedule::validate(Index g_total, Index n_rf) const {
    std::vector<int> seen(static_cast<std::size_t>(g_total), 0);
    for (const auto& w : windows) {
        if (w.empty() || static_cast<Index>(w.size()) > n_rf)
            throw std::invalid_argument("schedule window size outside [1, n_rf]");
        for (Index g : w) {
            if (g < 0 || g >= g_total)
                throw std::out_of_range("schedule references group " + std::to_string(g));
            if (seen[g]++)
                throw std::invalid_argument("group " + std::to_string(g) + " scheduled twice");
        }
    }
    for (Index g = 0; g < g_total; ++g)
        if (!seen[g])
            throw std::invalid_argument("group " + std::to_string(g) + " never scheduled");
}

double window_igc(const RMatrix& rho, const Window& window) {
    double s = 0.0;
    for (std::size_t a = 0; a < window.size(); ++a)
        for (std::size_t b = a + 1; b < window.size(); ++b)
            s += rho(window[a], window[b]);
    return s;
}

double schedule_objective(const RMatrix& rho, const Schedule& schedule, double omega) {
    double igc = 0.0;
    for (const auto& w : schedule.windows)
        igc += window_igc(rho, w);
    return static_cast<double>(schedule.t_s()) + omega * igc;
}

namespace {

void check_rho(const RMatrix& rho) {
    if (rho.rows() != rho.cols())
        throw DimensionError("IGC matrix must be square");
    for (Index i = 0; i < rho.rows(); ++i)
        for (Index j = 0; j < rho.cols(); ++j) {
            if (i != j && !(rho(i, j) >= 0.0 && rho(i, j) <= 1.0))
                throw std::invalid_argument("IGC entries must lie in [0, 1]");
            if (rho(i, j) != rho(j, i))
                throw std::invalid_argument("IGC matrix must be symmetric");
        }
}

void check_params(const SchedulerParams& p) {
    if (p.n_rf < 1)
        throw std::invalid_argument("n_rf must be >= 1");
    if (!(p.lambda >= 0.0))
        throw std::invalid_argument("lambda must be >= 0");
    if (!(p.omega >= 0.0) || std::isinf(p.omega))
        throw std::invalid_argument("omega must be finite and >= 0");
}

class ExactSearch {
public:
    ExactSearch(const RMatrix& rho, const SchedulerParams& p) : rho_(rho), p_(p) {
        g_ = rho.rows();
        min_windows_ = (g_ + p.n_rf - 1) / p.n_rf;
    }

    ExactResult run() {
        dfs(0, 0.0);
        return {best_, best_obj_};
    }

private:
    static constexpr double kSlack = 1e-9;

    void dfs(Index e, double igc_total) {
        const Index nb = static_cast<Index>(blocks_.size());
        if (e == g_) {
            Schedule s{blocks_};
            for (const auto& w : s.windows)
                if (window_igc(rho_, w) > p_.lambda)
                    return;
            const double obj = schedule_objective(rho_, s, p_.omega);
            if (obj < best_obj_) {
                best_obj_ = obj;
                best_ = std::move(s);
            }
            return;
        }
        Index free = 0;
        for (const auto& b : blocks_)
            free += p_.n_rf - static_cast<Index>(b.size());
        const Index overflow = std::max<Index>(0, (g_ - e) - free);
        const Index needed = std::max(nb + (overflow + p_.n_rf - 1) / p_.n_rf, min_windows_);
        if (static_cast<double>(needed) + p_.omega * igc_total > best_obj_ + kSlack)
            return;

        for (Index b = 0; b < nb; ++b) {
            if (static_cast<Index>(blocks_[b].size()) >= p_.n_rf)
                continue;
            double delta = 0.0;
            for (Index m : blocks_[b])
                delta += rho_(m, e);
            if (block_igc_[b] + delta > p_.lambda + kSlack)
                continue;
            blocks_[b].push_back(e);
            block_igc_[b] += delta;
            dfs(e + 1, igc_total + delta);
            block_igc_[b] -= delta;
            blocks_[b].pop_back();
        }
        blocks_.push_back({e});
        block_igc_.push_back(0.0);
        dfs(e + 1, igc_total);
        blocks_.pop_back();
        block_igc_.pop_back();
    }

    const RMatrix& rho_;
    SchedulerParams p_;
    Index g_ = 0, min_windows_ = 0;
    std::vector<Window> blocks_;
    std::vector<double> block_igc_;
    Schedule best_;
    double best_obj_ = std::numeric_limits<double>::infinity();
};

void enumerate_rec(Index e, Index g, Index n_rf, std::vector<Window>& blocks,
                   std::vector<Schedule>& out) {
    if (e == g) {
        out.push_back(Schedule{blocks});
        return;
    }
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (static_cast<Index>(blocks[b].size()) >= n_rf)
            continue;
        blocks[b].push_back(e);
        enumerate_rec(e + 1, g, n_rf, blocks, out);
        blocks[b].pop_back();
    }
    blocks.push_back({e});
    enumerate_rec(e + 1, g, n_rf, blocks, out);
    blocks.pop_back();
}

std::vector<double> partition_counts(Index n_max, Index n_rf) {
    std::vector<double> c(static_cast<std::size_t>(n_max + 1), 0.0);
    c[0] = 1.0;
    for (Index n = 1; n <= n_max; ++n) {
        double binom = 1.0; // C(n-1, s-1)
        for (Index s = 1; s <= std::min(n, n_rf); ++s) {
            c[n] += binom * c[n - s];
            binom = binom * static_cast<double>(n - s) / static_cast<double>(s);
        }
    }
    return c;
}

bool admissible(const RMatrix& rho, const Schedule& s, double lambda) {
    for (const auto& w : s.windows)
        if (window_igc(rho, w) > lambda)
            return false;
    return true;
}

} // namespace

ExactResult schedule_exact(const RMatrix& rho, const SchedulerParams& params) {
    check_rho(rho);
    check_params(params);
    if (rho.rows() == 0)
        return {};
    return ExactSearch(rho, params).run();
}

Schedule schedule_sing(Index g_total) {
    if (g_total < 1)
        throw std::invalid_argument("schedule_sing: g_total must be >= 1");
    Schedule s;
    for (Index g = 0; g < g_total; ++g)
        s.windows.push_back({g});
    return s;
}

Schedule schedule_rand(Index g_total, Index n_rf, Rng& rng) {
    if (g_total < 1 || n_rf < 1)
        throw std::invalid_argument("schedule_rand: counts must be >= 1");
    std::vector<Index> perm(static_cast<std::size_t>(g_total));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    Schedule s;
    for (Index start = 0; start < g_total; start += n_rf) {
        Window w(perm.begin() + start, perm.begin() + std::min(g_total, start + n_rf));
        std::sort(w.begin(), w.end());
        s.windows.push_back(std::move(w));
    }
    return s;
}

double count_partitions(Index g_total, Index n_rf) {
    if (g_total < 0 || n_rf < 1)
        throw std::invalid_argument("count_partitions: invalid sizes");
    return partition_counts(g_total, n_rf).back();
}

std::vector<Schedule> enumerate_partitions(Index g_total, Index n_rf, std::size_t cap) {
    const double count = count_partitions(g_total, n_rf);
    if (count > static_cast<double>(cap))
        throw TractabilityError("partition count " + std::to_string(static_cast<long long>(count)) +
                                " exceeds the cap of " + std::to_string(cap));
    std::vector<Schedule> out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<Window> blocks;
    enumerate_rec(0, g_total, n_rf, blocks, out);
    return out;
}

Schedule sample_partition(Index g_total, Index n_rf, Rng& rng) {
    if (g_total < 1 || n_rf < 1)
        throw std::invalid_argument("sample_partition: invalid sizes");
    const auto counts = partition_counts(g_total, n_rf);
    std::vector<Index> rest(static_cast<std::size_t>(g_total));
    std::iota(rest.begin(), rest.end(), Index{0});
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Schedule s;
    while (!rest.empty()) {
        const Index n = static_cast<Index>(rest.size());
        // Size of the block holding the smallest remaining group.
        std::vector<double> weight;
        double binom = 1.0;
        for (Index sz = 1; sz <= std::min(n, n_rf); ++sz) {
            weight.push_back(binom * counts[n - sz]);
            binom = binom * static_cast<double>(n - sz) / static_cast<double>(sz);
        }
        double u = unit(rng) * counts[n];
        Index size = static_cast<Index>(weight.size());
        for (std::size_t i = 0; i < weight.size(); ++i) {
            if (u < weight[i]) {
                size = static_cast<Index>(i) + 1;
                break;
            }
            u -= weight[i];
        }
        std::vector<Index> others(rest.begin() + 1, rest.end());
        for (Index i = 0; i < size - 1; ++i) {
            std::uniform_int_distribution<Index> pick(i, static_cast<Index>(others.size()) - 1);
            std::swap(others[i], others[pick(rng)]);
        }
        Window w{rest.front()};
        w.insert(w.end(), others.begin(), others.begin() + (size - 1));
        std::sort(w.begin(), w.end());
        std::vector<Index> next(others.begin() + (size - 1), others.end());
        std::sort(next.begin(), next.end());
        rest = std::move(next);
        s.windows.push_back(std::move(w));
    }
    return s;
}

double calibrate_omega(const RMatrix& rho, const SchedulerParams& params, std::size_t cap,
                       std::size_t samples, std::uint64_t seed) {
    check_rho(rho);
    check_params(params);
    const Index g = rho.rows();
    if (g < 2)
        return 0.0;
    double sum_w = 0.0, sum_igc = 0.0;
    std::size_t n = 0;
    auto accumulate = [&](const Schedule& s) {
        if (!admissible(rho, s, params.lambda))
            return;
        sum_w += static_cast<double>(s.t_s());
        for (const auto& w : s.windows)
            sum_igc += window_igc(rho, w);
        ++n;
    };
    if (count_partitions(g, params.n_rf) <= static_cast<double>(cap)) {
        for (const auto& s : enumerate_partitions(g, params.n_rf, cap))
            accumulate(s);
    } else {
        Rng rng(seed);
        const std::size_t max_draws = samples * 1000;
        for (std::size_t draws = 0; n < samples && draws < max_draws; ++draws)
            accumulate(sample_partition(g, params.n_rf, rng));
    }
    if (n == 0 || !(sum_igc > 0.0))
        return 0.0;
    return sum_w / sum_igc;
}

XhausResult schedule_xhaus(Index g_total, Index n_rf, const WindowLatency& window_latency,
                           double delta_sw, metrics::SwitchingMode mode, std::size_t cap) {
    const auto parts = enumerate_partitions(g_total, n_rf, cap);
    std::map<Window, double> cache;
    XhausResult best;
    bool have = false;
    for (const auto& s : parts) {
        std::vector<double> per;
        for (const auto& w : s.windows) {
            auto it = cache.find(w);
            if (it == cache.end())
                it = cache.emplace(w, window_latency(w)).first;
            per.push_back(it->second);
        }
        const double total = metrics::combine_latency(per, delta_sw, mode);
        ++best.evaluated;
        if (!have || total < best.latency ||
            (total == best.latency && s.t_s() < best.schedule.t_s())) {
            best.schedule = s;
            best.latency = total;
            have = true;
        }
    }
    return best;
}

void write_schedule_csv(std::ostream& os, const Schedule& schedule) {
    os << "window,groups\n";
    for (Index t = 0; t < schedule.t_s(); ++t) {
        os << t << ",\"";
        const auto& w = schedule.windows[t];
        for (std::size_t i = 0; i < w.size(); ++i)
            os << (i ? "," : "") << w[i];
        os << "\"\n";
    }
}

} // namespace hybridcast::sched
