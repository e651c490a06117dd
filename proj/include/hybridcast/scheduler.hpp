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

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hybridcast/metrics.hpp"
#include "hybridcast/types.hpp"

namespace hybridcast::sched {

using Window = std::vector<Index>;

/// Ordered partition of groups 0..G-1 into windows; each window sorted ascending.
struct Schedule {
    std::vector<Window> windows;

    Index t_s() const { return static_cast<Index>(windows.size()); }

    /// Throws unless the windows partition 0..g_total-1 with 1 <= |V_t| <= n_rf.
    void validate(Index g_total, Index n_rf) const;

    friend bool operator==(const Schedule&, const Schedule&) = default;
};

struct SchedulerParams {
    double lambda = 0.1;  ///< per-window cap on the pairwise IGC sum
    double omega = 0.0;   ///< weight of the IGC term
    Index n_rf = 4;
};

/// Thrown when an enumeration would exceed its configured cap.
class TractabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sum of rho over pairs a < b of the window, a outer and b inner.
double window_igc(const RMatrix& rho, const Window& window);

/// T_s + omega * sum_t window_igc(V_t), windows taken in schedule order.
double schedule_objective(const RMatrix& rho, const Schedule& schedule, double omega);

struct ExactResult {
    Schedule schedule;
    double objective = 0.0;
};

/// Minimizes schedule_objective subject to window size <= n_rf and
/// window_igc <= lambda. Depth-first enumeration of canonical partitions
/// (each window anchored at its smallest group) with bound pruning; ties go
/// to the lexicographically smallest restricted-growth string.
ExactResult schedule_exact(const RMatrix& rho, const SchedulerParams& params);

/// One group per window, in index order.
Schedule schedule_sing(Index g_total);

/// Uniform random permutation chunked into ceil(G / n_rf) windows.
Schedule schedule_rand(Index g_total, Index n_rf, Rng& rng);

/// Number of partitions of g_total labelled groups into blocks of size <= n_rf.
double count_partitions(Index g_total, Index n_rf);

/// All such partitions in restricted-growth-string order.
std::vector<Schedule> enumerate_partitions(Index g_total, Index n_rf,
                                           std::size_t cap = std::numeric_limits<std::size_t>::max());

/// Uniform draw from the partitions counted by count_partitions.
Schedule sample_partition(Index g_total, Index n_rf, Rng& rng);

/// omega = E[#windows] / E[aggregate IGC] over partitions admissible under
/// n_rf and lambda. Averages over all of them when there are at most cap,
/// otherwise over uniform admissible draws. Returns 0 when the mean IGC vanishes.
double calibrate_omega(const RMatrix& rho, const SchedulerParams& params, std::size_t cap = 10000,
                       std::size_t samples = 1000, std::uint64_t seed = 1);

using WindowLatency = std::function<double(const Window&)>;

struct XhausResult {
    Schedule schedule;
    double latency = 0.0;
    std::size_t evaluated = 0;
};

/// Exhaustive search over all partitions; each distinct window is costed once.
/// Ties go to fewer windows, then enumeration order.
XhausResult schedule_xhaus(Index g_total, Index n_rf, const WindowLatency& window_latency,
                           double delta_sw,
                           metrics::SwitchingMode mode = metrics::SwitchingMode::BetweenWindows,
                           std::size_t cap = 10000);

/// "window,groups" with one quoted comma-joined row per window.
void write_schedule_csv(std::ostream& os, const Schedule& schedule);

} // namespace hybridcast::sched
