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

#include <limits>
#include <string_view>
#include <vector>

namespace hybridcast::metrics {

/// Capped Shannon rate: bandwidth * min(log2(1 + beta * sinr), c_max).
struct RateModel {
    double beta = 0.5;
    double c_max = 12.0;       ///< bit/s/Hz
    double bandwidth = 4e8;    ///< Hz

    void validate() const;
};

/// Latency of a window that cannot be delivered (some receiver has zero rate).
inline constexpr double kUndeliverable = std::numeric_limits<double>::infinity();

double rate(double sinr, const RateModel& model);

/// max_k bits_k / rate(sinr_k), in seconds.
double window_latency(const std::vector<double>& sinrs, const std::vector<double>& bits,
                      const RateModel& model);

/// Same latency written as 1 / log2 of the smallest combined r-SINR / cap
/// term, evaluated in extended precision on bandwidth-normalized payloads.
double window_latency_closed_form(const std::vector<double>& sinrs, const std::vector<double>& bits,
                                  const RateModel& model);

/// True iff both latency expressions agree within 1e-9 relative.
bool latency_sinr_identity_check(const std::vector<double>& sinrs, const std::vector<double>& bits,
                                 const RateModel& model);

/// (1 + beta sinr)^(1 / bits_norm)
double r_sinr(double sinr, double bits_norm, double beta);
/// sinr / bits_norm
double e_sinr(double sinr, double bits_norm);

enum class SwitchingMode {
    BetweenWindows, ///< (T_s - 1) switches
    EveryWindow     ///< T_s switches
};

struct LatencyReport {
    std::vector<double> per_window;  ///< seconds
    double switching_delay = 0.0;    ///< seconds per switch
    double total = 0.0;              ///< seconds
    std::vector<std::vector<double>> per_receiver_sinr;
};

/// Sum of window latencies plus the switching charge.
double combine_latency(const std::vector<double>& per_window, double delta_sw,
                       SwitchingMode mode = SwitchingMode::BetweenWindows);

/// Per-window SINRs and payloads (bits) to a full report.
LatencyReport total_latency(const std::vector<std::vector<double>>& sinrs,
                            const std::vector<std::vector<double>>& bits, const RateModel& model,
                            double delta_sw, SwitchingMode mode = SwitchingMode::BetweenWindows);

struct EnergyModel {
    double p_rf = 0.25;     ///< W per RF chain
    double p_ps = 0.03;     ///< W per phase shifter
    double p_tx_max = 0.1;  ///< W
};

enum class Architecture { Digital, Hybrid, Analog };

/// Transmitter power draw. Digital uses one RF chain per antenna and no
/// phase shifters; hybrid and analog share the same hardware.
double energy(Architecture arch, long n_tx, long n_rf, const EnergyModel& model);

} // namespace hybridcast::metrics
