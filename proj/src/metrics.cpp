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

#include "hybridcast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hybridcast::metrics {

void RateModel::validate() const {
    if (!(beta > 0.0 && beta <= 1.0))
        throw std::invalid_argument("beta must lie in (0, 1]");
    if (!(c_max > 0.0))
        throw std::invalid_argument("c_max must be positive");
    if (!(bandwidth > 0.0))
        throw std::invalid_argument("bandwidth must be positive");
}

double rate(double sinr, const RateModel& model) {
    if (sinr < 0.0)
        throw std::invalid_argument("rate: negative SINR");
    if (std::isinf(sinr))
        return model.bandwidth * model.c_max;
    return model.bandwidth * std::min(std::log2(1.0 + model.beta * sinr), model.c_max);
}

namespace {

void check_window(const std::vector<double>& sinrs, const std::vector<double>& bits) {
    if (sinrs.empty())
        throw std::invalid_argument("window has no receivers");
    if (sinrs.size() != bits.size())
        throw std::invalid_argument("one payload per receiver required");
    for (double b : bits)
        if (!(b > 0.0))
            throw std::invalid_argument("payload must be positive");
}

} // namespace

double window_latency(const std::vector<double>& sinrs, const std::vector<double>& bits,
                      const RateModel& model) {
    check_window(sinrs, bits);
    double worst = 0.0;
    for (std::size_t k = 0; k < sinrs.size(); ++k) {
        const double r = rate(sinrs[k], model);
        if (!(r > 0.0))
            return kUndeliverable;
        worst = std::max(worst, bits[k] / r);
    }
    return worst;
}

double window_latency_closed_form(const std::vector<double>& sinrs, const std::vector<double>& bits,
                                  const RateModel& model) {
    check_window(sinrs, bits);
    long double smallest = std::numeric_limits<long double>::infinity();
    for (std::size_t k = 0; k < sinrs.size(); ++k) {
        if (sinrs[k] < 0.0)
            throw std::invalid_argument("negative SINR");
        const long double b = static_cast<long double>(bits[k]) / model.bandwidth;
        const long double cap = std::exp2(static_cast<long double>(model.c_max) / b);
        const long double r =
            std::isinf(sinrs[k]) ? cap
                                 : std::pow(1.0L + static_cast<long double>(model.beta) * sinrs[k],
                                            1.0L / b);
        smallest = std::min(smallest, std::min(r, cap));
    }
    const long double l = std::log2(smallest);
    if (!(l > 0.0L))
        return kUndeliverable;
    return static_cast<double>(1.0L / l);
}

bool latency_sinr_identity_check(const std::vector<double>& sinrs, const std::vector<double>& bits,
                                 const RateModel& model) {
    const double a = window_latency(sinrs, bits, model);
    const double b = window_latency_closed_form(sinrs, bits, model);
    if (std::isinf(a) || std::isinf(b))
        return a == b;
    return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b));
}

double r_sinr(double sinr, double bits_norm, double beta) {
    if (!(bits_norm > 0.0))
        throw std::invalid_argument("r_sinr: normalized payload must be positive");
    return std::pow(1.0 + beta * sinr, 1.0 / bits_norm);
}

double e_sinr(double sinr, double bits_norm) {
    if (!(bits_norm > 0.0))
        throw std::invalid_argument("e_sinr: normalized payload must be positive");
    return sinr / bits_norm;
}

double combine_latency(const std::vector<double>& per_window, double delta_sw, SwitchingMode mode) {
    double total = 0.0;
    for (double x : per_window)
        total += x;
    const std::size_t n = per_window.size();
    const std::size_t switches = mode == SwitchingMode::EveryWindow ? n : (n > 0 ? n - 1 : 0);
    return total + static_cast<double>(switches) * delta_sw;
}

LatencyReport total_latency(const std::vector<std::vector<double>>& sinrs,
                            const std::vector<std::vector<double>>& bits, const RateModel& model,
                            double delta_sw, SwitchingMode mode) {
    if (sinrs.size() != bits.size())
        throw std::invalid_argument("total_latency: one payload list per window required");
    LatencyReport rep;
    rep.switching_delay = delta_sw;
    rep.per_receiver_sinr = sinrs;
    for (std::size_t t = 0; t < sinrs.size(); ++t)
        rep.per_window.push_back(window_latency(sinrs[t], bits[t], model));
    rep.total = combine_latency(rep.per_window, delta_sw, mode);
    return rep;
}

double energy(Architecture arch, long n_tx, long n_rf, const EnergyModel& model) {
    if (arch == Architecture::Digital)
        return model.p_tx_max + static_cast<double>(n_tx) * model.p_rf;
    return model.p_tx_max + static_cast<double>(n_rf) * model.p_rf +
           static_cast<double>(n_tx) * model.p_ps;
}

} // namespace hybridcast::metrics
