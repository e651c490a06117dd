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
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hybridcast/metrics.hpp"
#include "hybridcast/precoder.hpp"

namespace hybridcast::cli {

enum class Scheme { Hydrawave, Sing, Rand, Xhaus };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& s);

/// Invalid configuration; the message names the key and, when known, the line.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& key, const std::string& what, int line = 0);
    const std::string& key() const { return key_; }
    const std::string& detail() const { return detail_; }
    int line() const { return line_; }

private:
    std::string key_;
    std::string detail_;
    int line_;
};

struct SimConfig {
    long n_tx = 24;
    long l_tx = 6;
    long n_rf = 4;
    long n_rx = 1;
    int d_f = 16;
    int d_w = 4;
    double p_tx_max_dbm = 20.0;
    double p_rx_max_dbm = 0.0;
    double noise_dbm = 10.0;
    long g_total = 4;
    long k_total = 16;
    double bits_per_group = 4e6;
    std::vector<int> n_bis{10, 10, 10};
    std::vector<int> n_rand{5, 100, 20};
    int n_iter = 3;
    int n_paths = 6;
    double lambda = 0.1;
    std::optional<double> omega;  ///< empty selects automatic calibration
    double delta_sw_ms = 0.5;
    double bandwidth_hz = 4e8;
    double c_max = 12.0;
    double beta = 0.5;
    int realizations = 100;
    std::uint64_t seed = 1;
    precoder::PrecoderMode precoder_mode = precoder::PrecoderMode::Hybrid;
    std::vector<Scheme> schemes{Scheme::Hydrawave, Scheme::Sing, Scheme::Rand, Scheme::Xhaus};
    long xhaus_cap = 10000;
    metrics::SwitchingMode switching = metrics::SwitchingMode::BetweenWindows;

    /// Throws ConfigError naming the first offending key.
    void validate() const;

    precoder::PrecoderConfig precoder_config() const;
    metrics::RateModel rate_model() const;
    double delta_sw() const { return delta_sw_ms * 1e-3; }

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// Flat key=value text, '#' starts a comment, unknown keys rejected.
SimConfig parse_config_text(std::istream& is);
SimConfig parse_config(const std::string& path);

/// Every key, one per line, in a form parse_config_text reads back exactly.
std::string emit_config(const SimConfig& cfg);

} // namespace hybridcast::cli
