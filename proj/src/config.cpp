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

#include "hybridcast/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <sstream>

namespace hybridcast::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(s);
    while (std::getline(ss, cur, sep))
        out.push_back(trim(cur));
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    if (v == "inf" || v == "+inf")
        return std::numeric_limits<double>::infinity();
    std::size_t pos = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != v.size() || std::isnan(d))
        throw ConfigError(key, "'" + v + "' is not a number");
    return d;
}

long long to_integer(const std::string& key, const std::string& v) {
    long long x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ConfigError(key, "'" + v + "' is not an integer");
    return x;
}

std::vector<int> to_int_triple(const std::string& key, const std::string& v) {
    const auto parts = split(v, ',');
    if (parts.size() != 1 && parts.size() != 3)
        throw ConfigError(key, "expected one or three comma-separated integers");
    std::vector<int> out;
    for (const auto& p : parts)
        out.push_back(static_cast<int>(to_integer(key, p)));
    if (out.size() == 1)
        out.assign(3, out.front());
    return out;
}

std::string fmt(double d) {
    if (std::isinf(d))
        return d > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
}

using Setter = std::function<void(SimConfig&, const std::string&, const std::string&)>;

template <typename T>
Setter integer_field(T SimConfig::*field) {
    return [field](SimConfig& c, const std::string& k, const std::string& v) {
        c.*field = static_cast<T>(to_integer(k, v));
    };
}

Setter real_field(double SimConfig::*field) {
    return [field](SimConfig& c, const std::string& k, const std::string& v) {
        c.*field = to_double(k, v);
    };
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"n_tx", integer_field(&SimConfig::n_tx)},
        {"l_tx", integer_field(&SimConfig::l_tx)},
        {"n_rf", integer_field(&SimConfig::n_rf)},
        {"n_rx", integer_field(&SimConfig::n_rx)},
        {"d_f", integer_field(&SimConfig::d_f)},
        {"d_w", integer_field(&SimConfig::d_w)},
        {"p_tx_max_dbm", real_field(&SimConfig::p_tx_max_dbm)},
        {"p_rx_max_dbm", real_field(&SimConfig::p_rx_max_dbm)},
        {"noise_dbm", real_field(&SimConfig::noise_dbm)},
        {"g_total", integer_field(&SimConfig::g_total)},
        {"k_total", integer_field(&SimConfig::k_total)},
        {"bits_per_group", real_field(&SimConfig::bits_per_group)},
        {"n_bis", [](SimConfig& c, const std::string& k, const std::string& v) { c.n_bis = to_int_triple(k, v); }},
        {"n_rand", [](SimConfig& c, const std::string& k, const std::string& v) { c.n_rand = to_int_triple(k, v); }},
        {"n_iter", integer_field(&SimConfig::n_iter)},
        {"n_paths", integer_field(&SimConfig::n_paths)},
        {"lambda", real_field(&SimConfig::lambda)},
        {"omega_mode",
         [](SimConfig& c, const std::string& k, const std::string& v) {
             if (v == "auto")
                 c.omega.reset();
             else
                 c.omega = to_double(k, v);
         }},
        {"delta_sw_ms", real_field(&SimConfig::delta_sw_ms)},
        {"bandwidth_hz", real_field(&SimConfig::bandwidth_hz)},
        {"c_max", real_field(&SimConfig::c_max)},
        {"beta", real_field(&SimConfig::beta)},
        {"realizations", integer_field(&SimConfig::realizations)},
        {"seed",
         [](SimConfig& c, const std::string& k, const std::string& v) {
             const long long s = to_integer(k, v);
             if (s < 0)
                 throw ConfigError(k, "seed must be non-negative");
             c.seed = static_cast<std::uint64_t>(s);
         }},
        {"precoder_mode",
         [](SimConfig& c, const std::string& k, const std::string& v) {
             try {
                 c.precoder_mode = precoder::parse_precoder_mode(v);
             } catch (const std::invalid_argument&) {
                 throw ConfigError(k, "expected digital, hybrid or analog");
             }
         }},
        {"schemes",
         [](SimConfig& c, const std::string& k, const std::string& v) {
             c.schemes.clear();
             for (const auto& s : split(v, ',')) {
                 try {
                     c.schemes.push_back(parse_scheme(s));
                 } catch (const std::invalid_argument&) {
                     throw ConfigError(k, "unknown scheme '" + s + "'");
                 }
             }
         }},
        {"xhaus_cap", integer_field(&SimConfig::xhaus_cap)},
        {"switching",
         [](SimConfig& c, const std::string& k, const std::string& v) {
             if (v == "between")
                 c.switching = metrics::SwitchingMode::BetweenWindows;
             else if (v == "every")
                 c.switching = metrics::SwitchingMode::EveryWindow;
             else
                 throw ConfigError(k, "expected between or every");
         }},
    };
    return table;
}

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

} // namespace

std::string to_string(Scheme s) {
    switch (s) {
    case Scheme::Hydrawave:
        return "HYDRAWAVE";
    case Scheme::Sing:
        return "SING";
    case Scheme::Rand:
        return "RAND";
    case Scheme::Xhaus:
        return "XHAUS";
    }
    return "?";
}

Scheme parse_scheme(const std::string& s) {
    for (Scheme x : {Scheme::Hydrawave, Scheme::Sing, Scheme::Rand, Scheme::Xhaus})
        if (s == to_string(x))
            return x;
    throw std::invalid_argument("unknown scheme '" + s + "'");
}

ConfigError::ConfigError(const std::string& key, const std::string& what, int line)
    : std::invalid_argument((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                            "key '" + key + "': " + what),
      key_(key), detail_(what), line_(line) {}

void SimConfig::validate() const {
    auto positive = [](const char* key, long long v) {
        if (v < 1)
            throw ConfigError(key, "must be >= 1");
    };
    positive("n_tx", n_tx);
    positive("l_tx", l_tx);
    positive("n_rf", n_rf);
    positive("n_rx", n_rx);
    positive("d_f", d_f);
    positive("d_w", d_w);
    positive("g_total", g_total);
    positive("k_total", k_total);
    positive("n_iter", n_iter);
    positive("n_paths", n_paths);
    positive("realizations", realizations);
    positive("xhaus_cap", xhaus_cap);
    if (n_tx != l_tx * n_rf)
        throw ConfigError("n_tx", "n_tx (" + std::to_string(n_tx) + ") must equal l_tx * n_rf (" +
                                      std::to_string(l_tx * n_rf) + ")");
    if (k_total % g_total != 0)
        throw ConfigError("k_total", "must be a multiple of g_total");
    if (n_bis.size() != 3)
        throw ConfigError("n_bis", "three values required");
    for (int v : n_bis)
        if (v < 1)
            throw ConfigError("n_bis", "must be >= 1");
    if (n_rand.size() != 3)
        throw ConfigError("n_rand", "three values required");
    for (int v : n_rand)
        if (v < 1)
            throw ConfigError("n_rand", "must be >= 1");
    auto finite = [](const char* key, double v) {
        if (!std::isfinite(v))
            throw ConfigError(key, "must be finite");
    };
    finite("p_tx_max_dbm", p_tx_max_dbm);
    finite("p_rx_max_dbm", p_rx_max_dbm);
    finite("noise_dbm", noise_dbm);
    if (!(bits_per_group > 0.0) || !std::isfinite(bits_per_group))
        throw ConfigError("bits_per_group", "must be positive");
    if (!(lambda >= 0.0))
        throw ConfigError("lambda", "must be >= 0");
    if (omega && !(*omega >= 0.0 && std::isfinite(*omega)))
        throw ConfigError("omega_mode", "must be auto or a finite value >= 0");
    if (!(delta_sw_ms >= 0.0) || !std::isfinite(delta_sw_ms))
        throw ConfigError("delta_sw_ms", "must be >= 0");
    if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz))
        throw ConfigError("bandwidth_hz", "must be positive");
    if (!(c_max > 0.0) || !std::isfinite(c_max))
        throw ConfigError("c_max", "must be positive");
    if (!(beta > 0.0 && beta <= 1.0))
        throw ConfigError("beta", "must lie in (0, 1]");
    if (schemes.empty())
        throw ConfigError("schemes", "at least one scheme required");
}

precoder::PrecoderConfig SimConfig::precoder_config() const {
    precoder::PrecoderConfig p;
    p.n_tx = n_tx;
    p.l_tx = l_tx;
    p.n_rf = n_rf;
    p.d_f = d_f;
    p.d_w = d_w;
    p.p_tx_max = dbm_to_watt(p_tx_max_dbm);
    p.p_rx_max = dbm_to_watt(p_rx_max_dbm);
    p.noise = dbm_to_watt(noise_dbm);
    for (int i = 0; i < 3; ++i) {
        p.n_bis[i] = n_bis[i];
        p.n_rand[i] = n_rand[i];
    }
    p.n_iter = n_iter;
    p.mode = precoder_mode;
    p.seed = seed;
    return p;
}

metrics::RateModel SimConfig::rate_model() const {
    metrics::RateModel m;
    m.beta = beta;
    m.c_max = c_max;
    m.bandwidth = bandwidth_hz;
    return m;
}

SimConfig parse_config_text(std::istream& is) {
    SimConfig cfg;
    std::map<std::string, int> where;
    std::string raw;
    int lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(line, "expected key=value", lineno);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto& table = setters();
        const auto it = table.find(key);
        if (it == table.end())
            throw ConfigError(key, "unknown key", lineno);
        if (where.count(key))
            throw ConfigError(key, "duplicate key", lineno);
        try {
            it->second(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(key, e.detail(), lineno);
        }
        where[key] = lineno;
    }
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        const auto it = where.find(e.key());
        if (it != where.end())
            throw ConfigError(e.key(), e.detail(), it->second);
        throw;
    }
    return cfg;
}

SimConfig parse_config(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("cannot open config file '" + path + "'");
    return parse_config_text(f);
}

std::string emit_config(const SimConfig& c) {
    std::ostringstream os;
    os << "n_tx=" << c.n_tx << '\n'
       << "l_tx=" << c.l_tx << '\n'
       << "n_rf=" << c.n_rf << '\n'
       << "n_rx=" << c.n_rx << '\n'
       << "d_f=" << c.d_f << '\n'
       << "d_w=" << c.d_w << '\n'
       << "p_tx_max_dbm=" << fmt(c.p_tx_max_dbm) << '\n'
       << "p_rx_max_dbm=" << fmt(c.p_rx_max_dbm) << '\n'
       << "noise_dbm=" << fmt(c.noise_dbm) << '\n'
       << "g_total=" << c.g_total << '\n'
       << "k_total=" << c.k_total << '\n'
       << "bits_per_group=" << fmt(c.bits_per_group) << '\n'
       << "n_bis=" << join_ints(c.n_bis) << '\n'
       << "n_rand=" << join_ints(c.n_rand) << '\n'
       << "n_iter=" << c.n_iter << '\n'
       << "n_paths=" << c.n_paths << '\n'
       << "lambda=" << fmt(c.lambda) << '\n'
       << "omega_mode=" << (c.omega ? fmt(*c.omega) : std::string("auto")) << '\n'
       << "delta_sw_ms=" << fmt(c.delta_sw_ms) << '\n'
       << "bandwidth_hz=" << fmt(c.bandwidth_hz) << '\n'
       << "c_max=" << fmt(c.c_max) << '\n'
       << "beta=" << fmt(c.beta) << '\n'
       << "realizations=" << c.realizations << '\n'
       << "seed=" << c.seed << '\n'
       << "precoder_mode=" << precoder::to_string(c.precoder_mode) << '\n';
    os << "schemes=";
    for (std::size_t i = 0; i < c.schemes.size(); ++i)
        os << (i ? "," : "") << to_string(c.schemes[i]);
    os << '\n'
       << "xhaus_cap=" << c.xhaus_cap << '\n'
       << "switching="
       << (c.switching == metrics::SwitchingMode::EveryWindow ? "every" : "between") << '\n';
    return os.str();
}

} // namespace hybridcast::cli
