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

#include "hybridcast/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace hybridcast::cli {

namespace {

enum StreamTag : std::uint64_t { kChannels = 1, kPrecoder = 2, kRandom = 3 };

std::uint64_t stream_seed(const SimConfig& cfg, int realization, StreamTag tag) {
    return mix_seed(mix_seed(cfg.seed, static_cast<std::uint64_t>(realization)), tag);
}

struct Stats {
    double mean = 0.0;
    double stderr_ = 0.0;
};

Stats stats(const std::vector<double>& v) {
    Stats s;
    if (v.empty())
        return s;
    for (double x : v)
        s.mean += x;
    s.mean /= static_cast<double>(v.size());
    if (v.size() > 1 && std::isfinite(s.mean)) {
        double ss = 0.0;
        for (double x : v)
            ss += (x - s.mean) * (x - s.mean);
        s.stderr_ = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    }
    return s;
}

std::string num(double v) {
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace

channel::ChannelSet make_channels(const SimConfig& cfg, int realization) {
    Rng rng(stream_seed(cfg, realization, kChannels));
    return channel::generate_channel_set(
        channel::ArrayGeometry{cfg.n_tx}, channel::ArrayGeometry{cfg.n_rx}, cfg.n_paths,
        channel::equal_groups(cfg.k_total, cfg.g_total),
        std::vector<double>(static_cast<std::size_t>(cfg.g_total), cfg.bits_per_group), rng);
}

Realization::Realization(const SimConfig& cfg, int index)
    : cfg_(cfg), index_(index), chs_(make_channels(cfg, index)), pcfg_(cfg.precoder_config()) {
    pcfg_.seed = stream_seed(cfg, index, kPrecoder);
}

const WindowEval& Realization::evaluate(const sched::Window& window) {
    auto it = cache_.find(window);
    if (it != cache_.end())
        return it->second;
    WindowEval ev;
    ev.design = precoder::design_window(chs_, window, pcfg_);
    ev.sinrs = precoder::evaluate_sinr(chs_, ev.design, window, pcfg_.noise);
    std::vector<double> bits;
    for (Index k : ev.design.receivers)
        bits.push_back(chs_.bits[chs_.group_of(k)]);
    ev.latency = metrics::window_latency(ev.sinrs, bits, cfg_.rate_model());
    return cache_.emplace(window, std::move(ev)).first->second;
}

sched::Schedule Realization::schedule_for(Scheme scheme, double lambda) {
    const Index g = chs_.n_groups();
    const Index nrf = pcfg_.rf_chains();
    switch (scheme) {
    case Scheme::Sing:
        return sched::schedule_sing(g);
    case Scheme::Rand: {
        Rng rng(stream_seed(cfg_, index_, kRandom));
        return sched::schedule_rand(g, nrf, rng);
    }
    case Scheme::Xhaus:
        return sched::schedule_xhaus(
                   g, nrf, [this](const sched::Window& w) { return evaluate(w).latency; },
                   cfg_.delta_sw(), cfg_.switching, static_cast<std::size_t>(cfg_.xhaus_cap))
            .schedule;
    case Scheme::Hydrawave: {
        if (g < 2)
            return sched::schedule_sing(g);
        const RMatrix rho = channel::igc(chs_);
        sched::SchedulerParams p;
        p.lambda = lambda;
        p.n_rf = nrf;
        p.omega = cfg_.omega ? *cfg_.omega : sched::calibrate_omega(rho, p);
        return sched::schedule_exact(rho, p).schedule;
    }
    }
    throw std::logic_error("unhandled scheme");
}

SchemeOutcome Realization::run(Scheme scheme, double lambda) {
    SchemeOutcome out;
    out.scheme = scheme;
    out.schedule = schedule_for(scheme, lambda);
    out.min_esinr = std::numeric_limits<double>::infinity();
    std::vector<double> per;
    std::vector<std::vector<double>> sinrs;
    for (const auto& w : out.schedule.windows) {
        const WindowEval& ev = evaluate(w);
        per.push_back(ev.latency);
        sinrs.push_back(ev.sinrs);
        out.min_esinr = std::min(out.min_esinr, ev.design.alpha);
    }
    out.report.per_window = per;
    out.report.per_receiver_sinr = std::move(sinrs);
    out.report.switching_delay = cfg_.delta_sw();
    out.report.total = metrics::combine_latency(per, cfg_.delta_sw(), cfg_.switching);
    return out;
}

ExperimentResult run_experiment(const SimConfig& cfg) {
    cfg.validate();
    ExperimentResult res;
    std::map<Scheme, std::vector<ResultRow>> per_scheme;
    for (int r = 0; r < cfg.realizations; ++r) {
        Realization real(cfg, r);
        for (Scheme s : cfg.schemes) {
            ResultRow row;
            row.realization = r;
            row.scheme = s;
            try {
                const auto out = real.run(s, cfg.lambda);
                row.t_s = static_cast<double>(out.schedule.t_s());
                row.total_ms = out.report.total * 1e3;
                row.min_esinr = out.min_esinr;
                per_scheme[s].push_back(row);
            } catch (const sched::TractabilityError& e) {
                row.warning = to_string(s) + " skipped for realization " + std::to_string(r) + ": " +
                              e.what();
            }
            res.rows.push_back(row);
        }
    }
    for (Scheme s : cfg.schemes) {
        const auto& rows = per_scheme[s];
        if (rows.empty())
            continue;
        std::vector<double> tot, ts, es;
        for (const auto& r : rows) {
            tot.push_back(r.total_ms);
            ts.push_back(r.t_s);
            es.push_back(r.min_esinr);
        }
        ResultRow agg;
        agg.realization = -1;
        agg.scheme = s;
        const Stats st = stats(tot);
        agg.total_ms = st.mean;
        agg.stderr_ms = st.stderr_;
        agg.t_s = stats(ts).mean;
        agg.min_esinr = stats(es).mean;
        res.rows.push_back(agg);
    }
    return res;
}

void write_results_csv(std::ostream& os, const ExperimentResult& result) {
    os << "realization,scheme,t_s,total_ms,min_esinr,stderr_ms\n";
    for (const auto& r : result.rows) {
        if (!r.warning.empty()) {
            os << "# warning: " << r.warning << '\n';
            continue;
        }
        os << (r.realization < 0 ? std::string("mean") : std::to_string(r.realization)) << ','
           << to_string(r.scheme) << ',' << num(r.t_s) << ',' << num(r.total_ms) << ','
           << num(r.min_esinr) << ',' << (r.realization < 0 ? num(r.stderr_ms) : std::string())
           << '\n';
    }
}

namespace {

class LambdaEvaluator {
public:
    explicit LambdaEvaluator(const SimConfig& cfg) {
        cfg.validate();
        for (int r = 0; r < cfg.realizations; ++r)
            reals_.emplace_back(cfg, r);
    }

    SweepRow operator()(double lambda) {
        std::vector<double> tot, ts;
        for (auto& real : reals_) {
            const auto out = real.run(Scheme::Hydrawave, lambda);
            tot.push_back(out.report.total * 1e3);
            ts.push_back(static_cast<double>(out.schedule.t_s()));
        }
        SweepRow row;
        row.lambda = lambda;
        const Stats st = stats(tot);
        row.mean_total_ms = st.mean;
        row.stderr_ms = st.stderr_;
        row.mean_t_s = stats(ts).mean;
        return row;
    }

private:
    std::vector<Realization> reals_;
};

void flag_argmin(std::vector<SweepRow>& rows) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].mean_total_ms < rows[best].mean_total_ms)
            best = i;
    if (!rows.empty())
        rows[best].is_argmin = true;
}

} // namespace

std::vector<SweepRow> sweep_lambda(const SimConfig& cfg, const std::vector<double>& lambdas) {
    if (lambdas.empty())
        throw std::invalid_argument("sweep_lambda: no lambda values");
    for (double l : lambdas)
        if (!(l >= 0.0))
            throw std::invalid_argument("sweep_lambda: lambda must be >= 0");
    LambdaEvaluator eval(cfg);
    std::vector<SweepRow> rows;
    for (double l : lambdas)
        rows.push_back(eval(l));
    flag_argmin(rows);
    return rows;
}

std::vector<SweepRow> search_lambda(const SimConfig& cfg, double lo, double hi, int iterations) {
    if (!(lo >= 0.0 && lo < hi && std::isfinite(hi)) || iterations < 0)
        throw std::invalid_argument("search_lambda: need 0 <= lo < hi < inf");
    LambdaEvaluator eval(cfg);
    std::vector<SweepRow> rows;
    auto f = [&](double l) {
        rows.push_back(eval(l));
        return rows.back().mean_total_ms;
    };
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iterations; ++i) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    f(lo);
    f(hi);
    std::stable_sort(rows.begin(), rows.end(),
                     [](const SweepRow& x, const SweepRow& y) { return x.lambda < y.lambda; });
    flag_argmin(rows);
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "lambda,mean_total_ms,stderr_ms,mean_t_s,is_argmin\n";
    for (const auto& r : rows)
        os << num(r.lambda) << ',' << num(r.mean_total_ms) << ',' << num(r.stderr_ms) << ','
           << num(r.mean_t_s) << ',' << (r.is_argmin ? 1 : 0) << '\n';
}

} // namespace hybridcast::cli
