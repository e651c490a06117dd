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

// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "hybridcast/channel.hpp"
#include "hybridcast/experiment.hpp"
#include "hybridcast/metrics.hpp"
#include "hybridcast/precoder.hpp"
#include "hybridcast/scheduler.hpp"
#include "hybridcast/sdp.hpp"
#include "oracles.hpp"

using namespace hybridcast;
using precoder::HybridDesign;
using precoder::PrecoderConfig;
using precoder::PrecoderMode;
using precoder::Window;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

channel::ChannelSet random_channels(Index n_tx, Index n_rx, Index k, Index g, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0xacce55));
    return channel::generate_channel_set({n_tx}, {n_rx}, 6, channel::equal_groups(k, g),
                                         std::vector<double>(static_cast<std::size_t>(g), 4e6), rng);
}

PrecoderConfig precoder_config(Index n_tx, Index l_tx, Index n_rf) {
    PrecoderConfig c;
    c.n_tx = n_tx;
    c.l_tx = l_tx;
    c.n_rf = n_rf;
    return c;
}

// ---------------------------------------------------------------------------

Verdict analog_stage_oracle() {
    const auto t0 = Clock::now();
    PrecoderConfig cfg = precoder_config(4, 2, 2);
    cfg.d_f = 4;
    const Window w{0, 1};
    int good = 0;
    double worst = 1e300;
    for (int trial = 0; trial < 50; ++trial) {
        const auto chs = random_channels(4, 1, 2, 2, 1000 + trial);
        Rng rng(mix_seed(77, trial));
        const HybridDesign d = precoder::initial_design(chs, w, cfg, rng);
        const auto res = precoder::optimize_analog(chs, d, w, cfg, rng);
        HybridDesign probe = d;
        const double best = oracle::exhaustive_phase_search(4, cfg.analog_phases(), [&](const CVector& f) {
            probe.f = precoder::expand_analog(f, 2, 2);
            return precoder::min_esinr(chs, probe, w, cfg.noise);
        });
        const double ratio = res.alpha / best;
        worst = std::min(worst, ratio);
        good += ratio >= 0.9;
    }
    const double secs = seconds_since(t0);
    return {good >= 45 && secs < 10.0,
            fmt("%d/50 instances >= 0.9 of the 256-vector optimum (worst ratio %.4f), %.2f s", good, worst, secs)};
}

Verdict combiner_stage_oracle() {
    PrecoderConfig cfg = precoder_config(4, 2, 2);
    cfg.d_w = 4;
    const Window w{0, 1};
    int good = 0;
    double worst = 1e300;
    for (int trial = 0; trial < 100; ++trial) {
        const auto chs = random_channels(4, 2, 2, 2, 5000 + trial);
        Rng rng(mix_seed(78, trial));
        const HybridDesign d = precoder::initial_design(chs, w, cfg, rng);
        const auto ws = precoder::optimize_combiners(chs, d, w, cfg, rng);
        HybridDesign probe = d;
        auto esinr0 = [&](const CVector& c) {
            probe.combiners[0] = c;
            return precoder::evaluate_sinr(chs, probe, w, cfg.noise)[0];
        };
        const double best = oracle::exhaustive_phase_search(2, cfg.combiner_phases(2), esinr0);
        const double ratio = esinr0(ws[0]) / best;
        worst = std::min(worst, ratio);
        good += ratio >= 0.99;
    }
    return {good >= 95, fmt("%d/100 trials within 99%% of the 16-candidate best (worst ratio %.4f)", good, worst)};
}

Verdict scheduler_exactness() {
    Rng rng(2029);
    std::uniform_real_distribution<double> lam(0.0, 1.5);
    int matched = 0, pairing = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const Index g = 3 + trial % 3;
        const Index n_rf = 2 + (trial / 3) % 2;
        const RMatrix rho = oracle::random_igc(g, rng);
        sched::SchedulerParams p;
        p.n_rf = n_rf;
        p.lambda = trial % 2 ? 0.1 : lam(rng);
        p.omega = sched::calibrate_omega(rho, p);
        const auto got = sched::schedule_exact(rho, p);
        const auto ref = oracle::naive_schedule(rho, p.lambda, p.omega, n_rf);
        bool ok = ref.found && got.objective == ref.objective && got.schedule.windows == ref.windows;
        try {
            got.schedule.validate(g, n_rf);
        } catch (const std::exception&) {
            ok = false;
        }
        for (const auto& win : got.schedule.windows) {
            ok = ok && sched::window_igc(rho, win) <= p.lambda;
            pairing += win.size() > 1;
        }
        matched += ok;
    }
    return {matched == 200, fmt("%d/200 instances identical to naive enumeration (%d multi-group windows)",
                                matched, pairing)};
}

Verdict latency_identity() {
    const metrics::RateModel m;
    const double cap = (std::exp2(m.c_max) - 1.0) / m.beta;
    Rng rng(404);
    std::uniform_real_distribution<double> logs(-3.0, 4.0), bits(5e5, 1.2e7);
    std::uniform_int_distribution<int> size(1, 8), coin(0, 2);
    int ok = 0, mixed = 0;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const int k = size(rng);
        std::vector<double> s, b;
        bool above = false, below = false;
        for (int j = 0; j < k; ++j) {
            double x = std::pow(10.0, logs(rng));
            if (coin(rng) == 0) x = cap * (1.0 + std::pow(10.0, logs(rng)));
            (x >= cap ? above : below) = true;
            s.push_back(x);
            b.push_back(bits(rng));
        }
        mixed += above && below;
        const double a = metrics::window_latency(s, b, m), c = metrics::window_latency_closed_form(s, b, m);
        worst = std::max(worst, std::abs(a - c) / a);
        ok += metrics::latency_sinr_identity_check(s, b, m);
    }
    return {ok == 1000, fmt("%d/1000 inputs agree (%d cap-binding mixtures), worst relative gap %.2e", ok, mixed, worst)};
}

Verdict esinr_latency_ordering() {
    const metrics::RateModel m;
    PrecoderConfig cfg = precoder_config(8, 4, 2);
    const Window w{0, 1};
    int pairs = 0, ordered = 0, attempts = 0;
    while (pairs < 200 && attempts < 2000) {
        ++attempts;
        const auto chs = random_channels(8, 2, 4, 2, 9000 + attempts);
        HybridDesign d[2];
        double esinr[2], lat[2];
        bool capped = false;
        for (int v = 0; v < 2; ++v) {
            Rng rng(mix_seed(attempts, v));
            d[v] = precoder::initial_design(chs, w, cfg, rng);
            for (Index i = 0; i < d[v].m.size(); ++i) d[v].m(i) = complex_normal(rng);
            d[v].m *= std::sqrt(cfg.p_tx_max / (d[v].f * d[v].m).squaredNorm());
            const auto s = precoder::evaluate_sinr(chs, d[v], w, cfg.noise);
            for (double x : s) capped = capped || std::log2(1.0 + m.beta * x) >= m.c_max;
            esinr[v] = precoder::min_esinr(chs, d[v], w, cfg.noise);
            lat[v] = metrics::window_latency(s, std::vector<double>(s.size(), 4e6), m);
        }
        if (capped || esinr[0] == esinr[1]) continue;
        ++pairs;
        ordered += (esinr[0] > esinr[1]) == (lat[0] < lat[1]);
    }
    return {pairs == 200 && ordered == 200, fmt("%d/%d non-capped design pairs ordered", ordered, pairs)};
}

Verdict fig3_trends() {
    const auto t0 = Clock::now();
    const std::vector<Index> ks{4, 8, 16}, rxs{1, 2, 3};
    const std::vector<PrecoderMode> modes{PrecoderMode::Digital, PrecoderMode::Hybrid, PrecoderMode::Analog};
    std::map<std::tuple<int, Index, Index>, double> esinr, latency;
    for (std::size_t mi = 0; mi < modes.size(); ++mi)
        for (Index k : ks)
            for (Index rx : rxs) {
                cli::SimConfig c;
                c.n_tx = 8;
                c.l_tx = 2;
                c.n_rf = 4;
                c.g_total = 2;
                c.k_total = k;
                c.n_rx = rx;
                c.realizations = 20;
                c.precoder_mode = modes[mi];
                double se = 0.0, sl = 0.0;
                for (int r = 0; r < c.realizations; ++r) {
                    cli::Realization real(c, r);
                    const auto& ev = real.evaluate({0, 1});
                    se += ev.design.alpha;
                    sl += ev.latency;
                }
                esinr[{static_cast<int>(mi), k, rx}] = se / c.realizations;
                latency[{static_cast<int>(mi), k, rx}] = sl / c.realizations;
            }
    const double secs = seconds_since(t0);
    int k_viol = 0, rx_viol = 0, lat_viol = 0;
    for (int mi = 0; mi < 3; ++mi)
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b + 1 < 3; ++b) {
                k_viol += !(esinr[{mi, ks[b + 1], rxs[a]}] < esinr[{mi, ks[b], rxs[a]}]);
                rx_viol += !(esinr[{mi, ks[a], rxs[b + 1]}] > esinr[{mi, ks[a], rxs[b]}]);
            }
    std::ostringstream table;
    for (Index k : ks)
        for (Index rx : rxs) {
            const double dl = latency[{0, k, rx}], hl = latency[{1, k, rx}], al = latency[{2, k, rx}];
            lat_viol += !(dl <= hl && hl <= al);
            table << fmt("\n    K=%-2ld N_rx=%ld  e-SINR d/h/a %9.3f %9.3f %9.3f  latency ms d/h/a %.4f %.4f %.4f",
                         static_cast<long>(k), static_cast<long>(rx), esinr[{0, k, rx}], esinr[{1, k, rx}],
                         esinr[{2, k, rx}], dl * 1e3, hl * 1e3, al * 1e3);
        }
    return {k_viol == 0 && rx_viol == 0 && lat_viol == 0 && secs < 600.0,
            fmt("K-trend violations %d/18, N_rx-trend violations %d/18, latency-order violations %d/9, %.1f s",
                k_viol, rx_viol, lat_viol, secs) + table.str()};
}

Verdict fig4_ordering() {
    cli::SimConfig c;
    c.n_tx = 8;
    c.l_tx = 4;
    c.n_rf = 2;
    c.g_total = 4;
    c.k_total = 8;
    c.realizations = 20;
    c.precoder_mode = PrecoderMode::Hybrid;
    c.lambda = 0.1;
    const std::vector<cli::Scheme> schemes{cli::Scheme::Xhaus, cli::Scheme::Hydrawave, cli::Scheme::Sing,
                                           cli::Scheme::Rand};
    const std::vector<double> deltas{0.0, 0.5e-3};
    std::map<std::pair<int, int>, double> mean;
    int hyd_paired = 0;
    for (int r = 0; r < c.realizations; ++r) {
        cli::Realization real(c, r);
        for (std::size_t di = 0; di < deltas.size(); ++di) {
            for (std::size_t si = 0; si < schemes.size(); ++si) {
                sched::Schedule s;
                if (schemes[si] == cli::Scheme::Xhaus)
                    s = sched::schedule_xhaus(
                            4, 2, [&](const sched::Window& w) { return real.evaluate(w).latency; }, deltas[di])
                            .schedule;
                else
                    s = real.schedule_for(schemes[si], c.lambda);
                if (schemes[si] == cli::Scheme::Hydrawave && di == 0) hyd_paired += s.t_s() < 4;
                std::vector<double> per;
                for (const auto& w : s.windows) per.push_back(real.evaluate(w).latency);
                mean[{static_cast<int>(di), static_cast<int>(si)}] +=
                    metrics::combine_latency(per, deltas[di]) * 1e3 / c.realizations;
            }
        }
    }
    bool pass = true;
    std::ostringstream out;
    out << fmt("HYDRAWAVE paired groups in %d/20 realizations", hyd_paired);
    for (int di = 0; di < 2; ++di) {
        const double x = mean[{di, 0}], h = mean[{di, 1}], s = mean[{di, 2}], r = mean[{di, 3}];
        const bool order = x <= h && h <= std::max(s, r);
        const bool band = h <= 1.2 * x;
        const bool sing = di == 0 || s > h;
        pass = pass && order && band && sing;
        out << fmt("\n    delta_sw=%.1f ms  XHAUS %.4f  HYDRAWAVE %.4f  SING %.4f  RAND %.4f  "
                   "order %s, within 20%% %s (%+.1f%%)",
                   deltas[di] * 1e3, x, h, s, r, order ? "ok" : "VIOLATED", band ? "ok" : "VIOLATED",
                   100.0 * (h / x - 1.0));
        if (di == 1) out << fmt(", SING > HYDRAWAVE %s", sing ? "ok" : "VIOLATED");
    }
    return {pass, out.str()};
}

Verdict energy_constants() {
    const metrics::EnergyModel e;
    const double hyb = metrics::energy(metrics::Architecture::Hybrid, 24, 4, e);
    const double dig = metrics::energy(metrics::Architecture::Digital, 24, 24, e);
    return {hyb == 1.82 && dig == 6.10, fmt("hybrid %.17g W, digital %.17g W", hyb, dig)};
}

Verdict latency_floor() {
    const metrics::RateModel m;
    const double closed = metrics::window_latency({std::numeric_limits<double>::infinity()}, {4e6}, m) * 1e3;

    PrecoderConfig cfg = precoder_config(24, 6, 4);
    cfg.noise = 1e-15;
    const auto chs = random_channels(24, 1, 1, 1, 11);
    const auto d = precoder::design_window(chs, {0}, cfg);
    const auto s = precoder::evaluate_sinr(chs, d, {0}, cfg.noise);
    const double designed = metrics::window_latency(s, {4e6}, m) * 1e3;
    const bool pass = std::abs(closed - 0.8333) <= 1e-4 && std::abs(designed - 0.8333) <= 1e-4;
    return {pass, fmt("noise-free limit %.6f ms, designed single receiver at -120 dBm noise %.6f ms", closed, designed)};
}

Verdict invariant_suite() {
    std::vector<std::string> failed;
    auto expect = [&](bool ok, const char* what) {
        if (!ok) failed.emplace_back(what);
    };

    bool grid = true, power = true, fnorm = true;
    for (PrecoderMode mode : {PrecoderMode::Hybrid, PrecoderMode::Analog, PrecoderMode::Digital})
        for (int trial = 0; trial < 4; ++trial) {
            PrecoderConfig cfg = precoder_config(8, 4, 2);
            cfg.mode = mode;
            cfg.seed = trial;
            const Index n_rx = 1 + trial % 3;
            const auto chs = random_channels(8, n_rx, 4, 2, 300 + trial);
            const auto d = precoder::design_window(chs, {0, 1}, cfg);
            const auto fph = cfg.analog_phases();
            const auto wph = cfg.combiner_phases(n_rx);
            if (mode != PrecoderMode::Digital) {
                const CVector f = precoder::analog_entries(d.f, cfg.l_tx);
                for (Index q = 0; q < f.size(); ++q)
                    grid = grid && f(q) == fph.quantize(f(q)) && std::abs(std::abs(f(q)) - std::sqrt(fph.scale())) < 1e-12;
            }
            for (const auto& w : d.combiners) {
                for (Index n = 0; n < w.size(); ++n)
                    grid = grid && w(n) == wph.quantize(w(n)) && std::abs(std::abs(w(n)) - std::sqrt(wph.scale())) < 1e-12;
                power = power && std::abs(w.squaredNorm() - cfg.p_rx_max) <= 1e-9;
            }
            power = power && (d.f * d.m).squaredNorm() <= cfg.p_tx_max * (1 + 1e-9);
            fnorm = fnorm && std::abs(d.f.squaredNorm() - static_cast<double>(cfg.rf_chains())) <= 1e-9;
        }
    expect(grid, "constant-modulus grid");
    expect(power, "power budgets");
    expect(fnorm, "analog Frobenius norm");

    bool contraction = true;
    for (int n = 1; n <= 12; ++n) {
        const auto tr = precoder::bisect_max_alpha(
            [](double a) {
                sdp::SdpSolution s;
                s.status = a <= 2.7 ? sdp::SdpStatus::Feasible : sdp::SdpStatus::Infeasible;
                return s;
            },
            0.0, 8.0, n);
        contraction = contraction && tr.alpha_high - tr.alpha_low == std::ldexp(8.0, -n);
    }
    expect(contraction, "bisection contraction");

    bool idem = true;
    Rng rng(6);
    std::normal_distribution<double> n01;
    for (int t = 0; t < 50; ++t) {
        const Index n = 2 + t % 10;
        RMatrix a(n, n);
        for (Index i = 0; i < a.size(); ++i) a(i) = n01(rng);
        const RMatrix p = sdp::psd_project((a + a.transpose()) / 2.0);
        idem = idem && (sdp::psd_project(p) - p).norm() <= 1e-10;
    }
    expect(idem, "PSD projection idempotence");

    cli::SimConfig c;
    c.n_tx = 4;
    c.l_tx = 2;
    c.n_rf = 2;
    c.d_f = 4;
    c.g_total = 3;
    c.k_total = 3;
    c.n_iter = 1;
    c.realizations = 2;
    std::ostringstream a, b;
    cli::write_results_csv(a, cli::run_experiment(c));
    cli::write_results_csv(b, cli::run_experiment(c));
    expect(a.str() == b.str(), "determinism");

    std::string detail = "grid, power, contraction, PSD idempotence, determinism";
    if (!failed.empty()) {
        detail = "failed:";
        for (const auto& f : failed) detail += " " + f + ";";
    }
    return {failed.empty(), detail};
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Verdict()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "analog stage vs exhaustive phase search", analog_stage_oracle},
        {2, "combiner stage vs exhaustive candidates", combiner_stage_oracle},
        {3, "exact scheduler vs naive enumeration", scheduler_exactness},
        {4, "latency closed-form identity", latency_identity},
        {5, "min e-SINR / latency ordering", esinr_latency_ordering},
        {6, "precoder trends across K_T, N_rx and modes", fig3_trends},
        {7, "scheduling scheme ordering", fig4_ordering},
        {8, "energy constants", energy_constants},
        {9, "latency floor", latency_floor},
        {10, "invariant suite", invariant_suite},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = Clock::now();
        const Verdict v = c.run();
        failures += !v.pass;
        std::printf("criterion %d: %s - %s [%.1f s]: %s\n", c.id, v.pass ? "PASS" : "FAIL", c.name,
                    seconds_since(t0), v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
