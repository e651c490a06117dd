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

#include "hybridcast/precoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

namespace hybridcast::precoder {

namespace {

constexpr double kRankOneRatio = 1e-6;

struct WindowInfo {
    std::vector<Index> receivers;
    std::vector<Index> column;
    std::vector<double> btil;
};

WindowInfo window_info(const ChannelSet& chs, const Window& window) {
    if (window.empty())
        throw std::invalid_argument("window has no groups");
    const auto bt = normalized_bits(chs);
    WindowInfo info;
    for (std::size_t i = 0; i < window.size(); ++i) {
        const Index g = window[i];
        if (g < 0 || g >= chs.n_groups())
            throw std::out_of_range("window references group " + std::to_string(g));
        for (std::size_t j = 0; j < i; ++j)
            if (window[j] == g)
                throw std::invalid_argument("window lists group " + std::to_string(g) + " twice");
        for (Index k : chs.groups[g]) {
            info.receivers.push_back(k);
            info.column.push_back(static_cast<Index>(i));
            info.btil.push_back(bt[g]);
        }
    }
    return info;
}

void check_design(const ChannelSet& chs, const HybridDesign& d, const Window& window,
                  const WindowInfo& info) {
    if (d.f.rows() != chs.n_tx() || d.m.rows() != d.f.cols() ||
        d.m.cols() != static_cast<Index>(window.size()))
        throw DimensionError("design does not match channel set or window");
    if (d.combiners.size() != info.receivers.size() || d.receivers != info.receivers)
        throw DimensionError("design combiners do not match the window's receivers");
    for (const auto& w : d.combiners)
        if (w.size() != chs.n_rx())
            throw DimensionError("combiner length differs from N_rx");
}

// w^H H_k F M for the receiver at pos.
Eigen::RowVectorXcd effective_gains(const ChannelSet& chs, const CMatrix& fm, const WindowInfo& info,
                                    const CVector& w, std::size_t pos) {
    return w.adjoint() * chs.channels[info.receivers[pos]] * fm;
}

double sinr_from_gains(const Eigen::RowVectorXcd& g, Index col, double noise_term) {
    const double sig = std::norm(g(col));
    double interf = 0.0;
    for (Index j = 0; j < g.size(); ++j)
        if (j != col)
            interf += std::norm(g(j));
    return sig / (interf + noise_term);
}

double receiver_esinr(const ChannelSet& chs, const CMatrix& fm, const WindowInfo& info,
                      const CVector& w, std::size_t pos, double noise) {
    const auto g = effective_gains(chs, fm, info, w, pos);
    return sinr_from_gains(g, info.column[pos], noise * w.squaredNorm()) / info.btil[pos];
}

double min_esinr_fast(const ChannelSet& chs, const HybridDesign& d, const WindowInfo& info,
                      double noise) {
    const CMatrix fm = d.f * d.m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t pos = 0; pos < info.receivers.size(); ++pos)
        best = std::min(best, receiver_esinr(chs, fm, info, d.combiners[pos], pos, noise));
    return best;
}

std::uint64_t window_hash(const Window& window) {
    std::uint64_t h = 0x5157u;
    for (Index g : window)
        h = mix_seed(h, static_cast<std::uint64_t>(g));
    return h;
}

CVector unit_complex_gaussian(Index n, Rng& rng) {
    CVector u(n);
    for (Index i = 0; i < n; ++i)
        u(i) = complex_normal(rng);
    const double nrm = u.norm();
    return nrm > 0.0 ? CVector(u / nrm) : CVector(CVector::Unit(n, 0));
}

// Rotates v so that its largest-modulus entry is real and positive.
CVector fix_global_phase(const CVector& v) {
    Index idx = 0;
    v.cwiseAbs().maxCoeff(&idx);
    const double a = std::abs(v(idx));
    return a > 0.0 ? CVector(v * (std::conj(v(idx)) / a)) : v;
}

CVector quantize_vector(const CVector& v, const PhaseSet& phases) {
    CVector out(v.size());
    for (Index i = 0; i < v.size(); ++i)
        out(i) = phases.quantize(v(i));
    return out;
}

double safe_score(double s) { return std::isnan(s) ? -std::numeric_limits<double>::infinity() : s; }

} // namespace

// ---------------------------------------------------------------------------
// PhaseSet

PhaseSet::PhaseSet(int levels, double scale) : levels_(levels), scale_(scale) {
    if (levels < 1)
        throw std::invalid_argument("PhaseSet: levels must be >= 1");
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw std::invalid_argument("PhaseSet: scale must be positive");
}

cplx PhaseSet::value(int d) const {
    return std::polar(std::sqrt(scale_), 2.0 * M_PI * static_cast<double>(d) / levels_);
}

int PhaseSet::nearest_index(cplx z) const {
    const double t = std::arg(z) * levels_ / (2.0 * M_PI);
    const double lo = std::floor(t);
    const double frac = t - lo;
    auto wrap = [this](double x) {
        long long i = static_cast<long long>(x) % levels_;
        return static_cast<int>(i < 0 ? i + levels_ : i);
    };
    const int a = wrap(lo);
    const int b = wrap(lo + 1.0);
    if (frac < 0.5)
        return a;
    if (frac > 0.5)
        return b;
    return std::min(a, b);
}

bool PhaseSet::contains(cplx z, double tol) const {
    return std::abs(z - quantize(z)) <= tol * std::max(1.0, std::sqrt(scale_));
}

std::string_view to_string(PrecoderMode m) {
    switch (m) {
    case PrecoderMode::Digital:
        return "digital";
    case PrecoderMode::Hybrid:
        return "hybrid";
    case PrecoderMode::Analog:
        return "analog";
    }
    return "?";
}

PrecoderMode parse_precoder_mode(std::string_view s) {
    if (s == "digital")
        return PrecoderMode::Digital;
    if (s == "hybrid")
        return PrecoderMode::Hybrid;
    if (s == "analog")
        return PrecoderMode::Analog;
    throw std::invalid_argument("unknown precoder mode '" + std::string(s) + "'");
}

PhaseSet PrecoderConfig::analog_phases() const {
    return PhaseSet(d_f, static_cast<double>(rf_chains()) / static_cast<double>(n_tx));
}

PhaseSet PrecoderConfig::combiner_phases(Index n_rx) const {
    return PhaseSet(d_w, p_rx_max / static_cast<double>(n_rx));
}

void PrecoderConfig::validate() const {
    if (n_tx < 1 || l_tx < 1 || n_rf < 1)
        throw std::invalid_argument("antenna and RF counts must be >= 1");
    if (n_tx != l_tx * n_rf)
        throw std::invalid_argument("n_tx must equal l_tx * n_rf");
    if (d_f < 1 || d_w < 1)
        throw std::invalid_argument("phase levels must be >= 1");
    if (!(p_tx_max > 0.0) || !(p_rx_max > 0.0) || !(noise > 0.0))
        throw std::invalid_argument("powers must be positive");
    for (int v : n_bis)
        if (v < 0)
            throw std::invalid_argument("bisection steps must be >= 0");
    for (int v : n_rand)
        if (v < 1)
            throw std::invalid_argument("randomization multipliers must be >= 1");
    if (n_iter < 0)
        throw std::invalid_argument("n_iter must be >= 0");
}

// ---------------------------------------------------------------------------
// SINR

std::vector<double> normalized_bits(const ChannelSet& chs) {
    double mx = 0.0;
    for (double b : chs.bits)
        mx = std::max(mx, b);
    std::vector<double> out;
    out.reserve(chs.bits.size());
    for (double b : chs.bits)
        out.push_back(b / mx);
    return out;
}

std::vector<Index> window_receivers(const ChannelSet& chs, const Window& window) {
    return window_info(chs, window).receivers;
}

std::vector<double> evaluate_sinr(const ChannelSet& chs, const HybridDesign& design,
                                  const Window& window, double noise) {
    const auto info = window_info(chs, window);
    check_design(chs, design, window, info);
    const CMatrix fm = design.f * design.m;
    std::vector<double> out;
    for (std::size_t pos = 0; pos < info.receivers.size(); ++pos) {
        const CVector& w = design.combiners[pos];
        out.push_back(sinr_from_gains(effective_gains(chs, fm, info, w, pos), info.column[pos],
                                      noise * w.squaredNorm()));
    }
    return out;
}

double min_esinr(const ChannelSet& chs, const HybridDesign& design, const Window& window,
                 double noise) {
    const auto info = window_info(chs, window);
    check_design(chs, design, window, info);
    return min_esinr_fast(chs, design, info, noise);
}

// ---------------------------------------------------------------------------
// Bisection

BisectionTrace bisect_max_alpha(const FeasibilityOracle& oracle, double alpha_low,
                                double alpha_high, int n_steps) {
    if (!(alpha_low <= alpha_high))
        throw std::invalid_argument("bisect_max_alpha: alpha_low > alpha_high");
    if (n_steps < 0)
        throw std::invalid_argument("bisect_max_alpha: negative step count");
    BisectionTrace tr;
    tr.initial_low = alpha_low;
    tr.initial_high = alpha_high;
    tr.final_alpha = alpha_low;
    double lo = alpha_low, hi = alpha_high;
    for (int s = 0; s < n_steps; ++s) {
        const double mid = 0.5 * (lo + hi);
        sdp::SdpSolution sol = oracle(mid);
        const bool ok = sol.feasible();
        tr.iterations.emplace_back(mid, ok);
        if (ok) {
            lo = mid;
            tr.final_alpha = mid;
            tr.final_x = std::move(sol.x);
        } else {
            hi = mid;
        }
    }
    tr.alpha_low = lo;
    tr.alpha_high = hi;
    return tr;
}

// ---------------------------------------------------------------------------
// Analog stage

CMatrix expand_analog(const CVector& f, Index n_rf, Index l_tx) {
    if (f.size() != n_rf * l_tx)
        throw DimensionError("expand_analog: f must have n_rf * l_tx entries");
    CMatrix out = CMatrix::Zero(f.size(), n_rf);
    for (Index q = 0; q < f.size(); ++q)
        out(q, q / l_tx) = f(q);
    return out;
}

CVector analog_entries(const CMatrix& f, Index l_tx) {
    if (f.rows() != f.cols() * l_tx)
        throw DimensionError("analog_entries: F is not sub-connected with this l_tx");
    CVector out(f.rows());
    for (Index q = 0; q < f.rows(); ++q)
        out(q) = f(q, q / l_tx);
    return out;
}

namespace {

// Columns b_{k,j} of the analog stage for the receiver at pos.
CMatrix analog_vectors(const ChannelSet& chs, const HybridDesign& d, const WindowInfo& info,
                       Index l_tx, std::size_t pos) {
    const CVector hw = chs.channels[info.receivers[pos]].adjoint() * d.combiners[pos];
    const Index n_tx = hw.size();
    const Index g = d.m.cols();
    CMatrix b(n_tx, g);
    for (Index j = 0; j < g; ++j)
        for (Index q = 0; q < n_tx; ++q)
            b(q, j) = std::conj(d.m(q / l_tx, j)) * hw(q);
    return b;
}

sdp::HermitianMatrix sinr_row(const CMatrix& vecs, Index col, double alpha_btil) {
    CMatrix a = -vecs.col(col) * vecs.col(col).adjoint();
    for (Index j = 0; j < vecs.cols(); ++j)
        if (j != col)
            a += alpha_btil * vecs.col(j) * vecs.col(j).adjoint();
    return sdp::HermitianMatrix(a);
}

void check_analog_dims(const ChannelSet& chs, const HybridDesign& d, const PrecoderConfig& cfg) {
    if (chs.n_tx() != cfg.n_tx || d.f.rows() != cfg.n_tx || d.f.cols() != cfg.rf_chains() ||
        d.m.rows() != cfg.rf_chains())
        throw DimensionError("design dimensions do not match the precoder configuration");
}

} // namespace

sdp::SdpProblem build_analog_sdp(const ChannelSet& chs, const HybridDesign& current,
                                 const Window& window, const PrecoderConfig& cfg, double alpha) {
    const auto info = window_info(chs, window);
    check_design(chs, current, window, info);
    check_analog_dims(chs, current, cfg);
    const Index l = cfg.subarray();

    sdp::SdpProblem p;
    p.dim = cfg.n_tx;
    p.diag_eq = cfg.analog_phases().scale();
    for (std::size_t pos = 0; pos < info.receivers.size(); ++pos) {
        const CMatrix b = analog_vectors(chs, current, info, l, pos);
        const double ab = alpha * info.btil[pos];
        p.trace_ineqs.push_back({sinr_row(b, info.column[pos], ab),
                                 -ab * cfg.noise * current.combiners[pos].squaredNorm()});
    }
    RVector dpow = RVector::Zero(cfg.n_tx);
    for (Index q = 0; q < cfg.n_tx; ++q)
        dpow(q) = current.m.row(q / l).squaredNorm();
    p.trace_ineqs.push_back({sdp::HermitianMatrix(CMatrix(dpow.cast<cplx>().asDiagonal())),
                             cfg.p_tx_max});
    return p;
}

double analog_upper_bound(const ChannelSet& chs, const HybridDesign& current, const Window& window,
                          const PrecoderConfig& cfg) {
    const auto info = window_info(chs, window);
    check_design(chs, current, window, info);
    check_analog_dims(chs, current, cfg);
    double bound = std::numeric_limits<double>::infinity();
    for (std::size_t pos = 0; pos < info.receivers.size(); ++pos) {
        const CMatrix b = analog_vectors(chs, current, info, cfg.subarray(), pos);
        const double tr = b.col(info.column[pos]).squaredNorm();
        const double den = info.btil[pos] * cfg.noise * current.combiners[pos].squaredNorm();
        bound = std::min(bound, static_cast<double>(cfg.rf_chains()) * tr / den);
    }
    return std::isfinite(bound) ? bound : 0.0;
}

// ---------------------------------------------------------------------------
// Digital stage

namespace {

CMatrix digital_vectors(const ChannelSet& chs, const HybridDesign& d, const WindowInfo& info,
                        std::size_t pos) {
    const CVector v = d.f.adjoint() * chs.channels[info.receivers[pos]].adjoint() * d.combiners[pos];
    const Index nrf = v.size();
    const Index g = d.m.cols();
    CMatrix c = CMatrix::Zero(nrf * g, g);
    for (Index j = 0; j < g; ++j)
        c.col(j).segment(j * nrf, nrf) = v;
    return c;
}

CMatrix power_matrix(const CMatrix& f, Index g) {
    const CMatrix ff = f.adjoint() * f;
    const Index nrf = ff.rows();
    CMatrix j = CMatrix::Zero(nrf * g, nrf * g);
    for (Index i = 0; i < g; ++i)
        j.block(i * nrf, i * nrf, nrf, nrf) = ff;
    return j;
}

} // namespace

sdp::SdpProblem build_digital_sdp(const ChannelSet& chs, const HybridDesign& current,
                                  const Window& window, const PrecoderConfig& cfg, double alpha) {
    const auto info = window_info(chs, window);
    check_design(chs, current, window, info);
    const Index g = current.m.cols();

    sdp::SdpProblem p;
    p.dim = current.f.cols() * g;
    for (std::size_t pos = 0; pos < info.receivers.size(); ++pos) {
        const CMatrix c = digital_vectors(chs, current, info, pos);
        const double ab = alpha * info.btil[pos];
        p.trace_ineqs.push_back({sinr_row(c, info.column[pos], ab),
                                 -ab * cfg.noise * current.combiners[pos].squaredNorm()});
    }
    p.trace_ineqs.push_back({sdp::HermitianMatrix(power_matrix(current.f, g)), cfg.p_tx_max});
    return p;
}

double digital_upper_bound(const ChannelSet& chs, const HybridDesign& current, const Window& window,
                           const PrecoderConfig& cfg) {
    const auto info = window_info(chs, window);
    check_design(chs, current, window, info);
    double bound = std::numeric_limits<double>::infinity();
    for (std::size_t pos = 0; pos < info.receivers.size(); ++pos) {
        const CVector v =
            current.f.adjoint() * chs.channels[info.receivers[pos]].adjoint() * current.combiners[pos];
        const double den = info.btil[pos] * cfg.noise * current.combiners[pos].squaredNorm();
        bound = std::min(bound, cfg.p_tx_max * v.squaredNorm() / den);
    }
    return std::isfinite(bound) ? bound : 0.0;
}

// ---------------------------------------------------------------------------
// Combiner stage

namespace {

// Columns g_j = H_k F M e_j.
CMatrix combiner_vectors(const ChannelSet& chs, const HybridDesign& d, const WindowInfo& info,
                         std::size_t pos) {
    return chs.channels[info.receivers[pos]] * d.f * d.m;
}

} // namespace

sdp::SdpProblem build_combiner_sdp(const ChannelSet& chs, const HybridDesign& current,
                                   const Window& window, const PrecoderConfig& cfg, std::size_t pos,
                                   double alpha) {
    const auto info = window_info(chs, window);
    check_design(chs, current, window, info);
    if (pos >= info.receivers.size())
        throw std::out_of_range("build_combiner_sdp: receiver position");
    const Index n_rx = chs.n_rx();
    const CMatrix g = combiner_vectors(chs, current, info, pos);
    const Index col = info.column[pos];
    const double ab = alpha * info.btil[pos];

    CMatrix a = -g.col(col) * g.col(col).adjoint() + ab * cfg.noise * CMatrix::Identity(n_rx, n_rx);
    for (Index j = 0; j < g.cols(); ++j)
        if (j != col)
            a += ab * g.col(j) * g.col(j).adjoint();

    sdp::SdpProblem p;
    p.dim = n_rx;
    p.diag_eq = cfg.combiner_phases(n_rx).scale();
    p.trace_ineqs.push_back({sdp::HermitianMatrix(a), 0.0});
    p.trace_ineqs.push_back({sdp::HermitianMatrix::identity(n_rx), cfg.p_rx_max});
    return p;
}

double combiner_upper_bound(const ChannelSet& chs, const HybridDesign& current, const Window& window,
                            const PrecoderConfig& cfg, std::size_t pos) {
    const auto info = window_info(chs, window);
    check_design(chs, current, window, info);
    const Index n_rx = chs.n_rx();
    const CMatrix g = combiner_vectors(chs, current, info, pos);
    const Index col = info.column[pos];
    CMatrix pt = cfg.noise * CMatrix::Identity(n_rx, n_rx);
    for (Index j = 0; j < g.cols(); ++j)
        if (j != col)
            pt += g.col(j) * g.col(j).adjoint();
    // P_i P~^{-1} has rank one; its only non-zero eigenvalue is g_i^H P~^{-1} g_i.
    const CVector x = pt.llt().solve(g.col(col));
    return std::max(0.0, g.col(col).dot(x).real()) / info.btil[pos];
}

// ---------------------------------------------------------------------------
// Recovery

CVector recover_constant_modulus(const sdp::HermitianMatrix& y, const PhaseSet& phases, int n_rand,
                                 const Scorer& scorer, Rng& rng) {
    if (n_rand < 1)
        throw std::invalid_argument("recover_constant_modulus: n_rand must be >= 1");
    const Index n = y.dim();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(y.matrix());
    const RVector& ev = es.eigenvalues();
    const double lmax = ev(n - 1);
    if (!(lmax > 0.0))
        return CVector::Constant(n, phases.value(0));
    if (ev(0) < -1e-6 * lmax)
        throw std::invalid_argument("recover_constant_modulus: matrix is not positive semidefinite");

    if (n == 1)
        return quantize_vector(fix_global_phase(es.eigenvectors().col(0)), phases);

    // Y = L L^H
    CMatrix l;
    CVector best;
    double best_score = -std::numeric_limits<double>::infinity();
    if (ev(n - 2) / lmax < kRankOneRatio) {
        // Rank one: the quantized principal eigenvector is the incumbent and
        // the randomized candidates only replace it when strictly better.
        best = quantize_vector(fix_global_phase(es.eigenvectors().col(n - 1)), phases);
        best_score = safe_score(scorer(best));
        l = std::sqrt(lmax) * es.eigenvectors().col(n - 1);
    } else {
        const double jitter = 1e-10 * y.matrix().diagonal().real().maxCoeff();
        Eigen::LDLT<CMatrix> ldlt(y.matrix() + jitter * CMatrix::Identity(n, n));
        const RVector dvec = ldlt.vectorD().real();
        if (ldlt.info() == Eigen::Success && dvec.minCoeff() >= -1e-12 * lmax) {
            l = CMatrix(ldlt.matrixL()) * dvec.cwiseMax(0.0).cwiseSqrt().cast<cplx>().asDiagonal();
            l = ldlt.transpositionsP().transpose() * l;
        } else {
            l = es.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().cast<cplx>().asDiagonal();
        }
    }

    for (int v = 0; v < n_rand; ++v) {
        const CVector u = unit_complex_gaussian(n, rng);
        const CVector z = l.conjugate() * u;
        CVector f(n);
        for (Index i = 0; i < n; ++i)
            f(i) = phases.quantize(std::conj(z(i)));
        const double s = safe_score(scorer(f));
        if (best.size() == 0 || s > best_score) {
            best = std::move(f);
            best_score = s;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Stages

StageResult optimize_analog(const ChannelSet& chs, const HybridDesign& current, const Window& window,
                            const PrecoderConfig& cfg, Rng& rng) {
    const auto info = window_info(chs, window);
    check_design(chs, current, window, info);
    check_analog_dims(chs, current, cfg);
    StageResult res{current, min_esinr_fast(chs, current, info, cfg.noise), {}};
    if (cfg.mode == PrecoderMode::Digital)
        return res;

    const double hi = analog_upper_bound(chs, current, window, cfg);
    res.trace = bisect_max_alpha(
        [&](double a) {
            return sdp::solve_feasibility(build_analog_sdp(chs, current, window, cfg, a), cfg.solver);
        },
        0.0, hi, cfg.n_bis[0]);
    if (!res.trace.final_x)
        return res;

    const Index nrf = cfg.rf_chains(), l = cfg.subarray();
    HybridDesign cand = current;
    const Scorer scorer = [&](const CVector& f) {
        cand.f = expand_analog(f, nrf, l);
        return min_esinr_fast(chs, cand, info, cfg.noise);
    };
    const CVector f = recover_constant_modulus(*res.trace.final_x, cfg.analog_phases(),
                                               cfg.n_rand[0] * static_cast<int>(cfg.n_tx), scorer, rng);
    cand.f = expand_analog(f, nrf, l);
    res.alpha = min_esinr_fast(chs, cand, info, cfg.noise);
    res.design = std::move(cand);
    return res;
}

StageResult optimize_digital(const ChannelSet& chs, const HybridDesign& current,
                             const Window& window, const PrecoderConfig& cfg, Rng& rng) {
    const auto info = window_info(chs, window);
    check_design(chs, current, window, info);
    StageResult res{current, min_esinr_fast(chs, current, info, cfg.noise), {}};
    if (cfg.mode == PrecoderMode::Analog)
        return res;

    const double hi = digital_upper_bound(chs, current, window, cfg);
    res.trace = bisect_max_alpha(
        [&](double a) {
            return sdp::solve_feasibility(build_digital_sdp(chs, current, window, cfg, a), cfg.solver);
        },
        0.0, hi, cfg.n_bis[1]);
    if (!res.trace.final_x)
        return res;

    const Index nrf = current.f.cols();
    const Index g = current.m.cols();
    const CMatrix jmat = power_matrix(current.f, g);
    HybridDesign cand = current;
    auto to_boundary = [&](CVector m) {
        const double pw = m.dot(jmat * m).real();
        if (pw > 0.0)
            m *= std::sqrt(cfg.p_tx_max / pw);
        return m;
    };
    auto score = [&](const CVector& m) {
        cand.m = m.reshaped(nrf, g);
        return safe_score(min_esinr_fast(chs, cand, info, cfg.noise));
    };

    const CMatrix& z = res.trace.final_x->matrix();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(z);
    const RVector& ev = es.eigenvalues();
    const Index n = z.rows();
    const double lmax = ev(n - 1);
    CVector best;
    if (!(lmax > 0.0))
        return res;
    if (n == 1 || ev(n - 2) / lmax < kRankOneRatio) {
        best = to_boundary(std::sqrt(lmax) * es.eigenvectors().col(n - 1));
    } else {
        const CMatrix root = es.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().cast<cplx>().asDiagonal();
        const int count = cfg.n_rand[1] * static_cast<int>(g);
        double best_score = -std::numeric_limits<double>::infinity();
        for (int v = 0; v < count; ++v) {
            CVector u(n);
            for (Index i = 0; i < n; ++i)
                u(i) = complex_normal(rng);
            CVector m = to_boundary(root * u);
            const double s = score(m);
            if (best.size() == 0 || s > best_score) {
                best = std::move(m);
                best_score = s;
            }
        }
    }
    cand.m = best.reshaped(nrf, g);
    res.alpha = min_esinr_fast(chs, cand, info, cfg.noise);
    res.design = std::move(cand);
    return res;
}

std::vector<CVector> optimize_combiners(const ChannelSet& chs, const HybridDesign& current,
                                        const Window& window, const PrecoderConfig& cfg, Rng& rng) {
    const auto info = window_info(chs, window);
    check_design(chs, current, window, info);
    const Index n_rx = chs.n_rx();
    const PhaseSet phases = cfg.combiner_phases(n_rx);
    std::vector<CVector> out = current.combiners;
    if (n_rx == 1) {
        for (auto& w : out)
            w = CVector::Constant(1, phases.value(0));
        return out;
    }
    const CMatrix fm = current.f * current.m;
    const std::uint64_t base = rng();
    for (std::size_t pos = 0; pos < info.receivers.size(); ++pos) {
        Rng local(mix_seed(base, pos));
        const double hi = combiner_upper_bound(chs, current, window, cfg, pos);
        const auto tr = bisect_max_alpha(
            [&](double a) {
                return sdp::solve_feasibility(build_combiner_sdp(chs, current, window, cfg, pos, a),
                                              cfg.solver);
            },
            0.0, hi, cfg.n_bis[2]);
        if (!tr.final_x)
            continue;
        const Scorer scorer = [&](const CVector& w) {
            return receiver_esinr(chs, fm, info, w, pos, cfg.noise);
        };
        out[pos] = recover_constant_modulus(*tr.final_x, phases,
                                            cfg.n_rand[2] * static_cast<int>(n_rx), scorer, local);
    }
    return out;
}

HybridDesign initial_design(const ChannelSet& chs, const Window& window, const PrecoderConfig& cfg,
                            Rng& rng) {
    const auto info = window_info(chs, window);
    const Index nrf = cfg.rf_chains();
    const Index g = static_cast<Index>(window.size());
    if (g > nrf)
        throw std::invalid_argument("window has more groups than RF chains");
    if (chs.n_tx() != cfg.n_tx)
        throw DimensionError("channel N_tx differs from configuration");

    HybridDesign d;
    if (cfg.mode == PrecoderMode::Digital) {
        d.f = CMatrix::Identity(cfg.n_tx, cfg.n_tx);
    } else {
        const PhaseSet ph = cfg.analog_phases();
        std::uniform_int_distribution<int> pick(0, ph.levels() - 1);
        CVector f(cfg.n_tx);
        for (Index q = 0; q < cfg.n_tx; ++q)
            f(q) = ph.value(pick(rng));
        d.f = expand_analog(f, nrf, cfg.subarray());
    }
    d.m = CMatrix::Zero(nrf, g);
    for (Index i = 0; i < g; ++i)
        d.m(i, i) = 1.0;
    d.m *= std::sqrt(cfg.p_tx_max / (d.f * d.m).squaredNorm());

    const Index n_rx = chs.n_rx();
    const PhaseSet wph = cfg.combiner_phases(n_rx);
    d.receivers = info.receivers;
    for (Index k : info.receivers) {
        if (n_rx == 1) {
            d.combiners.push_back(CVector::Constant(1, wph.value(0)));
            continue;
        }
        Eigen::JacobiSVD<CMatrix> svd(chs.channels[k], Eigen::ComputeThinU);
        d.combiners.push_back(quantize_vector(fix_global_phase(svd.matrixU().col(0)), wph));
    }
    d.alpha = min_esinr_fast(chs, d, info, cfg.noise);
    return d;
}

HybridDesign design_window(const ChannelSet& chs, const Window& window, const PrecoderConfig& cfg) {
    cfg.validate();
    if (window.empty() || static_cast<Index>(window.size()) > cfg.rf_chains())
        throw std::invalid_argument("design_window: window size must be in [1, N_RF]");
    const auto info = window_info(chs, window);
    const std::uint64_t base = mix_seed(cfg.seed, window_hash(window));

    Rng init_rng(mix_seed(base, 0));
    HybridDesign d = initial_design(chs, window, cfg, init_rng);
    HybridDesign best = d;

    for (int r = 0; r < cfg.n_iter; ++r) {
        const std::uint64_t rs = mix_seed(base, 1 + static_cast<std::uint64_t>(r));
        if (cfg.mode != PrecoderMode::Digital) {
            Rng rng(mix_seed(rs, 1));
            auto s = optimize_analog(chs, d, window, cfg, rng);
            if (s.alpha >= d.alpha) {
                d = std::move(s.design);
                d.alpha = s.alpha;
            }
        }
        if (cfg.mode != PrecoderMode::Analog) {
            Rng rng(mix_seed(rs, 2));
            auto s = optimize_digital(chs, d, window, cfg, rng);
            if (s.alpha >= d.alpha) {
                d = std::move(s.design);
                d.alpha = s.alpha;
            }
        }
        {
            Rng rng(mix_seed(rs, 3));
            const auto ws = optimize_combiners(chs, d, window, cfg, rng);
            const CMatrix fm = d.f * d.m;
            for (std::size_t pos = 0; pos < ws.size(); ++pos) {
                const double now = receiver_esinr(chs, fm, info, d.combiners[pos], pos, cfg.noise);
                const double cand = receiver_esinr(chs, fm, info, ws[pos], pos, cfg.noise);
                if (cand >= now)
                    d.combiners[pos] = ws[pos];
            }
            d.alpha = min_esinr_fast(chs, d, info, cfg.noise);
        }
        if (d.alpha > best.alpha)
            best = d;
    }
    return best;
}

void write_design_csv(std::ostream& os, const HybridDesign& design) {
    char buf[160];
    auto emit = [&](const char* ent, Index r, Index c, cplx v) {
        std::snprintf(buf, sizeof buf, "%s,%lld,%lld,%.17g,%.17g\n", ent, static_cast<long long>(r),
                      static_cast<long long>(c), v.real(), v.imag());
        os << buf;
    };
    os << "entity,row,col,re,im\n";
    for (Index c = 0; c < design.f.cols(); ++c)
        for (Index r = 0; r < design.f.rows(); ++r)
            emit("F", r, c, design.f(r, c));
    for (Index c = 0; c < design.m.cols(); ++c)
        for (Index r = 0; r < design.m.rows(); ++r)
            emit("M", r, c, design.m(r, c));
    for (std::size_t i = 0; i < design.combiners.size(); ++i)
        for (Index n = 0; n < design.combiners[i].size(); ++n)
            emit("W", design.receivers[i], n, design.combiners[i](n));
    emit("alpha", 0, 0, design.alpha);
}

} // namespace hybridcast::precoder
