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

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "hybridcast/channel.hpp"
#include "hybridcast/sdp.hpp"

namespace hybridcast::precoder {

using channel::ChannelSet;

/// Ordered list of co-scheduled group indices; position i is served by column i of M.
using Window = std::vector<Index>;

/// The D admissible values sqrt(scale) * exp(j 2 pi d / D).
class PhaseSet {
public:
    PhaseSet(int levels, double scale);

    int levels() const { return levels_; }
    double scale() const { return scale_; }
    cplx value(int d) const;
    /// Index of the value nearest in angle to z; lowest index on exact ties.
    int nearest_index(cplx z) const;
    cplx quantize(cplx z) const { return value(nearest_index(z)); }
    bool contains(cplx z, double tol = 1e-12) const;

private:
    int levels_;
    double scale_;
};

enum class PrecoderMode { Digital, Hybrid, Analog };

std::string_view to_string(PrecoderMode m);
PrecoderMode parse_precoder_mode(std::string_view s);

struct PrecoderConfig {
    Index n_tx = 24;
    Index l_tx = 6;
    Index n_rf = 4;
    int d_f = 16;
    int d_w = 4;
    double p_tx_max = 0.1;   ///< W
    double p_rx_max = 1e-3;  ///< W
    double noise = 1e-2;     ///< W
    std::array<int, 3> n_bis{10, 10, 10};
    /// Candidate counts per stage as multipliers of N_tx, window size and N_rx.
    std::array<int, 3> n_rand{5, 100, 20};
    int n_iter = 3;
    PrecoderMode mode = PrecoderMode::Hybrid;
    sdp::SolverOptions solver;
    std::uint64_t seed = 1;

    /// RF chains and sub-array length actually used; the fully-digital mode
    /// drives every antenna from its own chain.
    Index rf_chains() const { return mode == PrecoderMode::Digital ? n_tx : n_rf; }
    Index subarray() const { return mode == PrecoderMode::Digital ? 1 : l_tx; }

    PhaseSet analog_phases() const;
    PhaseSet combiner_phases(Index n_rx) const;

    void validate() const;
};

struct HybridDesign {
    CMatrix f;                      ///< N_tx x N_RF, sub-connected
    CMatrix m;                      ///< N_RF x G
    std::vector<Index> receivers;   ///< scheduled receivers, window order
    std::vector<CVector> combiners; ///< w_k aligned with receivers
    double alpha = 0.0;             ///< min e-SINR
};

/// B_i / max_j B_j
std::vector<double> normalized_bits(const ChannelSet& chs);

/// Receivers of the window's groups, in window order.
std::vector<Index> window_receivers(const ChannelSet& chs, const Window& window);

/// Per-receiver SINR aligned with design.receivers.
std::vector<double> evaluate_sinr(const ChannelSet& chs, const HybridDesign& design,
                                  const Window& window, double noise);

/// min_k SINR_k / B~_k over the window.
double min_esinr(const ChannelSet& chs, const HybridDesign& design, const Window& window,
                 double noise);

struct BisectionTrace {
    double initial_low = 0.0, initial_high = 0.0;
    double alpha_low = 0.0, alpha_high = 0.0;   ///< final interval
    std::vector<std::pair<double, bool>> iterations;
    double final_alpha = 0.0;
    std::optional<sdp::HermitianMatrix> final_x; ///< empty if no tested alpha was feasible
};

using FeasibilityOracle = std::function<sdp::SdpSolution(double)>;

/// Exactly n_steps midpoint queries; MaxIterations counts as infeasible.
BisectionTrace bisect_max_alpha(const FeasibilityOracle& oracle, double alpha_low,
                                double alpha_high, int n_steps);

/// Sub-connected F from its N_tx non-zero entries.
CMatrix expand_analog(const CVector& f, Index n_rf, Index l_tx);
/// Non-zero entries of a sub-connected F.
CVector analog_entries(const CMatrix& f, Index l_tx);

/// Relaxed analog stage at a fixed alpha, over Y = f f^H.
sdp::SdpProblem build_analog_sdp(const ChannelSet& chs, const HybridDesign& current,
                                 const Window& window, const PrecoderConfig& cfg, double alpha);
double analog_upper_bound(const ChannelSet& chs, const HybridDesign& current,
                          const Window& window, const PrecoderConfig& cfg);

/// Relaxed digital stage at a fixed alpha, over Z = m m^H with m = vec(M).
sdp::SdpProblem build_digital_sdp(const ChannelSet& chs, const HybridDesign& current,
                                  const Window& window, const PrecoderConfig& cfg, double alpha);
double digital_upper_bound(const ChannelSet& chs, const HybridDesign& current,
                           const Window& window, const PrecoderConfig& cfg);

/// Relaxed combiner stage of the receiver at position pos, over W = w w^H.
sdp::SdpProblem build_combiner_sdp(const ChannelSet& chs, const HybridDesign& current,
                                   const Window& window, const PrecoderConfig& cfg, std::size_t pos,
                                   double alpha);
double combiner_upper_bound(const ChannelSet& chs, const HybridDesign& current,
                            const Window& window, const PrecoderConfig& cfg, std::size_t pos);

using Scorer = std::function<double(const CVector&)>;

/// Constant-modulus vector from a relaxed solution: principal eigenvector when
/// the solution is numerically rank one, Cholesky randomization otherwise.
CVector recover_constant_modulus(const sdp::HermitianMatrix& y, const PhaseSet& phases, int n_rand,
                                 const Scorer& scorer, Rng& rng);

struct StageResult {
    HybridDesign design; ///< current design with the stage's block replaced
    double alpha = 0.0;  ///< min e-SINR of design
    BisectionTrace trace;
};

/// Analog stage; returns the input F unchanged if bisection finds nothing feasible.
StageResult optimize_analog(const ChannelSet& chs, const HybridDesign& current,
                            const Window& window, const PrecoderConfig& cfg, Rng& rng);

/// Digital stage with Gaussian randomization; candidates land on the power boundary.
StageResult optimize_digital(const ChannelSet& chs, const HybridDesign& current,
                             const Window& window, const PrecoderConfig& cfg, Rng& rng);

/// One independent combiner per scheduled receiver.
std::vector<CVector> optimize_combiners(const ChannelSet& chs, const HybridDesign& current,
                                        const Window& window, const PrecoderConfig& cfg, Rng& rng);

/// Feasible starting point: random analog phases, quantized dominant left
/// singular vectors as combiners, scaled identity columns as M.
HybridDesign initial_design(const ChannelSet& chs, const Window& window,
                            const PrecoderConfig& cfg, Rng& rng);

/// Alternating optimization of F, M and the combiners over cfg.n_iter rounds.
/// Deterministic in (chs, window, cfg).
HybridDesign design_window(const ChannelSet& chs, const Window& window, const PrecoderConfig& cfg);

/// "entity,row,col,re,im" with entities F, M, W (row = receiver) and alpha.
void write_design_csv(std::ostream& os, const HybridDesign& design);

} // namespace hybridcast::precoder
