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

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hybridcast/channel.hpp"
#include "hybridcast/config.hpp"
#include "hybridcast/metrics.hpp"
#include "hybridcast/precoder.hpp"
#include "hybridcast/scheduler.hpp"

namespace hybridcast::cli {

/// Channels of one realization; independent of every other realization.
channel::ChannelSet make_channels(const SimConfig& cfg, int realization);

struct WindowEval {
    precoder::HybridDesign design;
    std::vector<double> sinrs;  ///< aligned with design.receivers
    double latency = 0.0;       ///< seconds
};

struct SchemeOutcome {
    Scheme scheme = Scheme::Hydrawave;
    sched::Schedule schedule;
    metrics::LatencyReport report;
    double min_esinr = 0.0;
};

/// One channel realization with a per-window design cache, so a window
/// shared by several schedules is designed once.
class Realization {
public:
    Realization(const SimConfig& cfg, int index);

    int index() const { return index_; }
    const channel::ChannelSet& channels() const { return chs_; }
    const precoder::PrecoderConfig& precoder_config() const { return pcfg_; }

    const WindowEval& evaluate(const sched::Window& window);

    /// Throws sched::TractabilityError when XHAUS exceeds the cap.
    sched::Schedule schedule_for(Scheme scheme, double lambda);
    SchemeOutcome run(Scheme scheme, double lambda);

private:
    SimConfig cfg_;
    int index_;
    channel::ChannelSet chs_;
    precoder::PrecoderConfig pcfg_;
    std::map<sched::Window, WindowEval> cache_;
};

struct ResultRow {
    int realization = -1;       ///< -1 marks the per-scheme mean row
    Scheme scheme = Scheme::Hydrawave;
    double t_s = 0.0;
    double total_ms = 0.0;
    double min_esinr = 0.0;
    double stderr_ms = 0.0;     ///< mean rows only
    std::string warning;        ///< non-empty rows are emitted as comments
};

struct ExperimentResult {
    std::vector<ResultRow> rows;
};

ExperimentResult run_experiment(const SimConfig& cfg);

/// Header: realization,scheme,t_s,total_ms,min_esinr,stderr_ms
void write_results_csv(std::ostream& os, const ExperimentResult& result);

struct SweepRow {
    double lambda = 0.0;
    double mean_total_ms = 0.0;
    double stderr_ms = 0.0;
    double mean_t_s = 0.0;
    bool is_argmin = false;
};

/// HYDRAWAVE mean latency per lambda over cfg.realizations.
std::vector<SweepRow> sweep_lambda(const SimConfig& cfg, const std::vector<double>& lambdas);

/// Golden-section search for the latency-minimizing lambda on [lo, hi];
/// returns every evaluated point sorted by lambda, minimum flagged.
std::vector<SweepRow> search_lambda(const SimConfig& cfg, double lo, double hi, int iterations);

/// Header: lambda,mean_total_ms,stderr_ms,mean_t_s,is_argmin
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

} // namespace hybridcast::cli
