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

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "hybridcast/config.hpp"
#include "hybridcast/experiment.hpp"

using namespace hybridcast;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::vector<std::string> schemes;
    std::string mode;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config, "key=value configuration file");
    app->add_option("--seed", c.seed, "overrides the configured seed");
    app->add_option("--out", c.out, "output file (default: stdout)");
    app->add_option("--scheme", c.schemes, "HYDRAWAVE, SING, RAND or XHAUS; repeatable");
    app->add_option("--mode", c.mode, "digital, hybrid or analog");
}

cli::SimConfig load(const Common& c) {
    cli::SimConfig cfg = c.config.empty() ? cli::SimConfig{} : cli::parse_config(c.config);
    if (c.seed)
        cfg.seed = *c.seed;
    if (!c.schemes.empty()) {
        cfg.schemes.clear();
        for (const auto& s : c.schemes)
            cfg.schemes.push_back(cli::parse_scheme(s));
    }
    if (!c.mode.empty())
        cfg.precoder_mode = precoder::parse_precoder_mode(c.mode);
    cfg.validate();
    return cfg;
}

// Writes to --out if given, stdout otherwise.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_)
                throw std::runtime_error("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::vector<Index> parse_index_list(const std::string& s) {
    std::vector<Index> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(std::stol(item));
    return out;
}

double parse_lambda(const std::string& s) {
    if (s == "inf")
        return std::numeric_limits<double>::infinity();
    return std::stod(s);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint multicast group scheduling and hybrid precoding simulator"};
    app.require_subcommand(1);

    Common sim_opts;
    auto* simulate = app.add_subcommand("simulate", "run all configured schemes over every realization");
    add_common(simulate, sim_opts);

    Common sweep_opts;
    std::string lambdas = "0,0.05,0.1,0.2,inf";
    std::vector<double> search;
    int search_iters = 8;
    auto* sweep = app.add_subcommand("sweep-lambda", "HYDRAWAVE mean latency per lambda");
    add_common(sweep, sweep_opts);
    sweep->add_option("--lambdas", lambdas, "comma-separated lambda values");
    sweep->add_option("--search", search, "golden-section search interval: lo hi")->expected(2);
    sweep->add_option("--iterations", search_iters, "golden-section iterations");

    Common design_opts;
    std::string window = "0";
    int design_real = 0;
    auto* design = app.add_subcommand("design", "design one window and dump F, M, W");
    add_common(design, design_opts);
    design->add_option("--window", window, "comma-separated group indices");
    design->add_option("--realization", design_real, "channel realization index");

    Common sched_opts;
    int sched_real = 0;
    auto* schedule = app.add_subcommand("schedule", "dump schedules of one realization");
    add_common(schedule, sched_opts);
    schedule->add_option("--realization", sched_real, "channel realization index");

    Common chan_opts;
    int chan_real = 0;
    auto* channels = app.add_subcommand("channels", "dump the channel set of one realization");
    add_common(channels, chan_opts);
    channels->add_option("--realization", chan_real, "channel realization index");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) {
            const auto cfg = load(sim_opts);
            const auto res = cli::run_experiment(cfg);
            for (const auto& r : res.rows)
                if (!r.warning.empty())
                    std::cerr << "warning: " << r.warning << '\n';
            Output out(sim_opts.out);
            cli::write_results_csv(out.stream(), res);
        } else if (*sweep) {
            const auto cfg = load(sweep_opts);
            std::vector<cli::SweepRow> rows;
            if (!search.empty()) {
                rows = cli::search_lambda(cfg, search[0], search[1], search_iters);
            } else {
                std::vector<double> ls;
                std::stringstream ss(lambdas);
                std::string item;
                while (std::getline(ss, item, ','))
                    ls.push_back(parse_lambda(item));
                rows = cli::sweep_lambda(cfg, ls);
            }
            Output out(sweep_opts.out);
            cli::write_sweep_csv(out.stream(), rows);
        } else if (*design) {
            const auto cfg = load(design_opts);
            cli::Realization real(cfg, design_real);
            const auto d = precoder::design_window(real.channels(), parse_index_list(window),
                                                   real.precoder_config());
            Output out(design_opts.out);
            precoder::write_design_csv(out.stream(), d);
        } else if (*schedule) {
            const auto cfg = load(sched_opts);
            cli::Realization real(cfg, sched_real);
            Output out(sched_opts.out);
            for (cli::Scheme s : cfg.schemes) {
                try {
                    const auto sch = real.schedule_for(s, cfg.lambda);
                    out.stream() << "# scheme=" << cli::to_string(s) << '\n';
                    sched::write_schedule_csv(out.stream(), sch);
                } catch (const sched::TractabilityError& e) {
                    std::cerr << "warning: " << cli::to_string(s) << " skipped: " << e.what() << '\n';
                    out.stream() << "# warning: " << cli::to_string(s) << " skipped: " << e.what() << '\n';
                }
            }
        } else if (*channels) {
            const auto cfg = load(chan_opts);
            Output out(chan_opts.out);
            channel::write_channel_csv(out.stream(), cli::make_channels(cfg, chan_real));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
