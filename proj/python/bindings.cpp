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

#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hybridcast/channel.hpp"
#include "hybridcast/config.hpp"
#include "hybridcast/experiment.hpp"
#include "hybridcast/metrics.hpp"
#include "hybridcast/precoder.hpp"
#include "hybridcast/scheduler.hpp"
#include "hybridcast/sdp.hpp"

namespace py = pybind11;
using namespace hybridcast;
using namespace py::literals;

namespace {

sdp::SdpProblem make_problem(Index dim,
                             const std::vector<std::pair<CMatrix, double>>& ineqs,
                             std::optional<double> diag_eq) {
    sdp::SdpProblem p;
    p.dim = dim;
    p.diag_eq = diag_eq;
    for (const auto& [a, b] : ineqs)
        p.trace_ineqs.push_back({sdp::HermitianMatrix(a), b});
    return p;
}

std::vector<std::vector<Index>> windows_of(const sched::Schedule& s) { return s.windows; }

template <class Fn>
std::string to_csv(Fn&& fn) {
    std::ostringstream os;
    fn(os);
    return os.str();
}

} // namespace

PYBIND11_MODULE(_hybridcast, m) {
    m.doc() = "Hybrid multicast beamforming, group scheduling and latency metrics.";
    m.attr("__version__") = "0.1.0";

    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<cli::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<sched::TractabilityError>(m, "TractabilityError", PyExc_RuntimeError);

    // sdp
    py::enum_<sdp::SdpStatus>(m, "SdpStatus")
        .value("Feasible", sdp::SdpStatus::Feasible)
        .value("Infeasible", sdp::SdpStatus::Infeasible)
        .value("MaxIterations", sdp::SdpStatus::MaxIterations);

    py::class_<sdp::SolverOptions>(m, "SolverOptions")
        .def(py::init<>())
        .def_readwrite("tol", &sdp::SolverOptions::tol)
        .def_readwrite("max_iter", &sdp::SolverOptions::max_iter);

    py::class_<sdp::SdpSolution>(m, "SdpSolution")
        .def_readonly("status", &sdp::SdpSolution::status)
        .def_property_readonly("x", [](const sdp::SdpSolution& s) { return s.x.matrix(); })
        .def_readonly("slack", &sdp::SdpSolution::slack)
        .def_readonly("iterations", &sdp::SdpSolution::iterations)
        .def_readonly("residual", &sdp::SdpSolution::residual)
        .def_property_readonly("feasible", &sdp::SdpSolution::feasible);

    m.def(
        "solve_feasibility",
        [](Index dim, const std::vector<std::pair<CMatrix, double>>& ineqs,
           std::optional<double> diag_eq, const sdp::SolverOptions& opts) {
            return sdp::solve_feasibility(make_problem(dim, ineqs, diag_eq), opts);
        },
        "dim"_a, "trace_ineqs"_a, "diag_eq"_a = py::none(), "options"_a = sdp::SolverOptions{},
        "Feasibility of Tr(A_i X) <= b_i, optional diag(X) = d, X >= 0 over Hermitian X.");
    m.def("complex_to_real_embedding",
          [](const CMatrix& h) { return sdp::complex_to_real_embedding(sdp::HermitianMatrix(h)); });
    m.def("real_to_complex", [](const RMatrix& e) { return sdp::real_to_complex(e).matrix(); });
    m.def("psd_project", &sdp::psd_project);

    // channel
    py::class_<channel::ChannelSet>(m, "ChannelSet")
        .def(py::init([](std::vector<CMatrix> h, std::vector<channel::Group> groups,
                         std::vector<double> bits) {
                 channel::ChannelSet c{std::move(h), std::move(groups), std::move(bits)};
                 c.validate();
                 return c;
             }),
             "channels"_a, "groups"_a, "bits"_a)
        .def_readonly("channels", &channel::ChannelSet::channels)
        .def_readonly("groups", &channel::ChannelSet::groups)
        .def_readonly("bits", &channel::ChannelSet::bits)
        .def_property_readonly("n_tx", &channel::ChannelSet::n_tx)
        .def_property_readonly("n_rx", &channel::ChannelSet::n_rx)
        .def_property_readonly("n_groups", &channel::ChannelSet::n_groups)
        .def_property_readonly("n_receivers", &channel::ChannelSet::n_receivers)
        .def("to_csv", [](const channel::ChannelSet& c) {
            return to_csv([&](std::ostream& os) { channel::write_channel_csv(os, c); });
        })
        .def_static("from_csv", [](const std::string& text) {
            std::istringstream is(text);
            return channel::read_channel_csv(is);
        });

    m.def("steering_vector", [](Index n, double angle) {
        return channel::steering_vector({n}, angle);
    }, "n_elements"_a, "angle"_a);
    m.def("equal_groups", &channel::equal_groups, "k_total"_a, "g_total"_a);
    m.def(
        "generate_channel_set",
        [](Index n_tx, Index n_rx, int n_paths, std::vector<channel::Group> groups,
           std::vector<double> bits, std::uint64_t seed) {
            Rng rng(seed);
            return channel::generate_channel_set({n_tx}, {n_rx}, n_paths, std::move(groups),
                                                 std::move(bits), rng);
        },
        "n_tx"_a, "n_rx"_a, "n_paths"_a, "groups"_a, "bits"_a, "seed"_a);
    m.def("mean_group_vector", &channel::mean_group_vector, "channels"_a, "group"_a);
    m.def("igc", &channel::igc, "channels"_a);

    // precoder
    py::enum_<precoder::PrecoderMode>(m, "PrecoderMode")
        .value("Digital", precoder::PrecoderMode::Digital)
        .value("Hybrid", precoder::PrecoderMode::Hybrid)
        .value("Analog", precoder::PrecoderMode::Analog);

    py::class_<precoder::PrecoderConfig>(m, "PrecoderConfig")
        .def(py::init<>())
        .def_readwrite("n_tx", &precoder::PrecoderConfig::n_tx)
        .def_readwrite("l_tx", &precoder::PrecoderConfig::l_tx)
        .def_readwrite("n_rf", &precoder::PrecoderConfig::n_rf)
        .def_readwrite("d_f", &precoder::PrecoderConfig::d_f)
        .def_readwrite("d_w", &precoder::PrecoderConfig::d_w)
        .def_readwrite("p_tx_max", &precoder::PrecoderConfig::p_tx_max)
        .def_readwrite("p_rx_max", &precoder::PrecoderConfig::p_rx_max)
        .def_readwrite("noise", &precoder::PrecoderConfig::noise)
        .def_readwrite("n_bis", &precoder::PrecoderConfig::n_bis)
        .def_readwrite("n_rand", &precoder::PrecoderConfig::n_rand)
        .def_readwrite("n_iter", &precoder::PrecoderConfig::n_iter)
        .def_readwrite("mode", &precoder::PrecoderConfig::mode)
        .def_readwrite("solver", &precoder::PrecoderConfig::solver)
        .def_readwrite("seed", &precoder::PrecoderConfig::seed)
        .def("validate", &precoder::PrecoderConfig::validate);

    py::class_<precoder::HybridDesign>(m, "HybridDesign")
        .def(py::init<>())
        .def_readwrite("f", &precoder::HybridDesign::f)
        .def_readwrite("m", &precoder::HybridDesign::m)
        .def_readwrite("receivers", &precoder::HybridDesign::receivers)
        .def_readwrite("combiners", &precoder::HybridDesign::combiners)
        .def_readwrite("alpha", &precoder::HybridDesign::alpha);

    py::class_<precoder::StageResult>(m, "StageResult")
        .def_readonly("design", &precoder::StageResult::design)
        .def_readonly("alpha", &precoder::StageResult::alpha)
        .def_property_readonly("relaxed_alpha",
                               [](const precoder::StageResult& r) { return r.trace.final_alpha; });

    m.def("design_window", &precoder::design_window, "channels"_a, "window"_a, "config"_a);
    m.def(
        "initial_design",
        [](const channel::ChannelSet& c, const precoder::Window& w,
           const precoder::PrecoderConfig& cfg, std::uint64_t seed) {
            Rng rng(seed);
            return precoder::initial_design(c, w, cfg, rng);
        },
        "channels"_a, "window"_a, "config"_a, "seed"_a);
    m.def(
        "optimize_digital",
        [](const channel::ChannelSet& c, const precoder::HybridDesign& d,
           const precoder::Window& w, const precoder::PrecoderConfig& cfg, std::uint64_t seed) {
            Rng rng(seed);
            return precoder::optimize_digital(c, d, w, cfg, rng);
        },
        "channels"_a, "design"_a, "window"_a, "config"_a, "seed"_a);
    m.def("evaluate_sinr", &precoder::evaluate_sinr, "channels"_a, "design"_a, "window"_a,
          "noise"_a);
    m.def("min_esinr", &precoder::min_esinr, "channels"_a, "design"_a, "window"_a, "noise"_a);

    // scheduler
    m.def(
        "schedule_exact",
        [](const RMatrix& rho, double lambda, double omega, Index n_rf) {
            const auto r = sched::schedule_exact(rho, {lambda, omega, n_rf});
            return py::make_tuple(windows_of(r.schedule), r.objective);
        },
        "rho"_a, "lambda_"_a, "omega"_a, "n_rf"_a,
        "Returns (windows, objective) for the minimum-objective admissible partition.");
    m.def("schedule_sing", [](Index g) { return windows_of(sched::schedule_sing(g)); }, "g_total"_a);
    m.def(
        "schedule_rand",
        [](Index g, Index n_rf, std::uint64_t seed) {
            Rng rng(seed);
            return windows_of(sched::schedule_rand(g, n_rf, rng));
        },
        "g_total"_a, "n_rf"_a, "seed"_a);
    m.def("count_partitions", &sched::count_partitions, "g_total"_a, "n_rf"_a);
    m.def(
        "calibrate_omega",
        [](const RMatrix& rho, double lambda, Index n_rf) {
            return sched::calibrate_omega(rho, {lambda, 0.0, n_rf});
        },
        "rho"_a, "lambda_"_a, "n_rf"_a);
    m.def("window_igc", &sched::window_igc, "rho"_a, "window"_a);

    // metrics
    py::class_<metrics::RateModel>(m, "RateModel")
        .def(py::init<>())
        .def_readwrite("beta", &metrics::RateModel::beta)
        .def_readwrite("c_max", &metrics::RateModel::c_max)
        .def_readwrite("bandwidth", &metrics::RateModel::bandwidth);

    py::enum_<metrics::SwitchingMode>(m, "SwitchingMode")
        .value("BetweenWindows", metrics::SwitchingMode::BetweenWindows)
        .value("EveryWindow", metrics::SwitchingMode::EveryWindow);

    py::enum_<metrics::Architecture>(m, "Architecture")
        .value("Digital", metrics::Architecture::Digital)
        .value("Hybrid", metrics::Architecture::Hybrid)
        .value("Analog", metrics::Architecture::Analog);

    py::class_<metrics::EnergyModel>(m, "EnergyModel")
        .def(py::init<>())
        .def_readwrite("p_rf", &metrics::EnergyModel::p_rf)
        .def_readwrite("p_ps", &metrics::EnergyModel::p_ps)
        .def_readwrite("p_tx_max", &metrics::EnergyModel::p_tx_max);

    m.def("rate", &metrics::rate, "sinr"_a, "model"_a = metrics::RateModel{});
    m.def("window_latency", &metrics::window_latency, "sinrs"_a, "bits"_a,
          "model"_a = metrics::RateModel{});
    m.def("window_latency_closed_form", &metrics::window_latency_closed_form, "sinrs"_a, "bits"_a,
          "model"_a = metrics::RateModel{});
    m.def("combine_latency", &metrics::combine_latency, "per_window"_a, "delta_sw"_a,
          "mode"_a = metrics::SwitchingMode::BetweenWindows);
    m.def("r_sinr", &metrics::r_sinr, "sinr"_a, "bits_norm"_a, "beta"_a);
    m.def("e_sinr", &metrics::e_sinr, "sinr"_a, "bits_norm"_a);
    m.def("energy", &metrics::energy, "arch"_a, "n_tx"_a, "n_rf"_a,
          "model"_a = metrics::EnergyModel{});

    // experiment
    py::class_<cli::SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_static("parse", [](const std::string& text) {
            std::istringstream is(text);
            return cli::parse_config_text(is);
        })
        .def_static("load", &cli::parse_config, "path"_a)
        .def("emit", &cli::emit_config)
        .def("validate", &cli::SimConfig::validate)
        .def_readwrite("n_tx", &cli::SimConfig::n_tx)
        .def_readwrite("l_tx", &cli::SimConfig::l_tx)
        .def_readwrite("n_rf", &cli::SimConfig::n_rf)
        .def_readwrite("n_rx", &cli::SimConfig::n_rx)
        .def_readwrite("g_total", &cli::SimConfig::g_total)
        .def_readwrite("k_total", &cli::SimConfig::k_total)
        .def_readwrite("n_iter", &cli::SimConfig::n_iter)
        .def_readwrite("lambda_", &cli::SimConfig::lambda)
        .def_readwrite("realizations", &cli::SimConfig::realizations)
        .def_readwrite("seed", &cli::SimConfig::seed)
        .def_readwrite("precoder_mode", &cli::SimConfig::precoder_mode);

    m.def("run_experiment_csv", [](const cli::SimConfig& cfg) {
        const auto res = cli::run_experiment(cfg);
        return to_csv([&](std::ostream& os) { cli::write_results_csv(os, res); });
    }, "config"_a, "Runs every configured scheme and returns the results table as CSV text.");
}
