// Copyright 2026 The qread Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qread/runner.h"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace qread {

namespace {

std::string state_label(Hyperfine f) { return std::string(to_string(f)); }

std::string cell_label(SurvivalCell c) {
    switch (c) {
        case SurvivalCell::F2Detected:
            return "F2";
        case SurvivalCell::F1Detected:
            return "F1";
        case SurvivalCell::Lost:
            return "lost";
    }
    return "?";
}

void add_fit(Summary& s, const FitResult& fit, const std::string& prefix) {
    for (std::size_t i = 0; i < fit.names.size(); ++i) {
        s.emplace_back(prefix + fit.names[i], fit.values[i]);
        s.emplace_back(prefix + fit.names[i] + "_stderr", std::sqrt(fit.variances[i]));
    }
    s.emplace_back(prefix + "residual_norm", fit.residual_norm);
    s.emplace_back(prefix + "iterations", static_cast<std::int64_t>(fit.iterations));
    s.emplace_back(prefix + "converged", fit.converged);
}

void add_rate(Summary& s, const std::string& name, std::uint64_t k, std::uint64_t n) {
    s.emplace_back(name, static_cast<double>(k) / static_cast<double>(n));
    const auto [lo, hi] = binomial_interval(k, n, 0.95);
    s.emplace_back(name + "_wilson95_low", lo);
    s.emplace_back(name + "_wilson95_high", hi);
}

RunResults histogram_results(const RunConfig& config) {
    const ExecutionOptions exec{config.threads};
    const HistogramResult h = experiment_histogram(config.trials_f1, config.trials_f2, config.cycle,
                                                   config.loss_f1_single_shot, config.loss_f2_single_shot,
                                                   config.master_seed, exec);
    RunResults out;
    Table trials{{"prepared_state", "counts", "classified", "lost"}, {}};
    for (const auto* records : {&h.f1_trials, &h.f2_trials}) {
        for (const auto& r : *records) {
            trials.add({state_label(r.true_state_at_probe), static_cast<std::uint64_t>(r.detected_counts),
                        state_label(r.classified), !r.atom_present_after});
        }
    }
    Table counts{{"prepared_state", "counts", "frequency", "fraction"}, {}};
    for (const auto& [label, hist] : {std::pair{"F1", &h.f1_histogram}, std::pair{"F2", &h.f2_histogram}}) {
        for (std::uint32_t k = 0; k < hist->frequencies.size(); ++k) {
            counts.add({std::string(label), static_cast<std::uint64_t>(k), hist->frequencies[k], hist->fraction(k)});
        }
    }
    out.tables.push_back({"histogram_trials", std::move(trials)});
    out.tables.push_back({"histogram_counts", std::move(counts)});

    Summary& s = out.summary;
    s.emplace_back("f1_trials", h.f1_trials.size());
    s.emplace_back("f2_trials", h.f2_trials.size());
    add_rate(s, "f1_error", h.f1_errors, h.f1_trials.size());
    add_rate(s, "f2_error", h.f2_errors, h.f2_trials.size());
    add_rate(s, "f1_loss", h.f1_losses, h.f1_trials.size());
    add_rate(s, "f2_loss", h.f2_losses, h.f2_trials.size());
    s.emplace_back("analytic_f1_error", analytic_f1_error(config.cycle.policy, config.cycle.probe.background_mean_per_window));
    s.emplace_back("analytic_f2_error", analytic_f2_error(config.cycle.detector.net_efficiency, config.cycle.hazard,
                                                          config.cycle.policy.threshold_counts));
    s.emplace_back("hazard", config.cycle.hazard);
    return out;
}

RunResults survival_results(const RunConfig& config) {
    const ExecutionOptions exec{config.threads};
    const SurvivalResult r =
        experiment_survival(config.survival_atoms, config.survival_cycles, config.cycle, config.master_seed, exec);
    RunResults out;
    Table matrix{{"rank", "atom", "survived_cycles", "cycle", "cell"}, {}};
    for (std::size_t rank = 0; rank < r.matrix.rows.size(); ++rank) {
        const auto& row = r.matrix.rows[rank];
        for (std::size_t c = 0; c < row.cells.size(); ++c) {
            matrix.add({static_cast<std::uint64_t>(rank), row.atom_index, row.survived_cycles,
                        static_cast<std::uint64_t>(c + 1), cell_label(row.cells[c])});
        }
    }
    Table curve{{"cycle", "surviving_fraction", "fit"}, {}};
    for (std::size_t c = 0; c < r.survival_fraction.size(); ++c) {
        const double x = static_cast<double>(c + 1);
        curve.add({static_cast<std::uint64_t>(c + 1), r.survival_fraction[c],
                   std::isfinite(r.lifetime) ? std::exp(-x / r.lifetime) : 1.0});
    }
    out.tables.push_back({"survival_matrix", std::move(matrix)});
    out.tables.push_back({"survival_curve", std::move(curve)});

    Summary& s = out.summary;
    s.emplace_back("atoms", config.survival_atoms);
    s.emplace_back("cycles", config.survival_cycles);
    add_fit(s, r.fit, "fit_");
    s.emplace_back("loss_per_cycle_from_fit", r.loss_per_cycle);
    s.emplace_back("survivor_fraction_end", r.survivor_fraction_end);
    s.emplace_back("expected_survivor_fraction_end",
                   std::pow(1.0 - config.cycle.loss.background_loss_per_cycle,
                            static_cast<double>(config.survival_cycles)));
    s.emplace_back("mean_scatters_per_cycle", r.mean_scatters_per_cycle);
    s.emplace_back("loss_is_absorbing", r.matrix.loss_is_absorbing());
    if (!r.fit.converged) {
        out.warnings.push_back("survival lifetime fit did not converge");
    }
    return out;
}

RunResults rabi_results(const RunConfig& config) {
    const ExecutionOptions exec{config.threads};
    const RabiConfig rabi = config.rabi();
    const RabiResult r = experiment_rabi(config.rabi_atoms, rabi, config.cycle, config.master_seed, exec);
    const double e1 = analytic_f1_error(config.cycle.policy, config.cycle.probe.background_mean_per_window);
    const double e2 = analytic_f2_error(config.cycle.detector.net_efficiency, config.cycle.hazard,
                                        config.cycle.policy.threshold_counts);
    RunResults out;
    Table cycles{{"slot", "generation", "pulse_index", "pulse_length", "zeeman_mf", "true_state", "counts",
                  "classified", "lost"},
                 {}};
    for (const auto& row : r.rows) {
        for (std::size_t k = 0; k < row.cycles.size(); ++k) {
            const auto& c = row.cycles[k];
            const std::size_t i = row.first_pulse + k;
            cycles.add({row.slot, row.generation, static_cast<std::uint64_t>(i), r.pulse_lengths[i],
                        static_cast<std::int64_t>(c.zeeman_mf), state_label(c.true_state_at_probe),
                        static_cast<std::uint64_t>(c.detected_counts), state_label(c.classified),
                        !c.atom_present_after});
        }
    }
    const bool have_fit = !r.fit.values.empty() && std::isfinite(r.fit.values[0]);
    Table curve{{"pulse_index", "pulse_length", "trials", "f2_count", "f2_fraction", "fit", "analytic"}, {}};
    for (std::size_t i = 0; i < r.pulse_lengths.size(); ++i) {
        const double t = r.pulse_lengths[i];
        const double fitted = have_fit ? damped_sinusoid(t, r.fit.values[0], r.fit.values[1], r.fit.values[2],
                                                         r.fit.values[3])
                                       : std::nan("");
        curve.add({static_cast<std::uint64_t>(i), t, r.trials[i], r.f2_counts[i], r.f2_fraction[i], fitted,
                   rabi_measured_probability(t, rabi, e1, e2)});
    }
    out.tables.push_back({"rabi_cycles", std::move(cycles)});
    out.tables.push_back({"rabi_curve", std::move(curve)});

    Summary& s = out.summary;
    s.emplace_back("atom_slots", config.rabi_atoms);
    s.emplace_back("atoms_loaded", static_cast<std::uint64_t>(r.rows.size()));
    s.emplace_back("points", static_cast<std::uint64_t>(r.pulse_lengths.size()));
    if (!r.fit.names.empty()) {
        add_fit(s, r.fit, "fit_");
        if (!r.fit.converged) {
            out.warnings.push_back("damped-sinusoid fit did not converge");
        }
    } else {
        out.warnings.push_back("too few pulse lengths to fit");
    }
    s.emplace_back("zero_duration_fraction", r.f2_fraction.front());
    s.emplace_back("analytic_f1_error", e1);
    s.emplace_back("analytic_f2_error", e2);
    s.emplace_back("analytic_amplitude", (1.0 - e1 - e2) / 3.0);
    return out;
}

RunResults budget_results(const RunConfig& config) {
    RunResults out;
    out.summary = budget_report(config);
    Table t{{"quantity", "value"}, {}};
    for (const auto& [k, v] : out.summary) {
        t.add({k, v});
    }
    out.tables.push_back({"budget", std::move(t)});
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    f << contents;
    f.close();
    if (!f) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

}  // namespace

Summary budget_report(const RunConfig& config) {
    const auto& sp = config.cycle.species;
    const double gamma = sp.linewidth_gamma;
    const double eta = config.cycle.detector.net_efficiency;
    const auto nd = config.cycle.policy.threshold_counts;
    const double q = config.cycle.hazard;
    const double p_loss = config.cycle.loss.background_loss_per_cycle;
    const RabiConfig rabi = config.rabi();
    const double e1 = analytic_f1_error(config.cycle.policy, config.cycle.probe.background_mean_per_window);
    const double e2 = analytic_f2_error(eta, q, nd);
    const double s_res = depump_suppression(0.0, sp);
    const double s_implied = config.branching_to_f1 > 0 && q > 0 ? config.branching_to_f1 / q : 0.0;

    Summary s;
    s.emplace_back("misdetection_probability_mean5", misdetection_probability(5.0));
    s.emplace_back("misdetection_probability_mean7", misdetection_probability(7.0));
    s.emplace_back("required_mean_for_1pct", required_mean_photons(0.01));
    s.emplace_back("required_mean_for_0.1pct", required_mean_photons(0.001));
    s.emplace_back("scatters_for_mean5", scatters_for_detected(5.0, eta));
    s.emplace_back("scatters_per_window_for_mean21", scatters_for_detected(21.0, eta));
    s.emplace_back("depump_suppression_resonant", s_res);
    s.emplace_back("depump_suppression_one_linewidth", depump_suppression(gamma, sp));
    s.emplace_back("depump_suppression_two_linewidths", depump_suppression(2.0 * gamma, sp));
    s.emplace_back("depump_suppression_effective_detuning", depump_suppression(config.cycle.probe.effective_detuning, sp));
    s.emplace_back("depump_hazard_resonant", depump_hazard_per_scatter(s_res, config.branching_to_f1));
    s.emplace_back("heating_per_scatter_K", heating_per_scatter(sp));
    s.emplace_back("heating_per_scatter_J", heating_per_scatter_joules(sp));
    s.emplace_back("heating_for_250_scatters_K", heating_for_scatters(250, sp));
    s.emplace_back("scatters_to_trap_depth", scatters_to_threshold(config.cycle.trap, config.cycle.loss, sp));
    s.emplace_back("dark_count_mean", config.cycle.detector.dark_rate * config.dark_window);
    s.emplace_back("dark_count_false_positive",
                   poisson_tail_at_least(nd, config.cycle.detector.dark_rate * config.dark_window));
    s.emplace_back("analytic_f1_error", e1);
    s.emplace_back("analytic_f2_error", e2);
    s.emplace_back("hazard", q);
    s.emplace_back("implied_suppression", s_implied);
    if (s_implied > 0 && s_implied <= s_res) {
        s.emplace_back("implied_effective_detuning_Hz", detuning_for_suppression(s_implied, sp));
    }
    s.emplace_back("mean_scatters_per_f2_readout_no_depump", static_cast<double>(nd) / eta);
    {
        // Expected scatters before N_D counts or depumping.
        const double per_stage = 1.0 / (eta + (1.0 - eta) * q);
        const double p1 = eta * per_stage;
        double stages = 0.0;
        for (std::uint32_t k = 0; k < nd; ++k) {
            stages += std::pow(p1, static_cast<double>(k));
        }
        s.emplace_back("mean_scatters_per_f2_readout", per_stage * stages);
    }
    s.emplace_back("survival_fraction_after_cycles", std::pow(1.0 - p_loss, static_cast<double>(config.survival_cycles)));
    s.emplace_back("lifetime_cycles_from_loss", p_loss > 0 ? -1.0 / std::log1p(-p_loss) : INFINITY);
    s.emplace_back("rabi_pi_pulse_s", 1.0 / (2.0 * rabi.rabi_frequency));
    s.emplace_back("rabi_pi_pulse_transfer", rabi_transfer_probability(1.0 / (2.0 * rabi.rabi_frequency), rabi));
    s.emplace_back("rabi_measured_max", rabi_measured_probability(1.0 / (2.0 * rabi.rabi_frequency), rabi, e1, e2));
    return s;
}

RunResults execute(const RunConfig& config) {
    validate(config);
    switch (config.experiment) {
        case Experiment::Histogram:
            return histogram_results(config);
        case Experiment::Survival:
            return survival_results(config);
        case Experiment::Rabi:
            return rabi_results(config);
        case Experiment::Budget:
            return budget_results(config);
    }
    throw std::logic_error("unhandled experiment");
}

WrittenRun run(const RunConfig& config, std::ostream& log) {
    const auto start = std::chrono::steady_clock::now();
    const RunResults results = execute(config);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    namespace fs = std::filesystem;
    const fs::path dir(config.output_path);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
    }

    const bool json = config.output_format == OutputFormat::Json;
    const std::string ext = json ? ".json" : ".csv";
    WrittenRun written;
    for (const auto& t : results.tables) {
        const fs::path p = dir / (t.name + ext);
        write_file(p, json ? to_json(t.table) : to_csv(t.table));
        written.files.push_back(p.string());
    }
    const std::string summary_name = std::string(to_string(config.experiment)) + "_summary";
    const fs::path sp = dir / (summary_name + ext);
    write_file(sp, json ? to_json(results.summary) : to_csv(results.summary));
    written.files.push_back(sp.string());

    nlohmann::ordered_json manifest;
    manifest["artifact"] = "qread";
    manifest["version"] = kArtifactVersion;
    manifest["experiment"] = to_string(config.experiment);
    manifest["master_seed"] = config.master_seed;
    manifest["rng"] = kRngName;
    manifest["threads"] = config.threads;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    const std::string text = serialize_config(config);
    manifest["config_text"] = text;
    {
        std::size_t pos = 0;
        while (pos < text.size()) {
            const auto nl = text.find('\n', pos);
            const std::string line = text.substr(pos, nl - pos);
            const auto eq = line.find(" = ");
            cfg[line.substr(0, eq)] = line.substr(eq + 3);
            pos = nl + 1;
        }
    }
    manifest["config"] = cfg;
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const auto& f : written.files) {
        files.push_back(fs::path(f).filename().string());
    }
    manifest["files"] = files;
    manifest["summary"] = nlohmann::ordered_json::parse(to_json(results.summary));
    manifest["warnings"] = results.warnings;
    manifest["wall_time_seconds"] = wall;

    written.manifest_path = (dir / "manifest.json").string();
    write_file(written.manifest_path, manifest.dump(2) + "\n");

    for (const auto& w : results.warnings) {
        log << "warning: " << w << "\n";
    }
    for (const auto& f : written.files) {
        log << "wrote " << f << "\n";
    }
    log << "wrote " << written.manifest_path << "\n";
    return written;
}

}  // namespace qread
