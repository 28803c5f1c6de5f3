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

#include "qread/experiments.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace qread {

namespace {

// Leading element of every substream path, one per experiment.
enum StreamTag : std::uint64_t { kHistogramStream = 1, kSurvivalStream = 2, kRabiStream = 3 };

}  // namespace

void CycleConfig::validate() const {
    species.validate();
    probe.validate();
    detector.validate();
    policy.validate();
    trap.validate();
    loss.validate();
    cooling.validate();
    if (!(hazard >= 0 && hazard < 1)) {
        throw std::invalid_argument("CycleConfig: hazard must lie in [0, 1)");
    }
    if (!(prep_duration >= 0)) {
        throw std::invalid_argument("CycleConfig: prep_duration must be >= 0");
    }
}

FluorescenceParams CycleConfig::fluorescence() const {
    FluorescenceParams f;
    f.scatter_rate = probe.scatter_rate;
    f.efficiency = detector.net_efficiency;
    f.hazard = hazard;
    f.background_rate = probe.background_rate();
    f.window = policy.max_duration;
    return f;
}

AtomState prepare_state(const AtomState& atom, Hyperfine target, Rng& rng) {
    if (!atom.present) {
        throw std::invalid_argument("prepare_state: atom is not in the trap");
    }
    AtomState out = atom;
    out.hyperfine = target;
    out.zeeman_mf = target == Hyperfine::F1 ? uniform_int(rng, -1, 1) : uniform_int(rng, -2, 2);
    return out;
}

AtomState prepare_state(Hyperfine target, Rng& rng) { return prepare_state(AtomState{}, target, rng); }

std::pair<AtomState, CycleRecord> run_detection_cycle(const AtomState& atom, const CycleConfig& config, Rng& rng,
                                                      std::uint64_t trial_index) {
    CycleRecord rec;
    rec.trial_index = trial_index;
    rec.true_state_at_probe = atom.hyperfine;
    rec.zeeman_mf = atom.zeeman_mf;
    if (!atom.present) {
        rec.probed = false;
        rec.atom_present_after = false;
        return {atom, rec};
    }

    FluorescenceSource source(config.fluorescence(), atom.hyperfine == Hyperfine::F2, rng);
    const ReadoutOutcome outcome = run_readout(source, config.policy);
    rec.detected_counts = outcome.detected_counts;
    rec.classified = outcome.classified;
    rec.probe_elapsed = outcome.elapsed;
    rec.scatters = outcome.scatters;
    rec.depumped = outcome.depumped_during_probe;

    AtomState next = atom;
    if (outcome.depumped_during_probe) {
        next.hyperfine = Hyperfine::F1;
        next.zeeman_mf = std::clamp(next.zeeman_mf, -1, 1);
    }
    next = apply_heating(next, outcome.scatters, config.species);
    const CoolResult cooled = cool(next, config.cooling, config.trap);
    next = check_loss(cooled.atom, config.trap, config.loss, rng);

    rec.atom_present_after = next.present;
    rec.cycle_duration = config.prep_duration + outcome.elapsed + cooled.elapsed;
    return {next, rec};
}

void parallel_for(std::size_t n, const ExecutionOptions& exec, const std::function<void(std::size_t)>& body) {
    unsigned threads = exec.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : exec.threads;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

// ---------------------------------------------------------------------------

namespace {

double ratio(std::uint64_t num, std::size_t den) {
    return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
}

}  // namespace

double HistogramResult::f1_error_rate() const { return ratio(f1_errors, f1_trials.size()); }
double HistogramResult::f2_error_rate() const { return ratio(f2_errors, f2_trials.size()); }
double HistogramResult::f1_loss_rate() const { return ratio(f1_losses, f1_trials.size()); }
double HistogramResult::f2_loss_rate() const { return ratio(f2_losses, f2_trials.size()); }

HistogramResult experiment_histogram(std::uint64_t trials_f1, std::uint64_t trials_f2, const CycleConfig& config,
                                     double loss_f1, double loss_f2, std::uint64_t seed,
                                     const ExecutionOptions& exec) {
    if (trials_f1 == 0 || trials_f2 == 0) {
        throw std::invalid_argument("experiment_histogram: trial counts must be positive");
    }
    config.validate();
    HistogramResult out;

    auto run_state = [&](Hyperfine state, std::uint64_t trials, double loss, std::vector<CycleRecord>& records) {
        CycleConfig cfg = config;
        cfg.loss.background_loss_per_cycle = loss;
        cfg.validate();
        records.resize(trials);
        parallel_for(trials, exec, [&](std::size_t i) {
            Rng rng = derive_substream(seed, {kHistogramStream, static_cast<std::uint64_t>(state), i});
            const AtomState atom = prepare_state(state, rng);
            records[i] = run_detection_cycle(atom, cfg, rng, i).second;
        });
    };
    run_state(Hyperfine::F1, trials_f1, loss_f1, out.f1_trials);
    run_state(Hyperfine::F2, trials_f2, loss_f2, out.f2_trials);

    auto summarize = [](const std::vector<CycleRecord>& records, Hyperfine prepared, std::uint64_t& errors,
                        std::uint64_t& losses, Histogram& hist) {
        std::vector<std::uint32_t> counts;
        counts.reserve(records.size());
        for (const auto& r : records) {
            counts.push_back(r.detected_counts);
            errors += r.classified != prepared ? 1 : 0;
            losses += r.atom_present_after ? 0 : 1;
        }
        hist = build_histogram(counts);
    };
    summarize(out.f1_trials, Hyperfine::F1, out.f1_errors, out.f1_losses, out.f1_histogram);
    summarize(out.f2_trials, Hyperfine::F2, out.f2_errors, out.f2_losses, out.f2_histogram);
    return out;
}

// ---------------------------------------------------------------------------

bool SurvivalMatrix::loss_is_absorbing() const {
    for (const auto& row : rows) {
        bool lost = false;
        for (SurvivalCell c : row.cells) {
            if (lost && c != SurvivalCell::Lost) {
                return false;
            }
            lost = lost || c == SurvivalCell::Lost;
        }
    }
    return true;
}

SurvivalResult experiment_survival(std::uint64_t n_atoms, std::uint64_t n_cycles, const CycleConfig& config,
                                   std::uint64_t seed, const ExecutionOptions& exec) {
    if (n_atoms == 0 || n_cycles == 0) {
        throw std::invalid_argument("experiment_survival: atom and cycle counts must be positive");
    }
    config.validate();

    std::vector<SurvivalRow> rows(n_atoms);
    std::vector<std::uint64_t> row_scatters(n_atoms, 0);
    std::vector<std::uint8_t> trapped_at_end(n_atoms, 0);
    parallel_for(n_atoms, exec, [&](std::size_t a) {
        SurvivalRow& row = rows[a];
        row.atom_index = a;
        row.cells.assign(n_cycles, SurvivalCell::Lost);
        AtomState atom;
        for (std::uint64_t c = 0; c < n_cycles && atom.present; ++c) {
            Rng rng = derive_substream(seed, {kSurvivalStream, a, c});
            atom = prepare_state(atom, Hyperfine::F2, rng);
            auto [next, rec] = run_detection_cycle(atom, config, rng, c);
            row.cells[c] = rec.classified == Hyperfine::F2 ? SurvivalCell::F2Detected : SurvivalCell::F1Detected;
            row.survived_cycles = c + 1;
            row_scatters[a] += rec.scatters;
            atom = next;
        }
        trapped_at_end[a] = atom.present ? 1 : 0;
    });

    SurvivalResult out;
    out.matrix.n_cycles = n_cycles;

    // An atom probed k times was lost in cycle k, unless it was still trapped
    // after the final cycle.
    std::vector<std::uint64_t> present_after(n_cycles, 0);
    std::uint64_t total_scatters = 0;
    std::uint64_t total_probes = 0;
    for (std::size_t a = 0; a < n_atoms; ++a) {
        const std::uint64_t k = rows[a].survived_cycles;
        const std::uint64_t last_present = trapped_at_end[a] ? k : k - 1;
        for (std::uint64_t c = 0; c < last_present; ++c) {
            ++present_after[c];
        }
        total_scatters += row_scatters[a];
        total_probes += k;
    }
    out.mean_scatters_per_cycle =
        total_probes ? static_cast<double>(total_scatters) / static_cast<double>(total_probes) : 0.0;
    out.survival_fraction.resize(n_cycles);
    for (std::uint64_t c = 0; c < n_cycles; ++c) {
        out.survival_fraction[c] = ratio(present_after[c], n_atoms);
    }
    out.survivor_fraction_end = out.survival_fraction.back();

    // Fit the prefix with a nonzero surviving population.
    std::vector<double> x, y;
    for (std::uint64_t c = 0; c < n_cycles && out.survival_fraction[c] > 0; ++c) {
        x.push_back(static_cast<double>(c + 1));
        y.push_back(out.survival_fraction[c]);
    }
    const bool informative = x.size() >= 3 && std::any_of(y.begin(), y.end(), [&](double v) { return v != y[0]; });
    if (informative) {
        out.fit = fit_exponential(x, y);
        out.lifetime = out.fit.value("lifetime");
        out.loss_per_cycle = out.lifetime > 0 ? loss_per_cycle_from_lifetime(out.lifetime) : 0.0;
    } else {
        out.fit.names = {"lifetime"};
        out.fit.values = {std::numeric_limits<double>::infinity()};
        out.fit.variances = {std::numeric_limits<double>::infinity()};
        out.fit.converged = false;
        out.lifetime = std::numeric_limits<double>::infinity();
        out.loss_per_cycle = 0.0;
    }

    out.matrix.rows = std::move(rows);
    std::stable_sort(out.matrix.rows.begin(), out.matrix.rows.end(),
                     [](const SurvivalRow& l, const SurvivalRow& r) { return l.survived_cycles > r.survived_cycles; });
    return out;
}

// ---------------------------------------------------------------------------

void RabiConfig::validate() const {
    if (!(rabi_frequency > 0) || !(decoherence_time > 0)) {
        throw std::invalid_argument("RabiConfig: rabi_frequency and decoherence_time must be positive");
    }
    for (double t : pulse_lengths) {
        if (!(t >= 0)) {
            throw std::invalid_argument("RabiConfig: pulse lengths must be >= 0");
        }
    }
}

std::vector<double> RabiConfig::uniform_grid(std::size_t points, double span) {
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = points > 1 ? span * static_cast<double>(i) / static_cast<double>(points - 1) : 0.0;
    }
    return grid;
}

double rabi_transfer_probability(double duration, const RabiConfig& rabi) {
    return 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * rabi.rabi_frequency * duration) *
                            std::exp(-duration / rabi.decoherence_time));
}

AtomState microwave_pulse(const AtomState& atom, double duration, const RabiConfig& rabi, Rng& rng) {
    if (!atom.present || atom.hyperfine != Hyperfine::F1) {
        throw std::invalid_argument("microwave_pulse: needs a trapped F=1 atom");
    }
    if (!(duration >= 0)) {
        throw std::invalid_argument("microwave_pulse: duration must be >= 0");
    }
    // Draw unconditionally so stream use does not depend on the sublevel.
    const double u = uniform01(rng);
    AtomState out = atom;
    if (atom.zeeman_mf == rabi.driven_sublevel && u < rabi_transfer_probability(duration, rabi)) {
        out.hyperfine = Hyperfine::F2;
        out.zeeman_mf = rabi.driven_sublevel;
    }
    return out;
}

double rabi_measured_probability(double duration, const RabiConfig& rabi, double f1_error, double f2_error) {
    const double p_true = rabi_transfer_probability(duration, rabi) / 3.0;
    return p_true * (1.0 - f2_error) + (1.0 - p_true) * f1_error;
}

RabiResult experiment_rabi(std::uint64_t n_atoms, const RabiConfig& rabi, const CycleConfig& config,
                           std::uint64_t seed, const ExecutionOptions& exec) {
    if (n_atoms == 0 || rabi.pulse_lengths.empty()) {
        throw std::invalid_argument("experiment_rabi: need atoms and at least one pulse length");
    }
    rabi.validate();
    config.validate();
    const std::size_t points = rabi.pulse_lengths.size();

    std::vector<std::vector<RabiRow>> per_slot(n_atoms);
    parallel_for(n_atoms, exec, [&](std::size_t slot) {
        auto& rows = per_slot[slot];
        AtomState atom;
        rows.push_back(RabiRow{slot, 0, 0, {}});
        for (std::size_t i = 0; i < points; ++i) {
            if (!atom.present) {
                // Load a fresh atom for the remaining pulse lengths.
                atom = AtomState{};
                rows.push_back(RabiRow{slot, rows.back().generation + 1, i, {}});
            }
            Rng rng = derive_substream(seed, {kRabiStream, slot, i});
            atom = prepare_state(atom, Hyperfine::F1, rng);
            atom = microwave_pulse(atom, rabi.pulse_lengths[i], rabi, rng);
            auto [next, rec] = run_detection_cycle(atom, config, rng, i);
            rows.back().cycles.push_back(rec);
            atom = next;
        }
    });

    RabiResult out;
    out.pulse_lengths = rabi.pulse_lengths;
    out.trials.assign(points, 0);
    out.f2_counts.assign(points, 0);
    for (auto& rows : per_slot) {
        for (auto& row : rows) {
            for (std::size_t k = 0; k < row.cycles.size(); ++k) {
                const std::size_t i = row.first_pulse + k;
                ++out.trials[i];
                out.f2_counts[i] += row.cycles[k].classified == Hyperfine::F2 ? 1 : 0;
            }
            out.rows.push_back(std::move(row));
        }
    }
    out.f2_fraction.resize(points);
    for (std::size_t i = 0; i < points; ++i) {
        out.f2_fraction[i] = ratio(out.f2_counts[i], out.trials[i]);
    }
    if (points >= 8) {
        out.fit = fit_damped_sinusoid(out.pulse_lengths, out.f2_fraction);
    }
    return out;
}

}  // namespace qread
