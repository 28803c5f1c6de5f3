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

#ifndef QREAD_EXPERIMENTS_H
#define QREAD_EXPERIMENTS_H

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "qread/analysis_fit.h"
#include "qread/atom_physics.h"
#include "qread/detection_channel.h"
#include "qread/random.h"
#include "qread/readout.h"
#include "qread/trap_dynamics.h"

namespace qread {

/// Everything one prepare -> probe -> classify -> cool -> loss-check cycle
/// needs.
struct CycleConfig {
    SpeciesConstants species;
    ProbeConfig probe;
    DetectorConfig detector;
    ReadoutPolicy policy;
    /// Probability that an undetected scatter depumps to F=1.
    double hazard = 0.0;
    TrapConfig trap;
    LossModel loss;
    CoolingConfig cooling;
    double prep_duration = 10e-3;

    void validate() const;
    FluorescenceParams fluorescence() const;
};

struct CycleRecord {
    std::uint64_t trial_index = 0;
    Hyperfine true_state_at_probe = Hyperfine::F1;
    int zeeman_mf = 0;
    std::uint32_t detected_counts = 0;
    Hyperfine classified = Hyperfine::F1;
    double probe_elapsed = 0.0;
    std::uint64_t scatters = 0;
    bool depumped = false;
    /// False when the atom was already gone and nothing was probed.
    bool probed = true;
    bool atom_present_after = true;
    /// prep + probe + cooling.
    double cycle_duration = 0.0;
};

/// Optical pumping into `target` with a uniformly drawn Zeeman sublevel.
/// Motional energy and presence carry over from `atom`.
AtomState prepare_state(const AtomState& atom, Hyperfine target, Rng& rng);
AtomState prepare_state(Hyperfine target, Rng& rng);

/// One detection cycle on an already prepared atom.
std::pair<AtomState, CycleRecord> run_detection_cycle(const AtomState& atom, const CycleConfig& config, Rng& rng,
                                                      std::uint64_t trial_index = 0);

struct ExecutionOptions {
    /// 0 picks std::thread::hardware_concurrency().
    unsigned threads = 1;
};

/// Runs body(i) for i in [0, n). Results must go to disjoint slots.
void parallel_for(std::size_t n, const ExecutionOptions& exec, const std::function<void(std::size_t)>& body);

// ---------------------------------------------------------------------------
// Histogram / single-shot error and loss

struct HistogramResult {
    std::vector<CycleRecord> f1_trials;
    std::vector<CycleRecord> f2_trials;
    Histogram f1_histogram;
    Histogram f2_histogram;
    std::uint64_t f1_errors = 0;
    std::uint64_t f2_errors = 0;
    std::uint64_t f1_losses = 0;
    std::uint64_t f2_losses = 0;

    double f1_error_rate() const;
    double f2_error_rate() const;
    double f1_loss_rate() const;
    double f2_loss_rate() const;
};

/// Independent single cycles on fresh atoms. `loss_f1` / `loss_f2` set the
/// background loss used for atoms prepared in each state.
HistogramResult experiment_histogram(std::uint64_t trials_f1, std::uint64_t trials_f2, const CycleConfig& config,
                                     double loss_f1, double loss_f2, std::uint64_t seed,
                                     const ExecutionOptions& exec = {});

// ---------------------------------------------------------------------------
// Repeated cycles on the same atom

enum class SurvivalCell : std::uint8_t { F2Detected, F1Detected, Lost };

struct SurvivalRow {
    std::uint64_t atom_index = 0;
    /// Number of cycles the atom was present to be probed.
    std::uint64_t survived_cycles = 0;
    std::vector<SurvivalCell> cells;
};

struct SurvivalMatrix {
    /// Sorted by survived_cycles, longest first; ties keep atom order.
    std::vector<SurvivalRow> rows;
    std::uint64_t n_cycles = 0;

    /// Lost is absorbing in every row.
    bool loss_is_absorbing() const;
};

struct SurvivalResult {
    SurvivalMatrix matrix;
    /// survival_fraction[c] is the fraction of atoms still trapped after
    /// cycle c + 1.
    std::vector<double> survival_fraction;
    FitResult fit;
    double lifetime = 0.0;
    double loss_per_cycle = 0.0;
    double survivor_fraction_end = 0.0;
    double mean_scatters_per_cycle = 0.0;
};

SurvivalResult experiment_survival(std::uint64_t n_atoms, std::uint64_t n_cycles, const CycleConfig& config,
                                   std::uint64_t seed, const ExecutionOptions& exec = {});

// ---------------------------------------------------------------------------
// Microwave Rabi scan

struct RabiConfig {
    double rabi_frequency = 2950.0;
    double decoherence_time = 2.2e-3;
    std::vector<double> pulse_lengths;
    int driven_sublevel = 0;

    void validate() const;

    /// `points` uniform durations on [0, span].
    static std::vector<double> uniform_grid(std::size_t points, double span);
};

/// F=1 -> F=2 transfer probability on the driven sublevel,
/// (1 - cos(2 pi f t) e^{-t/tau}) / 2.
double rabi_transfer_probability(double duration, const RabiConfig& rabi);

/// Applies one pulse to an F=1 atom; only the driven sublevel responds.
AtomState microwave_pulse(const AtomState& atom, double duration, const RabiConfig& rabi, Rng& rng);

struct RabiRow {
    std::uint64_t slot = 0;
    /// 0 for the first atom in a slot, incremented per replacement.
    std::uint64_t generation = 0;
    std::size_t first_pulse = 0;
    std::vector<CycleRecord> cycles;
};

struct RabiResult {
    std::vector<RabiRow> rows;
    std::vector<double> pulse_lengths;
    std::vector<std::uint64_t> trials;
    std::vector<std::uint64_t> f2_counts;
    std::vector<double> f2_fraction;
    FitResult fit;
};

/// Measured F=2 fraction including readout errors:
/// P_true (1 - e2) + (1 - P_true) e1, with P_true = (1/3) transfer.
double rabi_measured_probability(double duration, const RabiConfig& rabi, double f1_error, double f2_error);

RabiResult experiment_rabi(std::uint64_t n_atoms, const RabiConfig& rabi, const CycleConfig& config, std::uint64_t seed,
                           const ExecutionOptions& exec = {});

}  // namespace qread

#endif  // QREAD_EXPERIMENTS_H
