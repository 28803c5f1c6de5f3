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

#ifndef QREAD_ATOM_PHYSICS_H
#define QREAD_ATOM_PHYSICS_H

#include <cstdint>
#include <string_view>

namespace qread {

enum class Hyperfine : std::uint8_t { F1 = 1, F2 = 2 };

std::string_view to_string(Hyperfine f);

/// Atomic constants of the detection transition.
///
/// Frequencies are in Hz (not angular). The recoil temperature is stored
/// directly rather than derived from hbar, k and m; for the Rb-87 D2 line
/// T_recoil = hbar^2 k^2 / (m k_B) = 361.96 nK.
struct SpeciesConstants {
    double linewidth_gamma = 6.0e6;
    double excited_splitting_delta23 = 266.0e6;
    double hyperfine_splitting = 6.834682611e9;
    double recoil_temperature = 361.96e-9;
    double boltzmann_energy_scale = 1.380649e-23;

    /// Built-in "Rb87-D2" profile.
    static SpeciesConstants rb87_d2() { return {}; }

    /// Throws std::invalid_argument if any invariant is violated.
    void validate() const;
};

struct ProbeConfig {
    double nominal_detuning = 5.0e6;
    double effective_detuning = 5.0e6;
    double scatter_rate = 3.5e6;
    double max_probe_duration = 300e-6;
    double background_mean_per_window = 0.3;

    /// Background rate while the probe is on, in counts per second.
    double background_rate() const { return background_mean_per_window / max_probe_duration; }

    void validate() const;
};

/// The simulated particle. Motional energy is carried in kelvin above the
/// cooled baseline.
struct AtomState {
    Hyperfine hyperfine = Hyperfine::F1;
    int zeeman_mf = 0;
    double motional_energy = 0.0;
    bool present = true;

    void validate() const;
};

/// Poisson probability of detecting zero photons, exp(-mean).
double misdetection_probability(double mean_detected);

/// Inverse of misdetection_probability: -ln(target_error).
double required_mean_photons(double target_error);

/// Ratio of resonant F'=3 excitation to off-resonant F'=2 excitation at a
/// probe detuning `detuning` (Hz) from the cycling line:
///   S = (2 Delta / gamma)^2 / (1 + (2 delta / gamma)^2).
double depump_suppression(double detuning, const SpeciesConstants& constants);

/// |detuning| at which depump_suppression equals `suppression`. Fails if
/// `suppression` exceeds the resonant maximum.
double detuning_for_suppression(double suppression, const SpeciesConstants& constants);

/// Probability that a single scatter leaves the atom in F=1.
double depump_hazard_per_scatter(double suppression, double branching_to_f1);

/// Heating per absorption-emission cycle, 2 T_recoil, in kelvin.
double heating_per_scatter(const SpeciesConstants& constants);

/// Same quantity in joules.
double heating_per_scatter_joules(const SpeciesConstants& constants);

/// Total heating for `scatters` events, in kelvin.
double heating_for_scatters(std::uint64_t scatters, const SpeciesConstants& constants);

/// Mean scatters needed for `mean_detected` counts at net efficiency
/// `efficiency`.
double scatters_for_detected(double mean_detected, double efficiency);

}  // namespace qread

#endif  // QREAD_ATOM_PHYSICS_H
