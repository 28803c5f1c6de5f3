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

#include "qread/atom_physics.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qread {

std::string_view to_string(Hyperfine f) { return f == Hyperfine::F1 ? "F1" : "F2"; }

void SpeciesConstants::validate() const {
    if (!(linewidth_gamma > 0) || !(excited_splitting_delta23 > 0) || !(hyperfine_splitting > 0) ||
        !(recoil_temperature > 0) || !(boltzmann_energy_scale > 0)) {
        throw std::invalid_argument("SpeciesConstants: frequencies and temperatures must be positive");
    }
    if (!(excited_splitting_delta23 > linewidth_gamma)) {
        throw std::invalid_argument("SpeciesConstants: excited splitting must exceed the linewidth");
    }
}

void ProbeConfig::validate() const {
    if (!(scatter_rate > 0)) {
        throw std::invalid_argument("ProbeConfig: scatter_rate must be positive");
    }
    if (!(max_probe_duration > 0)) {
        throw std::invalid_argument("ProbeConfig: max_probe_duration must be positive");
    }
    if (!(background_mean_per_window >= 0)) {
        throw std::invalid_argument("ProbeConfig: background_mean_per_window must be >= 0");
    }
}

void AtomState::validate() const {
    if (!(motional_energy >= 0)) {
        throw std::invalid_argument("AtomState: motional_energy must be >= 0");
    }
    const int max_mf = hyperfine == Hyperfine::F1 ? 1 : 2;
    if (zeeman_mf < -max_mf || zeeman_mf > max_mf) {
        throw std::invalid_argument("AtomState: zeeman_mF " + std::to_string(zeeman_mf) + " out of range for " +
                                    std::string(to_string(hyperfine)));
    }
}

double misdetection_probability(double mean_detected) {
    if (!(mean_detected >= 0)) {
        throw std::invalid_argument("misdetection_probability: mean must be >= 0");
    }
    return std::exp(-mean_detected);
}

double required_mean_photons(double target_error) {
    if (!(target_error > 0 && target_error < 1)) {
        throw std::invalid_argument("required_mean_photons: target must lie in (0, 1)");
    }
    return -std::log(target_error);
}

double depump_suppression(double detuning, const SpeciesConstants& constants) {
    constants.validate();
    const double resonant = 2.0 * constants.excited_splitting_delta23 / constants.linewidth_gamma;
    const double x = 2.0 * detuning / constants.linewidth_gamma;
    return resonant * resonant / (1.0 + x * x);
}

double detuning_for_suppression(double suppression, const SpeciesConstants& constants) {
    const double peak = depump_suppression(0.0, constants);
    if (!(suppression > 0) || suppression > peak) {
        throw std::invalid_argument("detuning_for_suppression: suppression outside (0, resonant maximum]");
    }
    return 0.5 * constants.linewidth_gamma * std::sqrt(peak / suppression - 1.0);
}

double depump_hazard_per_scatter(double suppression, double branching_to_f1) {
    if (!(suppression >= 1)) {
        throw std::invalid_argument("depump_hazard_per_scatter: suppression must be >= 1");
    }
    if (!(branching_to_f1 >= 0 && branching_to_f1 <= 1)) {
        throw std::invalid_argument("depump_hazard_per_scatter: branching must lie in [0, 1]");
    }
    return branching_to_f1 / suppression;
}

double heating_per_scatter(const SpeciesConstants& constants) {
    constants.validate();
    return 2.0 * constants.recoil_temperature;
}

double heating_per_scatter_joules(const SpeciesConstants& constants) {
    return heating_per_scatter(constants) * constants.boltzmann_energy_scale;
}

double heating_for_scatters(std::uint64_t scatters, const SpeciesConstants& constants) {
    return static_cast<double>(scatters) * heating_per_scatter(constants);
}

double scatters_for_detected(double mean_detected, double efficiency) {
    if (!(efficiency > 0 && efficiency <= 1)) {
        throw std::invalid_argument("scatters_for_detected: efficiency must lie in (0, 1]");
    }
    if (!(mean_detected >= 0)) {
        throw std::invalid_argument("scatters_for_detected: mean must be >= 0");
    }
    return mean_detected / efficiency;
}

}  // namespace qread
