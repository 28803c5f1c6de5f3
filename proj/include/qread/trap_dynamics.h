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

#ifndef QREAD_TRAP_DYNAMICS_H
#define QREAD_TRAP_DYNAMICS_H

#include <cstdint>

#include "qread/atom_physics.h"
#include "qread/random.h"

namespace qread {

/// Energies in kelvin.
struct TrapConfig {
    double depth = 2e-3;
    double baseline_energy = 0.0;

    void validate() const;
};

struct LossModel {
    /// Everything that is not heating: collisions, pointing noise.
    double background_loss_per_cycle = 0.012;
    /// Atom is lost once motional energy reaches this fraction of the depth.
    double heating_threshold_fraction = 1.0;

    void validate() const;
};

struct CoolingConfig {
    double pulse_duration = 5e-3;
    bool reset = true;

    void validate() const;
};

/// Adds scatters * 2 T_recoil of motional energy.
AtomState apply_heating(const AtomState& atom, std::uint64_t scatters, const SpeciesConstants& constants);

/// Marks the atom absent on a threshold crossing or a background loss event.
/// The Bernoulli draw is made on every call so stream consumption does not
/// depend on the atom's energy.
AtomState check_loss(const AtomState& atom, const TrapConfig& trap, const LossModel& loss, Rng& rng);

struct CoolResult {
    AtomState atom;
    double elapsed;
};

CoolResult cool(const AtomState& atom, const CoolingConfig& cooling, const TrapConfig& trap);

/// Background loss p with 1 - (1 - p)(1 - heating_contribution) = target.
double calibrate_background_loss(double target_per_cycle, double heating_contribution);

/// Number of scatters from the baseline needed to reach the loss threshold.
std::uint64_t scatters_to_threshold(const TrapConfig& trap, const LossModel& loss, const SpeciesConstants& constants);

}  // namespace qread

#endif  // QREAD_TRAP_DYNAMICS_H
