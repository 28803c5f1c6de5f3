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

#include "qread/trap_dynamics.h"

#include <cmath>
#include <stdexcept>

namespace qread {

void TrapConfig::validate() const {
    if (!(baseline_energy >= 0) || !(depth > baseline_energy)) {
        throw std::invalid_argument("TrapConfig: need depth > baseline_energy >= 0");
    }
}

void LossModel::validate() const {
    if (!(background_loss_per_cycle >= 0 && background_loss_per_cycle < 1)) {
        throw std::invalid_argument("LossModel: background_loss_per_cycle must lie in [0, 1)");
    }
    if (!(heating_threshold_fraction > 0 && heating_threshold_fraction <= 1)) {
        throw std::invalid_argument("LossModel: heating_threshold_fraction must lie in (0, 1]");
    }
}

void CoolingConfig::validate() const {
    if (!(pulse_duration >= 0)) {
        throw std::invalid_argument("CoolingConfig: pulse_duration must be >= 0");
    }
}

AtomState apply_heating(const AtomState& atom, std::uint64_t scatters, const SpeciesConstants& constants) {
    if (!atom.present) {
        throw std::invalid_argument("apply_heating: atom is not in the trap");
    }
    AtomState out = atom;
    out.motional_energy += heating_for_scatters(scatters, constants);
    return out;
}

AtomState check_loss(const AtomState& atom, const TrapConfig& trap, const LossModel& loss, Rng& rng) {
    if (!atom.present) {
        throw std::invalid_argument("check_loss: atom is not in the trap");
    }
    trap.validate();
    loss.validate();
    const bool background_loss = bernoulli(rng, loss.background_loss_per_cycle);
    AtomState out = atom;
    if (atom.motional_energy >= loss.heating_threshold_fraction * trap.depth || background_loss) {
        out.present = false;
    }
    return out;
}

CoolResult cool(const AtomState& atom, const CoolingConfig& cooling, const TrapConfig& trap) {
    if (!atom.present) {
        throw std::invalid_argument("cool: atom is not in the trap");
    }
    cooling.validate();
    AtomState out = atom;
    if (cooling.reset) {
        out.motional_energy = trap.baseline_energy;
    }
    return {out, cooling.pulse_duration};
}

double calibrate_background_loss(double target_per_cycle, double heating_contribution) {
    if (!(target_per_cycle >= 0 && target_per_cycle < 1) || !(heating_contribution >= 0)) {
        throw std::invalid_argument("calibrate_background_loss: probabilities out of range");
    }
    if (heating_contribution > target_per_cycle) {
        throw std::invalid_argument("calibrate_background_loss: heating alone exceeds the target loss");
    }
    return 1.0 - (1.0 - target_per_cycle) / (1.0 - heating_contribution);
}

std::uint64_t scatters_to_threshold(const TrapConfig& trap, const LossModel& loss, const SpeciesConstants& constants) {
    trap.validate();
    loss.validate();
    const double threshold = loss.heating_threshold_fraction * trap.depth;
    if (threshold <= trap.baseline_energy) {
        return 0;
    }
    const double per = heating_per_scatter(constants);
    auto n = static_cast<std::uint64_t>(std::ceil((threshold - trap.baseline_energy) / per));
    // Guard the ceil against rounding on either side.
    while (n > 0 && trap.baseline_energy + heating_for_scatters(n - 1, constants) >= threshold) {
        --n;
    }
    while (trap.baseline_energy + heating_for_scatters(n, constants) < threshold) {
        ++n;
    }
    return n;
}

}  // namespace qread
