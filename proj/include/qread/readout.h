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

#ifndef QREAD_READOUT_H
#define QREAD_READOUT_H

#include <cstdint>
#include <optional>
#include <string_view>

#include "qread/atom_physics.h"
#include "qread/detection_channel.h"
#include "qread/random.h"

namespace qread {

enum class PolicyKind : std::uint8_t { FixedWindow, AdaptiveStop };

std::string_view to_string(PolicyKind k);

struct ReadoutPolicy {
    PolicyKind kind = PolicyKind::AdaptiveStop;
    /// Classification boundary; N_D for AdaptiveStop.
    std::uint32_t threshold_counts = 2;
    double max_duration = 300e-6;

    void validate() const;
};

struct ReadoutOutcome {
    Hyperfine classified = Hyperfine::F1;
    std::uint32_t detected_counts = 0;
    double elapsed = 0.0;
    std::uint64_t scatters = 0;
    bool depumped_during_probe = false;
};

/// Single-consumer stream of detector clicks for one probe window.
class EventSource {
  public:
    virtual ~EventSource() = default;
    /// Time of the next detection, or nullopt once the window is exhausted.
    virtual std::optional<double> next_detection() = 0;
    /// Scattering events consumed so far.
    virtual std::uint64_t scatters() const = 0;
    /// Whether the atom went dark during the events consumed so far.
    virtual bool depumped() const = 0;
};

/// Replays a recorded trace; no scattering bookkeeping.
class TraceSource final : public EventSource {
  public:
    explicit TraceSource(const CountTrace& trace) : trace_(trace) {}

    std::optional<double> next_detection() override;
    std::uint64_t scatters() const override { return 0; }
    bool depumped() const override { return false; }

  private:
    const CountTrace& trace_;
    std::size_t next_ = 0;
};

struct FluorescenceParams {
    /// Scattering rate while bright (1/s); zero for an F=1 atom.
    double scatter_rate = 3.5e6;
    double efficiency = 0.02;
    /// Probability that an undetected scatter leaves the atom dark.
    double hazard = 0.0;
    /// Probe-on background rate (1/s).
    double background_rate = 0.0;
    double window = 300e-6;
};

/// Event-driven probe of one atom: scatters arrive as a Poisson process while
/// the atom is bright, each is detected with probability `efficiency`, and an
/// undetected scatter depumps with probability `hazard`. Background clicks
/// are merged in.
class FluorescenceSource final : public EventSource {
  public:
    FluorescenceSource(const FluorescenceParams& params, bool bright, Rng& rng);

    std::optional<double> next_detection() override;
    std::uint64_t scatters() const override { return scatters_; }
    bool depumped() const override { return depumped_; }

  private:
    FluorescenceParams params_;
    Rng& rng_;
    bool bright_;
    bool depumped_ = false;
    std::uint64_t scatters_ = 0;
    double next_scatter_;
    double next_background_;
};

Hyperfine classify_fixed(std::uint32_t counts, const ReadoutPolicy& policy);

/// Consumes events until the N_D-th detection or the time limit.
ReadoutOutcome run_adaptive(EventSource& signal, const ReadoutPolicy& policy);

/// Counts every event in the window and applies the fixed threshold.
ReadoutOutcome run_fixed(EventSource& signal, const ReadoutPolicy& policy);

/// Dispatches on policy.kind.
ReadoutOutcome run_readout(EventSource& signal, const ReadoutPolicy& policy);

/// False-positive rate for a dark atom with Poisson background.
double analytic_f1_error(const ReadoutPolicy& policy, double background_mean);

/// False-negative rate for a bright atom, from the detection-vs-depump race.
/// Each scatter is a detection with probability eta; otherwise it depumps
/// with probability q. Returns 1 - p1^n_d with p1 = eta / (eta + q - eta q).
/// Timeouts and background are ignored.
double analytic_f2_error(double efficiency, double hazard, std::uint32_t n_d);

/// Hazard q for which analytic_f2_error(efficiency, q, n_d) == target.
double calibrate_depump(double target_f2_error, double efficiency, std::uint32_t n_d);

}  // namespace qread

#endif  // QREAD_READOUT_H
