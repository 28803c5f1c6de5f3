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

#include "qread/readout.h"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qread {

namespace {

constexpr double kNever = std::numeric_limits<double>::infinity();

}  // namespace

std::string_view to_string(PolicyKind k) { return k == PolicyKind::FixedWindow ? "fixed" : "adaptive"; }

void ReadoutPolicy::validate() const {
    if (threshold_counts < 1) {
        throw std::invalid_argument("ReadoutPolicy: threshold_counts must be >= 1");
    }
    if (!(max_duration > 0)) {
        throw std::invalid_argument("ReadoutPolicy: max_duration must be positive");
    }
}

std::optional<double> TraceSource::next_detection() {
    if (next_ >= trace_.count()) {
        return std::nullopt;
    }
    return trace_.event_times()[next_++];
}

FluorescenceSource::FluorescenceSource(const FluorescenceParams& params, bool bright, Rng& rng)
    : params_(params), rng_(rng), bright_(bright && params.scatter_rate > 0) {
    if (!(params.efficiency >= 0 && params.efficiency <= 1) || !(params.hazard >= 0 && params.hazard <= 1)) {
        throw std::invalid_argument("FluorescenceSource: efficiency and hazard must be probabilities");
    }
    if (!(params.window > 0) || !(params.background_rate >= 0) || !(params.scatter_rate >= 0)) {
        throw std::invalid_argument("FluorescenceSource: invalid rates or window");
    }
    next_scatter_ = bright_ ? exponential(rng_, params_.scatter_rate) : kNever;
    next_background_ = params_.background_rate > 0 ? exponential(rng_, params_.background_rate) : kNever;
}

std::optional<double> FluorescenceSource::next_detection() {
    const double detect_or_depump = params_.efficiency + (1.0 - params_.efficiency) * params_.hazard;
    while (true) {
        const double t = std::min(next_scatter_, next_background_);
        if (t > params_.window) {
            return std::nullopt;
        }
        if (next_background_ <= next_scatter_) {
            next_background_ += exponential(rng_, params_.background_rate);
            return t;
        }
        ++scatters_;
        // One uniform decides the scatter: detected, depumped, or neither.
        const double u = uniform01(rng_);
        if (u < params_.efficiency) {
            next_scatter_ += exponential(rng_, params_.scatter_rate);
            return t;
        }
        if (u < detect_or_depump) {
            bright_ = false;
            depumped_ = true;
            next_scatter_ = kNever;
        } else {
            next_scatter_ += exponential(rng_, params_.scatter_rate);
        }
    }
}

Hyperfine classify_fixed(std::uint32_t counts, const ReadoutPolicy& policy) {
    if (policy.kind != PolicyKind::FixedWindow) {
        throw std::invalid_argument("classify_fixed: policy is not FixedWindow");
    }
    policy.validate();
    return counts >= policy.threshold_counts ? Hyperfine::F2 : Hyperfine::F1;
}

ReadoutOutcome run_adaptive(EventSource& signal, const ReadoutPolicy& policy) {
    if (policy.kind != PolicyKind::AdaptiveStop) {
        throw std::invalid_argument("run_adaptive: policy is not AdaptiveStop");
    }
    policy.validate();
    ReadoutOutcome out;
    out.elapsed = policy.max_duration;
    while (auto t = signal.next_detection()) {
        if (*t > policy.max_duration) {
            break;
        }
        if (++out.detected_counts == policy.threshold_counts) {
            out.classified = Hyperfine::F2;
            out.elapsed = *t;
            break;
        }
    }
    out.scatters = signal.scatters();
    out.depumped_during_probe = signal.depumped();
    return out;
}

ReadoutOutcome run_fixed(EventSource& signal, const ReadoutPolicy& policy) {
    if (policy.kind != PolicyKind::FixedWindow) {
        throw std::invalid_argument("run_fixed: policy is not FixedWindow");
    }
    policy.validate();
    ReadoutOutcome out;
    out.elapsed = policy.max_duration;
    while (auto t = signal.next_detection()) {
        if (*t > policy.max_duration) {
            break;
        }
        ++out.detected_counts;
    }
    out.classified = classify_fixed(out.detected_counts, policy);
    out.scatters = signal.scatters();
    out.depumped_during_probe = signal.depumped();
    return out;
}

ReadoutOutcome run_readout(EventSource& signal, const ReadoutPolicy& policy) {
    return policy.kind == PolicyKind::AdaptiveStop ? run_adaptive(signal, policy) : run_fixed(signal, policy);
}

double analytic_f1_error(const ReadoutPolicy& policy, double background_mean) {
    policy.validate();
    return poisson_tail_at_least(policy.threshold_counts, background_mean);
}

namespace {

void check_race_args(double efficiency, std::uint32_t n_d) {
    if (!(efficiency > 0 && efficiency <= 1)) {
        throw std::invalid_argument("efficiency must lie in (0, 1]");
    }
    if (n_d < 1) {
        throw std::invalid_argument("n_d must be >= 1");
    }
}

}  // namespace

double analytic_f2_error(double efficiency, double hazard, std::uint32_t n_d) {
    check_race_args(efficiency, n_d);
    if (!(hazard >= 0 && hazard < 1)) {
        throw std::invalid_argument("analytic_f2_error: hazard must lie in [0, 1)");
    }
    const double p1 = efficiency / (efficiency + hazard - efficiency * hazard);
    // 1 - p1^n without cancellation for p1 near 1.
    return -std::expm1(static_cast<double>(n_d) * std::log(p1));
}

double calibrate_depump(double target_f2_error, double efficiency, std::uint32_t n_d) {
    check_race_args(efficiency, n_d);
    if (!(target_f2_error >= 0 && target_f2_error < 1)) {
        throw std::invalid_argument("calibrate_depump: target must lie in [0, 1)");
    }
    if (target_f2_error == 0) {
        return 0.0;
    }
    if (efficiency == 1) {
        throw std::invalid_argument("calibrate_depump: a perfect detector never misses; target infeasible");
    }
    const double p1 = std::exp(std::log1p(-target_f2_error) / static_cast<double>(n_d));
    const double q = efficiency * (1.0 / p1 - 1.0) / (1.0 - efficiency);
    if (!(q < 1)) {
        throw std::invalid_argument("calibrate_depump: target requires hazard >= 1");
    }
    return q;
}

}  // namespace qread
