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

#include "qread/detection_channel.h"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <stdexcept>

namespace qread {

void DetectorConfig::validate() const {
    if (!(net_efficiency > 0 && net_efficiency <= 1)) {
        throw std::invalid_argument("DetectorConfig: net_efficiency must lie in (0, 1]");
    }
    if (!(dark_rate >= 0)) {
        throw std::invalid_argument("DetectorConfig: dark_rate must be >= 0");
    }
}

CountTrace::CountTrace(double window_length) : window_length_(window_length) {
    if (!(window_length > 0)) {
        throw std::invalid_argument("CountTrace: window must be positive");
    }
}

CountTrace::CountTrace(double window_length, std::vector<double> event_times)
    : CountTrace(window_length) {
    times_.reserve(event_times.size());
    for (double t : event_times) {
        push_back(t);
    }
}

void CountTrace::push_back(double t) {
    if (!(t >= 0 && t <= window_length_)) {
        throw std::invalid_argument("CountTrace: event outside the window");
    }
    if (!times_.empty() && t < times_.back()) {
        throw std::invalid_argument("CountTrace: events must be time ordered");
    }
    times_.push_back(t);
}

CountTrace thin_events(const CountTrace& scatter_times, double efficiency, Rng& rng) {
    if (!(efficiency >= 0 && efficiency <= 1)) {
        throw std::invalid_argument("thin_events: efficiency must lie in [0, 1]");
    }
    CountTrace out(scatter_times.window_length());
    for (double t : scatter_times.event_times()) {
        if (bernoulli(rng, efficiency)) {
            out.push_back(t);
        }
    }
    return out;
}

CountTrace poisson_trace(double rate, double window, Rng& rng) {
    if (!(rate >= 0)) {
        throw std::invalid_argument("poisson_trace: rate must be >= 0");
    }
    CountTrace out(window);
    if (rate == 0) {
        return out;
    }
    for (double t = exponential(rng, rate); t <= window; t += exponential(rng, rate)) {
        out.push_back(t);
    }
    return out;
}

CountTrace merge_traces(const CountTrace& a, const CountTrace& b) {
    if (a.window_length() != b.window_length()) {
        throw std::invalid_argument("merge_traces: window lengths differ");
    }
    std::vector<double> merged;
    merged.reserve(a.count() + b.count());
    std::merge(a.event_times().begin(), a.event_times().end(), b.event_times().begin(), b.event_times().end(),
               std::back_inserter(merged));
    return CountTrace(a.window_length(), std::move(merged));
}

double poisson_pmf(std::uint64_t k, double mean) {
    if (!(mean >= 0)) {
        throw std::invalid_argument("poisson_pmf: mean must be >= 0");
    }
    if (mean == 0) {
        return k == 0 ? 1.0 : 0.0;
    }
    const double kd = static_cast<double>(k);
    return std::exp(kd * std::log(mean) - mean - std::lgamma(kd + 1.0));
}

double poisson_tail_at_least(std::uint64_t k, double mean) {
    if (!(mean >= 0)) {
        throw std::invalid_argument("poisson_tail_at_least: mean must be >= 0");
    }
    if (k == 0) {
        return 1.0;
    }
    if (mean == 0) {
        return 0.0;
    }
    if (mean >= static_cast<double>(k)) {
        // Tail is large: 1 minus the head sum is well conditioned.
        double term = std::exp(-mean);
        double head = term;
        for (std::uint64_t j = 1; j < k; ++j) {
            term *= mean / static_cast<double>(j);
            head += term;
        }
        return std::max(0.0, 1.0 - head);
    }
    // Tail is small: sum it directly, terms decrease geometrically.
    double term = poisson_pmf(k, mean);
    double tail = 0.0;
    for (std::uint64_t j = k; term > 0; ++j) {
        tail += term;
        if (term < tail * 1e-17) {
            break;
        }
        term *= mean / static_cast<double>(j + 1);
    }
    return std::min(1.0, tail);
}

}  // namespace qread
