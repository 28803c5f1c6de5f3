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

#ifndef QREAD_DETECTION_CHANNEL_H
#define QREAD_DETECTION_CHANNEL_H

#include <cstdint>
#include <vector>

#include "qread/random.h"

namespace qread {

struct DetectorConfig {
    /// Collection times quantum efficiency.
    double net_efficiency = 0.02;
    /// Always-on dark count rate (1/s).
    double dark_rate = 100.0;

    void validate() const;
};

/// Time-ordered events inside [0, window_length].
class CountTrace {
  public:
    explicit CountTrace(double window_length);
    CountTrace(double window_length, std::vector<double> event_times);

    double window_length() const { return window_length_; }
    const std::vector<double>& event_times() const { return times_; }
    std::size_t count() const { return times_.size(); }
    bool empty() const { return times_.empty(); }

    /// Appends an event; must not precede the last one.
    void push_back(double t);

    friend bool operator==(const CountTrace&, const CountTrace&) = default;

  private:
    double window_length_;
    std::vector<double> times_;
};

/// Keeps each event independently with probability `efficiency`.
CountTrace thin_events(const CountTrace& scatter_times, double efficiency, Rng& rng);

/// Homogeneous Poisson process sample on [0, window].
CountTrace poisson_trace(double rate, double window, Rng& rng);

/// Sorted union of two traces over the same window.
CountTrace merge_traces(const CountTrace& a, const CountTrace& b);

/// P(X >= k) for X ~ Poisson(mean).
double poisson_tail_at_least(std::uint64_t k, double mean);

/// P(X = k) for X ~ Poisson(mean).
double poisson_pmf(std::uint64_t k, double mean);

}  // namespace qread

#endif  // QREAD_DETECTION_CHANNEL_H
