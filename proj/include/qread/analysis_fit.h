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

#ifndef QREAD_ANALYSIS_FIT_H
#define QREAD_ANALYSIS_FIT_H

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qread {

struct FitResult {
    std::vector<std::string> names;
    std::vector<double> values;
    std::vector<double> variances;
    double residual_norm = 0.0;
    /// max_i |J_i . r| / (|J_i| |r|), the cosine between residual and each
    /// Jacobian column at the solution.
    /// max_j |J_j . r| / (|J_j| |y|) at the solution.
    double scaled_gradient = 0.0;
    bool converged = false;
    int iterations = 0;
    /// Residual norm after the initial guess and after every accepted step.
    std::vector<double> residual_history;

    double value(std::string_view name) const;
    double variance(std::string_view name) const;
};

struct FitOptions {
    double parameter_tolerance = 1e-6;
    double gradient_tolerance = 1e-6;
    int max_iterations = 200;
};

/// Least-squares fit of y = exp(-x / L) (or a exp(-x / L) with
/// `with_amplitude`). Parameters "lifetime" and optionally "amplitude".
/// Throws std::invalid_argument on fewer than 3 points, y outside (0, 1], or
/// all-equal y.
FitResult fit_exponential(std::span<const double> x, std::span<const double> y, bool with_amplitude = false,
                          const FitOptions& options = {});

/// Per-cycle loss implied by a lifetime, 1 - exp(-1/L).
double loss_per_cycle_from_lifetime(double lifetime);

/// Damped Rabi model p(t) = C + A/2 (1 - cos(2 pi f t) exp(-t / tau)).
double damped_sinusoid(double t, double offset, double amplitude, double frequency, double decoherence_time);

/// Fits p(t) above; parameters "offset", "amplitude", "frequency",
/// "decoherence_time". Seeds from a 20-point frequency grid over
/// [0.2, 25] / T_span, then refines with Levenberg-Marquardt.
FitResult fit_damped_sinusoid(std::span<const double> t, std::span<const double> p, const FitOptions& options = {});

struct Histogram {
    /// Lower edge of each unit-width bin: 0, 1, ..., max.
    std::vector<std::uint32_t> bin_edges;
    std::vector<std::uint64_t> frequencies;
    std::uint64_t total = 0;

    std::uint64_t at(std::uint32_t k) const { return k < frequencies.size() ? frequencies[k] : 0; }
    double fraction(std::uint32_t k) const { return total ? static_cast<double>(at(k)) / static_cast<double>(total) : 0; }
};

Histogram build_histogram(std::span<const std::uint32_t> counts);

/// Wilson score interval.
std::pair<double, double> binomial_interval(std::uint64_t successes, std::uint64_t trials, double confidence);

/// Standard error sqrt(p (1 - p) / n).
double binomial_standard_error(double p, std::uint64_t trials);

/// Pearson chi-square goodness-of-fit p-value. `observed` and
/// `probabilities` are parallel; the probabilities must cover the whole
/// support (make the last category a tail). Categories are pooled from the
/// tail until every expected count is at least `min_expected`.
double chi_square_p_value(std::span<const std::uint64_t> observed, std::span<const double> probabilities,
                          double min_expected = 5.0);

}  // namespace qread

#endif  // QREAD_ANALYSIS_FIT_H
