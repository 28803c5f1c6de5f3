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


#include "qread/analysis_fit.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.h"
#include "qread/random.h"

using namespace qread;

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
}

std::vector<double> rabi_curve(const std::vector<double>& t, double c, double a, double f, double tau) {
    std::vector<double> p;
    for (double ti : t) {
        p.push_back(damped_sinusoid(ti, c, a, f, tau));
    }
    return p;
}

void expect_rel(double got, double want, double rel) { EXPECT_NEAR(got, want, rel * std::abs(want)); }

void expect_monotone(const FitResult& r) {
    if (r.converged) {
        EXPECT_LE(r.scaled_gradient, 1e-6);
    }
    for (std::size_t i = 1; i < r.residual_history.size(); ++i) {
        EXPECT_LE(r.residual_history[i], r.residual_history[i - 1] * (1 + 1e-12));
    }
}

}  // namespace

TEST(FitExponential, noiseless_round_trip) {
    std::vector<double> x, y;
    for (int i = 0; i <= 100; ++i) {
        x.push_back(i);
        y.push_back(std::exp(-i / 86.0));
    }
    const FitResult r = fit_exponential(x, y);
    EXPECT_TRUE(r.converged);
    expect_rel(r.value("lifetime"), 86.0, 1e-6);
    expect_monotone(r);
}

TEST(FitExponential, with_amplitude) {
    std::vector<double> x, y;
    for (int i = 1; i <= 60; ++i) {
        x.push_back(i);
        y.push_back(0.9 * std::exp(-i / 40.0));
    }
    const FitResult r = fit_exponential(x, y, true);
    EXPECT_TRUE(r.converged);
    expect_rel(r.value("lifetime"), 40.0, 1e-6);
    expect_rel(r.value("amplitude"), 0.9, 1e-6);
}

TEST(FitExponential, lifetime_spread) {
    for (double lifetime : {5.0, 20.0, 86.0, 300.0}) {
        std::vector<double> x, y;
        for (int i = 1; i <= 100; ++i) {
            x.push_back(i);
            y.push_back(std::exp(-i / lifetime));
        }
        expect_rel(fit_exponential(x, y).value("lifetime"), lifetime, 1e-6);
    }
}

TEST(FitExponential, rejects_bad_input) {
    const std::vector<double> x{1, 2, 3}, ones{1, 1, 1}, neg{0.5, -0.1, 0.2};
    EXPECT_THROW(fit_exponential(x, ones), std::invalid_argument);
    EXPECT_THROW(fit_exponential(x, neg), std::invalid_argument);
    EXPECT_THROW(fit_exponential(std::vector<double>{1, 2}, std::vector<double>{0.5, 0.4}), std::invalid_argument);
}

TEST(FitExponential, loss_per_cycle) {
    EXPECT_NEAR(loss_per_cycle_from_lifetime(86.0), 0.0115605641, 1e-10);
    EXPECT_NEAR(loss_per_cycle_from_lifetime(86.0), 0.012, 0.0005);
    EXPECT_THROW(loss_per_cycle_from_lifetime(0.0), std::invalid_argument);
}

TEST(FitDampedSinusoid, noiseless_round_trip) {
    const auto t = linspace(0, 680e-6, 50);
    const FitResult r = fit_damped_sinusoid(t, rabi_curve(t, 0.0, 1.0 / 3.0, 2950, 2.2e-3));
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value("offset"), 0.0, 1e-4 / 3.0);
    expect_rel(r.value("amplitude"), 1.0 / 3.0, 1e-4);
    expect_rel(r.value("frequency"), 2950, 1e-4);
    expect_rel(r.value("decoherence_time"), 2.2e-3, 1e-4);
    expect_monotone(r);
}

TEST(FitDampedSinusoid, noiseless_with_offset) {
    const auto t = linspace(0, 3e-3, 50);
    const FitResult r = fit_damped_sinusoid(t, rabi_curve(t, 0.037, 0.305, 2950, 2.2e-3));
    EXPECT_TRUE(r.converged);
    expect_monotone(r);
    expect_rel(r.value("offset"), 0.037, 1e-6);
    expect_rel(r.value("amplitude"), 0.305, 1e-6);
    expect_rel(r.value("frequency"), 2950, 1e-6);
    expect_rel(r.value("decoherence_time"), 2.2e-3, 1e-6);
}

TEST(FitDampedSinusoid, time_window_shift) {
    // Same anchored model sampled over a later window.
    const auto t0 = linspace(0, 1e-3, 40);
    const auto t1 = linspace(150e-6, 1.15e-3, 40);
    const FitResult a = fit_damped_sinusoid(t0, rabi_curve(t0, 0.02, 0.3, 2950, 2.2e-3));
    const FitResult b = fit_damped_sinusoid(t1, rabi_curve(t1, 0.02, 0.3, 2950, 2.2e-3));
    for (const char* name : {"offset", "amplitude", "frequency", "decoherence_time"}) {
        expect_rel(b.value(name), a.value(name), 1e-6);
    }
}

TEST(FitDampedSinusoid, frequency_stable_under_noise) {
    Rng rng(41);
    const auto t = linspace(0, 680e-6, 50);
    for (int rep = 0; rep < 20; ++rep) {
        auto p = rabi_curve(t, 0.037, 0.305, 2950, 2.2e-3);
        for (double& v : p) {
            const double u1 = 1.0 - uniform01(rng);
            const double u2 = uniform01(rng);
            v += 0.02 * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        }
        const FitResult r = fit_damped_sinusoid(t, p);
        EXPECT_NEAR(r.value("frequency"), 2950, 0.02 * 2950) << rep;
        expect_monotone(r);
    }
}

TEST(FitDampedSinusoid, constant_data_not_identified) {
    const auto t = linspace(0, 680e-6, 50);
    const std::vector<double> p(50, 0.1);
    const FitResult r = fit_damped_sinusoid(t, p);
    const double a = r.value("amplitude");
    EXPECT_TRUE(!r.converged || std::abs(a) <= 3.0 * std::sqrt(r.variance("amplitude")));
}

TEST(FitDampedSinusoid, rejects_short_input) {
    const auto t = linspace(0, 1e-3, 7);
    EXPECT_THROW(fit_damped_sinusoid(t, rabi_curve(t, 0, 0.3, 2950, 2.2e-3)), std::invalid_argument);
}

TEST(Histogram, examples) {
    const Histogram empty = build_histogram(std::vector<std::uint32_t>{});
    EXPECT_EQ(empty.total, 0u);
    EXPECT_TRUE(empty.frequencies.empty());
    const Histogram h = build_histogram(std::vector<std::uint32_t>{0, 0, 1, 2});
    EXPECT_EQ(h.frequencies, (std::vector<std::uint64_t>{2, 1, 1}));
    EXPECT_EQ(h.bin_edges, (std::vector<std::uint32_t>{0, 1, 2}));
    EXPECT_EQ(h.total, 4u);
}

TEST(Histogram, poisson_samples) {
    Rng rng(42);
    std::vector<std::uint32_t> counts;
    constexpr int kN = 100000;
    for (int i = 0; i < kN; ++i) {
        std::uint32_t k = 0;
        double t = exponential(rng, 1.0);
        while (t < 0.3) {
            ++k;
            t += exponential(rng, 1.0);
        }
        counts.push_back(k);
    }
    const Histogram h = build_histogram(counts);
    std::uint64_t sum = 0;
    for (auto f : h.frequencies) {
        sum += f;
    }
    EXPECT_EQ(sum, h.total);
    const auto pmf = oracle::poisson_categories(0.3, 4);
    for (std::uint32_t k = 0; k < 4; ++k) {
        EXPECT_NEAR(h.fraction(k), pmf[k], 3.0 * std::sqrt(pmf[k] * (1 - pmf[k]) / kN)) << k;
    }
}

TEST(Binomial, wilson_examples) {
    EXPECT_EQ(binomial_interval(0, 50, 0.95).first, 0.0);
    EXPECT_EQ(binomial_interval(50, 50, 0.95).second, 1.0);
    const auto [lo, hi] = binomial_interval(117, 2127, 0.95);
    EXPECT_NEAR(lo, 0.0460956, 1e-6);
    EXPECT_NEAR(hi, 0.0655229, 1e-6);
    EXPECT_LT(lo, 0.055);
    EXPECT_GT(hi, 0.055);
    EXPECT_THROW(binomial_interval(3, 2, 0.95), std::invalid_argument);
    EXPECT_THROW(binomial_interval(0, 0, 0.95), std::invalid_argument);
}

TEST(Binomial, wilson_contains_estimate) {
    for (std::uint64_t n : {1u, 7u, 100u, 2127u}) {
        for (std::uint64_t k = 0; k <= n; k += std::max<std::uint64_t>(1, n / 37)) {
            const auto [lo, hi] = binomial_interval(k, n, 0.95);
            const double p = static_cast<double>(k) / static_cast<double>(n);
            EXPECT_LE(lo, p);
            EXPECT_GE(hi, p);
        }
    }
}

TEST(ChiSquare, pooling_and_extremes) {
    const std::vector<double> p{0.5, 0.5};
    EXPECT_NEAR(chi_square_p_value(std::vector<std::uint64_t>{500, 500}, p), 1.0, 1e-12);
    EXPECT_LT(chi_square_p_value(std::vector<std::uint64_t>{600, 400}, p), 1e-9);
    EXPECT_THROW(chi_square_p_value(std::vector<std::uint64_t>{1}, std::vector<double>{1.0}), std::invalid_argument);
}
