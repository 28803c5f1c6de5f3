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
#include <stdexcept>

#include "gtest/gtest.h"
#include "oracles.h"
#include "qread/analysis_fit.h"

using namespace qread;

namespace {

CountTrace uniform_trace(std::size_t n, double window) {
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = window * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    }
    return CountTrace(window, t);
}

}  // namespace

TEST(CountTrace, rejects_bad_events) {
    EXPECT_THROW(CountTrace(0.0), std::invalid_argument);
    CountTrace t(1.0);
    t.push_back(0.5);
    EXPECT_THROW(t.push_back(0.4), std::invalid_argument);
    EXPECT_THROW(t.push_back(1.5), std::invalid_argument);
    EXPECT_THROW(CountTrace(1.0, {0.2, 0.1}), std::invalid_argument);
}

TEST(ThinEvents, limits) {
    Rng rng(1);
    const CountTrace in = uniform_trace(50, 1e-3);
    EXPECT_EQ(thin_events(in, 1.0, rng), in);
    EXPECT_TRUE(thin_events(in, 0.0, rng).empty());
}

TEST(ThinEvents, binomial_mean_and_variance) {
    Rng rng(2);
    const CountTrace in = uniform_trace(1050, 300e-6);
    constexpr int kTrials = 100000;
    double sum = 0, sum2 = 0;
    for (int i = 0; i < kTrials; ++i) {
        const auto c = static_cast<double>(thin_events(in, 0.02, rng).count());
        sum += c;
        sum2 += c * c;
    }
    const double mean = sum / kTrials;
    const double var = sum2 / kTrials - mean * mean;
    EXPECT_NEAR(mean, 21.0, 3.0 * std::sqrt(20.58 / kTrials));
    // Sample variance SE ~ sigma^2 sqrt(2 / n) for near-normal counts.
    EXPECT_NEAR(var, 20.58, 3.0 * 20.58 * std::sqrt(2.0 / kTrials));
}

TEST(ThinEvents, preserves_order) {
    Rng rng(3);
    const CountTrace in = poisson_trace(1e5, 1e-3, rng);
    const CountTrace out = thin_events(in, 0.3, rng);
    EXPECT_TRUE(std::is_sorted(out.event_times().begin(), out.event_times().end()));
}

TEST(ThinEvents, thinned_poisson_is_poisson) {
    Rng rng(4);
    constexpr int kTrials = 100000;
    std::vector<std::uint64_t> counts;
    for (int i = 0; i < kTrials; ++i) {
        counts.push_back(thin_events(poisson_trace(10000, 300e-6, rng), 0.1, rng).count());
    }
    const auto obs = oracle::bin_counts(counts, 8);
    const auto probs = oracle::poisson_categories(0.3, 8);
    EXPECT_GT(chi_square_p_value(obs, probs), 1e-3);
}

TEST(PoissonTrace, zero_rate_empty) {
    Rng rng(5);
    EXPECT_TRUE(poisson_trace(0, 1e-3, rng).empty());
    EXPECT_THROW(poisson_trace(-1, 1e-3, rng), std::invalid_argument);
}

TEST(PoissonTrace, dark_count_mean) {
    Rng rng(6);
    constexpr int kTrials = 1000000;
    double sum = 0;
    for (int i = 0; i < kTrials; ++i) {
        sum += static_cast<double>(poisson_trace(100, 1e-3, rng).count());
    }
    EXPECT_NEAR(sum / kTrials, 0.1, 3.0 * std::sqrt(0.1 / kTrials));
}

TEST(PoissonTrace, background_distribution) {
    Rng rng(7);
    std::vector<std::uint64_t> counts;
    for (int i = 0; i < 100000; ++i) {
        counts.push_back(poisson_trace(1000, 300e-6, rng).count());
    }
    EXPECT_GT(chi_square_p_value(oracle::bin_counts(counts, 6), oracle::poisson_categories(0.3, 6)), 1e-3);
}

TEST(MergeTraces, identities_and_errors) {
    Rng rng(8);
    const CountTrace x = poisson_trace(5e4, 1e-3, rng);
    const CountTrace empty(1e-3);
    EXPECT_EQ(merge_traces(x, empty), x);
    EXPECT_EQ(merge_traces(empty, empty), empty);
    EXPECT_THROW(merge_traces(x, CountTrace(2e-3)), std::invalid_argument);
}

TEST(MergeTraces, commutative_and_associative) {
    Rng rng(9);
    for (int i = 0; i < 200; ++i) {
        const CountTrace a = poisson_trace(3e4, 1e-3, rng);
        const CountTrace b = poisson_trace(1e4, 1e-3, rng);
        const CountTrace c = poisson_trace(2e4, 1e-3, rng);
        EXPECT_EQ(merge_traces(a, b), merge_traces(b, a));
        EXPECT_EQ(merge_traces(merge_traces(a, b), c), merge_traces(a, merge_traces(b, c)));
        EXPECT_EQ(merge_traces(a, b).count(), a.count() + b.count());
    }
}

TEST(MergeTraces, superposition_is_poisson) {
    Rng rng(10);
    std::vector<std::uint64_t> counts;
    for (int i = 0; i < 100000; ++i) {
        counts.push_back(merge_traces(poisson_trace(1000, 1e-3, rng), poisson_trace(2500, 1e-3, rng)).count());
    }
    EXPECT_GT(chi_square_p_value(oracle::bin_counts(counts, 12), oracle::poisson_categories(3.5, 12)), 1e-3);
}

TEST(PoissonTail, frozen_values) {
    EXPECT_EQ(poisson_tail_at_least(0, 3.0), 1.0);
    EXPECT_EQ(poisson_tail_at_least(0, 0.0), 1.0);
    EXPECT_EQ(poisson_tail_at_least(2, 0.0), 0.0);
    EXPECT_NEAR(poisson_tail_at_least(2, 0.1), 4.67884016044447e-3, 1e-12 * 4.68e-3);
    EXPECT_NEAR(poisson_tail_at_least(2, 0.3), 3.69363131137668e-2, 1e-12 * 3.69e-2);
    EXPECT_NEAR(poisson_tail_at_least(1, 0.3), 0.259181779318282, 1e-12 * 0.26);
}

TEST(PoissonTail, agrees_with_incomplete_gamma) {
    for (double mean : {1e-4, 0.01, 0.1, 0.3, 1.0, 2.5, 10.0, 40.0}) {
        for (std::uint64_t k = 0; k < 60; ++k) {
            const double expect = oracle::poisson_tail_gamma(k, mean);
            if (expect < 1e-250) {
                continue;
            }
            EXPECT_NEAR(poisson_tail_at_least(k, mean), expect, 1e-12 * expect) << "k=" << k << " mean=" << mean;
        }
    }
}

TEST(PoissonTail, monotone_and_complementary) {
    for (double mean : {0.05, 0.3, 2.0, 8.0}) {
        double prev = 1.0;
        double head = 0.0;
        for (std::uint64_t k = 0; k < 30; ++k) {
            const double tail = poisson_tail_at_least(k, mean);
            EXPECT_LE(tail, prev);
            prev = tail;
            EXPECT_NEAR(tail + head, 1.0, 1e-12);
            head += poisson_pmf(k, mean);
        }
    }
    for (std::uint64_t k : {1u, 2u, 5u}) {
        double prev = 0.0;
        for (double mean = 0.0; mean < 10.0; mean += 0.1) {
            const double tail = poisson_tail_at_least(k, mean);
            EXPECT_GE(tail, prev);
            prev = tail;
        }
    }
}
