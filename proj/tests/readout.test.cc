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
#include <stdexcept>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.h"

using namespace qread;

namespace {

ReadoutPolicy fixed(std::uint32_t threshold) {
    return {PolicyKind::FixedWindow, threshold, 300e-6};
}

ReadoutPolicy adaptive(std::uint32_t n_d, double window = 300e-6) {
    return {PolicyKind::AdaptiveStop, n_d, window};
}

}  // namespace

TEST(Readout, classify_fixed) {
    EXPECT_EQ(classify_fixed(0, fixed(2)), Hyperfine::F1);
    EXPECT_EQ(classify_fixed(1, fixed(2)), Hyperfine::F1);
    EXPECT_EQ(classify_fixed(2, fixed(2)), Hyperfine::F2);
    EXPECT_EQ(classify_fixed(21, fixed(2)), Hyperfine::F2);
    EXPECT_THROW(classify_fixed(3, adaptive(2)), std::invalid_argument);
    EXPECT_THROW(classify_fixed(3, fixed(0)), std::invalid_argument);
}

TEST(Readout, adaptive_stops_at_second_count) {
    const CountTrace trace(300e-6, {10e-6, 25e-6, 200e-6});
    TraceSource src(trace);
    const ReadoutOutcome out = run_adaptive(src, adaptive(2));
    EXPECT_EQ(out.classified, Hyperfine::F2);
    EXPECT_EQ(out.detected_counts, 2u);
    EXPECT_DOUBLE_EQ(out.elapsed, 25e-6);
}

TEST(Readout, adaptive_times_out) {
    const CountTrace trace(300e-6, {150e-6});
    TraceSource src(trace);
    const ReadoutOutcome out = run_adaptive(src, adaptive(2));
    EXPECT_EQ(out.classified, Hyperfine::F1);
    EXPECT_EQ(out.detected_counts, 1u);
    EXPECT_DOUBLE_EQ(out.elapsed, 300e-6);
}

TEST(Readout, adaptive_ignores_events_past_budget) {
    const CountTrace trace(1e-3, {100e-6, 400e-6});
    TraceSource src(trace);
    const ReadoutOutcome out = run_adaptive(src, adaptive(2));
    EXPECT_EQ(out.classified, Hyperfine::F1);
    EXPECT_EQ(out.detected_counts, 1u);
}

TEST(Readout, fixed_counts_whole_window) {
    const CountTrace trace(300e-6, {10e-6, 25e-6, 200e-6});
    TraceSource src(trace);
    const ReadoutOutcome out = run_fixed(src, fixed(2));
    EXPECT_EQ(out.detected_counts, 3u);
    EXPECT_EQ(out.classified, Hyperfine::F2);
    EXPECT_DOUBLE_EQ(out.elapsed, 300e-6);
    TraceSource src2(trace);
    EXPECT_THROW(run_fixed(src2, adaptive(2)), std::invalid_argument);
    EXPECT_THROW(run_adaptive(src2, fixed(2)), std::invalid_argument);
}

TEST(Readout, mean_stop_time_is_erlang) {
    Rng rng(12);
    FluorescenceParams p;
    p.scatter_rate = 3.5e6;
    p.efficiency = 0.02;
    p.hazard = 0.0;
    p.background_rate = 0.0;
    p.window = 300e-6;
    constexpr int kTrials = 20000;
    double sum = 0;
    for (int i = 0; i < kTrials; ++i) {
        FluorescenceSource src(p, true, rng);
        sum += run_adaptive(src, adaptive(2)).elapsed;
    }
    EXPECT_NEAR(sum / kTrials, 28.6e-6, 0.05 * 28.6e-6);
    EXPECT_NEAR(sum / kTrials, 2.0 / 70000.0, 3.0 * std::sqrt(2.0) / 70000.0 / std::sqrt(kTrials));
}

TEST(Readout, dark_source_emits_only_background) {
    Rng rng(13);
    FluorescenceParams p;
    p.background_rate = 0.0;
    FluorescenceSource src(p, false, rng);
    EXPECT_FALSE(src.next_detection().has_value());
    EXPECT_EQ(src.scatters(), 0u);
}

TEST(Readout, analytic_f1_error) {
    EXPECT_NEAR(analytic_f1_error(adaptive(2), 0.3), 3.69363131137668e-2, 1e-14);
    EXPECT_NEAR(analytic_f1_error(fixed(1), 0.3), 0.259181779318282, 1e-14);
}

TEST(Readout, analytic_f2_limits) {
    EXPECT_EQ(analytic_f2_error(0.02, 0.0, 2), 0.0);
    EXPECT_NEAR(analytic_f2_error(0.02, 5.86e-4, 2), 0.0550459, 1e-6);
    EXPECT_NEAR(analytic_f2_error(0.02, 6.35988e-5, 2), 0.00620367, 1e-7);
    EXPECT_THROW(analytic_f2_error(0.0, 1e-4, 2), std::invalid_argument);
    EXPECT_THROW(analytic_f2_error(0.02, 1e-4, 0), std::invalid_argument);
    EXPECT_THROW(analytic_f2_error(0.02, 1.0, 2), std::invalid_argument);
}

TEST(Readout, analytic_f2_matches_markov_chain) {
    for (double eta : {0.01, 0.02, 0.05}) {
        for (double q : {1e-4, 6e-4, 2e-3}) {
            for (std::uint32_t n_d : {1u, 2u, 3u}) {
                EXPECT_NEAR(analytic_f2_error(eta, q, n_d), oracle::f2_error_markov(eta, q, n_d), 1e-6)
                    << eta << " " << q << " " << n_d;
            }
        }
    }
}

TEST(Readout, analytic_f2_monotone) {
    double prev = 0;
    for (double q = 0; q < 5e-3; q += 1e-4) {
        const double e = analytic_f2_error(0.02, q, 2);
        EXPECT_GE(e, prev);
        prev = e;
    }
    for (std::uint32_t n = 1; n < 10; ++n) {
        EXPECT_LT(analytic_f2_error(0.02, 6e-4, n), analytic_f2_error(0.02, 6e-4, n + 1));
    }
    prev = 1;
    for (double eta = 0.005; eta < 0.5; eta += 0.005) {
        const double e = analytic_f2_error(eta, 6e-4, 2);
        EXPECT_LE(e, prev);
        prev = e;
    }
}

TEST(Readout, calibrate_depump) {
    EXPECT_NEAR(calibrate_depump(0.055, 0.02, 2), 5.854897907608e-4, 1e-15);
    EXPECT_EQ(calibrate_depump(0.0, 0.02, 2), 0.0);
    EXPECT_THROW(calibrate_depump(0.055, 1.0, 2), std::invalid_argument);
    EXPECT_THROW(calibrate_depump(0.99, 0.5, 1), std::invalid_argument);
    for (double target : {1e-4, 0.01, 0.055, 0.2}) {
        for (std::uint32_t n_d : {1u, 2u, 3u}) {
            const double q = calibrate_depump(target, 0.02, n_d);
            EXPECT_NEAR(analytic_f2_error(0.02, q, n_d), target, 1e-12);
        }
    }
}

TEST(Readout, monte_carlo_matches_race_model) {
    constexpr int kTrials = 100000;
    Rng rng = derive_substream(2010, {90});
    for (double eta : {0.01, 0.02, 0.05}) {
        for (double q : {1e-4, 6e-4, 2e-3}) {
            for (std::uint32_t n_d : {1u, 2u, 3u}) {
                FluorescenceParams p;
                p.scatter_rate = 3.5e6;
                p.efficiency = eta;
                p.hazard = q;
                p.background_rate = 0.0;
                p.window = 3e-3;
                std::uint64_t errors = 0;
                for (int i = 0; i < kTrials; ++i) {
                    FluorescenceSource src(p, true, rng);
                    errors += run_adaptive(src, adaptive(n_d, 3e-3)).classified == Hyperfine::F1 ? 1 : 0;
                }
                const double expect = analytic_f2_error(eta, q, n_d);
                const double se = std::sqrt(expect * (1 - expect) / kTrials);
                EXPECT_NEAR(static_cast<double>(errors) / kTrials, expect, 3.0 * se)
                    << eta << " " << q << " " << n_d;
            }
        }
    }
}

TEST(Readout, adaptive_and_fixed_agree_on_same_trace) {
    Rng rng(14);
    for (int i = 0; i < 10000; ++i) {
        const double rate = uniform01(rng) < 0.5 ? 1000.0 : 70000.0;
        const CountTrace trace = poisson_trace(rate, 300e-6, rng);
        TraceSource a(trace);
        TraceSource b(trace);
        ASSERT_EQ(run_adaptive(a, adaptive(2)).classified, run_fixed(b, fixed(2)).classified);
    }
}

TEST(Readout, background_false_bright_rate) {
    Rng rng(15);
    FluorescenceParams p;
    p.background_rate = 1000.0;
    constexpr int kTrials = 200000;
    std::uint64_t errors = 0;
    for (int i = 0; i < kTrials; ++i) {
        FluorescenceSource src(p, false, rng);
        errors += run_adaptive(src, adaptive(2)).classified == Hyperfine::F2 ? 1 : 0;
    }
    const double expect = 3.69363131137668e-2;
    EXPECT_NEAR(static_cast<double>(errors) / kTrials, expect, 3.0 * std::sqrt(expect * (1 - expect) / kTrials));
}
