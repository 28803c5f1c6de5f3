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


#include "qread/run_config.h"

#include <string>

#include "gtest/gtest.h"

using namespace qread;

TEST(RunConfig, empty_file_gives_defaults) {
    const RunConfig c = parse_config("");
    EXPECT_EQ(c.cycle.detector.net_efficiency, 0.02);
    EXPECT_EQ(c.cycle.probe.scatter_rate, 3.5e6);
    EXPECT_NEAR(c.cycle.hazard, 5.86e-4, 0.01 * 5.86e-4);
    EXPECT_EQ(c.cycle.policy.threshold_counts, 2u);
    EXPECT_EQ(c.cycle.policy.kind, PolicyKind::AdaptiveStop);
    EXPECT_EQ(c.cycle.policy.max_duration, 300e-6);
    EXPECT_EQ(c.cycle.probe.background_mean_per_window, 0.3);
    EXPECT_EQ(c.cycle.loss.background_loss_per_cycle, 0.012);
    EXPECT_EQ(c.rabi_frequency, 2950.0);
    EXPECT_EQ(c.rabi_decoherence_time, 2.2e-3);
    EXPECT_EQ(c.master_seed, 2010u);
    EXPECT_EQ(serialize_config(c), serialize_config(default_config()));
}

TEST(RunConfig, comments_and_whitespace) {
    const RunConfig c = parse_config("# header\n\n  detector.efficiency = 0.05   # inline\nrun.seed=7\n");
    EXPECT_EQ(c.cycle.detector.net_efficiency, 0.05);
    EXPECT_EQ(c.master_seed, 7u);
}

TEST(RunConfig, range_error_names_key) {
    try {
        parse_config("detector.efficiency = 1.5\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "detector.efficiency");
        EXPECT_EQ(e.line(), 1);
        EXPECT_NE(std::string(e.what()).find("detector.efficiency"), std::string::npos);
    }
}

TEST(RunConfig, unknown_key_rejected) {
    try {
        parse_config("run.seed = 1\ndetector.efficency = 0.1\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "detector.efficency");
        EXPECT_EQ(e.line(), 2);
    }
}

TEST(RunConfig, malformed_line_reports_line) {
    try {
        parse_config("run.seed = 1\n\nthis line has no separator\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 3);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
}

TEST(RunConfig, bad_values) {
    EXPECT_THROW(parse_config("run.seed = -1\n"), ConfigError);
    EXPECT_THROW(parse_config("run.seed = 12abc\n"), ConfigError);
    EXPECT_THROW(parse_config("readout.nd = 0\n"), ConfigError);
    EXPECT_THROW(parse_config("run.format = xml\n"), ConfigError);
    EXPECT_THROW(parse_config("run.experiment = movie\n"), ConfigError);
    EXPECT_THROW(parse_config("readout.policy = sometimes\n"), ConfigError);
    EXPECT_THROW(parse_config("cooling.reset = maybe\n"), ConfigError);
    EXPECT_THROW(parse_config("loss.per_cycle = 1\n"), ConfigError);
    EXPECT_THROW(default_config("paper-2099"), ConfigError);
}

TEST(RunConfig, override_precedence) {
    RunConfig c = parse_config("nd = 2\n");
    EXPECT_EQ(c.cycle.policy.threshold_counts, 2u);
    apply_setting(c, "readout.nd", "3");
    validate(c);
    EXPECT_EQ(c.cycle.policy.threshold_counts, 3u);
}

TEST(RunConfig, aliases) {
    const RunConfig c = parse_config("experiment = survival\nseed = 99\nformat = json\nout = x\n");
    EXPECT_EQ(c.experiment, Experiment::Survival);
    EXPECT_EQ(c.master_seed, 99u);
    EXPECT_EQ(c.output_format, OutputFormat::Json);
    EXPECT_EQ(c.output_path, "x");
}

TEST(RunConfig, round_trip_identity) {
    RunConfig c = default_config();
    apply_setting(c, "detector.efficiency", "0.0312345678901234");
    apply_setting(c, "readout.policy", "fixed");
    apply_setting(c, "rabi.span", "3e-3");
    apply_setting(c, "run.experiment", "rabi");
    apply_setting(c, "cooling.reset", "false");
    const std::string once = serialize_config(c);
    const std::string twice = serialize_config(parse_config(once));
    EXPECT_EQ(once, twice);
    EXPECT_EQ(parse_config(once).cycle.detector.net_efficiency, 0.0312345678901234);
}

TEST(RunConfig, window_sets_policy_duration) {
    const RunConfig c = parse_config("probe.window = 1e-4\n");
    EXPECT_EQ(c.cycle.policy.max_duration, 1e-4);
    EXPECT_EQ(c.cycle.probe.max_probe_duration, 1e-4);
}

TEST(RunConfig, trials_flag_targets_experiment) {
    RunConfig c = default_config();
    c.experiment = Experiment::Histogram;
    apply_trials(c, 500);
    EXPECT_EQ(c.trials_f1, 500u);
    EXPECT_EQ(c.trials_f2, 500u);
}

TEST(RunConfig, reference_covers_every_key) {
    const auto ref = config_reference();
    const std::string text = serialize_config(default_config());
    for (const auto& doc : ref) {
        EXPECT_NE(text.find(doc.key + " = "), std::string::npos) << doc.key;
        EXPECT_FALSE(doc.description.empty()) << doc.key;
    }
    EXPECT_NE(config_reference_markdown().find("detector.efficiency"), std::string::npos);
}
