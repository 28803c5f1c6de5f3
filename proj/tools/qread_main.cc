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

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qread/run_config.h"
#include "qread/runner.h"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw qread::ConfigError(0, "--config", "cannot read " + path);
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator and error budget for nondestructive single-atom fluorescence readout"};

    std::string experiment;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::string out;
    std::string format;
    std::string profile = "paper-2010";
    std::optional<std::uint64_t> nd;
    std::optional<unsigned> threads;
    std::vector<std::string> sets;
    bool print_config = false;
    bool print_reference = false;

    app.add_option("--experiment", experiment, "histogram | survival | rabi | budget");
    app.add_option("--config", config_path, "config file with 'section.key = value' lines");
    app.add_option("--seed", seed, "master seed (u64)");
    app.add_option("--trials", trials, "trial count for the selected experiment");
    app.add_option("--out", out, "output directory");
    app.add_option("--format", format, "csv | json");
    app.add_option("--profile", profile, "parameter profile")->default_val("paper-2010");
    app.add_option("--nd", nd, "counts needed to declare F=2");
    app.add_option("--threads", threads, "worker threads (0 = all cores)");
    app.add_option("--set", sets, "override any config key: key=value (repeatable)");
    app.add_flag("--print-config", print_config, "print the effective config and exit");
    app.add_flag("--reference", print_reference, "print the config key reference (markdown) and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? qread::kExitOk : qread::kExitConfigError;
    }

    if (print_reference) {
        std::cout << qread::config_reference_markdown();
        return qread::kExitOk;
    }

    qread::RunConfig config;
    try {
        config = qread::default_config(profile);
        if (!config_path.empty()) {
            config = qread::parse_config(read_file(config_path), config);
        }
        // Command-line flags take precedence over the file.
        if (!experiment.empty()) {
            qread::apply_setting(config, "run.experiment", experiment);
        }
        if (seed) {
            config.master_seed = *seed;
        }
        if (!out.empty()) {
            qread::apply_setting(config, "run.output", out);
        }
        if (!format.empty()) {
            qread::apply_setting(config, "run.format", format);
        }
        if (nd) {
            qread::apply_setting(config, "readout.nd", std::to_string(*nd));
        }
        if (threads) {
            qread::apply_setting(config, "run.threads", std::to_string(*threads));
        }
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) {
                throw qread::ConfigError(0, s, "--set expects key=value");
            }
            qread::apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
        }
        if (trials) {
            qread::apply_trials(config, *trials);
        }
        qread::validate(config);
    } catch (const qread::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return qread::kExitConfigError;
    }

    if (print_config) {
        std::cout << qread::serialize_config(config);
        return qread::kExitOk;
    }

    try {
        qread::run(config, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return qread::kExitRuntimeError;
    }
    return qread::kExitOk;
}
