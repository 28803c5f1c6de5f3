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

#ifndef QREAD_RUN_CONFIG_H
#define QREAD_RUN_CONFIG_H

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qread/experiments.h"

namespace qread {

enum class Experiment : std::uint8_t { Histogram, Survival, Rabi, Budget };
enum class OutputFormat : std::uint8_t { Csv, Json };

std::string_view to_string(Experiment e);
std::string_view to_string(OutputFormat f);

/// Raised for malformed lines, unknown keys and out-of-range values.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(int line, std::string key, const std::string& message);

    /// 1-based line in the config text, 0 for command-line settings.
    int line() const { return line_; }
    const std::string& key() const { return key_; }

  private:
    int line_;
    std::string key_;
};

struct RunConfig {
    Experiment experiment = Experiment::Histogram;
    std::uint64_t master_seed = 2010;
    std::string profile = "paper-2010";
    std::string output_path = "results";
    OutputFormat output_format = OutputFormat::Csv;
    unsigned threads = 1;

    CycleConfig cycle;
    double branching_to_f1 = 0.5;

    /// Background loss for the single-shot histogram reproduction.
    double loss_f1_single_shot = 0.009;
    double loss_f2_single_shot = 0.0105;

    std::uint64_t trials_f1 = 1684;
    std::uint64_t trials_f2 = 2127;
    std::uint64_t survival_atoms = 102;
    std::uint64_t survival_cycles = 100;

    double rabi_frequency = 2950.0;
    double rabi_decoherence_time = 2.2e-3;
    std::uint64_t rabi_atoms = 312;
    std::uint64_t rabi_points = 50;
    double rabi_span = 680e-6;

    /// Pulse length used for the dark-count false-positive estimate.
    double dark_window = 1e-3;

    RabiConfig rabi() const;
};

/// Default profile. The only profile is "paper-2010".
RunConfig default_config(std::string_view profile = "paper-2010");

/// Parses `section.key = value` lines with `#` comments on top of `base`.
RunConfig parse_config(std::string_view text, const RunConfig& base = default_config());

/// Applies one setting; `key` may be an alias. Validates the value's range.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value, int line = 0);

/// Cross-field checks; throws ConfigError.
void validate(const RunConfig& config);

/// Canonical text form: every key, one per line, in reference order.
std::string serialize_config(const RunConfig& config);

/// Applies the --trials shorthand to the counts of the selected experiment.
void apply_trials(RunConfig& config, std::uint64_t trials);

struct ConfigKeyDoc {
    std::string key;
    std::string default_value;
    std::string description;
};

/// Every accepted key with its default-profile value.
std::vector<ConfigKeyDoc> config_reference();

/// Markdown rendering of config_reference().
std::string config_reference_markdown();

}  // namespace qread

#endif  // QREAD_RUN_CONFIG_H
