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

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>

#include "qread/text_format.h"

namespace qread {

std::string_view to_string(Experiment e) {
    switch (e) {
        case Experiment::Histogram:
            return "histogram";
        case Experiment::Survival:
            return "survival";
        case Experiment::Rabi:
            return "rabi";
        case Experiment::Budget:
            return "budget";
    }
    return "?";
}

std::string_view to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

ConfigError::ConfigError(int line, std::string key, const std::string& message)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                         (key.empty() ? std::string() : "'" + key + "': ") + message),
      line_(line),
      key_(std::move(key)) {}

RabiConfig RunConfig::rabi() const {
    RabiConfig r;
    r.rabi_frequency = rabi_frequency;
    r.decoherence_time = rabi_decoherence_time;
    r.pulse_lengths = RabiConfig::uniform_grid(rabi_points, rabi_span);
    return r;
}

RunConfig default_config(std::string_view profile) {
    if (profile != "paper-2010") {
        throw ConfigError(0, "run.profile", "unknown profile '" + std::string(profile) + "'");
    }
    RunConfig c;
    c.cycle.species = SpeciesConstants::rb87_d2();
    c.cycle.probe = ProbeConfig{};
    c.cycle.detector = DetectorConfig{};
    c.cycle.policy = ReadoutPolicy{PolicyKind::AdaptiveStop, 2, c.cycle.probe.max_probe_duration};
    // Hazard calibrated so the race formula gives the measured 5.5% F=2 error.
    c.cycle.hazard = calibrate_depump(0.055, c.cycle.detector.net_efficiency, c.cycle.policy.threshold_counts);
    c.cycle.trap = TrapConfig{};
    c.cycle.loss = LossModel{};
    c.cycle.cooling = CoolingConfig{};
    c.cycle.prep_duration = 10e-3;
    return c;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_real(std::string_view v) {
    const std::string s(v);
    errno = 0;
    char* end = nullptr;
    const double d = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(d)) {
        throw std::invalid_argument("expected a finite real number, got '" + s + "'");
    }
    return d;
}

std::uint64_t parse_count(std::string_view v) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
        throw std::invalid_argument("expected a non-negative integer, got '" + std::string(v) + "'");
    }
    return out;
}

bool parse_bool(std::string_view v) {
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no") {
        return false;
    }
    throw std::invalid_argument("expected true or false, got '" + std::string(v) + "'");
}

struct Range {
    double lo;
    double hi;
    bool lo_open;
    bool hi_open;
};

constexpr double kBig = std::numeric_limits<double>::max();
constexpr Range kPositive{0, kBig, true, false};
constexpr Range kNonNegative{0, kBig, false, false};
constexpr Range kProbability{0, 1, false, false};
constexpr Range kOpenProbability{0, 1, false, true};
constexpr Range kAnyReal{-kBig, kBig, false, false};

void check_range(double v, const Range& r) {
    const bool lo_ok = r.lo_open ? v > r.lo : v >= r.lo;
    const bool hi_ok = r.hi_open ? v < r.hi : v <= r.hi;
    if (!lo_ok || !hi_ok) {
        std::ostringstream os;
        os << "value " << format_real(v) << " outside " << (r.lo_open ? "(" : "[")
           << (r.lo == -kBig ? "-inf" : format_real(r.lo)) << ", " << (r.hi == kBig ? "inf" : format_real(r.hi))
           << (r.hi_open ? ")" : "]");
        throw std::invalid_argument(os.str());
    }
}

struct Entry {
    std::string key;
    std::string description;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, std::string_view)> set;
};

template <class Access>
Entry real_entry(std::string key, std::string description, Access access, Range range) {
    return {std::move(key), std::move(description),
            [access](const RunConfig& c) { return format_real(access(const_cast<RunConfig&>(c))); },
            [access, range](RunConfig& c, std::string_view v) {
                const double d = parse_real(v);
                check_range(d, range);
                access(c) = d;
            }};
}

template <class Access>
Entry count_entry(std::string key, std::string description, Access access, std::uint64_t lo, std::uint64_t hi) {
    return {std::move(key), std::move(description),
            [access](const RunConfig& c) { return std::to_string(access(const_cast<RunConfig&>(c))); },
            [access, lo, hi](RunConfig& c, std::string_view v) {
                const std::uint64_t n = parse_count(v);
                if (n < lo || n > hi) {
                    throw std::invalid_argument("value " + std::to_string(n) + " outside [" + std::to_string(lo) +
                                                ", " + std::to_string(hi) + "]");
                }
                access(c) = static_cast<std::remove_reference_t<decltype(access(c))>>(n);
            }};
}

template <class Access>
Entry bool_entry(std::string key, std::string description, Access access) {
    return {std::move(key), std::move(description),
            [access](const RunConfig& c) { return std::string(access(const_cast<RunConfig&>(c)) ? "true" : "false"); },
            [access](RunConfig& c, std::string_view v) { access(c) = parse_bool(v); }};
}

constexpr std::uint64_t kMaxTrials = 100'000'000;

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = [] {
        std::vector<Entry> t;
        t.push_back({"run.experiment", "histogram | survival | rabi | budget",
                     [](const RunConfig& c) { return std::string(to_string(c.experiment)); },
                     [](RunConfig& c, std::string_view v) {
                         for (auto e : {Experiment::Histogram, Experiment::Survival, Experiment::Rabi,
                                        Experiment::Budget}) {
                             if (v == to_string(e)) {
                                 c.experiment = e;
                                 return;
                             }
                         }
                         throw std::invalid_argument("unknown experiment '" + std::string(v) + "'");
                     }});
        t.push_back(count_entry("run.seed", "master seed (u64)", [](RunConfig& c) -> auto& { return c.master_seed; },
                                0, std::numeric_limits<std::uint64_t>::max()));
        t.push_back({"run.profile", "parameter profile; only paper-2010 exists",
                     [](const RunConfig& c) { return c.profile; },
                     [](RunConfig& c, std::string_view v) {
                         if (v != "paper-2010") {
                             throw std::invalid_argument("unknown profile '" + std::string(v) + "'");
                         }
                         c.profile = std::string(v);
                     }});
        t.push_back({"run.output", "output directory", [](const RunConfig& c) { return c.output_path; },
                     [](RunConfig& c, std::string_view v) {
                         if (v.empty()) {
                             throw std::invalid_argument("output path must not be empty");
                         }
                         c.output_path = std::string(v);
                     }});
        t.push_back({"run.format", "csv | json", [](const RunConfig& c) { return std::string(to_string(c.output_format)); },
                     [](RunConfig& c, std::string_view v) {
                         if (v == "csv") {
                             c.output_format = OutputFormat::Csv;
                         } else if (v == "json") {
                             c.output_format = OutputFormat::Json;
                         } else {
                             throw std::invalid_argument("format must be csv or json");
                         }
                     }});
        t.push_back(count_entry("run.threads", "worker threads; 0 = hardware concurrency",
                                [](RunConfig& c) -> auto& { return c.threads; }, 0, 1024));

        t.push_back(real_entry("species.linewidth", "excited-state linewidth gamma (Hz)",
                               [](RunConfig& c) -> auto& { return c.cycle.species.linewidth_gamma; }, kPositive));
        t.push_back(real_entry("species.excited_splitting", "F'=2 to F'=3 splitting (Hz)",
                               [](RunConfig& c) -> auto& { return c.cycle.species.excited_splitting_delta23; },
                               kPositive));
        t.push_back(real_entry("species.hyperfine_splitting", "ground hyperfine splitting (Hz)",
                               [](RunConfig& c) -> auto& { return c.cycle.species.hyperfine_splitting; }, kPositive));
        t.push_back(real_entry("species.recoil_temperature", "recoil temperature (K)",
                               [](RunConfig& c) -> auto& { return c.cycle.species.recoil_temperature; }, kPositive));
        t.push_back(real_entry("species.boltzmann", "Boltzmann constant (J/K)",
                               [](RunConfig& c) -> auto& { return c.cycle.species.boltzmann_energy_scale; },
                               kPositive));
        t.push_back(real_entry("species.branching_to_f1", "F'=2 -> F=1 branching ratio",
                               [](RunConfig& c) -> auto& { return c.branching_to_f1; }, kProbability));

        t.push_back(real_entry("probe.nominal_detuning", "probe detuning from F=2 -> F'=3 (Hz)",
                               [](RunConfig& c) -> auto& { return c.cycle.probe.nominal_detuning; }, kAnyReal));
        t.push_back(real_entry("probe.effective_detuning", "detuning including the trap Stark shift (Hz)",
                               [](RunConfig& c) -> auto& { return c.cycle.probe.effective_detuning; }, kAnyReal));
        t.push_back(real_entry("probe.scatter_rate", "scattering rate of a bright atom (1/s)",
                               [](RunConfig& c) -> auto& { return c.cycle.probe.scatter_rate; }, kPositive));
        t.push_back({"probe.window", "maximum probe duration (s)",
                     [](const RunConfig& c) { return format_real(c.cycle.probe.max_probe_duration); },
                     [](RunConfig& c, std::string_view v) {
                         const double d = parse_real(v);
                         check_range(d, kPositive);
                         c.cycle.probe.max_probe_duration = d;
                         c.cycle.policy.max_duration = d;
                     }});
        t.push_back(real_entry("probe.background_mean", "mean background counts per full window",
                               [](RunConfig& c) -> auto& { return c.cycle.probe.background_mean_per_window; },
                               kNonNegative));

        t.push_back(real_entry("detector.efficiency", "net collection x detection efficiency",
                               [](RunConfig& c) -> auto& { return c.cycle.detector.net_efficiency; },
                               Range{0, 1, true, false}));
        t.push_back(real_entry("detector.dark_rate", "always-on dark count rate (1/s)",
                               [](RunConfig& c) -> auto& { return c.cycle.detector.dark_rate; }, kNonNegative));

        t.push_back({"readout.policy", "adaptive | fixed",
                     [](const RunConfig& c) { return std::string(to_string(c.cycle.policy.kind)); },
                     [](RunConfig& c, std::string_view v) {
                         if (v == "adaptive") {
                             c.cycle.policy.kind = PolicyKind::AdaptiveStop;
                         } else if (v == "fixed") {
                             c.cycle.policy.kind = PolicyKind::FixedWindow;
                         } else {
                             throw std::invalid_argument("policy must be adaptive or fixed");
                         }
                     }});
        t.push_back(count_entry("readout.nd", "counts needed to declare F=2 (N_D)",
                                [](RunConfig& c) -> auto& { return c.cycle.policy.threshold_counts; }, 1, 1000));
        t.push_back(real_entry("readout.hazard", "depump probability per undetected scatter",
                               [](RunConfig& c) -> auto& { return c.cycle.hazard; }, kOpenProbability));

        t.push_back(real_entry("trap.depth", "trap depth (K)", [](RunConfig& c) -> auto& { return c.cycle.trap.depth; },
                               kPositive));
        t.push_back(real_entry("trap.baseline_energy", "motional energy after cooling (K)",
                               [](RunConfig& c) -> auto& { return c.cycle.trap.baseline_energy; }, kNonNegative));

        t.push_back(real_entry("loss.per_cycle", "background loss per cycle (survival, rabi)",
                               [](RunConfig& c) -> auto& { return c.cycle.loss.background_loss_per_cycle; },
                               kOpenProbability));
        t.push_back(real_entry("loss.heating_threshold_fraction", "loss threshold as a fraction of depth",
                               [](RunConfig& c) -> auto& { return c.cycle.loss.heating_threshold_fraction; },
                               Range{0, 1, true, false}));
        t.push_back(real_entry("loss.f1_single_shot", "background loss for F=1 histogram trials",
                               [](RunConfig& c) -> auto& { return c.loss_f1_single_shot; }, kOpenProbability));
        t.push_back(real_entry("loss.f2_single_shot", "background loss for F=2 histogram trials",
                               [](RunConfig& c) -> auto& { return c.loss_f2_single_shot; }, kOpenProbability));

        t.push_back(real_entry("cooling.duration", "cooling pulse after each cycle (s)",
                               [](RunConfig& c) -> auto& { return c.cycle.cooling.pulse_duration; }, kNonNegative));
        t.push_back(bool_entry("cooling.reset", "cooling restores the baseline energy",
                               [](RunConfig& c) -> auto& { return c.cycle.cooling.reset; }));
        t.push_back(real_entry("prep.duration", "state preparation pulse (s)",
                               [](RunConfig& c) -> auto& { return c.cycle.prep_duration; }, kNonNegative));

        t.push_back(count_entry("histogram.trials_f1", "F=1 trials",
                                [](RunConfig& c) -> auto& { return c.trials_f1; }, 1, kMaxTrials));
        t.push_back(count_entry("histogram.trials_f2", "F=2 trials",
                                [](RunConfig& c) -> auto& { return c.trials_f2; }, 1, kMaxTrials));
        t.push_back(count_entry("survival.atoms", "atoms in the repeated-cycle run",
                                [](RunConfig& c) -> auto& { return c.survival_atoms; }, 1, kMaxTrials));
        t.push_back(count_entry("survival.cycles", "cycles per atom",
                                [](RunConfig& c) -> auto& { return c.survival_cycles; }, 1, 1'000'000));

        t.push_back(real_entry("rabi.frequency", "Rabi frequency (Hz)",
                               [](RunConfig& c) -> auto& { return c.rabi_frequency; }, kPositive));
        t.push_back(real_entry("rabi.decoherence_time", "decoherence time (s)",
                               [](RunConfig& c) -> auto& { return c.rabi_decoherence_time; }, kPositive));
        t.push_back(count_entry("rabi.atoms", "atom slots in the scan",
                                [](RunConfig& c) -> auto& { return c.rabi_atoms; }, 1, kMaxTrials));
        t.push_back(count_entry("rabi.points", "pulse lengths per atom",
                                [](RunConfig& c) -> auto& { return c.rabi_points; }, 1, 100'000));
        t.push_back(real_entry("rabi.span", "longest pulse; grid is uniform from 0 (s)",
                               [](RunConfig& c) -> auto& { return c.rabi_span; }, kNonNegative));

        t.push_back(real_entry("budget.dark_window", "pulse length for the dark-count tail (s)",
                               [](RunConfig& c) -> auto& { return c.dark_window; }, kPositive));
        return t;
    }();
    return table;
}

std::string_view canonical_key(std::string_view key) {
    static const std::pair<std::string_view, std::string_view> aliases[] = {
        {"experiment", "run.experiment"}, {"seed", "run.seed"}, {"nd", "readout.nd"},
        {"format", "run.format"},         {"out", "run.output"}, {"profile", "run.profile"},
    };
    for (const auto& [alias, canonical] : aliases) {
        if (key == alias) {
            return canonical;
        }
    }
    return key;
}

}  // namespace

void apply_setting(RunConfig& config, std::string_view key, std::string_view value, int line) {
    const std::string_view canonical = canonical_key(trim(key));
    for (const auto& e : entries()) {
        if (e.key == canonical) {
            try {
                e.set(config, trim(value));
            } catch (const std::invalid_argument& ex) {
                throw ConfigError(line, e.key, ex.what());
            }
            return;
        }
    }
    throw ConfigError(line, std::string(key), "unknown key");
}

void validate(const RunConfig& config) {
    try {
        config.cycle.validate();
        config.rabi().validate();
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(0, "", ex.what());
    }
    if (config.cycle.policy.max_duration != config.cycle.probe.max_probe_duration) {
        throw ConfigError(0, "probe.window", "policy and probe windows disagree");
    }
}

RunConfig parse_config(std::string_view text, const RunConfig& base) {
    RunConfig config = base;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(line_no, std::string(line), "malformed line, expected 'key = value'");
        }
        const std::string_view key = trim(line.substr(0, eq));
        if (key.empty()) {
            throw ConfigError(line_no, "", "malformed line, missing key");
        }
        apply_setting(config, key, line.substr(eq + 1), line_no);
    }
    validate(config);
    return config;
}

std::string serialize_config(const RunConfig& config) {
    std::string out;
    for (const auto& e : entries()) {
        out += e.key;
        out += " = ";
        out += e.get(config);
        out += '\n';
    }
    return out;
}

void apply_trials(RunConfig& config, std::uint64_t trials) {
    if (trials == 0) {
        throw ConfigError(0, "--trials", "trial count must be positive");
    }
    switch (config.experiment) {
        case Experiment::Histogram:
            config.trials_f1 = trials;
            config.trials_f2 = trials;
            break;
        case Experiment::Survival:
            config.survival_atoms = trials;
            break;
        case Experiment::Rabi:
            config.rabi_atoms = trials;
            break;
        case Experiment::Budget:
            break;
    }
}

std::vector<ConfigKeyDoc> config_reference() {
    const RunConfig defaults = default_config();
    std::vector<ConfigKeyDoc> docs;
    for (const auto& e : entries()) {
        docs.push_back({e.key, e.get(defaults), e.description});
    }
    return docs;
}

std::string config_reference_markdown() {
    std::string out = "| key | default | description |\n|---|---|---|\n";
    for (const auto& d : config_reference()) {
        std::string desc;
        for (char ch : d.description) {
            if (ch == '|') {
                desc += '\\';
            }
            desc += ch;
        }
        out += "| `" + d.key + "` | `" + d.default_value + "` | " + desc + " |\n";
    }
    return out;
}

}  // namespace qread
