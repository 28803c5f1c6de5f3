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

#ifndef QREAD_RUNNER_H
#define QREAD_RUNNER_H

#include <ostream>
#include <string>
#include <vector>

#include "qread/run_config.h"
#include "qread/text_format.h"

namespace qread {

inline constexpr const char* kArtifactVersion = "1.0.0";

enum ExitCode : int { kExitOk = 0, kExitConfigError = 2, kExitRuntimeError = 3 };

struct NamedTable {
    /// File stem; the extension follows the output format.
    std::string name;
    Table table;
};

/// In-memory result of one experiment. Deterministic in (config, seed).
struct RunResults {
    std::vector<NamedTable> tables;
    Summary summary;
    /// Fits that did not converge; reported, not fatal.
    std::vector<std::string> warnings;
};

RunResults execute(const RunConfig& config);

/// Analytic error budget. Uses no randomness.
Summary budget_report(const RunConfig& config);

struct WrittenRun {
    std::vector<std::string> files;
    std::string manifest_path;
};

/// Executes the experiment and writes tables, `<experiment>_summary` and
/// `manifest.json` into config.output_path. Throws on I/O failure.
WrittenRun run(const RunConfig& config, std::ostream& log);

}  // namespace qread

#endif  // QREAD_RUNNER_H
