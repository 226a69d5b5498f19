/*
   Copyright 2026 The ffuniv Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#ifndef FFUNIV_RUNNER_HPP
#define FFUNIV_RUNNER_HPP

#include <string>
#include <vector>

#include "ffuniv/config.hpp"

namespace ffuniv {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;  // an invariant failed or a computation could not be certified
inline constexpr int kExitUsage = 2;      // bad config, bad parameters, capacity

struct RunResult {
    int exit_code = kExitOk;
    /// One-line summary on success, the diagnostic otherwise.
    std::string message;
    /// Files written, relative to the output directory, meta.json last.
    std::vector<std::string> files;
};

/// primes, phi, lpoly, rhsweep, hybrid, peak, mvg, mvh, mvtail, counting,
/// fit, sieve, search, guided, splitgb.
const std::vector<std::string>& commands();

/// One-line description of a command, empty for unknown names.
const std::string& command_summary(const std::string& command);

/// Runs a command and writes its outputs under out_dir (created if needed).
/// Result files depend only on the config; timing goes to meta.json.
/// Never throws for library errors: they become exit codes.
RunResult run(const std::string& command, const ExperimentConfig& cfg, const std::string& out_dir);

}  // namespace ffuniv

#endif  // FFUNIV_RUNNER_HPP
