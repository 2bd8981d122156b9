/*
 Copyright 2026 The ldslab Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef LDSLAB_CLI_HPP
#define LDSLAB_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ldslab/io.hpp"

namespace ldslab {

/// Every knob of the command-line tool. The JSON form (see run_config_to_json)
/// uses the field names below and doubles as the --config file schema.
struct RunConfig {
    std::string mode;  // generate | learn | evaluate | cluster | validate | sweep

    std::string mixture;   // input ground-truth mixture (generate, sweep)
    std::string truth;     // generate: truth output; evaluate: truth input
    std::string dataset;   // JSONL dataset
    std::string model;     // learned model file
    std::string manifest;  // learn: defaults to <model>.manifest.json
    std::string output;    // CSV report; a JSON mirror is written next to it

    int k = 2;
    int n = 2;
    int m = 2;  // used only when generate draws a random truth
    int p = 2;
    int s = 2;
    std::size_t length = 18;
    std::size_t samples = 20000;
    std::uint64_t seed = 0;
    double noise_scale = 1.0;
    double spectral_radius = 0.7;

    double pairing_tol = 0.1;
    double imag_tol = 1e-6;
    int attempts = kDefaultJennrichAttempts;
    bool symmetrize = true;

    double kappa = 10.0;
    double w_min = 0.05;
    double gamma = 0.5;

    std::vector<std::size_t> grid;
    int sweep_seeds = 1;

    /// Throws ErrorCode::kUsage on non-positive counts or unknown mode.
    void validate() const;
    LearnConfig learn_config() const;
};

Json run_config_to_json(const RunConfig& cfg);
/// Overlays the keys present in `j` onto `cfg`. Unknown keys are usage errors.
void apply_run_config_json(RunConfig& cfg, const Json& j);

/// Path of the JSON mirror for a CSV report: "x.csv" -> "x.json", otherwise
/// ".json" is appended.
std::string json_mirror_path(const std::string& csv_path);

std::string version_string();

void cmd_generate(const RunConfig& cfg, std::ostream& out);
void cmd_learn(const RunConfig& cfg, std::ostream& out);
void cmd_evaluate(const RunConfig& cfg, std::ostream& out);
void cmd_cluster(const RunConfig& cfg, std::ostream& out);
void cmd_validate(const RunConfig& cfg, std::ostream& out);
void cmd_sweep(const RunConfig& cfg, std::ostream& out);

/// Parses arguments, dispatches and maps errors to exit codes. On failure the
/// last line written to `err` is
///   error code=<usage|data|numerical> exit=<2|3|4> message="..."
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ldslab

#endif  // LDSLAB_CLI_HPP
