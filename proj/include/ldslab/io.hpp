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

#ifndef LDSLAB_IO_HPP
#define LDSLAB_IO_HPP

#include <string>

#include <json.hpp>

#include "ldslab/learner.hpp"
#include "ldslab/lds.hpp"

namespace ldslab {

using Json = nlohmann::ordered_json;

/// Writes `content` to a sibling temporary file and renames it over `path`.
void atomic_write(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// Row-major nested arrays; a 0 x c matrix is written as [].
Json matrix_to_json(const MatrixXd& m);
MatrixXd matrix_from_json(const Json& j, const std::string& what, Index cols_if_empty = 0);

/// Keys "m", "n", "p", "k", "weights", "components" (each with "A", "B",
/// "C", "D").
Json mixture_to_json(const MixtureSpec& mix);
/// Throws ErrorCode::kData on malformed documents. Extra keys are ignored, so
/// learned-model files can be read as mixtures.
MixtureSpec mixture_from_json(const Json& j);

void write_mixture(const std::string& path, const MixtureSpec& mix);
MixtureSpec read_mixture(const std::string& path);

/// Mixture keys plus "s" and a "diagnostics" object. Contains nothing that
/// depends on wall time or thread count.
Json learned_to_json(const LearnedMixture& learned);
void write_learned(const std::string& path, const LearnedMixture& learned);

/// One {"label": int|null, "u": [[...]], "y": [[...]]} object per line.
std::string dataset_to_jsonl(const Dataset& data);
Dataset dataset_from_jsonl(const std::string& text, const std::string& source = "dataset");
void write_dataset(const std::string& path, const Dataset& data);
Dataset read_dataset(const std::string& path);

}  // namespace ldslab

#endif  // LDSLAB_IO_HPP
