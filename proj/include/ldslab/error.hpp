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

#ifndef LDSLAB_ERROR_HPP
#define LDSLAB_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace ldslab {

/// Error categories; the numeric values are the CLI exit codes.
enum class ErrorCode : int {
    kUsage = 2,      ///< bad arguments, violated preconditions
    kData = 3,       ///< malformed or inconsistent input data, I/O failures
    kNumerical = 4,  ///< decomposition / solver failures
};

std::string_view error_code_name(ErrorCode code);

/// Structured error carried through every layer of the library.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    int exit_code() const noexcept { return static_cast<int>(code_); }

private:
    ErrorCode code_;
};

[[noreturn]] inline void throw_usage(const std::string& msg) {
    throw Error(ErrorCode::kUsage, msg);
}
[[noreturn]] inline void throw_data(const std::string& msg) {
    throw Error(ErrorCode::kData, msg);
}
[[noreturn]] inline void throw_numerical(const std::string& msg) {
    throw Error(ErrorCode::kNumerical, msg);
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw_usage(msg);
}

}  // namespace ldslab

#endif  // LDSLAB_ERROR_HPP
