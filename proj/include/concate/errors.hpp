// Copyright 2026 The concate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CONCATE_ERRORS_HPP_
#define CONCATE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace concate {

// Exit codes are part of the CLI contract; every library error maps onto one.
enum class ExitCode : int {
  kOk = 0,
  kValidation = 2,
  kData = 3,
  kDegenerate = 4,
};

class Error : public std::runtime_error {
 public:
  Error(const std::string& what, ExitCode code)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

// Bad arguments or configuration: alpha outside (0,1), unparsable grid, ...
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(what, ExitCode::kValidation) {}
};

// Input data that cannot be read or violates the data invariants.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(what, ExitCode::kData) {}
  DataError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what, ExitCode::kData),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_ = 0;
};

// A statistic that cannot be formed from the sample, most often an empty arm.
class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& what)
      : Error(what, ExitCode::kDegenerate) {}
};

// Raised by solvers that fail to bracket or converge.
class ConfigurationError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace concate

#endif  // CONCATE_ERRORS_HPP_
