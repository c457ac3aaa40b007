// Copyright 2026 The zigp Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace zigp {

/// Base of every error raised by the library. `module()` names the
/// component that raised it; the CLI prefixes messages with it.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

/// Shape or dimension mismatch between arguments.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Factorization failure or a non-finite quantity.
class NumericalError : public Error {
 public:
  NumericalError(std::string module, const std::string& what,
                 double last_jitter = 0.0)
      : Error(std::move(module), what), last_jitter_(last_jitter) {}

  double last_jitter() const noexcept { return last_jitter_; }

 private:
  double last_jitter_;
};

/// File or parse failure.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Bad flags or configuration values.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace zigp
