// Copyright 2026 The lppf Authors
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

#ifndef LPPF_ERRORS_HPP_
#define LPPF_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace lppf {

// Invalid distribution or mechanism parameters (alpha outside (0,1),
// negative rates, probabilities outside [0,1], ...).
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed input file; carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, long line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  explicit ParseError(const std::string& what)
      : std::runtime_error(what), line_(-1) {}
  long line() const { return line_; }

 private:
  long line_;
};

// Refusal to materialize a dense matrix above the configured cell budget.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// Incompatible run configuration (mode/data mismatch, bad flag combination).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite value produced by a sampler or update; carries the iteration.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, long long iteration)
      : std::runtime_error(what + " at iteration " +
                           std::to_string(iteration)),
        iteration_(iteration) {}
  long long iteration() const { return iteration_; }

 private:
  long long iteration_;
};

// Enumeration window does not capture enough output mass.
class CoverageError : public std::runtime_error {
 public:
  explicit CoverageError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lppf

#endif  // LPPF_ERRORS_HPP_
