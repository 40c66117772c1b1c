// Copyright 2026 The sgp Authors.
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

#ifndef SGP_ERRORS_HPP_
#define SGP_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace sgp {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Operation is not defined for this input class (e.g. irregular law,
// unsupported model/mode pair).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// A type invariant failed during validation. `constraint()` names it.
class InvariantError : public Error {
 public:
  InvariantError(std::string constraint, const std::string& detail)
      : Error(constraint + ": " + detail), constraint_(std::move(constraint)) {}
  const std::string& constraint() const noexcept { return constraint_; }

 private:
  std::string constraint_;
};

// Malformed input document; carries line number when known (0 otherwise)
// and the offending field path.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& detail)
      : Error(format(line, field, detail)), line_(line), field_(std::move(field)) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  static std::string format(std::size_t line, const std::string& field,
                            const std::string& detail) {
    std::string out = "parse error";
    if (line > 0) out += " at line " + std::to_string(line);
    if (!field.empty()) out += " in '" + field + "'";
    return out + ": " + detail;
  }
  std::size_t line_;
  std::string field_;
};

// Iterative solver stopped before reaching its tolerance.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double residual, int iterations)
      : Error(what + " (residual " + std::to_string(residual) + " after " +
              std::to_string(iterations) + " iterations)"),
        residual_(residual),
        iterations_(iterations) {}
  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

// A result that theory guarantees was not found (e.g. an empty equilibrium
// scan). Indicates a numerical bug rather than bad input.
class InternalConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace sgp

#endif  // SGP_ERRORS_HPP_
