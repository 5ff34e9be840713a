// Copyright 2026 The Profiled Auctions Authors.
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

namespace profiled {

// Raised when an operation is evaluated outside its mathematical domain:
// zero density, quantile(1) on an unbounded support, irregular
// distributions passed to inverse virtual valuation, and so on.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed user input (distribution specifiers, sample files, flags).
class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Adaptive quadrature ran out of subdivisions. The partial result is kept
// so callers can decide whether it is still usable.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double partial_value, double partial_error)
      : std::runtime_error(what), partial_value_(partial_value), partial_error_(partial_error) {}

  double partial_value() const noexcept { return partial_value_; }
  double partial_error() const noexcept { return partial_error_; }

 private:
  double partial_value_;
  double partial_error_;
};

}  // namespace profiled
