// Copyright 2026 The aggsched Authors.
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

#ifndef AGGSCHED_ERROR_H_
#define AGGSCHED_ERROR_H_

#include <stdexcept>
#include <string>
#include <utility>

namespace aggsched {

// Root of the library's exception hierarchy. Precondition violations on
// plain arguments are reported as std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input for which an estimate is undefined, e.g. the Jaccard similarity of
// two empty sets.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// A plan or phase broke a scheduling constraint, or a simulation invariant
// (key conservation, completion) did not hold.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// Experiment configuration problem. `field` is a dotted path into the
// config document, e.g. "workload.jaccard".
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace aggsched

#endif  // AGGSCHED_ERROR_H_
