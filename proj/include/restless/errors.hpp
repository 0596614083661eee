// Copyright 2026 The Restless Authors
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

namespace restless {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sequence or repetition index outside its valid range.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// An operation received no data to work on.
class EmptyDataError : public Error {
 public:
  using Error::Error;
};

/// Malformed serialized input. `record()` names the offending row or record.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, long long record)
      : Error(what + " (record " + std::to_string(record) + ")"),
        record_(record) {}
  long long record() const noexcept { return record_; }

 private:
  long long record_;
};

/// Data without enough structure for the requested estimate (identical
/// points, coincident calibration endpoints, empty discriminator side).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Arguments outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Two candidate answers cannot be told apart at the requested confidence.
class AmbiguityError : public DegenerateError {
 public:
  using DegenerateError::DegenerateError;
};

/// Inconsistent configuration or metadata.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace restless
