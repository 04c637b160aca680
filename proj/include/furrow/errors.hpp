// Copyright 2026 The Furrow Authors
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

namespace furrow {

/// Invalid or inconsistent configuration / input data. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Unrecoverable optimizer failure surfaced to the caller. CLI exit code 3.
class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Filesystem / serialization failure. CLI exit code 4.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Out-of-order timestamp or frame index fed into a sliding window.
class SequencingError : public ConfigError {
public:
  using ConfigError::ConfigError;
};

}  // namespace furrow
