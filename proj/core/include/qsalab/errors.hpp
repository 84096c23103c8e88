// Copyright 2026 The qsalab Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qsalab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Inconsistent sizes, out-of-range indices, invalid hyperparameters.
class ConfigurationError : public Error {
  public:
    using Error::Error;
};

/// Input data that cannot be encoded (e.g. a zero-norm token).
class DegenerateInputError : public Error {
  public:
    using Error::Error;
};

/// A prediction branch whose unnormalized vector vanishes.
class DegeneratePredictionError : public Error {
  public:
    using Error::Error;
};

/// Non-finite loss or gradient during optimization. `snapshot()` holds a
/// JSON document describing the state at the time of failure.
class NumericError : public Error {
  public:
    NumericError(const std::string &what, std::string snapshot)
        : Error(what), snapshot_(std::move(snapshot)) {}

    [[nodiscard]] const std::string &snapshot() const noexcept { return snapshot_; }

  private:
    std::string snapshot_;
};

/// Malformed or truncated file contents.
class ParseError : public Error {
  public:
    using Error::Error;
};

class UnsupportedVersionError : public Error {
  public:
    using Error::Error;
};

/// A checkpoint or dataset that does not match the requested model.
class ModelMismatchError : public Error {
  public:
    using Error::Error;
};

} // namespace qsalab
