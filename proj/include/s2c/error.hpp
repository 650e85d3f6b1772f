// Copyright 2026 The s2c-iae Authors.
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

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace s2c {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data: malformed files, violated invariants, inconsistent records.
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid arguments or configuration supplied by the caller.
class UsageError : public Error {
 public:
  using Error::Error;
};

// A filled template whose scaffold does not line up with its template.
class AlignmentError : public DataError {
 public:
  AlignmentError(std::string filled, std::string scaffold)
      : DataError("filled text does not align with template: filled=\"" + filled +
                  "\" template=\"" + scaffold + "\""),
        filled_(std::move(filled)),
        scaffold_(std::move(scaffold)) {}

  const std::string& filled() const { return filled_; }
  const std::string& scaffold() const { return scaffold_; }

 private:
  std::string filled_;
  std::string scaffold_;
};

// Transport-level generator failure. Retrying the same request may succeed.
class TransportError : public Error {
 public:
  using Error::Error;
};

// The generator answered, but the answer is unusable (bad framing, wrong
// protocol version, invalid content). Retrying will not help.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Receives non-fatal diagnostics (skipped records, ambiguous matches).
using WarningSink = std::function<void(std::string_view)>;

inline void warn(const WarningSink& sink, std::string_view message) {
  if (sink) sink(message);
}

}  // namespace s2c
