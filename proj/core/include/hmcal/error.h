// Copyright 2026 The hmcal Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HMCAL_ERROR_H_
#define HMCAL_ERROR_H_

#include <stdexcept>
#include <string>

namespace hmcal {

enum class ErrorKind {
  kInput,           // malformed or empty inputs
  kCorrespondence,  // person count / ordering mismatch
  kUnsupported,     // e.g. downsampling
  kDegenerate,      // rank-deficient geometry
  kNoOverlap,       // aligned sequences share no frames
  kConfig,          // invalid configuration or scene spec
  kData,            // unreadable or inconsistent files
  kNumerical,       // non-finite values during optimization
};

const char* ErrorKindName(ErrorKind kind);

// All library failures are reported through this exception type; the kind
// drives the command-line exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void Fail(ErrorKind kind, const std::string& message);

}  // namespace hmcal

#endif  // HMCAL_ERROR_H_
