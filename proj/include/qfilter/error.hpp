// Copyright 2026 The qfilter Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace qfilter {

/// Failure classes. The CLI maps each one onto a process exit code.
enum class ErrorKind {
    InvalidInput,   // malformed or inconsistent arguments
    InvalidState,   // mathematically inconsistent parameter combination
    ResourceLimit,  // request exceeds the desk-scale bounds
    Infeasible,     // no measurement exists under the requested allocation
    Numerical,      // a numerical invariant broke beyond tolerance
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string &what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string &what) { throw Error(kind, what); }

inline const char *to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidInput:
        return "invalid input";
    case ErrorKind::InvalidState:
        return "invalid state";
    case ErrorKind::ResourceLimit:
        return "resource limit";
    case ErrorKind::Infeasible:
        return "infeasible";
    case ErrorKind::Numerical:
        return "numerical failure";
    }
    return "unknown";
}

}  // namespace qfilter
