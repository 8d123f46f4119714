// Copyright 2026 The crowdauction Authors
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

namespace crowdauction {

/// Error categories surfaced by the library. The CLI maps `precision` to
/// exit code 2 and everything else to exit code 1.
enum class errc {
  domain,       // argument outside its mathematical domain
  infeasible,   // demanded work exceeds total declared capacity
  size,         // problem too large for an exhaustive routine
  precision,    // quadrature failed to reach the requested tolerance
  config,       // bad configuration (irregular prior, malformed file, ...)
  singular,     // numerical singularity (vanishing density, ...)
};

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

  /// Short machine-parsable token, used as the reason field in CLI errors.
  const char* token() const noexcept {
    switch (code_) {
      case errc::domain: return "domain";
      case errc::infeasible: return "infeasible";
      case errc::size: return "size";
      case errc::precision: return "precision";
      case errc::config: return "config";
      case errc::singular: return "singular";
    }
    return "unknown";
  }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) { throw Error(code, what); }

}  // namespace crowdauction
