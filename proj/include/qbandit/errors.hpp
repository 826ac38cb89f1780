// Copyright 2026 The qbandit Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qbandit {

/// Caller supplied a value outside the documented domain (bad qubit index,
/// out-of-range n_qubits, action outside [-1,1]^3, ...).
class InvalidArgument : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// Shapes or preconditions that the caller was responsible for did not hold.
class ContractViolation : public std::logic_error {
   public:
    using std::logic_error::logic_error;
};

/// Input data cannot be processed (non-finite targets, degenerate features).
class InvalidData : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// A computation produced a non-finite value.
class NumericFailure : public std::runtime_error {
   public:
    NumericFailure(const std::string &what, std::size_t index)
        : std::runtime_error(what + " (index " + std::to_string(index) + ")"), index_(index) {}

    std::size_t index() const noexcept { return index_; }

   private:
    std::size_t index_;
};

namespace detail {

inline void require(bool cond, const char *msg) {
    if (!cond) throw ContractViolation(msg);
}

}  // namespace detail
}  // namespace qbandit
