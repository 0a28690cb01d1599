// Copyright 2026 The lego Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <ostream>

#include "lego/error.hpp"

namespace lego {

inline void PrintTo(ErrorKind kind, std::ostream *os) { *os << toString(kind); }

} // namespace lego

namespace lego::testing {

/// Kind of the lego::Error thrown by f, or nullopt if f returns normally.
template <class F> std::optional<ErrorKind> thrownKind(F &&f) {
  try {
    f();
  } catch (const Error &e) {
    return e.kind();
  }
  return std::nullopt;
}

} // namespace lego::testing
