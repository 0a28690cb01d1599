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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lego {

enum class ErrorKind {
  UnboundVariable,
  DivisionByZero,
  InvalidRange,
  InvalidShape,
  InvalidSigma,
  ArityMismatch,
  OutOfBounds,
  ShapeMismatch,
  BijectivityViolation,
  InjectiveOnly,
  UnknownBuiltinPerm,
  SyntaxError,
  UnsupportedNode,
  UnterminatedPlaceholder,
  PlaceholderSyntax,
  UnknownLayout,
  UnknownVariable,
  SliceOnNonConstantDim,
  ExhaustiveBoundExceeded,
  ManifestSyntax,
};

std::string_view toString(ErrorKind kind);

/// 1-based line/column in some source text.
struct SourceLoc {
  int line = 1;
  int column = 1;
};

/// Every failure in the library surfaces as an Error carrying a kind, so
/// callers (the CLI in particular) can map kinds onto exit codes.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &message,
        std::optional<SourceLoc> loc = std::nullopt);

  ErrorKind kind() const { return kind_; }
  const std::optional<SourceLoc> &location() const { return loc_; }
  /// The message without the "Kind: " prefix and location.
  const std::string &detail() const { return detail_; }

private:
  ErrorKind kind_;
  std::string detail_;
  std::optional<SourceLoc> loc_;
};

/// Converts a byte offset into a line/column pair.
SourceLoc locate(std::string_view text, std::size_t offset);

} // namespace lego
