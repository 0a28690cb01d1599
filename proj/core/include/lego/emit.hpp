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

// Deterministic pretty printers for Expr under C, Python and Triton
// flavoured targets.

#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "lego/expr.hpp"

namespace lego {

enum class Target { C, Python, Triton };

/// Spelling of each construct in one target language.
struct TargetProfile {
  Target target;
  std::string name;
  std::string divToken;
  std::string modToken;
  std::string andToken;
  std::string isqrtName;
  /// Native '/' and '%' truncate toward zero. Where the emitter cannot prove
  /// a nonnegative numerator and positive divisor, it calls floorDivName /
  /// floorModName instead, which the surrounding code must define.
  bool truncatingDivision = false;
  std::string floorDivName;
  std::string floorModName;

  static TargetProfile c();
  static TargetProfile python();
  static TargetProfile triton();
  static std::optional<TargetProfile> fromName(std::string_view name);
};

/// A compile-time index vector `var` over [lo, hi).
struct RangeExpr {
  std::string var;
  int64_t lo;
  int64_t hi;

  RangeExpr(std::string var, int64_t lo, int64_t hi);
};

/// How a range variable appears in emitted Triton code: an arange over
/// [lo, hi) broadcast along `axis` of `axes` slice dimensions.
struct RangeBinding {
  RangeExpr range;
  std::size_t axis = 0;
  std::size_t axes = 1;
};

using RangeBindings = std::map<std::string, RangeBinding>;

/// Renders e with minimal parentheses. Variables listed in `ranges` print
/// as broadcast aranges, which only the triton profile supports (others
/// throw UnsupportedNode).
std::string emitExpr(const Expr &e, const TargetProfile &profile,
                     const RangeBindings &ranges = {});
std::string emitCond(const Cond &c, const TargetProfile &profile,
                     const RangeBindings &ranges = {});

/// "tl.arange(lo, hi)"; UnsupportedNode outside the triton profile.
std::string emitRange(const RangeExpr &r, const TargetProfile &profile);
/// emitRange plus the broadcast suffix, e.g. "tl.arange(0, 32)[:, None]".
std::string emitRange(const RangeBinding &r, const TargetProfile &profile);

/// C-profile rendering.
std::ostream &operator<<(std::ostream &os, const Expr &e);

} // namespace lego
