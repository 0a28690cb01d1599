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

// Internal interval machinery shared by range and simplify.

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_map>
#include <utility>

#include "lego/expr.hpp"
#include "lego/simplify.hpp"

namespace lego::detail {

/// 128-bit intermediate for overflow-free interval and coefficient math.
__extension__ typedef __int128 Wide;

/// Closed interval [lo, hi].
struct Interval {
  int64_t lo;
  int64_t hi;
  bool singleton() const { return lo == hi; }
  bool nonneg() const { return lo >= 0; }
  bool positive() const { return lo > 0; }
  bool excludesZero() const { return lo > 0 || hi < 0; }
};

/// Memoizes interval and divisor queries by node identity. The memo holds
/// the Expr itself so a node cannot be freed and its address reused while
/// the cache lives.
class IntervalCache {
public:
  explicit IntervalCache(const FactSet &facts) : facts_(facts) {}

  std::optional<Interval> get(const Expr &e);
  /// Greatest known divisor of every value of e; 0 only if e is provably 0.
  int64_t divisor(const Expr &e);
  const FactSet &facts() const { return facts_; }

private:
  const FactSet &facts_;
  std::unordered_map<const void *, std::pair<Expr, std::optional<Interval>>>
      memo_;
  std::unordered_map<const void *, std::pair<Expr, int64_t>> divisors_;
};

/// Truth value of c if intervals decide it for every environment.
std::optional<bool> decide(const Cond &c, IntervalCache &cache);

} // namespace lego::detail
