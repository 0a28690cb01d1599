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
#include <map>
#include <optional>
#include <span>
#include <string>

#include "lego/expr.hpp"

namespace lego {

/// Range and divisibility facts about named variables. A fact attached
/// here takes precedence over (is intersected with) a range carried by the
/// Var node itself.
class FactSet {
public:
  FactSet() = default;

  FactSet &addRange(const std::string &var, VarRange range);
  /// Records `var % modulus == 0`; modulus must be >= 2.
  FactSet &addDivisibility(const std::string &var, int64_t modulus);
  /// Facts from `other` are intersected into this set.
  FactSet &merge(const FactSet &other);

  std::optional<VarRange> rangeOf(const std::string &var) const;
  /// Least common multiple of the recorded moduli for `var`, or 1.
  int64_t divisorOf(const std::string &var) const;
  bool hasRange(const std::string &var) const {
    return ranges_.count(var) != 0;
  }

  const std::map<std::string, VarRange> &ranges() const { return ranges_; }
  const std::map<std::string, int64_t> &divisibility() const {
    return divisors_;
  }

private:
  std::map<std::string, VarRange> ranges_;
  std::map<std::string, int64_t> divisors_;
};

/// Sound half-open over-approximation of the values `e` can take under
/// any environment consistent with `facts`. Throws UnboundVariable when a
/// variable has no range.
VarRange rangeOf(const Expr &e, const FactSet &facts = {});

/// Greatest integer known to divide every value of `e` (0 means e == 0).
int64_t knownDivisor(const Expr &e, const FactSet &facts);

struct SimplifyOptions {
  /// Upper bound on rule firings per simplify call.
  int64_t budget = 10000;
};

struct SimplifyStats {
  int64_t firings = 0;
  bool budgetExhausted = false;
};

/// Range-driven rewriting to a fixpoint; the result is equal to `e` on
/// every environment consistent with `facts`.
Expr simplify(const Expr &e, const FactSet &facts = {},
              const SimplifyOptions &options = {},
              SimplifyStats *stats = nullptr);

/// Distributes multiplication over addition and flattens sums.
Expr expand(const Expr &e);

/// Number of Add/Sub/Mul/FloorDiv/Mod/Select/Isqrt nodes.
int64_t opCount(const Expr &e);
int64_t opCount(const Cond &c);

/// Operation nodes across several expressions with structurally equal
/// subtrees counted once, i.e. the cost after common-subexpression
/// elimination.
int64_t sharedOpCount(std::span<const Expr> exprs);

enum class VariantPolicy { Auto, Expanded, Unexpanded };

std::string_view toString(VariantPolicy policy);
std::optional<VariantPolicy> parseVariantPolicy(std::string_view text);

/// Picks between simplify(e) and simplify(expand(e)) by opCount; ties go
/// to the unexpanded variant.
Expr bestVariant(const Expr &e, const FactSet &facts = {},
                 VariantPolicy policy = VariantPolicy::Auto);

} // namespace lego
