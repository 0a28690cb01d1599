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

#include "lego/emit.hpp"

#include <ostream>

#include "lego/simplify.hpp"

namespace lego {

TargetProfile TargetProfile::c() {
  return {Target::C,  "c",    "/",           "%",
          "&&",       "isqrt", true, "lego_floordiv", "lego_floormod"};
}
TargetProfile TargetProfile::python() {
  return {Target::Python, "python", "//", "%", "and", "math.isqrt", false, "",
          ""};
}
TargetProfile TargetProfile::triton() {
  return {Target::Triton, "triton", "//",           "%",
          "&",            "isqrt",  true,           "lego_floordiv",
          "lego_floormod"};
}

std::optional<TargetProfile> TargetProfile::fromName(std::string_view name) {
  if (name == "c")
    return c();
  if (name == "python")
    return python();
  if (name == "triton")
    return triton();
  return std::nullopt;
}

RangeExpr::RangeExpr(std::string var, int64_t lo, int64_t hi)
    : var(std::move(var)), lo(lo), hi(hi) {
  (void)VarRange(lo, hi); // validates lo < hi
}

namespace {

enum Prec { kTernary = 0, kCompare = 1, kAdditive = 2, kMultiplicative = 3,
            kAtom = 4 };

class Printer {
public:
  Printer(const TargetProfile &p, const RangeBindings &r) : p_(p), r_(r) {}

  std::string expr(const Expr &e) { return sub(e, kTernary, false); }

  std::string cond(const Cond &c) {
    if (c.kind() == CondKind::And) {
      if (p_.target == Target::Triton)
        return "(" + cond(c.left()) + ") & (" + cond(c.right()) + ")";
      return cond(c.left()) + " " + p_.andToken + " " + cond(c.right());
    }
    static constexpr const char *kOps[] = {" < ", " <= ", " == ", " >= ",
                                           " > "};
    return sub(c.lhs(), kAdditive, false) + kOps[static_cast<int>(c.kind())] +
           sub(c.rhs(), kAdditive, false);
  }

private:
  const TargetProfile &p_;
  const RangeBindings &r_;

  Prec precOf(const Expr &e) const {
    switch (e.kind()) {
    case ExprKind::Add:
    case ExprKind::Sub: return kAdditive;
    case ExprKind::Mul: return kMultiplicative;
    case ExprKind::FloorDiv:
    case ExprKind::Mod:
      return usesHelper(e) ? kAtom : kMultiplicative;
    default: return kAtom;
    }
  }

  // Renders e as an operand requiring at least `min` precedence; `strict`
  // also parenthesizes equal precedence (right operands).
  std::string sub(const Expr &e, Prec min, bool strict) {
    std::string s = node(e);
    Prec p = precOf(e);
    if (e.isConst() && e.value() < 0 && min > kTernary)
      return "(" + s + ")";
    if (p < min || (strict && p == min))
      return "(" + s + ")";
    return s;
  }

  // True when truncating and flooring division agree on e's operands.
  static bool floorSafe(const Expr &e) {
    try {
      return rangeOf(e.lhs()).lo >= 0 && rangeOf(e.rhs()).lo > 0;
    } catch (const Error &) {
      return false;
    }
  }

  bool usesHelper(const Expr &e) const {
    return p_.truncatingDivision && !floorSafe(e);
  }

  std::string division(const Expr &e, const std::string &token,
                       const std::string &helper) {
    if (usesHelper(e))
      return helper + "(" + expr(e.lhs()) + ", " + expr(e.rhs()) + ")";
    return binary(e, " " + token + " ", kMultiplicative);
  }

  std::string binary(const Expr &e, const std::string &op, Prec p) {
    return sub(e.lhs(), p, false) + op + sub(e.rhs(), p, true);
  }

  std::string node(const Expr &e) {
    switch (e.kind()) {
    case ExprKind::Const:
      return std::to_string(e.value());
    case ExprKind::Var: {
      auto it = r_.find(e.name());
      if (it == r_.end())
        return e.name();
      return emitRange(it->second, p_);
    }
    case ExprKind::Add: return binary(e, " + ", kAdditive);
    case ExprKind::Sub: return binary(e, " - ", kAdditive);
    case ExprKind::Mul: return binary(e, "*", kMultiplicative);
    case ExprKind::FloorDiv:
      return division(e, p_.divToken, p_.floorDivName);
    case ExprKind::Mod: return division(e, p_.modToken, p_.floorModName);
    case ExprKind::Select: {
      std::string c = cond(e.cond());
      std::string a = expr(e.operand(0));
      std::string b = expr(e.operand(1));
      switch (p_.target) {
      case Target::C: return "(" + c + " ? " + a + " : " + b + ")";
      case Target::Python: return "(" + a + " if " + c + " else " + b + ")";
      case Target::Triton: return "tl.where(" + c + ", " + a + ", " + b + ")";
      }
      break;
    }
    case ExprKind::Isqrt:
      return p_.isqrtName + "(" + expr(e.operand(0)) + ")";
    }
    throw Error(ErrorKind::UnsupportedNode, "unprintable expression node");
  }
};

} // namespace

std::string emitExpr(const Expr &e, const TargetProfile &profile,
                     const RangeBindings &ranges) {
  return Printer(profile, ranges).expr(e);
}

std::string emitCond(const Cond &c, const TargetProfile &profile,
                     const RangeBindings &ranges) {
  return Printer(profile, ranges).cond(c);
}

std::string emitRange(const RangeExpr &r, const TargetProfile &profile) {
  if (profile.target != Target::Triton)
    throw Error(ErrorKind::UnsupportedNode,
                "range expression for '" + r.var +
                    "' needs the triton profile, not " + profile.name);
  return "tl.arange(" + std::to_string(r.lo) + ", " + std::to_string(r.hi) +
         ")";
}

std::string emitRange(const RangeBinding &r, const TargetProfile &profile) {
  std::string s = emitRange(r.range, profile);
  if (r.axes <= 1)
    return s;
  s += "[";
  for (std::size_t k = 0; k < r.axes; ++k)
    s += (k ? ", " : "") + std::string(k == r.axis ? ":" : "None");
  return s + "]";
}

std::ostream &operator<<(std::ostream &os, const Expr &e) {
  return os << emitExpr(e, TargetProfile::c());
}

} // namespace lego
