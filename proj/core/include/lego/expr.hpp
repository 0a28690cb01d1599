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

// Symbolic integer index expressions.
//
// Expr and Cond are immutable values backed by shared nodes; copying is
// cheap and sharing across threads needs no synchronisation. Division is
// floor division and modulo is floor modulo (the result takes the sign of
// the divisor), which coincide with C semantics on the nonnegative operands
// layouts produce.

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lego/error.hpp"

namespace lego {

/// Half-open integer range [lo, hi).
struct VarRange {
  int64_t lo = 0;
  int64_t hi = 1;

  VarRange() = default;
  VarRange(int64_t lo, int64_t hi);

  bool contains(int64_t v) const { return v >= lo && v < hi; }
  bool contains(const VarRange &other) const {
    return other.lo >= lo && other.hi <= hi;
  }
  int64_t size() const { return hi - lo; }

  friend bool operator==(const VarRange &, const VarRange &) = default;
};

enum class ExprKind { Const, Var, Add, Sub, Mul, FloorDiv, Mod, Select, Isqrt };
enum class CondKind { Lt, Le, Eq, Ge, Gt, And };

namespace detail {
struct ExprNode;
struct CondNode;
} // namespace detail

class Cond;

class Expr {
public:
  /// Integer literal.
  Expr(int64_t value); // NOLINT(google-explicit-constructor)
  Expr(int value) : Expr(static_cast<int64_t>(value)) {} // NOLINT

  static Expr constant(int64_t value) { return Expr(value); }
  static Expr var(std::string name,
                  std::optional<VarRange> range = std::nullopt);
  static Expr add(Expr lhs, Expr rhs);
  static Expr sub(Expr lhs, Expr rhs);
  static Expr mul(Expr lhs, Expr rhs);
  /// Throws DivisionByZero when `den` is the literal 0.
  static Expr floorDiv(Expr num, Expr den);
  static Expr mod(Expr num, Expr den);
  static Expr select(Cond cond, Expr then, Expr otherwise);
  static Expr isqrt(Expr arg);

  ExprKind kind() const;
  bool isConst() const { return kind() == ExprKind::Const; }
  bool isConst(int64_t v) const { return isConst() && value() == v; }
  bool isVar() const { return kind() == ExprKind::Var; }

  int64_t value() const;
  const std::string &name() const;
  const std::optional<VarRange> &range() const;

  std::size_t numOperands() const;
  const Expr &operand(std::size_t i) const;
  const Expr &lhs() const { return operand(0); }
  const Expr &rhs() const { return operand(1); }
  /// Condition of a Select node.
  const Cond &cond() const;

  /// Identity of the underlying node; equal ids imply structural equality.
  const void *id() const { return node_.get(); }

  friend bool operator==(const Expr &a, const Expr &b);
  friend bool operator!=(const Expr &a, const Expr &b) { return !(a == b); }

private:
  explicit Expr(std::shared_ptr<const detail::ExprNode> node)
      : node_(std::move(node)) {}
  std::shared_ptr<const detail::ExprNode> node_;
};

class Cond {
public:
  static Cond lt(Expr a, Expr b);
  static Cond le(Expr a, Expr b);
  static Cond eq(Expr a, Expr b);
  static Cond ge(Expr a, Expr b);
  static Cond gt(Expr a, Expr b);
  static Cond conj(Cond a, Cond b);

  CondKind kind() const;
  /// Operands of a comparison.
  const Expr &lhs() const;
  const Expr &rhs() const;
  /// Operands of an And.
  const Cond &left() const;
  const Cond &right() const;

  friend bool operator==(const Cond &a, const Cond &b);
  friend bool operator!=(const Cond &a, const Cond &b) { return !(a == b); }

private:
  explicit Cond(std::shared_ptr<const detail::CondNode> node)
      : node_(std::move(node)) {}
  std::shared_ptr<const detail::CondNode> node_;
};

namespace detail {
struct CondNode {
  CondKind kind;
  std::vector<Expr> ops;  // comparisons
  std::vector<Cond> subs; // And
};

struct ExprNode {
  ExprKind kind = ExprKind::Const;
  int64_t value = 0;
  std::string name;
  std::optional<VarRange> range;
  std::vector<Expr> ops;
  std::optional<Cond> cond;
};
} // namespace detail

Expr operator+(const Expr &a, const Expr &b);
Expr operator-(const Expr &a, const Expr &b);
Expr operator*(const Expr &a, const Expr &b);
Expr floorDiv(const Expr &a, const Expr &b);
Expr mod(const Expr &a, const Expr &b);
/// Floor division and floor modulo, matching eval.
Expr operator/(const Expr &a, const Expr &b);
Expr operator%(const Expr &a, const Expr &b);

/// Total structural order, used for canonical term ordering.
int compare(const Expr &a, const Expr &b);
int compare(const Cond &a, const Cond &b);

/// Stable textual key for a node; structurally equal trees share a key.
std::string structuralKey(const Expr &e);

int64_t floorDivInt(int64_t a, int64_t b);
int64_t floorModInt(int64_t a, int64_t b);
int64_t isqrtInt(int64_t x);

using Env = std::unordered_map<std::string, int64_t>;

/// Reference interpreter. Throws UnboundVariable or DivisionByZero.
int64_t eval(const Expr &e, const Env &env);
bool eval(const Cond &c, const Env &env);

/// Names of all variables, in first-occurrence order.
std::vector<std::string> variables(const Expr &e);

/// Replaces variables by name; unmapped variables are left alone.
Expr substitute(const Expr &e,
                const std::unordered_map<std::string, Expr> &bindings);

/// Rebuilds every Var node with the given ranges attached (looked up by
/// name; absent names keep their node range).
Expr attachRanges(const Expr &e,
                  const std::unordered_map<std::string, VarRange> &ranges);

} // namespace lego
