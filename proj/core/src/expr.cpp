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

#include "lego/expr.hpp"
#include "range_impl.hpp"

#include <cmath>
#include <limits>
#include <unordered_set>

namespace lego {

VarRange::VarRange(int64_t lo, int64_t hi) : lo(lo), hi(hi) {
  if (lo >= hi)
    throw Error(ErrorKind::InvalidRange,
                "empty range [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + ")");
}

using detail::CondNode;
using detail::ExprNode;

namespace {
std::shared_ptr<const ExprNode> makeNode(ExprKind kind, std::vector<Expr> ops) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->ops = std::move(ops);
  return n;
}
} // namespace

Expr::Expr(int64_t value) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Const;
  n->value = value;
  node_ = std::move(n);
}

Expr Expr::var(std::string name, std::optional<VarRange> range) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Var;
  n->name = std::move(name);
  n->range = range;
  return Expr(std::shared_ptr<const ExprNode>(std::move(n)));
}

Expr Expr::add(Expr lhs, Expr rhs) {
  return Expr(makeNode(ExprKind::Add, {std::move(lhs), std::move(rhs)}));
}
Expr Expr::sub(Expr lhs, Expr rhs) {
  return Expr(makeNode(ExprKind::Sub, {std::move(lhs), std::move(rhs)}));
}
Expr Expr::mul(Expr lhs, Expr rhs) {
  return Expr(makeNode(ExprKind::Mul, {std::move(lhs), std::move(rhs)}));
}
Expr Expr::floorDiv(Expr num, Expr den) {
  if (den.isConst(0))
    throw Error(ErrorKind::DivisionByZero, "floor division by constant 0");
  return Expr(makeNode(ExprKind::FloorDiv, {std::move(num), std::move(den)}));
}
Expr Expr::mod(Expr num, Expr den) {
  if (den.isConst(0))
    throw Error(ErrorKind::DivisionByZero, "modulo by constant 0");
  return Expr(makeNode(ExprKind::Mod, {std::move(num), std::move(den)}));
}
Expr Expr::select(Cond cond, Expr then, Expr otherwise) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Select;
  n->ops = {std::move(then), std::move(otherwise)};
  n->cond = std::move(cond);
  return Expr(std::shared_ptr<const ExprNode>(std::move(n)));
}
Expr Expr::isqrt(Expr arg) {
  return Expr(makeNode(ExprKind::Isqrt, {std::move(arg)}));
}

ExprKind Expr::kind() const { return node_->kind; }
int64_t Expr::value() const { return node_->value; }
const std::string &Expr::name() const { return node_->name; }
const std::optional<VarRange> &Expr::range() const { return node_->range; }
std::size_t Expr::numOperands() const { return node_->ops.size(); }
const Expr &Expr::operand(std::size_t i) const { return node_->ops.at(i); }
const Cond &Expr::cond() const { return *node_->cond; }

namespace {
std::shared_ptr<const CondNode> makeCmp(CondKind kind, Expr a, Expr b) {
  auto n = std::make_shared<CondNode>();
  n->kind = kind;
  n->ops = {std::move(a), std::move(b)};
  return n;
}
} // namespace

Cond Cond::lt(Expr a, Expr b) {
  return Cond(makeCmp(CondKind::Lt, std::move(a), std::move(b)));
}
Cond Cond::le(Expr a, Expr b) {
  return Cond(makeCmp(CondKind::Le, std::move(a), std::move(b)));
}
Cond Cond::eq(Expr a, Expr b) {
  return Cond(makeCmp(CondKind::Eq, std::move(a), std::move(b)));
}
Cond Cond::ge(Expr a, Expr b) {
  return Cond(makeCmp(CondKind::Ge, std::move(a), std::move(b)));
}
Cond Cond::gt(Expr a, Expr b) {
  return Cond(makeCmp(CondKind::Gt, std::move(a), std::move(b)));
}
Cond Cond::conj(Cond a, Cond b) {
  auto n = std::make_shared<CondNode>();
  n->kind = CondKind::And;
  n->subs = {std::move(a), std::move(b)};
  return Cond(std::shared_ptr<const CondNode>(std::move(n)));
}

CondKind Cond::kind() const { return node_->kind; }
const Expr &Cond::lhs() const { return node_->ops.at(0); }
const Expr &Cond::rhs() const { return node_->ops.at(1); }
const Cond &Cond::left() const { return node_->subs.at(0); }
const Cond &Cond::right() const { return node_->subs.at(1); }

Expr operator+(const Expr &a, const Expr &b) { return Expr::add(a, b); }
Expr operator-(const Expr &a, const Expr &b) { return Expr::sub(a, b); }
Expr operator*(const Expr &a, const Expr &b) { return Expr::mul(a, b); }
Expr floorDiv(const Expr &a, const Expr &b) { return Expr::floorDiv(a, b); }
Expr mod(const Expr &a, const Expr &b) { return Expr::mod(a, b); }
Expr operator/(const Expr &a, const Expr &b) { return Expr::floorDiv(a, b); }
Expr operator%(const Expr &a, const Expr &b) { return Expr::mod(a, b); }

int compare(const Cond &a, const Cond &b) {
  if (a.kind() != b.kind())
    return a.kind() < b.kind() ? -1 : 1;
  if (a.kind() == CondKind::And) {
    if (int c = compare(a.left(), b.left()))
      return c;
    return compare(a.right(), b.right());
  }
  if (int c = compare(a.lhs(), b.lhs()))
    return c;
  return compare(a.rhs(), b.rhs());
}

int compare(const Expr &a, const Expr &b) {
  if (a.id() == b.id())
    return 0;
  if (a.kind() != b.kind())
    return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
  case ExprKind::Const:
    return a.value() == b.value() ? 0 : (a.value() < b.value() ? -1 : 1);
  case ExprKind::Var: {
    if (int c = a.name().compare(b.name()))
      return c < 0 ? -1 : 1;
    auto ra = a.range(), rb = b.range();
    if (ra.has_value() != rb.has_value())
      return ra.has_value() ? 1 : -1;
    if (ra && (ra->lo != rb->lo || ra->hi != rb->hi))
      return std::pair(ra->lo, ra->hi) < std::pair(rb->lo, rb->hi) ? -1 : 1;
    return 0;
  }
  case ExprKind::Select:
    if (int c = compare(a.cond(), b.cond()))
      return c;
    break;
  default:
    break;
  }
  for (std::size_t i = 0; i < a.numOperands(); ++i)
    if (int c = compare(a.operand(i), b.operand(i)))
      return c;
  return 0;
}

bool operator==(const Expr &a, const Expr &b) { return compare(a, b) == 0; }
bool operator==(const Cond &a, const Cond &b) { return compare(a, b) == 0; }

namespace {
void keyOf(const Cond &c, std::string &out);

void keyOf(const Expr &e, std::string &out) {
  switch (e.kind()) {
  case ExprKind::Const:
    out += std::to_string(e.value());
    return;
  case ExprKind::Var:
    out += '$';
    out += e.name();
    if (e.range())
      out += "[" + std::to_string(e.range()->lo) + "," +
             std::to_string(e.range()->hi) + ")";
    return;
  case ExprKind::Add: out += "(+ "; break;
  case ExprKind::Sub: out += "(- "; break;
  case ExprKind::Mul: out += "(* "; break;
  case ExprKind::FloorDiv: out += "(/ "; break;
  case ExprKind::Mod: out += "(% "; break;
  case ExprKind::Isqrt: out += "(isqrt "; break;
  case ExprKind::Select:
    out += "(? ";
    keyOf(e.cond(), out);
    out += ' ';
    break;
  }
  for (std::size_t i = 0; i < e.numOperands(); ++i) {
    if (i)
      out += ' ';
    keyOf(e.operand(i), out);
  }
  out += ')';
}

void keyOf(const Cond &c, std::string &out) {
  static constexpr const char *kNames[] = {"<", "<=", "==", ">=", ">", "&&"};
  out += '{';
  out += kNames[static_cast<int>(c.kind())];
  out += ' ';
  if (c.kind() == CondKind::And) {
    keyOf(c.left(), out);
    out += ' ';
    keyOf(c.right(), out);
  } else {
    keyOf(c.lhs(), out);
    out += ' ';
    keyOf(c.rhs(), out);
  }
  out += '}';
}
} // namespace

std::string structuralKey(const Expr &e) {
  std::string out;
  keyOf(e, out);
  return out;
}

int64_t floorDivInt(int64_t a, int64_t b) {
  int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0)))
    --q;
  return q;
}

int64_t floorModInt(int64_t a, int64_t b) {
  int64_t r = a % b;
  if (r != 0 && ((r < 0) != (b < 0)))
    r += b;
  return r;
}

int64_t isqrtInt(int64_t x) {
  if (x <= 0)
    return 0;
  auto r = static_cast<int64_t>(std::sqrt(static_cast<double>(x)));
  while (r > 0 && static_cast<detail::Wide>(r) * r > x)
    --r;
  while (static_cast<detail::Wide>(r + 1) * (r + 1) <= x)
    ++r;
  return r;
}

bool eval(const Cond &c, const Env &env) {
  switch (c.kind()) {
  case CondKind::Lt: return eval(c.lhs(), env) < eval(c.rhs(), env);
  case CondKind::Le: return eval(c.lhs(), env) <= eval(c.rhs(), env);
  case CondKind::Eq: return eval(c.lhs(), env) == eval(c.rhs(), env);
  case CondKind::Ge: return eval(c.lhs(), env) >= eval(c.rhs(), env);
  case CondKind::Gt: return eval(c.lhs(), env) > eval(c.rhs(), env);
  case CondKind::And: return eval(c.left(), env) && eval(c.right(), env);
  }
  return false;
}

int64_t eval(const Expr &e, const Env &env) {
  switch (e.kind()) {
  case ExprKind::Const:
    return e.value();
  case ExprKind::Var: {
    auto it = env.find(e.name());
    if (it == env.end())
      throw Error(ErrorKind::UnboundVariable,
                  "variable '" + e.name() + "' is not bound");
    return it->second;
  }
  case ExprKind::Add: return eval(e.lhs(), env) + eval(e.rhs(), env);
  case ExprKind::Sub: return eval(e.lhs(), env) - eval(e.rhs(), env);
  case ExprKind::Mul: return eval(e.lhs(), env) * eval(e.rhs(), env);
  case ExprKind::FloorDiv:
  case ExprKind::Mod: {
    int64_t a = eval(e.lhs(), env);
    int64_t b = eval(e.rhs(), env);
    if (b == 0)
      throw Error(ErrorKind::DivisionByZero, "division by zero in eval");
    return e.kind() == ExprKind::FloorDiv ? floorDivInt(a, b)
                                          : floorModInt(a, b);
  }
  case ExprKind::Select:
    return eval(e.cond(), env) ? eval(e.operand(0), env)
                               : eval(e.operand(1), env);
  case ExprKind::Isqrt:
    return isqrtInt(eval(e.operand(0), env));
  }
  return 0;
}

namespace {
void collectVars(const Cond &c, std::vector<std::string> &out,
                 std::unordered_set<std::string> &seen);

void collectVars(const Expr &e, std::vector<std::string> &out,
                 std::unordered_set<std::string> &seen) {
  if (e.isVar()) {
    if (seen.insert(e.name()).second)
      out.push_back(e.name());
    return;
  }
  if (e.kind() == ExprKind::Select)
    collectVars(e.cond(), out, seen);
  for (std::size_t i = 0; i < e.numOperands(); ++i)
    collectVars(e.operand(i), out, seen);
}

void collectVars(const Cond &c, std::vector<std::string> &out,
                 std::unordered_set<std::string> &seen) {
  if (c.kind() == CondKind::And) {
    collectVars(c.left(), out, seen);
    collectVars(c.right(), out, seen);
  } else {
    collectVars(c.lhs(), out, seen);
    collectVars(c.rhs(), out, seen);
  }
}

Expr rebuild(const Expr &e, const std::vector<Expr> &ops,
             const std::optional<Cond> &cond) {
  switch (e.kind()) {
  case ExprKind::Add: return Expr::add(ops[0], ops[1]);
  case ExprKind::Sub: return Expr::sub(ops[0], ops[1]);
  case ExprKind::Mul: return Expr::mul(ops[0], ops[1]);
  case ExprKind::FloorDiv: return Expr::floorDiv(ops[0], ops[1]);
  case ExprKind::Mod: return Expr::mod(ops[0], ops[1]);
  case ExprKind::Select: return Expr::select(*cond, ops[0], ops[1]);
  case ExprKind::Isqrt: return Expr::isqrt(ops[0]);
  default: return e;
  }
}

Cond mapCond(const Cond &c, const std::function<Expr(const Expr &)> &f) {
  switch (c.kind()) {
  case CondKind::And:
    return Cond::conj(mapCond(c.left(), f), mapCond(c.right(), f));
  case CondKind::Lt: return Cond::lt(f(c.lhs()), f(c.rhs()));
  case CondKind::Le: return Cond::le(f(c.lhs()), f(c.rhs()));
  case CondKind::Eq: return Cond::eq(f(c.lhs()), f(c.rhs()));
  case CondKind::Ge: return Cond::ge(f(c.lhs()), f(c.rhs()));
  case CondKind::Gt: return Cond::gt(f(c.lhs()), f(c.rhs()));
  }
  return c;
}

Expr mapLeaves(const Expr &e, const std::function<Expr(const Expr &)> &leaf) {
  if (e.isVar() || e.isConst())
    return leaf(e);
  std::vector<Expr> ops;
  ops.reserve(e.numOperands());
  for (std::size_t i = 0; i < e.numOperands(); ++i)
    ops.push_back(mapLeaves(e.operand(i), leaf));
  std::optional<Cond> cond;
  if (e.kind() == ExprKind::Select)
    cond = mapCond(e.cond(),
                   [&](const Expr &x) { return mapLeaves(x, leaf); });
  return rebuild(e, ops, cond);
}
} // namespace

std::vector<std::string> variables(const Expr &e) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  collectVars(e, out, seen);
  return out;
}

Expr substitute(const Expr &e,
                const std::unordered_map<std::string, Expr> &bindings) {
  return mapLeaves(e, [&](const Expr &leaf) {
    if (leaf.isVar()) {
      auto it = bindings.find(leaf.name());
      if (it != bindings.end())
        return it->second;
    }
    return leaf;
  });
}

Expr attachRanges(const Expr &e,
                  const std::unordered_map<std::string, VarRange> &ranges) {
  return mapLeaves(e, [&](const Expr &leaf) {
    if (leaf.isVar()) {
      auto it = ranges.find(leaf.name());
      if (it != ranges.end())
        return Expr::var(leaf.name(), it->second);
    }
    return leaf;
  });
}

} // namespace lego
