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

// Pre-expansion, operation counting and variant selection.

#include <algorithm>
#include <limits>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "lego/simplify.hpp"
#include "range_impl.hpp"

namespace lego {
namespace {

constexpr std::size_t kMaxTerms = 512;

struct Overflow {};

int64_t checkedMul(int64_t a, int64_t b) {
  detail::Wide r = static_cast<detail::Wide>(a) * b;
  if (r > std::numeric_limits<int64_t>::max() ||
      r < std::numeric_limits<int64_t>::min())
    throw Overflow{};
  return static_cast<int64_t>(r);
}

int64_t checkedAdd(int64_t a, int64_t b) {
  detail::Wide r = static_cast<detail::Wide>(a) + b;
  if (r > std::numeric_limits<int64_t>::max() ||
      r < std::numeric_limits<int64_t>::min())
    throw Overflow{};
  return static_cast<int64_t>(r);
}

using Monomial = std::vector<Expr>; // sorted atoms; empty = constant

struct MonomialLess {
  bool operator()(const Monomial &a, const Monomial &b) const {
    // The constant monomial sorts last.
    if (a.empty() != b.empty())
      return b.empty();
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i)
      if (int c = compare(a[i], b[i]))
        return c < 0;
    return a.size() < b.size();
  }
};

using Poly = std::map<Monomial, int64_t, MonomialLess>;

void addInto(Poly &p, const Monomial &m, int64_t c) {
  int64_t &slot = p[m];
  slot = checkedAdd(slot, c);
  if (slot == 0)
    p.erase(m);
}

Expr expandNode(const Expr &e);

Poly atom(const Expr &e) { return Poly{{Monomial{e}, 1}}; }

Poly toPoly(const Expr &e);

Expr fromPoly(const Poly &p) {
  std::vector<std::pair<Expr, int64_t>> terms;
  int64_t constant = 0;
  for (const auto &[m, c] : p) {
    if (m.empty()) {
      constant = c;
      continue;
    }
    Expr prod = m[0];
    for (std::size_t i = 1; i < m.size(); ++i)
      prod = Expr::mul(prod, m[i]);
    terms.emplace_back(prod, c);
  }
  if (terms.empty())
    return Expr(constant);
  auto scaled = [](const Expr &x, int64_t c) {
    return c == 1 ? x : Expr::mul(x, Expr(c));
  };
  auto pos = std::find_if(terms.begin(), terms.end(),
                          [](const auto &t) { return t.second > 0; });
  if (pos != terms.end())
    std::rotate(terms.begin(), pos, pos + 1);
  Expr acc = scaled(terms[0].first, terms[0].second);
  for (std::size_t i = 1; i < terms.size(); ++i) {
    auto [x, c] = terms[i];
    acc = c < 0 ? Expr::sub(acc, scaled(x, -c)) : Expr::add(acc, scaled(x, c));
  }
  if (constant > 0)
    acc = Expr::add(acc, Expr(constant));
  else if (constant < 0)
    acc = Expr::sub(acc, Expr(-constant));
  return acc;
}

Poly toPoly(const Expr &e) {
  switch (e.kind()) {
  case ExprKind::Const:
    return e.value() == 0 ? Poly{} : Poly{{Monomial{}, e.value()}};
  case ExprKind::Var:
    return atom(e);
  case ExprKind::Add:
  case ExprKind::Sub: {
    Poly p = toPoly(e.lhs());
    int64_t sign = e.kind() == ExprKind::Add ? 1 : -1;
    for (const auto &[m, c] : toPoly(e.rhs()))
      addInto(p, m, checkedMul(c, sign));
    return p;
  }
  case ExprKind::Mul: {
    Poly a = toPoly(e.lhs());
    Poly b = toPoly(e.rhs());
    if (a.size() * b.size() > kMaxTerms)
      return atom(Expr::mul(fromPoly(a), fromPoly(b)));
    Poly p;
    for (const auto &[ma, ca] : a)
      for (const auto &[mb, cb] : b) {
        Monomial m = ma;
        m.insert(m.end(), mb.begin(), mb.end());
        std::sort(m.begin(), m.end(),
                  [](const Expr &x, const Expr &y) { return compare(x, y) < 0; });
        addInto(p, m, checkedMul(ca, cb));
      }
    return p;
  }
  default:
    return atom(expandNode(e));
  }
}

Cond expandCond(const Cond &c) {
  switch (c.kind()) {
  case CondKind::And:
    return Cond::conj(expandCond(c.left()), expandCond(c.right()));
  case CondKind::Lt: return Cond::lt(expand(c.lhs()), expand(c.rhs()));
  case CondKind::Le: return Cond::le(expand(c.lhs()), expand(c.rhs()));
  case CondKind::Eq: return Cond::eq(expand(c.lhs()), expand(c.rhs()));
  case CondKind::Ge: return Cond::ge(expand(c.lhs()), expand(c.rhs()));
  case CondKind::Gt: return Cond::gt(expand(c.lhs()), expand(c.rhs()));
  }
  return c;
}

// Non-polynomial node with expanded children.
Expr expandNode(const Expr &e) {
  switch (e.kind()) {
  case ExprKind::FloorDiv:
    return Expr::floorDiv(expand(e.lhs()), expand(e.rhs()));
  case ExprKind::Mod:
    return Expr::mod(expand(e.lhs()), expand(e.rhs()));
  case ExprKind::Select:
    return Expr::select(expandCond(e.cond()), expand(e.operand(0)),
                        expand(e.operand(1)));
  case ExprKind::Isqrt:
    return Expr::isqrt(expand(e.operand(0)));
  default:
    return e;
  }
}

bool isOp(ExprKind k) {
  return k != ExprKind::Const && k != ExprKind::Var;
}

void collectShared(const Cond &c, std::unordered_set<std::string> &seen,
                   std::unordered_set<const void *> &visited);

void collectShared(const Expr &e, std::unordered_set<std::string> &seen,
                   std::unordered_set<const void *> &visited) {
  if (!isOp(e.kind()) || !visited.insert(e.id()).second)
    return;
  seen.insert(structuralKey(e));
  if (e.kind() == ExprKind::Select)
    collectShared(e.cond(), seen, visited);
  for (std::size_t i = 0; i < e.numOperands(); ++i)
    collectShared(e.operand(i), seen, visited);
}

void collectShared(const Cond &c, std::unordered_set<std::string> &seen,
                   std::unordered_set<const void *> &visited) {
  if (c.kind() == CondKind::And) {
    collectShared(c.left(), seen, visited);
    collectShared(c.right(), seen, visited);
  } else {
    collectShared(c.lhs(), seen, visited);
    collectShared(c.rhs(), seen, visited);
  }
}

} // namespace

Expr expand(const Expr &e) {
  try {
    return fromPoly(toPoly(e));
  } catch (const Overflow &) {
    return e;
  }
}

int64_t opCount(const Cond &c) {
  if (c.kind() == CondKind::And)
    return opCount(c.left()) + opCount(c.right());
  return opCount(c.lhs()) + opCount(c.rhs());
}

int64_t opCount(const Expr &e) {
  if (!isOp(e.kind()))
    return 0;
  int64_t n = 1;
  if (e.kind() == ExprKind::Select)
    n += opCount(e.cond());
  for (std::size_t i = 0; i < e.numOperands(); ++i)
    n += opCount(e.operand(i));
  return n;
}

int64_t sharedOpCount(std::span<const Expr> exprs) {
  std::unordered_set<std::string> seen;
  std::unordered_set<const void *> visited;
  for (const auto &e : exprs)
    collectShared(e, seen, visited);
  return static_cast<int64_t>(seen.size());
}

std::string_view toString(VariantPolicy policy) {
  switch (policy) {
  case VariantPolicy::Auto: return "auto";
  case VariantPolicy::Expanded: return "expanded";
  case VariantPolicy::Unexpanded: return "unexpanded";
  }
  return "auto";
}

std::optional<VariantPolicy> parseVariantPolicy(std::string_view text) {
  if (text == "auto")
    return VariantPolicy::Auto;
  if (text == "expanded")
    return VariantPolicy::Expanded;
  if (text == "unexpanded")
    return VariantPolicy::Unexpanded;
  return std::nullopt;
}

Expr bestVariant(const Expr &e, const FactSet &facts, VariantPolicy policy) {
  if (policy == VariantPolicy::Unexpanded)
    return simplify(e, facts);
  Expr expanded = simplify(expand(e), facts);
  if (policy == VariantPolicy::Expanded)
    return expanded;
  Expr plain = simplify(e, facts);
  return opCount(expanded) < opCount(plain) ? expanded : plain;
}

} // namespace lego
