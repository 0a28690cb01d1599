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

// Range-driven rewriting.
//
// Nodes are simplified innermost first. Sums are inspected through a
// flattened view (coefficient times core, plus a constant) but rebuilt only
// when a rule actually fires, so grouping produced by layout composition is
// kept whenever nothing can be gained from touching it.

#include <algorithm>
#include <functional>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "lego/simplify.hpp"
#include "range_impl.hpp"

namespace lego {
namespace {

using detail::Interval;
using detail::IntervalCache;
using i128 = detail::Wide;

constexpr i128 kMin = std::numeric_limits<int64_t>::min();
constexpr i128 kMax = std::numeric_limits<int64_t>::max();

bool fits(i128 v) { return v >= kMin && v <= kMax; }

std::optional<int64_t> mulChecked(int64_t a, int64_t b) {
  i128 r = i128(a) * b;
  if (!fits(r))
    return std::nullopt;
  return static_cast<int64_t>(r);
}

std::optional<int64_t> addChecked(int64_t a, int64_t b) {
  i128 r = i128(a) + b;
  if (!fits(r))
    return std::nullopt;
  return static_cast<int64_t>(r);
}

struct Term {
  int64_t coeff;
  Expr core;
};

struct Sum {
  std::vector<Term> terms;
  int64_t constant = 0;
  int constantLeaves = 0;
};

// Splits a simplified node into coefficient and core.
Term termOf(const Expr &e) {
  if (e.kind() == ExprKind::Mul) {
    if (e.rhs().isConst())
      return {e.rhs().value(), e.lhs()};
    if (e.lhs().isConst())
      return {e.lhs().value(), e.rhs()};
  }
  return {1, e};
}

bool flattenInto(const Expr &e, int64_t sign, Sum &out) {
  switch (e.kind()) {
  case ExprKind::Add:
    return flattenInto(e.lhs(), sign, out) && flattenInto(e.rhs(), sign, out);
  case ExprKind::Sub:
    return flattenInto(e.lhs(), sign, out) &&
           flattenInto(e.rhs(), -sign, out);
  case ExprKind::Const: {
    auto v = mulChecked(e.value(), sign);
    auto s = v ? addChecked(out.constant, *v) : std::nullopt;
    if (!s)
      return false;
    out.constant = *s;
    ++out.constantLeaves;
    return true;
  }
  default: {
    Term t = termOf(e);
    auto c = mulChecked(t.coeff, sign);
    if (!c)
      return false;
    out.terms.push_back({*c, t.core});
    return true;
  }
  }
}

std::optional<Sum> flatten(const Expr &e) {
  Sum s;
  if (!flattenInto(e, 1, s))
    return std::nullopt;
  return s;
}

Expr scaled(const Expr &core, int64_t coeff) {
  return coeff == 1 ? core : Expr::mul(core, Expr(coeff));
}

// Rebuilds a sum in the given term order, leading with the first positive
// term, using Sub for negative coefficients and placing the constant last.
Expr buildSum(std::vector<Term> terms, int64_t constant) {
  std::erase_if(terms, [](const Term &t) { return t.coeff == 0; });
  if (terms.empty())
    return Expr(constant);
  auto pos = std::find_if(terms.begin(), terms.end(),
                          [](const Term &t) { return t.coeff > 0; });
  if (pos != terms.end() && pos != terms.begin())
    std::rotate(terms.begin(), pos, pos + 1);
  std::size_t first = 1;
  Expr acc = scaled(terms[0].core, terms[0].coeff);
  if (pos == terms.end() && constant > 0) {
    // All terms negative: lead with the constant, c - a - b.
    acc = Expr(constant);
    constant = 0;
    first = 0;
  }
  for (std::size_t i = first; i < terms.size(); ++i) {
    const Term &t = terms[i];
    if (t.coeff < 0 && t.coeff != std::numeric_limits<int64_t>::min())
      acc = Expr::sub(acc, scaled(t.core, -t.coeff));
    else
      acc = Expr::add(acc, scaled(t.core, t.coeff));
  }
  if (constant > 0)
    acc = Expr::add(acc, Expr(constant));
  else if (constant < 0 && constant != std::numeric_limits<int64_t>::min())
    acc = Expr::sub(acc, Expr(-constant));
  else if (constant != 0)
    acc = Expr::add(acc, Expr(constant));
  return acc;
}

bool isMulOf(const Expr &e, const Expr &factor, Expr *other) {
  if (e.kind() != ExprKind::Mul)
    return false;
  if (e.lhs() == factor) {
    *other = e.rhs();
    return true;
  }
  if (e.rhs() == factor) {
    *other = e.lhs();
    return true;
  }
  return false;
}

class Simplifier {
public:
  Simplifier(const FactSet &facts, const SimplifyOptions &options)
      : cache_(facts), budget_(options.budget) {}

  Expr run(const Expr &e) {
    Expr cur = e;
    for (int pass = 0; pass < 64; ++pass) {
      memo_.clear();
      Expr next = simp(cur);
      if (next == cur)
        return next;
      cur = next;
      if (exhausted_)
        break;
    }
    return cur;
  }

  int64_t firings() const { return firings_; }
  bool exhausted() const { return exhausted_; }

private:
  IntervalCache cache_;
  int64_t budget_;
  int64_t firings_ = 0;
  bool exhausted_ = false;
  std::unordered_map<const void *, std::pair<Expr, Expr>> memo_;

  bool fire() {
    if (firings_ >= budget_) {
      exhausted_ = true;
      return false;
    }
    ++firings_;
    return true;
  }

  std::optional<Interval> range(const Expr &e) { return cache_.get(e); }
  int64_t divisor(const Expr &e) { return cache_.divisor(e); }

  bool provenPositive(const Expr &e) {
    auto r = range(e);
    return r && r->lo > 0;
  }
  bool provenNonzero(const Expr &e) {
    auto r = range(e);
    return r && r->excludesZero();
  }

  Cond simpCond(const Cond &c) {
    switch (c.kind()) {
    case CondKind::And:
      return Cond::conj(simpCond(c.left()), simpCond(c.right()));
    case CondKind::Lt: return Cond::lt(simp(c.lhs()), simp(c.rhs()));
    case CondKind::Le: return Cond::le(simp(c.lhs()), simp(c.rhs()));
    case CondKind::Eq: return Cond::eq(simp(c.lhs()), simp(c.rhs()));
    case CondKind::Ge: return Cond::ge(simp(c.lhs()), simp(c.rhs()));
    case CondKind::Gt: return Cond::gt(simp(c.lhs()), simp(c.rhs()));
    }
    return c;
  }

  Expr simp(const Expr &e) {
    if (e.isConst())
      return e;
    if (auto it = memo_.find(e.id()); it != memo_.end())
      return it->second.second;
    Expr node = e;
    if (e.numOperands() > 0) {
      bool changed = false;
      std::vector<Expr> ops;
      for (std::size_t i = 0; i < e.numOperands(); ++i) {
        ops.push_back(simp(e.operand(i)));
        changed |= ops.back().id() != e.operand(i).id();
      }
      std::optional<Cond> cond;
      if (e.kind() == ExprKind::Select) {
        cond = simpCond(e.cond());
        changed |= !(*cond == e.cond());
      }
      if (changed)
        node = rebuild(e.kind(), ops, cond);
    }
    Expr result = node;
    if (!exhausted_) {
      if (auto r = rewrite(node); r && fire())
        result = simp(*r);
    }
    memo_.emplace(e.id(), std::make_pair(e, result));
    if (result.id() != e.id())
      memo_.emplace(result.id(), std::make_pair(result, result));
    return result;
  }

  static Expr rebuild(ExprKind kind, const std::vector<Expr> &ops,
                      const std::optional<Cond> &cond) {
    switch (kind) {
    case ExprKind::Add: return Expr::add(ops[0], ops[1]);
    case ExprKind::Sub: return Expr::sub(ops[0], ops[1]);
    case ExprKind::Mul: return Expr::mul(ops[0], ops[1]);
    case ExprKind::FloorDiv: return Expr::floorDiv(ops[0], ops[1]);
    case ExprKind::Mod: return Expr::mod(ops[0], ops[1]);
    case ExprKind::Select: return Expr::select(*cond, ops[0], ops[1]);
    case ExprKind::Isqrt: return Expr::isqrt(ops[0]);
    default: break;
    }
    throw Error(ErrorKind::UnsupportedNode, "cannot rebuild leaf node");
  }

  std::optional<Expr> rewrite(const Expr &e) {
    if (auto r = range(e); r && r->singleton())
      return Expr(r->lo);
    switch (e.kind()) {
    case ExprKind::Add:
    case ExprKind::Sub: return rewriteSum(e);
    case ExprKind::Mul: return rewriteMul(e);
    case ExprKind::FloorDiv: return rewriteDiv(e);
    case ExprKind::Mod: return rewriteMod(e);
    case ExprKind::Select: return rewriteSelect(e);
    case ExprKind::Isqrt:
      if (e.operand(0).isConst())
        return Expr(isqrtInt(e.operand(0).value()));
      return std::nullopt;
    default: return std::nullopt;
    }
  }

  std::optional<Expr> rewriteSum(const Expr &e) {
    auto sum = flatten(e);
    if (!sum)
      return std::nullopt;
    auto &terms = sum->terms;
    bool fired = sum->constantLeaves > 1 ||
                 (sum->constantLeaves == 1 && sum->constant == 0);

    // Combine identical cores.
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (terms[i].coeff == 0)
        continue;
      for (std::size_t j = i + 1; j < terms.size(); ++j) {
        if (terms[j].coeff == 0 || !(terms[i].core == terms[j].core))
          continue;
        auto c = addChecked(terms[i].coeff, terms[j].coeff);
        if (!c)
          return std::nullopt;
        terms[i].coeff = *c;
        terms[j].coeff = 0;
        fired = true;
      }
    }
    for (const auto &t : terms)
      fired |= t.coeff == 0;

    // a*(x/a) + x%a -> x.
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (terms[i].coeff == 0)
        continue;
      const Expr &core = terms[i].core;
      std::optional<Expr> x, a;
      int64_t k = 0;
      Expr other = Expr(0);
      if (core.kind() == ExprKind::FloorDiv && core.rhs().isConst() &&
          core.rhs().value() != 0 &&
          terms[i].coeff % core.rhs().value() == 0) {
        x = core.lhs();
        a = core.rhs();
        k = terms[i].coeff / core.rhs().value();
      } else if (core.kind() == ExprKind::Mul) {
        for (int side = 0; side < 2 && !x; ++side) {
          const Expr &q = core.operand(side);
          const Expr &f = core.operand(1 - side);
          if (q.kind() == ExprKind::FloorDiv && q.rhs() == f &&
              provenNonzero(f)) {
            x = q.lhs();
            a = f;
            k = terms[i].coeff;
          }
        }
      }
      if (!x)
        continue;
      for (std::size_t j = 0; j < terms.size(); ++j) {
        const Expr &m = terms[j].core;
        if (j == i || terms[j].coeff != k || m.kind() != ExprKind::Mod ||
            !(m.lhs() == *x) || !(m.rhs() == *a))
          continue;
        terms[i] = {k, *x};
        terms[j].coeff = 0;
        fired = true;
        break;
      }
    }
    if (!fired)
      return std::nullopt;
    return buildSum(terms, sum->constant);
  }

  std::optional<Expr> rewriteMul(const Expr &e) {
    const Expr &a = e.lhs();
    const Expr &b = e.rhs();
    if (a.isConst() && b.isConst()) {
      if (auto v = mulChecked(a.value(), b.value()))
        return Expr(*v);
      return std::nullopt;
    }
    if (a.isConst())
      return Expr::mul(b, a);
    if (b.isConst(0))
      return Expr(0);
    if (b.isConst(1))
      return a;
    if (b.isConst() && a.kind() == ExprKind::Mul && a.rhs().isConst()) {
      if (auto v = mulChecked(a.rhs().value(), b.value()))
        return Expr::mul(a.lhs(), Expr(*v));
      return std::nullopt;
    }
    // Hoist a constant coefficient to the outermost multiplication.
    if (!b.isConst()) {
      if (a.kind() == ExprKind::Mul && a.rhs().isConst())
        return Expr::mul(Expr::mul(a.lhs(), b), a.rhs());
      if (b.kind() == ExprKind::Mul && b.rhs().isConst())
        return Expr::mul(Expr::mul(a, b.lhs()), b.rhs());
    }
    return std::nullopt;
  }

  // Exact quotient of a term by a divisor that syntactically divides it.
  static std::optional<Term> divideTerm(const Term &t, const Expr &d) {
    if (d.isConst()) {
      if (t.coeff % d.value() == 0)
        return Term{t.coeff / d.value(), t.core};
      return std::nullopt;
    }
    if (t.core == d)
      return Term{t.coeff, Expr(1)};
    Expr other = Expr(0);
    if (isMulOf(t.core, d, &other))
      return Term{t.coeff, other};
    return std::nullopt;
  }

  std::optional<Expr> rewriteDiv(const Expr &e) {
    const Expr &n = e.lhs();
    const Expr &d = e.rhs();
    if (n.isConst() && d.isConst())
      return Expr(floorDivInt(n.value(), d.value()));
    if (d.isConst(1)) {
      // (n + y) / 1 -> n + (y / 1); the x / 1 fold then removes the rest.
      if (n.kind() == ExprKind::Add)
        return Expr::add(n.lhs(), Expr::floorDiv(n.rhs(), Expr(1)));
      return n;
    }
    if (d.isConst(-1))
      return Expr::mul(n, Expr(-1));
    bool dPos = provenPositive(d);
    // (x % d) / d -> 0.
    if (dPos && n.kind() == ExprKind::Mod && n.rhs() == d)
      return Expr(0);
    // x / a / b -> x / (a*b).
    if (d.isConst() && d.value() > 0 && n.kind() == ExprKind::FloorDiv &&
        n.rhs().isConst() && n.rhs().value() > 0) {
      if (auto v = mulChecked(n.rhs().value(), d.value()))
        return Expr::floorDiv(n.lhs(), Expr(*v));
    }
    if (!provenNonzero(d))
      return std::nullopt;
    auto sum = flatten(n);
    if (!sum)
      return std::nullopt;

    // (d*q + r) / d -> q + r / d.
    std::vector<Term> quotient, exact, rest;
    int64_t qConst = 0, rConst = sum->constant;
    if (d.isConst()) {
      qConst = floorDivInt(sum->constant, d.value());
      rConst = floorModInt(sum->constant, d.value());
    }
    for (const auto &t : sum->terms) {
      if (auto q = divideTerm(t, d)) {
        if (q->core.isConst()) {
          auto v = addChecked(qConst, q->coeff);
          if (!v)
            return std::nullopt;
          qConst = *v;
        } else {
          quotient.push_back(*q);
        }
      } else if (d.isConst() && isExactlyDivisible(t, d.value())) {
        exact.push_back(t);
      } else {
        rest.push_back(t);
      }
    }
    bool useful = !quotient.empty() ||
                  (!exact.empty() && (!rest.empty() || rConst != 0));
    if (useful) {
      std::optional<Expr> q;
      if (!quotient.empty() || qConst != 0)
        q = buildSum(quotient, qConst);
      if (!exact.empty()) {
        Expr part = Expr::floorDiv(buildSum(exact, 0), d);
        q = q ? Expr::add(*q, part) : part;
      }
      if (rest.empty() && rConst == 0)
        return *q;
      Expr tail = Expr::floorDiv(buildSum(rest, rConst), d);
      return q ? Expr::add(*q, tail) : tail;
    }

    // (c*X + r) / (c*m) -> X / m when 0 <= r < c.
    if (d.isConst() && d.value() > 1) {
      if (auto g = gcdSplit(*sum, d.value()))
        return Expr::floorDiv(g->first, Expr(d.value() / g->second));
    }
    return std::nullopt;
  }

  bool isExactlyDivisible(const Term &t, int64_t d) {
    int64_t kd = divisor(t.core);
    if (kd == 0)
      return true;
    auto p = mulChecked(t.coeff, kd);
    return p && *p % d == 0;
  }

  // Divisors c of d with 1 < c < d that divide at least one coefficient,
  // largest first.
  static std::vector<int64_t> gcdCandidates(const Sum &sum, int64_t d) {
    std::vector<int64_t> out;
    for (const auto &t : sum.terms) {
      int64_t c = std::gcd(d, t.coeff);
      if (c > 1 && c < d)
        out.push_back(c);
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // Writes the sum as c*X + r with 0 <= r < c for the largest workable
  // candidate c, returning X and c.
  std::optional<std::pair<Expr, int64_t>> gcdSplit(const Sum &sum, int64_t d) {
    for (int64_t c : gcdCandidates(sum, d)) {
      std::vector<Term> xs, rs;
      for (const auto &t : sum.terms) {
        if (t.coeff % c == 0)
          xs.push_back({t.coeff / c, t.core});
        else
          rs.push_back(t);
      }
      int64_t qc = floorDivInt(sum.constant, c);
      int64_t rc = floorModInt(sum.constant, c);
      auto rr = range(buildSum(rs, rc));
      if (!rr || rr->lo < 0 || rr->hi >= c)
        continue;
      return std::make_pair(buildSum(xs, qc), c);
    }
    return std::nullopt;
  }

  std::optional<Expr> rewriteMod(const Expr &e) {
    const Expr &n = e.lhs();
    const Expr &d = e.rhs();
    if (n.isConst() && d.isConst())
      return Expr(floorModInt(n.value(), d.value()));
    if (d.isConst(1) || d.isConst(-1))
      return Expr(0);
    if (d.isConst()) {
      int64_t kd = divisor(n);
      if (kd == 0 || kd % d.value() == 0)
        return Expr(0);
    }
    auto nr = range(n);
    auto dr = range(d);
    // x % a -> x when 0 <= x < a, and its shifted form.
    if (nr && dr && dr->positive()) {
      if (nr->lo >= 0 && nr->hi < dr->lo)
        return n;
      if (d.isConst()) {
        int64_t k = floorDivInt(nr->lo, d.value());
        if (k != 0 && floorDivInt(nr->hi, d.value()) == k) {
          if (auto off = mulChecked(k, d.value()))
            return Expr::sub(n, Expr(*off));
        }
      }
    }
    // (x % a) % b -> x % b for b | a.
    if (d.isConst() && d.value() > 0 && n.kind() == ExprKind::Mod &&
        n.rhs().isConst() && n.rhs().value() > 0 &&
        n.rhs().value() % d.value() == 0)
      return Expr::mod(n.lhs(), d);
    if (!provenNonzero(d))
      return std::nullopt;
    auto sum = flatten(n);
    if (!sum)
      return std::nullopt;

    // (d*q + r) % d -> r % d.
    std::vector<Term> kept;
    bool dropped = false;
    for (const auto &t : sum->terms) {
      if (divideTerm(t, d) ||
          (d.isConst() && isExactlyDivisible(t, d.value())))
        dropped = true;
      else
        kept.push_back(t);
    }
    int64_t c = sum->constant;
    if (d.isConst()) {
      int64_t reduced = floorModInt(c, d.value());
      dropped |= reduced != c;
      c = reduced;
    }
    if (dropped)
      return Expr::mod(buildSum(kept, c), d);

    // (c*X + r) % (c*m) -> c*(X % m) + r when 0 <= r < c.
    if (d.isConst() && d.value() > 1) {
      if (auto split = gcdSplit(*sum, d.value())) {
        int64_t g = split->second;
        std::vector<Term> rs;
        for (const auto &t : sum->terms)
          if (t.coeff % g != 0)
            rs.push_back(t);
        Expr rest = buildSum(rs, floorModInt(sum->constant, g));
        Expr candidate = Expr::add(
            Expr::mul(Expr::mod(split->first, Expr(d.value() / g)), Expr(g)),
            rest);
        // Only worthwhile when the inner modulo collapses.
        Simplifier probe(cache_.facts(), SimplifyOptions{budget_ - firings_});
        Expr best = probe.run(candidate);
        if (opCount(best) < opCount(e))
          return best;
      }
    }
    return std::nullopt;
  }

  std::optional<Expr> rewriteSelect(const Expr &e) {
    if (auto taken = detail::decide(e.cond(), cache_))
      return *taken ? e.operand(0) : e.operand(1);
    if (e.operand(0) == e.operand(1))
      return e.operand(0);
    return std::nullopt;
  }
};

} // namespace

Expr simplify(const Expr &e, const FactSet &facts,
              const SimplifyOptions &options, SimplifyStats *stats) {
  Simplifier s(facts, options);
  Expr out = s.run(e);
  if (stats) {
    stats->firings = s.firings();
    stats->budgetExhausted = s.exhausted();
  }
  return out;
}

} // namespace lego
