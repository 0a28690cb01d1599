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

// Interval reasoning over Expr trees. Intervals are closed internally and
// computed in 128-bit arithmetic so intermediate products cannot wrap;
// anything that does not fit in int64 is reported as unknown.

#include <algorithm>
#include <numeric>
#include <optional>

#include "lego/simplify.hpp"
#include "range_impl.hpp"

namespace lego {

FactSet &FactSet::addRange(const std::string &var, VarRange range) {
  auto it = ranges_.find(var);
  if (it == ranges_.end()) {
    ranges_.emplace(var, range);
    return *this;
  }
  int64_t lo = std::max(it->second.lo, range.lo);
  int64_t hi = std::min(it->second.hi, range.hi);
  it->second = VarRange(lo, hi); // throws InvalidRange when disjoint
  return *this;
}

FactSet &FactSet::addDivisibility(const std::string &var, int64_t modulus) {
  if (modulus < 2)
    throw Error(ErrorKind::InvalidRange,
                "divisibility modulus must be >= 2, got " +
                    std::to_string(modulus));
  auto &d = divisors_[var];
  d = d == 0 ? modulus : std::lcm(d, modulus);
  return *this;
}

FactSet &FactSet::merge(const FactSet &other) {
  for (const auto &[name, r] : other.ranges_)
    addRange(name, r);
  for (const auto &[name, d] : other.divisors_)
    addDivisibility(name, d);
  return *this;
}

std::optional<VarRange> FactSet::rangeOf(const std::string &var) const {
  auto it = ranges_.find(var);
  if (it == ranges_.end())
    return std::nullopt;
  return it->second;
}

int64_t FactSet::divisorOf(const std::string &var) const {
  auto it = divisors_.find(var);
  return it == divisors_.end() ? 1 : it->second;
}

namespace detail {

namespace {
using i128 = Wide;
constexpr i128 kMin = std::numeric_limits<int64_t>::min();
constexpr i128 kMax = std::numeric_limits<int64_t>::max();

std::optional<Interval> make(i128 lo, i128 hi) {
  if (lo < kMin || hi > kMax || lo > hi)
    return std::nullopt;
  return Interval{static_cast<int64_t>(lo), static_cast<int64_t>(hi)};
}

i128 floorDiv128(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0)))
    --q;
  return q;
}

// Variable range: fact intersected with the node-carried range.
std::optional<Interval> varInterval(const Expr &e, const FactSet &facts) {
  auto fact = facts.rangeOf(e.name());
  const auto &own = e.range();
  if (!fact && !own)
    return std::nullopt;
  int64_t lo = std::numeric_limits<int64_t>::min();
  int64_t hi = std::numeric_limits<int64_t>::max();
  if (fact) {
    lo = std::max(lo, fact->lo);
    hi = std::min(hi, fact->hi);
  }
  if (own) {
    lo = std::max(lo, own->lo);
    hi = std::min(hi, own->hi);
  }
  if (lo >= hi)
    return std::nullopt;
  return Interval{lo, hi - 1};
}

std::optional<Interval> compute(const Expr &e, IntervalCache &cache) {
  auto sub = [&](std::size_t i) { return cache.get(e.operand(i)); };
  switch (e.kind()) {
  case ExprKind::Const:
    return Interval{e.value(), e.value()};
  case ExprKind::Var:
    return varInterval(e, cache.facts());
  case ExprKind::Add: {
    auto a = sub(0), b = sub(1);
    if (!a || !b)
      return std::nullopt;
    return make(i128(a->lo) + b->lo, i128(a->hi) + b->hi);
  }
  case ExprKind::Sub: {
    auto a = sub(0), b = sub(1);
    if (!a || !b)
      return std::nullopt;
    return make(i128(a->lo) - b->hi, i128(a->hi) - b->lo);
  }
  case ExprKind::Mul: {
    auto a = sub(0), b = sub(1);
    if (!a || !b)
      return std::nullopt;
    i128 c[] = {i128(a->lo) * b->lo, i128(a->lo) * b->hi,
                i128(a->hi) * b->lo, i128(a->hi) * b->hi};
    return make(*std::min_element(c, c + 4), *std::max_element(c, c + 4));
  }
  case ExprKind::FloorDiv: {
    auto n = sub(0), d = sub(1);
    if (!n || !d)
      return std::nullopt;
    if (d->lo <= 0 && d->hi >= 0) {
      // Any nonzero divisor keeps |n / d| <= |n| (floor may add one).
      i128 m = std::max(-i128(n->lo), i128(n->hi));
      m = std::max<i128>(m, 0);
      return make(-m - 1, m);
    }
    i128 c[] = {floorDiv128(n->lo, d->lo), floorDiv128(n->lo, d->hi),
                floorDiv128(n->hi, d->lo), floorDiv128(n->hi, d->hi)};
    return make(*std::min_element(c, c + 4), *std::max_element(c, c + 4));
  }
  case ExprKind::Mod: {
    auto n = sub(0), d = sub(1);
    if (!n || !d)
      return std::nullopt;
    if (d->lo > 0) {
      if (n->lo >= 0 && n->hi < d->lo)
        return *n;
      if (n->lo >= 0)
        return make(0, std::min<i128>(n->hi, i128(d->hi) - 1));
      return make(0, i128(d->hi) - 1);
    }
    if (d->hi < 0)
      return make(i128(d->lo) + 1, 0);
    i128 m = std::max(-i128(d->lo), i128(d->hi)) - 1;
    return make(-m, m);
  }
  case ExprKind::Select: {
    auto decided = decide(e.cond(), cache);
    if (decided)
      return cache.get(*decided ? e.operand(0) : e.operand(1));
    auto a = sub(0), b = sub(1);
    if (!a || !b)
      return std::nullopt;
    return Interval{std::min(a->lo, b->lo), std::max(a->hi, b->hi)};
  }
  case ExprKind::Isqrt: {
    auto a = sub(0);
    if (!a)
      return std::nullopt;
    return Interval{isqrtInt(a->lo), isqrtInt(a->hi)};
  }
  }
  return std::nullopt;
}
} // namespace

std::optional<Interval> IntervalCache::get(const Expr &e) {
  auto it = memo_.find(e.id());
  if (it != memo_.end())
    return it->second.second;
  auto r = compute(e, *this);
  memo_.emplace(e.id(), std::make_pair(e, r));
  return r;
}

std::optional<bool> decide(const Cond &c, IntervalCache &cache) {
  if (c.kind() == CondKind::And) {
    auto l = decide(c.left(), cache);
    auto r = decide(c.right(), cache);
    if ((l && !*l) || (r && !*r))
      return false;
    if (l && r)
      return true;
    return std::nullopt;
  }
  auto a = cache.get(c.lhs());
  auto b = cache.get(c.rhs());
  if (!a || !b)
    return std::nullopt;
  switch (c.kind()) {
  case CondKind::Lt:
    if (a->hi < b->lo) return true;
    if (a->lo >= b->hi) return false;
    break;
  case CondKind::Le:
    if (a->hi <= b->lo) return true;
    if (a->lo > b->hi) return false;
    break;
  case CondKind::Gt:
    if (a->lo > b->hi) return true;
    if (a->hi <= b->lo) return false;
    break;
  case CondKind::Ge:
    if (a->lo >= b->hi) return true;
    if (a->hi < b->lo) return false;
    break;
  case CondKind::Eq:
    if (a->lo == a->hi && b->lo == b->hi && a->lo == b->lo) return true;
    if (a->hi < b->lo || b->hi < a->lo) return false;
    break;
  case CondKind::And:
    break;
  }
  return std::nullopt;
}

int64_t IntervalCache::divisor(const Expr &e) {
  auto it = divisors_.find(e.id());
  if (it != divisors_.end())
    return it->second.second;
  int64_t d = 1;
  auto sat = [](i128 v) -> int64_t {
    return v > kMax ? 0 : static_cast<int64_t>(v);
  };
  switch (e.kind()) {
  case ExprKind::Const:
    d = e.value() < 0 ? -e.value() : e.value();
    break;
  case ExprKind::Var:
    d = facts_.divisorOf(e.name());
    break;
  case ExprKind::Add:
  case ExprKind::Sub:
    d = std::gcd(divisor(e.lhs()), divisor(e.rhs()));
    break;
  case ExprKind::Mul: {
    int64_t a = divisor(e.lhs()), b = divisor(e.rhs());
    d = (a == 0 || b == 0) ? 0 : sat(i128(a) * b);
    if (d == 0 && a != 0 && b != 0)
      d = std::max(a, b); // product overflows int64; keep a safe factor
    break;
  }
  case ExprKind::Mod: {
    // n % m is divisible by gcd(divisor(n), divisor(m)).
    d = std::gcd(divisor(e.lhs()), divisor(e.rhs()));
    break;
  }
  case ExprKind::Select:
    d = std::gcd(divisor(e.operand(0)), divisor(e.operand(1)));
    break;
  default:
    d = 1;
    break;
  }
  if (auto r = get(e); r && r->lo == 0 && r->hi == 0)
    d = 0;
  else if (d == 0)
    d = 1; // only a provably-zero value may report 0
  divisors_.emplace(e.id(), std::make_pair(e, d));
  return d;
}

} // namespace detail

VarRange rangeOf(const Expr &e, const FactSet &facts) {
  detail::IntervalCache cache(facts);
  auto r = cache.get(e);
  if (!r) {
    // Distinguish a missing range from an unrepresentable one.
    std::function<void(const Expr &)> findUnbound;
    findUnbound = [&](const Expr &x) {
      if (x.isVar() && !x.range() && !facts.rangeOf(x.name()))
        throw Error(ErrorKind::UnboundVariable,
                    "variable '" + x.name() + "' has no range");
      for (std::size_t i = 0; i < x.numOperands(); ++i)
        findUnbound(x.operand(i));
    };
    findUnbound(e);
    throw Error(ErrorKind::InvalidRange,
                "expression range exceeds the 64-bit integer domain");
  }
  if (r->hi == std::numeric_limits<int64_t>::max())
    throw Error(ErrorKind::InvalidRange,
                "expression range exceeds the 64-bit integer domain");
  return VarRange(r->lo, r->hi + 1);
}

int64_t knownDivisor(const Expr &e, const FactSet &facts) {
  detail::IntervalCache cache(facts);
  return cache.divisor(e);
}

} // namespace lego
