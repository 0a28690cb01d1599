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

// Built-in GenP permutations.

#include "lego/layout.hpp"

namespace lego {
namespace {

void requireRank(const Shape &shape, std::size_t rank, const char *name) {
  if (shape.rank() != rank)
    throw Error(ErrorKind::InvalidShape,
                std::string(name) + " needs a " + std::to_string(rank) +
                    "-D tile, got " + shape.toString());
}

PermFn identityPerm(const Shape &shape) {
  PermFn fn;
  fn.name = "identity";
  fn.fwd = [shape](std::span<const int64_t> i) { return canonFlatten(shape, i); };
  fn.inv = [shape](int64_t f) { return canonUnflatten(shape, f); };
  fn.fwdSymbolic = [shape](std::span<const Expr> i) {
    return canonFlatten(shape, i);
  };
  fn.invSymbolic = [shape](const Expr &f) { return canonUnflatten(shape, f); };
  return fn;
}

// Reverses every dimension, so the last element lands first.
PermFn reversePerm(const Shape &shape, std::string name) {
  PermFn fn;
  fn.name = std::move(name);
  fn.fwd = [shape](std::span<const int64_t> i) {
    std::vector<int64_t> r(i.size());
    for (std::size_t k = 0; k < i.size(); ++k)
      r[k] = shape[k] - 1 - i[k];
    return canonFlatten(shape, r);
  };
  fn.inv = [shape](int64_t f) {
    auto r = canonUnflatten(shape, f);
    for (std::size_t k = 0; k < r.size(); ++k)
      r[k] = shape[k] - 1 - r[k];
    return r;
  };
  fn.fwdSymbolic = [shape](std::span<const Expr> i) {
    std::vector<Expr> r;
    for (std::size_t k = 0; k < i.size(); ++k)
      r.push_back(Expr(shape[k] - 1) - i[k]);
    return canonFlatten(shape, r);
  };
  fn.invSymbolic = [shape](const Expr &f) {
    auto r = canonUnflatten(shape, f);
    for (std::size_t k = 0; k < r.size(); ++k)
      r[k] = Expr(shape[k] - 1) - r[k];
    return r;
  };
  return fn;
}

// Identity except that the last element collides with its predecessor.
PermFn corruptPerm(const Shape &shape) {
  PermFn fn = identityPerm(shape);
  fn.name = "corrupt";
  int64_t n = shape.numel();
  fn.fwd = [shape, n](std::span<const int64_t> i) {
    return std::min(canonFlatten(shape, i), std::max<int64_t>(n - 2, 0));
  };
  fn.fwdSymbolic = [shape, n](std::span<const Expr> i) {
    Expr f = canonFlatten(shape, i);
    int64_t cap = std::max<int64_t>(n - 2, 0);
    return Expr::select(Cond::lt(f, Expr(cap)), f, Expr(cap));
  };
  fn.trusted = true;
  return fn;
}

} // namespace

PermFn antidiagPerm(int64_t n) {
  if (n < 1)
    throw Error(ErrorKind::InvalidShape, "antidiag needs n >= 1");
  PermFn fn;
  fn.name = "antidiag";
  fn.fwd = [n](std::span<const int64_t> idx) {
    int64_t i = idx[0], j = idx[1];
    int64_t a = i + j + 1;
    if (a <= n)
      return i + a * (a - 1) / 2;
    a = 2 * n - a;
    int64_t gauss = a * (a - 1) / 2;
    return n * n - n + i - gauss;
  };
  fn.inv = [n](int64_t x0) {
    int64_t s = n * (n + 1) / 2;
    int64_t x = x0 < s ? x0 : n * n - 1 - x0;
    int64_t a = isqrtInt(2 * x);
    a += x >= a * (a + 1) / 2 ? 1 : 0;
    int64_t i = x - a * (a - 1) / 2;
    int64_t j = a - i - 1;
    if (x0 < s)
      return std::vector<int64_t>{i, j};
    return std::vector<int64_t>{n - 1 - i, n - 1 - j};
  };
  fn.fwdSymbolic = [n](std::span<const Expr> idx) {
    const Expr &i = idx[0];
    const Expr &j = idx[1];
    Expr a = i + j + Expr(1);
    Expr lower = i + a * (a - Expr(1)) / Expr(2);
    Expr b = Expr(2 * n) - a;
    Expr upper = Expr(n * n - n) + i - b * (b - Expr(1)) / Expr(2);
    return Expr::select(Cond::le(a, Expr(n)), lower, upper);
  };
  fn.invSymbolic = [n](const Expr &x0) {
    int64_t s = n * (n + 1) / 2;
    Cond low = Cond::lt(x0, Expr(s));
    Expr x = Expr::select(low, x0, Expr(n * n - 1) - x0);
    Expr a0 = Expr::isqrt(Expr(2) * x);
    Expr a = a0 + Expr::select(Cond::ge(x, a0 * (a0 + Expr(1)) / Expr(2)),
                               Expr(1), Expr(0));
    Expr i = x - a * (a - Expr(1)) / Expr(2);
    Expr j = a - i - Expr(1);
    return std::vector<Expr>{Expr::select(low, i, Expr(n - 1) - i),
                             Expr::select(low, j, Expr(n - 1) - j)};
  };
  return fn;
}

PermRegistry PermRegistry::builtins() {
  PermRegistry r;
  r.add("identity", identityPerm);
  r.add("rev", [](const Shape &s) { return reversePerm(s, "rev"); });
  r.add("rev1d", [](const Shape &s) {
    requireRank(s, 1, "rev1d");
    return reversePerm(s, "rev1d");
  });
  r.add("rev2d", [](const Shape &s) {
    requireRank(s, 2, "rev2d");
    return reversePerm(s, "rev2d");
  });
  r.add("antidiag", [](const Shape &s) {
    requireRank(s, 2, "antidiag");
    if (s[0] != s[1])
      throw Error(ErrorKind::InvalidShape,
                  "antidiag needs a square tile, got " + s.toString());
    return antidiagPerm(s[0]);
  });
  return r;
}

PermRegistry PermRegistry::withTestHooks() {
  PermRegistry r = builtins();
  r.add("corrupt", corruptPerm);
  return r;
}

PermRegistry &PermRegistry::add(const std::string &name, PermFactory factory) {
  factories_[name] = std::move(factory);
  return *this;
}

bool PermRegistry::contains(const std::string &name) const {
  return factories_.count(name) != 0;
}

PermFn PermRegistry::make(const std::string &name, const Shape &shape) const {
  auto it = factories_.find(name);
  if (it == factories_.end()) {
    std::string known;
    for (const auto &[k, v] : factories_)
      known += (known.empty() ? "" : ", ") + k;
    throw Error(ErrorKind::UnknownBuiltinPerm,
                "no built-in permutation '" + name + "' (known: " + known + ")");
  }
  PermFn fn = it->second(shape);
  fn.name = name;
  return fn;
}

std::vector<std::string> PermRegistry::names() const {
  std::vector<std::string> out;
  for (const auto &[k, v] : factories_)
    out.push_back(k);
  return out;
}

} // namespace lego
