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

#include <set>

#include "lego/layout.hpp"

namespace lego {
namespace {

std::string idxText(std::span<const int64_t> v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i)
    s += (i ? "," : "") + std::to_string(v[i]);
  return s + "]";
}

ValidationCheck fail(std::string name, ErrorKind kind, std::string detail) {
  return {std::move(name), false, kind, std::move(detail)};
}

// Exhaustive sweep of a GenP: injectivity, image bounds, inv agreement and
// symbolic/concrete agreement.
std::vector<ValidationCheck> checkGenP(const GenP &p, bool injectiveMode,
                                       int64_t bound, const std::string &where) {
  const std::string base = where + " GenP " + p.fn().name + " over " +
                           p.shape().toString();
  if (p.fn().trusted)
    return {{base + " bijectivity", true, std::nullopt, "trusted"}};
  int64_t n = p.numel();
  if (n > bound)
    return {{base + " bijectivity", true, std::nullopt,
             "trusted: " + std::to_string(n) + " elements exceed the bound " +
                 std::to_string(bound)}};

  std::vector<Expr> vars;
  Env env;
  for (std::size_t k = 0; k < p.rank(); ++k)
    vars.push_back(Expr::var("i" + std::to_string(k),
                             VarRange(0, p.shape()[k])));
  Expr fwdSym = p.fn().fwdSymbolic(vars);
  Expr flatVar = Expr::var("f", VarRange(0, n));
  std::vector<Expr> invSym;
  if (!injectiveMode)
    invSym = p.fn().invSymbolic(flatVar);

  std::map<int64_t, std::vector<int64_t>> seen;
  std::vector<ValidationCheck> out;
  std::optional<ValidationCheck> bij, sym;
  for (int64_t flat = 0; flat < n && !bij; ++flat) {
    auto idx = canonUnflatten(p.shape(), flat);
    int64_t f = p.fn().fwd(idx);
    bool inRange = injectiveMode ? f >= 0 : (f >= 0 && f < n);
    if (!inRange) {
      bij = fail(base + " bijectivity", ErrorKind::BijectivityViolation,
                 "fwd(" + idxText(idx) + ") = " + std::to_string(f) +
                     " is outside the flat space");
      break;
    }
    auto [it, fresh] = seen.emplace(f, idx);
    if (!fresh) {
      bij = fail(base + " bijectivity", ErrorKind::BijectivityViolation,
                 "fwd(" + idxText(it->second) + ") = fwd(" + idxText(idx) +
                     ") = " + std::to_string(f));
      break;
    }
    if (!injectiveMode && p.fn().inv(f) != idx) {
      bij = fail(base + " bijectivity", ErrorKind::BijectivityViolation,
                 "inv(fwd(" + idxText(idx) + ")) = " +
                     idxText(p.fn().inv(f)));
      break;
    }
    if (!sym) {
      for (std::size_t k = 0; k < idx.size(); ++k)
        env["i" + std::to_string(k)] = idx[k];
      env["f"] = flat;
      int64_t fs = eval(fwdSym, env);
      if (fs != f)
        sym = fail(base + " symbolic agreement", ErrorKind::BijectivityViolation,
                   "symbolic fwd(" + idxText(idx) + ") = " +
                       std::to_string(fs) + ", concrete " + std::to_string(f));
      if (!sym && !injectiveMode) {
        auto ci = p.fn().inv(flat);
        for (std::size_t k = 0; k < invSym.size() && !sym; ++k)
          if (eval(invSym[k], env) != ci[k])
            sym = fail(base + " symbolic agreement",
                       ErrorKind::BijectivityViolation,
                       "symbolic inv(" + std::to_string(flat) +
                           ") differs from concrete " + idxText(ci));
      }
    }
  }
  out.push_back(bij ? *bij
                    : ValidationCheck{base + (injectiveMode ? " injectivity"
                                                            : " bijectivity"),
                                      true, std::nullopt,
                                      std::to_string(n) + " points"});
  if (!bij)
    out.push_back(sym ? *sym
                      : ValidationCheck{base + " symbolic agreement", true,
                                        std::nullopt,
                                        std::to_string(n) + " points"});
  return out;
}

void checkGroupBy(const GroupBy &g, int64_t bound, ValidationReport &report) {
  int64_t n = g.numel();
  for (std::size_t i = 0; i < g.chain().size(); ++i) {
    const OrderBy &o = g.chain()[i];
    std::string name = "OrderBy #" + std::to_string(i + 1) + " element count";
    if (o.numel() == n)
      report.checks.push_back({name, true, std::nullopt,
                               std::to_string(n) + " elements"});
    else
      report.checks.push_back(
          fail(name, ErrorKind::ShapeMismatch,
               "GroupBy has " + std::to_string(n) + " elements, OrderBy " +
                   o.toString() + " has " + std::to_string(o.numel())));
    for (std::size_t j = 0; j < o.perms().size(); ++j)
      if (const GenP *p = o.perms()[j].genP()) {
        std::string where = "OrderBy #" + std::to_string(i + 1) + " perm #" +
                            std::to_string(j + 1);
        for (auto &c : checkGenP(*p, g.injective(), bound, where))
          report.checks.push_back(std::move(c));
      }
  }
}

} // namespace

bool ValidationReport::ok() const { return firstFailure() == nullptr; }

const ValidationCheck *ValidationReport::firstFailure() const {
  for (const auto &c : checks)
    if (!c.passed)
      return &c;
  return nullptr;
}

ValidationReport validate(const Layout &layout, int64_t genpBound) {
  ValidationReport report;
  if (const GroupBy *g = layout.groupBy()) {
    checkGroupBy(*g, genpBound, report);
    return report;
  }
  const ExpandBy &x = *layout.expandBy();
  std::string name = "ExpandBy inner element count";
  if (x.inner().numel() == x.expanded().numel())
    report.checks.push_back({name, true, std::nullopt,
                             std::to_string(x.expanded().numel()) +
                                 " elements"});
  else
    report.checks.push_back(
        fail(name, ErrorKind::ShapeMismatch,
             "inner layout has " + std::to_string(x.inner().numel()) +
                 " elements, expanded space " + x.expanded().toString() +
                 " has " + std::to_string(x.expanded().numel())));
  checkGroupBy(x.inner(), genpBound, report);
  return report;
}

} // namespace lego
