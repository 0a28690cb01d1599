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

// One pass/fail line per acceptance criterion. Tolerances and time limits
// are pinned below; exit status is nonzero if any criterion fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "expr_oracle.hpp"
#include "files.hpp"
#include "lego/dsl.hpp"
#include "lego/layout.hpp"
#include "lego/simplify.hpp"
#include "lego/template.hpp"
#include "oracle.hpp"
#include "text_eval.hpp"

namespace {

using namespace lego;
using testing::LayoutSpec;
using testing::Point;
using Kind = testing::PermSpec::Kind;
using Index = std::vector<int64_t>;

constexpr double kLimitAnchors = 1.0;
constexpr double kLimitCorpus = 60.0;
constexpr double kLimitAntidiag = 1.0;
constexpr double kLimitSimplifier = 30.0;
constexpr double kLimitStrides = 10.0;
constexpr double kLimitOpCount = 10.0;
constexpr double kLimitExpand = 1.0;
constexpr double kLimitTemplate = 5.0;
constexpr double kLimitCoherence = 60.0;

constexpr int kCorpusSize = 32;
constexpr int64_t kCorpusMaxElems = 100'000;
constexpr uint64_t kCorpusSeed = 2026;
constexpr int64_t kOpCountLimit = 12; // 9 reported ops plus 3 for convention
constexpr int kRandomExprs = 200;
constexpr int kSamplesPerPlaceholder = 1000;
constexpr int kSubstitutionsPerLayout = 1000;

/// Failures accumulate here; an empty list means pass.
struct Outcome {
  std::vector<std::string> failures;
  std::string summary;

  void require(bool ok, const std::string &what) {
    if (!ok && failures.size() < 5)
      failures.push_back(what);
    else if (!ok)
      ++suppressed;
  }
  int suppressed = 0;
};

std::string str(const Index &v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i)
    s += (i ? "," : "") + std::to_string(v[i]);
  return "[" + s + "]";
}

std::vector<LayoutSpec> corpus() {
  std::mt19937_64 rng(kCorpusSeed);
  std::vector<LayoutSpec> specs;
  for (int n = 0; n < kCorpusSize; ++n)
    specs.push_back(testing::randomSpec(rng, kCorpusMaxElems));
  return specs;
}

// ---- 1 ---------------------------------------------------------------------

void anchors(Outcome &o) {
  Layout reshape = parseLayout("GroupBy([6,4]).OrderBy(RegP([2,2],[2,1]), GenP([3,2], rev2d))");
  Layout stage1 = parseLayout("GroupBy([6,6]).OrderBy(RegP([2,3,2,3],[1,3,2,4]))");
  Layout twoStage = parseLayout("GroupBy([6,6]).OrderBy(RegP([2,3,2,3],[1,3,2,4]))"
                           ".OrderBy(RegP([2,2],[2,1]), GenP([3,3], antidiag))");
  auto a = reshape.apply(Index{4, 1});
  o.require(a == 6, "reshape apply([4,1]) = " + std::to_string(a.value_or(-1)));
  o.require(reshape.inv(6) == Index{4, 1}, "reshape inv(6) = " + str(reshape.inv(6)));
  auto b = twoStage.apply(Index{4, 2});
  o.require(b == 15, "two-stage apply([4,2]) = " + std::to_string(b.value_or(-1)));
  o.require(twoStage.inv(15) == Index{4, 2}, "two-stage inv(15) = " + str(twoStage.inv(15)));
  auto c = stage1.apply(Index{4, 2});
  o.require(c == 23, "O2 intermediate for [4,2] = " + std::to_string(c.value_or(-1)));
  o.summary = "apply([4,1])=6, inv(6)=[4,1], apply([4,2])=15, inv(15)=[4,2], O2=23";
}

// ---- 2 ---------------------------------------------------------------------

void bijectivity(Outcome &o) {
  int64_t points = 0, withGenP = 0, withRegP = 0, multiStage = 0;
  for (const auto &spec : corpus()) {
    std::string dsl = testing::toDsl(spec);
    Layout l = parseLayout(dsl);
    auto oracle = testing::oracleTable(spec);
    auto dims = testing::logicalDims(spec);
    bool genp = false, regp = false;
    for (const auto &st : spec.chain)
      for (const auto &p : st)
        (p.kind == Kind::GenP ? genp : regp) = true;
    withGenP += genp;
    withRegP += regp;
    multiStage += spec.chain.size() > 1;
    int64_t n = l.logicalSize();
    Index idx(dims.size(), 0);
    int64_t t = 0;
    do {
      auto f = l.apply(idx);
      bool ok = f && l.inv(*f) == idx && *f == oracle[static_cast<std::size_t>(t)];
      o.require(ok, dsl + " inv(apply(" + str(idx) + ")) mismatch");
      ++t;
    } while (testing::nextIndex(idx, dims));
    for (int64_t p = 0; p < n; ++p) {
      auto back = l.apply(l.inv(p));
      o.require(back == p, dsl + " apply(inv(" + std::to_string(p) + ")) mismatch");
    }
    points += n;
  }
  o.require(withGenP > 0 && withRegP > 0 && multiStage > 0,
            "corpus does not mix RegP, GenP and multi-OrderBy chains");
  o.summary = std::to_string(kCorpusSize) + " layouts, " + std::to_string(points) +
              " points (" + std::to_string(withGenP) + " with GenP, " +
              std::to_string(multiStage) + " multi-stage), both round trips exact";
}

// ---- 3 ---------------------------------------------------------------------

void antidiagonal(Outcome &o) {
  for (int64_t n = 1; n <= 16; ++n) {
    PermFn fn = antidiagPerm(n);
    std::vector<int64_t> lo(static_cast<std::size_t>(2 * n - 1), INT64_MAX),
        hi(static_cast<std::size_t>(2 * n - 1), INT64_MIN),
        count(static_cast<std::size_t>(2 * n - 1), 0);
    for (int64_t i = 0; i < n; ++i)
      for (int64_t j = 0; j < n; ++j) {
        int64_t f = fn.fwd(Index{i, j});
        o.require(fn.inv(f) == Index{i, j}, "n=" + std::to_string(n) + " inv(fwd) at " +
                                                str({i, j}));
        auto s = static_cast<std::size_t>(i + j);
        lo[s] = std::min(lo[s], f);
        hi[s] = std::max(hi[s], f);
        ++count[s];
      }
    for (int64_t f = 0; f < n * n; ++f) {
      Index c = fn.inv(f);
      o.require(fn.fwd(c) == f, "n=" + std::to_string(n) + " fwd(inv(" + std::to_string(f) + "))");
    }
    // Each anti-diagonal occupies a consecutive block, in diagonal order.
    int64_t next = 0;
    for (std::size_t s = 0; s < lo.size(); ++s) {
      o.require(lo[s] == next && hi[s] - lo[s] + 1 == count[s],
                "n=" + std::to_string(n) + " anti-diagonal " + std::to_string(s) +
                    " not consecutive");
      next = hi[s] + 1;
    }
  }
  o.summary = "n = 1..16, all points inverse, anti-diagonals get consecutive blocks";
}

// ---- 4 ---------------------------------------------------------------------

Expr rv(const char *name, int64_t lo, int64_t hi) { return Expr::var(name, VarRange(lo, hi)); }

void simplifier(Outcome &o) {
  const Expr q = rv("q", 0, 5), r = rv("r", 0, 10), r3 = rv("r", 0, 3), rn = rv("r", -2, 3),
             d = rv("d", 1, 5), dz = rv("d", -2, 3), x = rv("x", 0, 100);
  struct Rule {
    const char *name;
    Expr fires, fired;
    Expr blocked;
  };
  const std::vector<Rule> rules = {
      {"(d*q + r) % d -> r % d", (Expr(4) * q + r) % 4, r % 4, (dz * q + r) % dz},
      {"(d*q + r) / d -> q", (Expr(4) * q + r3) / 4, q, (dz * q + r3) / dz},
      {"(d*q + r) / d -> q + r / d", (Expr(4) * q + r) / 4, q + r / 4, (dz * q + r) / dz},
      {"(x % d) / d -> 0", (r % 4) / 4, Expr(0), (r % dz) / dz},
      {"x / a -> 0", r3 / 4, Expr(0), rn / 4},
      {"x % a -> x", r3 % 4, r3, rn % 4},
      {"(n + y) / 1 -> n + y / 1", (Expr(3) + r) / 1, Expr(3) + r, (Expr(3) + r) / 2},
      {"a*(x / a) + x % a -> x", Expr(8) * (x / 8) + x % 8, x, dz * (x / dz) + x % dz},
  };
  for (const auto &rule : rules) {
    Expr got = simplify(rule.fires);
    std::ostringstream a, b;
    a << got;
    o.require(got == rule.fired, std::string(rule.name) + " did not fire: " + a.str());
    Expr kept = simplify(rule.blocked);
    b << kept;
    // Blocked instances must keep their top-level operation.
    o.require(kept.kind() == rule.blocked.kind() && opCount(kept) >= opCount(rule.blocked) - 0,
              std::string(rule.name) + " fired without proof: " + b.str());
  }
  std::vector<testing::RandomVar> vars = {{"x", -8, 17}, {"y", 0, 20}, {"z", -5, 15}};
  auto points = testing::allPoints(vars);
  std::mt19937_64 rng(41);
  for (int n = 0; n < kRandomExprs; ++n) {
    Expr e = testing::randomExpr(rng, vars, 5);
    Expr s = simplify(e);
    for (const auto &p : points)
      if (testing::refEval(s, p) != testing::refEval(e, p)) {
        std::ostringstream m;
        m << "unsound: " << e << " => " << s;
        o.require(false, m.str());
        break;
      }
  }
  o.summary = std::to_string(rules.size()) + " rules fire and block as required; " +
              std::to_string(kRandomExprs) + " random exprs exact over " +
              std::to_string(points.size()) + " points each";
}

// ---- 5 ---------------------------------------------------------------------

bool isAffine(const Expr &e) {
  switch (e.kind()) {
  case ExprKind::FloorDiv:
  case ExprKind::Mod:
  case ExprKind::Select:
  case ExprKind::Isqrt: return false;
  default: break;
  }
  for (std::size_t i = 0; i < e.numOperands(); ++i)
    if (!isAffine(e.operand(i)))
      return false;
  return true;
}

int64_t dot(const Index &c, const Index &stride) {
  int64_t s = 0;
  for (std::size_t k = 0; k < c.size(); ++k)
    s += c[k] * stride[k];
  return s;
}

struct StrideRow {
  std::string name, dsl;
  Index shape, stride;
  bool inverse; // The reference maps physical tile coordinates to the logical offset
};

void strides(Outcome &o) {
  const int64_t M = 8, K = 8, BM = 4, BK = 4, R = 2, T = 2, N = 8, B = 2;
  std::vector<StrideRow> rows = {
      {"tiled matmul", "TileBy([2,2],[4,4]).OrderBy(Row([8,8]))",
       {M / BM, K / BK, BM, BK}, {K * BM, BK, K, 1}, false},
      {"two-level 6x6", "GroupBy([6,6]).OrderBy(RegP([2,3,2,3],[1,3,2,4]))",
       {2, 2, 3, 3}, {18, 3, 6, 1}, true},
      {"non-contiguous", "GroupBy([2,2,2,2,2]).OrderBy(RegP([2,2,2,2,2],[5,2,4,3,1]))",
       {2, 2, 2, 2, 2}, {1, 8, 2, 4, 16}, false},
      {"coarsened LUD", "GroupBy([2,2],[2,2]).OrderBy(Row([4,4]))",
       {R, R, T, T}, {R * T * T, T * T, T, 1}, false},
      {"brick", "TileBy([4,4,4],[2,2,2]).OrderBy(Row([4,4,4]), Row([2,2,2]))",
       {N / B, N / B, N / B, B, B, B}, {N * N * B, N * B * B, B * B * B, B * B, B, 1}, false},
  };
  std::string passed;
  for (const auto &row : rows) {
    Layout l = parseLayout(row.dsl);
    std::size_t before = o.failures.size() + static_cast<std::size_t>(o.suppressed);
    Shape coords(row.shape);
    if (!row.inverse) {
      std::vector<Expr> vars;
      for (std::size_t k = 0; k < row.shape.size(); ++k)
        vars.push_back(Expr::var("c" + std::to_string(k)));
      Expr sym = l.applySymbolic(vars);
      if (row.name == "tiled matmul")
        o.require(isAffine(sym), row.name + " expression is not affine");
      for (int64_t p = 0; p < coords.numel(); ++p) {
        Index c = canonUnflatten(coords, p);
        Point pt;
        for (std::size_t k = 0; k < c.size(); ++k)
          pt["c" + std::to_string(k)] = c[k];
        o.require(testing::refEval(sym, pt) == dot(c, row.stride),
                  row.name + " at " + str(c) + ": " + std::to_string(testing::refEval(sym, pt)) +
                      " vs reference " + std::to_string(dot(c, row.stride)));
      }
    } else {
      auto sym = l.invSymbolic(Expr::var("p"));
      for (int64_t p = 0; p < coords.numel(); ++p) {
        Index c = canonUnflatten(coords, p);
        Index logical;
        for (const auto &e : sym)
          logical.push_back(testing::refEval(e, {{"p", p}}));
        int64_t offset = canonFlatten(l.logicalShape(), logical);
        o.require(offset == dot(c, row.stride),
                  row.name + " inverse at " + str(c) + ": " + std::to_string(offset) +
                      " vs reference " + std::to_string(dot(c, row.stride)));
      }
    }
    if (o.failures.size() + static_cast<std::size_t>(o.suppressed) == before)
      passed += (passed.empty() ? "" : ", ") + row.name;
  }
  o.summary = "rows matching reference strides: " + passed;
}

// ---- 6 ---------------------------------------------------------------------

// The unsimplified composition: canonical flatten, then each stage,
// with no rewriting.
Expr rawApply(const GroupBy &g, const std::vector<Expr> &idx) {
  Expr flat = canonFlatten(g.logicalShape(), idx);
  for (const auto &stage : g.chain())
    flat = stage.apply(canonUnflatten(stage.dims(), flat));
  return flat;
}

void opCounts(Outcome &o) {
  Layout d = parseLayout("TileBy([4,4],[32,32]).OrderBy(Row([128,128]))");
  auto v = [](const char *n, int64_t hi) { return Expr::var(n, VarRange(0, hi)); };
  Expr pm = v("pid_m", 4), pn = v("pid_n", 4), k = v("k", 4), tm = v("tm", 32), tk = v("tk", 32),
       tn = v("tn", 32);
  std::vector<std::vector<Expr>> args = {{pm, k, tm, tk}, {k, pn, tk, tn}, {pm, pn, tm, tn}};
  std::vector<Expr> simplified;
  int64_t sum = 0, raw = 0;
  for (const auto &a : args) {
    Expr s = d.applySymbolic(a);
    Expr u = rawApply(*d.groupBy(), a);
    simplified.push_back(s);
    sum += opCount(s);
    raw += opCount(u);
    // Semantic equality over the whole 4-variable space.
    Shape space({4, 4, 32, 32});
    std::vector<std::string> names;
    for (const auto &e : a)
      names.push_back(e.name());
    for (int64_t p = 0; p < space.numel(); ++p) {
      Index c = canonUnflatten(space, p);
      Point pt;
      for (std::size_t i = 0; i < c.size(); ++i)
        pt[names[i]] = c[i];
      o.require(testing::refEval(s, pt) == testing::refEval(u, pt),
                "simplified offset differs at " + str(c));
      o.require(testing::refEval(s, pt) == *d.apply(c), "offset differs from apply at " + str(c));
    }
  }
  int64_t shared = sharedOpCount(simplified);
  o.require(shared <= kOpCountLimit,
            "shared op count " + std::to_string(shared) + " > " + std::to_string(kOpCountLimit));
  o.summary = "A,B,C together " + std::to_string(shared) + " op nodes after CSE (limit " +
              std::to_string(kOpCountLimit) + "; per-expression sum " + std::to_string(sum) +
              ", unsimplified " + std::to_string(raw) + "); exact over 16384 points each";
}

// ---- 7 ---------------------------------------------------------------------

void expandBy(Outcome &o) {
  int cases = 0;
  for (auto [phys, exp] : {std::pair{Index{3}, Index{4}}, std::pair{Index{3, 3}, Index{4, 4}}})
    for (Kind inner : {Kind::Row, Kind::Col}) {
      testing::ExpandSpec spec{phys, exp, {{exp}, {{{inner, exp, {}, ""}}}}};
      std::string dsl = testing::toDsl(spec);
      Layout l = parseLayout(dsl);
      int64_t physical = testing::product(phys);
      std::set<int64_t> hit;
      Index idx(exp.size(), 0);
      do {
        bool padding = false;
        for (std::size_t k = 0; k < idx.size(); ++k)
          padding = padding || idx[k] >= phys[k];
        auto f = l.apply(idx);
        o.require(padding == !f.has_value(), dsl + " mask wrong at " + str(idx));
        if (f) {
          o.require(*f >= 0 && *f < physical && hit.insert(*f).second,
                    dsl + " not injective into range at " + str(idx));
          o.require(l.inv(*f) == idx, dsl + " inv(apply) at " + str(idx));
        }
      } while (testing::nextIndex(idx, exp));
      o.require(static_cast<int64_t>(hit.size()) == physical, dsl + " not onto");
      ++cases;
    }
  o.summary = std::to_string(cases) + " cases: sentinel exactly on padding, bijection elsewhere";
}

// ---- 8 ---------------------------------------------------------------------

void templatePipeline(Outcome &o) {
  Manifest m = parseManifest(testing::readText(testing::samplePath("matmul/matmul.manifest")));
  LayoutTable layouts = resolveLayouts(m);
  Template t = parseTemplate(testing::readText(testing::samplePath("matmul/matmul.py.tmpl")));
  std::string out = instantiate(t, m, layouts);
  auto regions = testing::placeholderRegions(t, out);
  o.require(regions.size() == 4, "expected 4 placeholders");
  if (regions.size() != 4)
    return;
  const Layout &d = layouts.at("D");
  const Layout &g = layouts.at("G");
  std::mt19937_64 rng(43);
  auto pick = [&](int64_t n) { return std::uniform_int_distribution<int64_t>(0, n - 1)(rng); };
  using testing::Dialect;
  for (int s = 0; s < kSamplesPerPlaceholder; ++s) {
    int64_t pid = pick(16), pm = pick(4), pn = pick(4), k = pick(4), a0 = pick(32), a1 = pick(32);
    testing::TextEnv env{{{"pid", pid}, {"pid_m", pm}, {"pid_n", pn}, {"k", k}}, {a0, a1}};
    o.require(testing::evalTuple(regions[0], Dialect::Triton, env) == g.inv(pid),
              "thread-block placeholder at pid=" + std::to_string(pid));
    o.require(testing::evalText(regions[1], Dialect::Triton, env) == *d.apply(Index{pm, k, a0, a1}),
              "A offset placeholder");
    o.require(testing::evalText(regions[2], Dialect::Triton, env) == *d.apply(Index{k, pn, a0, a1}),
              "B offset placeholder");
    o.require(testing::evalText(regions[3], Dialect::Triton, env) ==
                  *d.apply(Index{pm, pn, a0, a1}),
              "C offset placeholder");
  }
  o.summary = "4 placeholders x " + std::to_string(kSamplesPerPlaceholder) +
              " sampled points equal concrete apply";
}

// ---- 9 ---------------------------------------------------------------------

void coherence(Outcome &o) {
  std::mt19937_64 rng(47);
  int64_t checks = 0;
  for (const auto &spec : corpus()) {
    std::string dsl = testing::toDsl(spec);
    Layout l = parseLayout(dsl);
    auto dims = testing::logicalDims(spec);
    std::vector<Expr> vars;
    for (std::size_t k = 0; k < dims.size(); ++k)
      vars.push_back(Expr::var("i" + std::to_string(k)));
    Expr sym = l.applySymbolic(vars);
    for (int s = 0; s < kSubstitutionsPerLayout; ++s) {
      Index idx;
      Point pt;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        idx.push_back(std::uniform_int_distribution<int64_t>(0, dims[k] - 1)(rng));
        pt["i" + std::to_string(k)] = idx.back();
      }
      o.require(testing::refEval(sym, pt) == *l.apply(idx), dsl + " at " + str(idx));
      ++checks;
    }
  }
  o.summary = std::to_string(kCorpusSize) + " layouts, " + std::to_string(checks) +
              " substitutions exact";
}

} // namespace

int main() {
  struct Criterion {
    int id;
    const char *name;
    double limit;
    std::function<void(Outcome &)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "worked example fidelity", kLimitAnchors, anchors},
      {2, "bijectivity suite", kLimitCorpus, bijectivity},
      {3, "anti-diagonal correctness", kLimitAntidiag, antidiagonal},
      {4, "simplifier soundness and power", kLimitSimplifier, simplifier},
      {5, "stride equivalence", kLimitStrides, strides},
      {6, "emission op-count", kLimitOpCount, opCounts},
      {7, "ExpandBy masking", kLimitExpand, expandBy},
      {8, "template pipeline", kLimitTemplate, templatePipeline},
      {9, "symbolic/concrete coherence", kLimitCoherence, coherence},
  };
  int failed = 0;
  for (const auto &c : criteria) {
    Outcome o;
    auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception &e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.3fs of %.0fs", secs, c.limit);
    o.require(secs < c.limit, std::string("time limit exceeded: ") + timing);
    bool ok = o.failures.empty() && o.suppressed == 0;
    failed += !ok;
    std::printf("criterion %d %s: %s; %s [%s]\n", c.id, ok ? "PASS" : "FAIL", c.name,
                o.summary.c_str(), timing);
    for (const auto &f : o.failures)
      std::printf("    %s\n", f.c_str());
    if (o.suppressed)
      std::printf("    ... and %d more\n", o.suppressed);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
