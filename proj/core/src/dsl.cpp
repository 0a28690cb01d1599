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

#include "lego/dsl.hpp"

#include "parse_util.hpp"

namespace lego {
namespace {

using detail::Cursor;

// Runs f, attaching the location of `start` to location-less errors.
template <class F> auto located(Cursor &c, std::size_t start, F &&f) {
  try {
    return f();
  } catch (const Error &e) {
    if (e.location())
      throw;
    throw Error(e.kind(), e.detail(), c.locAt(start));
  }
}

class LayoutParser {
public:
  LayoutParser(std::string_view text, const ParseOptions &options)
      : c_(text), options_(options) {}

  Layout parse() {
    Layout out = c_.peekIs("ExpandBy") ? Layout(expandBy()) : Layout(group());
    if (!c_.atEnd())
      c_.fail("unexpected trailing input" + c_.found());
    return out;
  }

private:
  Cursor c_;
  const ParseOptions &options_;

  std::vector<int64_t> intList(char close) {
    std::vector<int64_t> v{c_.integer()};
    while (c_.accept(","))
      v.push_back(c_.integer());
    c_.expect(std::string(1, close));
    return v;
  }

  Shape shape() {
    std::size_t start = c_.pos();
    c_.expect("[");
    auto v = intList(']');
    return located(c_, start, [&] { return Shape(std::move(v)); });
  }

  Sigma sigma() {
    std::size_t start = c_.pos();
    if (c_.accept("sigma"))
      c_.expect("=");
    c_.expect("[");
    std::vector<int64_t> v = intList(']');
    std::vector<int> p;
    for (int64_t x : v) {
      if (x < 1 || x > static_cast<int64_t>(v.size()))
        c_.failAt(start, "sigma entry " + std::to_string(x) +
                             " is not in [1.." + std::to_string(v.size()) +
                             "]",
                  ErrorKind::InvalidSigma);
      p.push_back(static_cast<int>(x));
    }
    return located(c_, start, [&] { return Sigma(std::move(p)); });
  }

  Perm perm() {
    std::size_t start = c_.pos();
    std::string kw = c_.ident();
    c_.expect("(");
    if (kw == "RegP") {
      Shape s = shape();
      c_.expect(",");
      Sigma sg = sigma();
      c_.expect(")");
      return located(c_, start, [&] { return Perm(RegP(s, sg)); });
    }
    if (kw == "GenP") {
      Shape s = shape();
      c_.expect(",");
      std::size_t nameAt = c_.pos();
      std::string name = c_.ident();
      c_.expect(")");
      PermFn fn = located(c_, nameAt,
                          [&] { return options_.registry.make(name, s); });
      GenP p(s, std::move(fn));
      checkGenP(p, start);
      return p;
    }
    if (kw == "Row" || kw == "Col") {
      std::optional<Shape> s;
      if (c_.peek() == '[') {
        s = shape();
        c_.expect(")");
      } else {
        std::size_t at = c_.pos();
        auto v = intList(')');
        s = located(c_, at, [&] { return Shape(std::move(v)); });
      }
      return kw == "Row" ? row(*s) : col(*s);
    }
    c_.failAt(start, "unknown permutation '" + kw + "'; expected RegP, GenP, "
                     "Row or Col", ErrorKind::SyntaxError);
  }

  std::vector<Perm> permList() {
    std::vector<Perm> v{perm()};
    while (c_.accept(","))
      v.push_back(perm());
    c_.expect(")");
    return v;
  }

  void checkGenP(const GenP &p, std::size_t start) {
    ValidationReport r = validate(Layout(GroupBy({p.shape()}, {OrderBy({p})})),
                                  options_.genpBound);
    if (const auto *f = r.firstFailure())
      c_.failAt(start, f->name + ": " + f->detail,
                f->failure.value_or(ErrorKind::BijectivityViolation));
  }

  GroupBy group() {
    std::size_t start = c_.pos();
    std::string kw = c_.ident();
    c_.expect("(");
    std::optional<GroupBy> g;
    if (kw == "GroupBy" || kw == "TileBy") {
      std::vector<Shape> tiles{shape()};
      while (c_.accept(","))
        tiles.push_back(shape());
      c_.expect(")");
      g = located(c_, start, [&] {
        return kw == "GroupBy" ? GroupBy(std::move(tiles))
                               : tileBy(std::move(tiles));
      });
    } else if (kw == "TileOrderBy") {
      auto perms = permList();
      g = located(c_, start, [&] { return tileOrderBy(std::move(perms)); });
    } else {
      c_.failAt(start, "expected GroupBy, TileBy, TileOrderBy or ExpandBy, "
                       "found '" + kw + "'",
                ErrorKind::SyntaxError);
    }
    while (c_.accept(".")) {
      std::size_t at = c_.pos();
      std::string name = c_.ident();
      if (name != "OrderBy")
        c_.failAt(at, "expected OrderBy after '.', found '" + name + "'",
                  ErrorKind::SyntaxError);
      c_.expect("(");
      OrderBy o(permList());
      if (o.numel() != g->numel())
        c_.failAt(at, "OrderBy covers " + std::to_string(o.numel()) +
                          " elements but the logical view " +
                          g->logicalShape().toString() + " has " +
                          std::to_string(g->numel()),
                  ErrorKind::ShapeMismatch);
      g = g->orderBy(std::move(o));
    }
    return *g;
  }

  ExpandBy expandBy() {
    std::size_t start = c_.pos();
    c_.expect("ExpandBy");
    c_.expect("(");
    Shape phys = shape();
    c_.expect(",");
    Shape exp = shape();
    c_.expect(",");
    std::size_t innerAt = c_.pos();
    GroupBy inner = group();
    c_.expect(")");
    if (inner.numel() != exp.numel())
      c_.failAt(innerAt, "inner layout has " + std::to_string(inner.numel()) +
                             " elements but the expanded space " +
                             exp.toString() + " has " +
                             std::to_string(exp.numel()),
                ErrorKind::ShapeMismatch);
    return located(c_, start, [&] { return ExpandBy(phys, exp, inner); });
  }
};

Expr primary(Cursor &c);

Expr unary(Cursor &c) {
  if (c.accept("-"))
    return Expr(0) - unary(c);
  if (c.accept("+"))
    return unary(c);
  return primary(c);
}

Expr term(Cursor &c) {
  Expr e = unary(c);
  while (true) {
    std::size_t at = c.pos();
    if (c.accept("*")) {
      e = e * unary(c);
    } else if (c.accept("//") || c.accept("/")) {
      Expr d = unary(c);
      e = located(c, at, [&] { return Expr::floorDiv(e, d); });
    } else if (c.accept("%")) {
      Expr d = unary(c);
      e = located(c, at, [&] { return Expr::mod(e, d); });
    } else {
      return e;
    }
  }
}

Expr primary(Cursor &c) {
  if (c.accept("(")) {
    Expr e = detail::parseExprAt(c);
    c.expect(")");
    return e;
  }
  if (c.peekInt()) {
    int64_t v = c.integer();
    return Expr(v);
  }
  if (c.peekIdent()) {
    std::string name = c.ident();
    if (name == "isqrt" && c.accept("(")) {
      Expr e = detail::parseExprAt(c);
      c.expect(")");
      return Expr::isqrt(e);
    }
    return Expr::var(name);
  }
  c.fail("expected an expression" + c.found());
}

} // namespace

Expr detail::parseExprAt(Cursor &c) {
  Expr e = term(c);
  while (true) {
    if (c.accept("+"))
      e = e + term(c);
    else if (c.accept("-"))
      e = e - term(c);
    else
      return e;
  }
}

Layout parseLayout(std::string_view text, const ParseOptions &options) {
  return LayoutParser(text, options).parse();
}

Expr parseExpr(std::string_view text) {
  Cursor c(text);
  Expr e = detail::parseExprAt(c);
  if (!c.atEnd())
    c.fail("unexpected trailing input" + c.found());
  return e;
}

FactSet parseFacts(std::string_view text) {
  FactSet facts;
  int line = 0;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t end = text.find('\n', begin);
    if (end == std::string_view::npos)
      end = text.size();
    ++line;
    std::string_view raw = text.substr(begin, end - begin);
    if (auto hash = raw.find('#'); hash != std::string_view::npos)
      raw = raw.substr(0, hash);
    Cursor c(raw, SourceLoc{line, 1});
    if (!c.atEnd()) {
      std::string var = c.ident();
      std::size_t at = c.pos();
      if (c.accept("in")) {
        c.expect("[");
        int64_t lo = c.integer();
        c.expect(",");
        int64_t hi = c.integer();
        c.expect(")");
        located(c, at, [&] { return &facts.addRange(var, VarRange(lo, hi)); });
      } else if (c.accept("%")) {
        int64_t k = c.integer();
        c.expect("==");
        c.accept("0") ? void() : c.fail("expected '0'" + c.found());
        located(c, at, [&] { return &facts.addDivisibility(var, k); });
      } else {
        c.fail("expected 'in [lo, hi)' or '% k == 0'" + c.found());
      }
      if (!c.atEnd())
        c.fail("unexpected trailing input" + c.found());
    }
    if (end == text.size())
      break;
    begin = end + 1;
  }
  return facts;
}

} // namespace lego
