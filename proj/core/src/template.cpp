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

#include "lego/template.hpp"

#include <unordered_map>

#include "parse_util.hpp"

namespace lego {
namespace {

using detail::Cursor;

std::vector<PlaceholderArg> parseArgs(Cursor &c, std::string_view close) {
  std::vector<PlaceholderArg> args;
  if (c.accept(close))
    return args;
  while (true) {
    if (c.accept(":")) {
      args.emplace_back(SliceArg{});
    } else {
      Expr lo = detail::parseExprAt(c);
      if (c.accept(":"))
        args.emplace_back(SliceArg{lo, detail::parseExprAt(c)});
      else
        args.emplace_back(lo);
    }
    if (c.accept(close))
      return args;
    c.expect(",");
  }
}

PlaceholderAst parseContent(std::string_view content, SourceLoc origin) {
  Cursor c(content, origin);
  try {
    if (c.atEnd())
      c.fail("empty placeholder");
    std::size_t start = c.pos();
    if (c.peekIdent()) {
      std::string name = c.ident();
      if (c.accept("[")) {
        auto args = parseArgs(c, "]");
        if (!c.atEnd())
          c.fail("unexpected trailing input" + c.found());
        return LayoutApply{name, std::move(args)};
      }
      if (c.accept(".")) {
        std::size_t at = c.pos();
        std::string method = c.ident();
        c.expect("(");
        if (method == "apply") {
          auto args = parseArgs(c, ")");
          if (!c.atEnd())
            c.fail("unexpected trailing input" + c.found());
          return LayoutApply{name, std::move(args)};
        }
        if (method == "inv") {
          Expr e = detail::parseExprAt(c);
          c.expect(")");
          if (!c.atEnd())
            c.fail("unexpected trailing input" + c.found());
          return LayoutInv{name, e};
        }
        c.failAt(at, "unknown layout method '" + method +
                         "'; expected apply or inv",
                 ErrorKind::PlaceholderSyntax);
      }
      c.setPos(start);
    }
    Expr e = detail::parseExprAt(c);
    if (!c.atEnd())
      c.fail("unexpected trailing input" + c.found());
    return RawExpr{e};
  } catch (const Error &e) {
    if (e.kind() == ErrorKind::SyntaxError || e.kind() == ErrorKind::DivisionByZero)
      throw Error(ErrorKind::PlaceholderSyntax, e.detail(), e.location());
    throw;
  }
}

std::string joinExprs(const std::vector<std::string> &parts) {
  if (parts.size() == 1)
    return parts[0];
  std::string s = "(";
  for (std::size_t i = 0; i < parts.size(); ++i)
    s += (i ? ", " : "") + parts[i];
  return s + ")";
}

class Instantiator {
public:
  Instantiator(const Manifest &m, const LayoutTable &layouts)
      : m_(m), layouts_(layouts) {
    for (const auto &[name, r] : m.vars)
      ranges_.emplace(name, r);
  }

  std::string render(const Placeholder &ph) {
    try {
      return std::visit([&](const auto &ast) { return emit(ph, ast); },
                        ph.ast);
    } catch (const Error &e) {
      if (e.location())
        throw;
      throw Error(e.kind(), e.detail(), ph.loc);
    }
  }

private:
  const Manifest &m_;
  const LayoutTable &layouts_;
  std::unordered_map<std::string, VarRange> ranges_;

  Expr bind(const Expr &e) {
    for (const auto &v : variables(e))
      if (!ranges_.count(v))
        throw Error(ErrorKind::UnknownVariable,
                    "variable '" + v + "' is not declared in [vars]");
    return attachRanges(e, ranges_);
  }

  const Layout &lookup(const std::string &name) {
    auto it = layouts_.find(name);
    if (it == layouts_.end())
      throw Error(ErrorKind::UnknownLayout,
                  "layout '" + name + "' is not declared in [layouts]");
    return it->second;
  }

  int64_t constantBound(const Expr &e, const std::string &layout,
                        std::size_t dim) {
    Expr s = simplify(e);
    if (!s.isConst())
      throw Error(ErrorKind::SliceOnNonConstantDim,
                  "slice bound on dimension " + std::to_string(dim + 1) +
                      " of '" + layout + "' is not a compile-time constant");
    return s.value();
  }

  std::string emit(const Placeholder &ph, const LayoutApply &a) {
    const Layout &layout = lookup(a.layout);
    const Shape &shape = layout.logicalShape();
    if (a.args.size() != shape.rank())
      throw Error(ErrorKind::ArityMismatch,
                  "layout '" + a.layout + "' has " +
                      std::to_string(shape.rank()) + " dimensions, got " +
                      std::to_string(a.args.size()) + " arguments");
    std::size_t axes = 0;
    for (const auto &arg : a.args)
      axes += std::holds_alternative<SliceArg>(arg) ? 1 : 0;

    std::vector<Expr> idx;
    RangeBindings bindings;
    std::size_t axis = 0;
    for (std::size_t k = 0; k < a.args.size(); ++k) {
      if (const Expr *e = std::get_if<Expr>(&a.args[k])) {
        idx.push_back(bind(*e));
        continue;
      }
      const auto &s = std::get<SliceArg>(a.args[k]);
      int64_t lo = s.lo ? constantBound(*s.lo, a.layout, k) : 0;
      int64_t hi = s.hi ? constantBound(*s.hi, a.layout, k) : shape[k];
      if (lo < 0 || hi > shape[k] || lo >= hi)
        throw Error(ErrorKind::OutOfBounds,
                    "slice " + std::to_string(lo) + ":" + std::to_string(hi) +
                        " outside dimension " + std::to_string(k + 1) +
                        " of '" + a.layout + "' (extent " +
                        std::to_string(shape[k]) + ")");
      std::string name = "$slice" + std::to_string(k);
      idx.push_back(Expr::var(name, VarRange(lo, hi)));
      bindings.emplace(name,
                       RangeBinding{RangeExpr(name, lo, hi), axis++, axes});
    }
    if (!bindings.empty() && m_.target.target != Target::Triton)
      throw Error(ErrorKind::UnsupportedNode,
                  "slice arguments need the triton target, manifest selects " +
                      m_.target.name);
    VariantPolicy policy = m_.policyFor(ph.ordinal, &a.layout);
    Expr e = layout.applySymbolic(idx, m_.facts, policy);
    return emitExpr(e, m_.target, bindings);
  }

  std::string emit(const Placeholder &ph, const LayoutInv &inv) {
    const Layout &layout = lookup(inv.layout);
    VariantPolicy policy = m_.policyFor(ph.ordinal, &inv.layout);
    auto coords = layout.invSymbolic(bind(inv.arg), m_.facts, policy);
    std::vector<std::string> parts;
    for (const auto &c : coords)
      parts.push_back(emitExpr(c, m_.target));
    return joinExprs(parts);
  }

  std::string emit(const Placeholder &ph, const RawExpr &raw) {
    VariantPolicy policy = m_.policyFor(ph.ordinal, nullptr);
    return emitExpr(bestVariant(bind(raw.expr), m_.facts, policy), m_.target);
  }
};

} // namespace

std::vector<const Placeholder *> Template::placeholders() const {
  std::vector<const Placeholder *> out;
  for (const auto &s : segments_)
    if (const auto *p = std::get_if<Placeholder>(&s))
      out.push_back(p);
  return out;
}

std::string Template::serialize() const {
  std::string out;
  for (const auto &s : segments_)
    std::visit(
        [&](const auto &seg) {
          if constexpr (std::is_same_v<std::decay_t<decltype(seg)>, Literal>)
            out += seg.text;
          else
            out += seg.raw;
        },
        s);
  return out;
}

Template parseTemplate(std::string_view text) {
  std::vector<Segment> segments;
  std::size_t pos = 0;
  int ordinal = 0;
  while (pos < text.size()) {
    std::size_t open = text.find("{{", pos);
    if (open == std::string_view::npos) {
      segments.emplace_back(
          Literal{std::string(text.substr(pos)), locate(text, pos)});
      break;
    }
    if (open > pos)
      segments.emplace_back(
          Literal{std::string(text.substr(pos, open - pos)), locate(text, pos)});
    std::size_t close = text.find("}}", open + 2);
    if (close == std::string_view::npos)
      throw Error(ErrorKind::UnterminatedPlaceholder,
                  "'{{' without a matching '}}'", locate(text, open));
    std::string_view content = text.substr(open + 2, close - open - 2);
    if (content.find("{{") != std::string_view::npos)
      throw Error(ErrorKind::PlaceholderSyntax, "placeholders do not nest",
                  locate(text, open + 2 + content.find("{{")));
    Placeholder ph;
    ph.raw = std::string(text.substr(open, close + 2 - open));
    ph.loc = locate(text, open);
    ph.ordinal = ++ordinal;
    ph.ast = parseContent(content, locate(text, open + 2));
    segments.emplace_back(std::move(ph));
    pos = close + 2;
  }
  return Template(std::move(segments));
}

std::string instantiate(const Template &t, const Manifest &manifest,
                        const LayoutTable &layouts) {
  Instantiator inst(manifest, layouts);
  std::string out;
  for (const auto &s : t.segments()) {
    if (const auto *lit = std::get_if<Literal>(&s))
      out += lit->text;
    else
      out += inst.render(std::get<Placeholder>(s));
  }
  return out;
}

} // namespace lego
