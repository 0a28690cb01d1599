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

#include "lego/template.hpp"
#include "parse_util.hpp"

namespace lego {
namespace {

using detail::Cursor;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

[[noreturn]] void manifestError(const std::string &msg, SourceLoc loc) {
  throw Error(ErrorKind::ManifestSyntax, msg, loc);
}

VariantPolicy policyValue(Cursor &c) {
  std::size_t at = c.pos();
  std::string v = c.ident();
  auto p = parseVariantPolicy(v);
  if (!p)
    c.failAt(at, "unknown policy '" + v + "'; expected auto, expanded or "
                 "unexpanded", ErrorKind::ManifestSyntax);
  return *p;
}

} // namespace

VariantPolicy Manifest::policyFor(int ordinal, const std::string *layout) const {
  if (auto it = placeholderPolicy.find(ordinal); it != placeholderPolicy.end())
    return it->second;
  if (layout)
    if (auto it = layoutPolicy.find(*layout); it != layoutPolicy.end())
      return it->second;
  return defaultPolicy;
}

Manifest parseManifest(std::string_view text) {
  Manifest m;
  std::string section;
  std::set<std::string> names;
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
    std::string_view body = trim(raw);
    int column = static_cast<int>(body.empty() ? 1 : body.data() - raw.data() + 1);
    SourceLoc loc{line, column};
    try {
      if (body.empty()) {
        // blank
      } else if (body.front() == '[' && body.back() == ']') {
        section = std::string(trim(body.substr(1, body.size() - 2)));
        static const std::set<std::string> kSections = {
            "layouts", "vars", "facts", "target", "policy"};
        if (!kSections.count(section))
          manifestError("unknown section [" + section + "]", loc);
      } else if (section.empty()) {
        manifestError("declaration outside any section", loc);
      } else if (section == "layouts") {
        auto eq = body.find('=');
        if (eq == std::string_view::npos)
          manifestError("expected 'Name = <layout>'", loc);
        Cursor c(body.substr(0, eq), loc);
        std::string name = c.ident();
        if (!c.atEnd())
          c.fail("unexpected text after layout name", ErrorKind::ManifestSyntax);
        std::string_view dslRaw = body.substr(eq + 1);
        std::string_view dsl = trim(dslRaw);
        if (!names.insert(name).second)
          manifestError("duplicate declaration of '" + name + "'", loc);
        m.layouts.push_back(
            {name, std::string(dsl),
             SourceLoc{line, column + static_cast<int>(dsl.data() - body.data())}});
      } else if (section == "vars") {
        Cursor c(body, loc);
        std::string name = c.ident();
        c.expect("in");
        c.expect("[");
        int64_t lo = c.integer();
        c.expect(",");
        int64_t hi = c.integer();
        c.expect(")");
        if (!c.atEnd())
          c.fail("unexpected trailing input" + c.found());
        if (!names.insert(name).second)
          manifestError("duplicate declaration of '" + name + "'", loc);
        m.vars.emplace(name, VarRange(lo, hi));
      } else if (section == "facts") {
        FactSet f = parseFacts(body);
        m.facts.merge(f);
      } else if (section == "target") {
        std::string_view v = body;
        if (auto eq = v.find('='); eq != std::string_view::npos)
          v = trim(v.substr(eq + 1));
        auto t = TargetProfile::fromName(v);
        if (!t)
          manifestError("unknown target '" + std::string(v) +
                            "'; expected c, python or triton",
                        loc);
        m.target = *t;
      } else if (section == "policy") {
        Cursor c(body, loc);
        if (c.accept("@")) {
          int64_t n = c.integer();
          if (n < 1)
            c.fail("placeholder numbers start at 1", ErrorKind::ManifestSyntax);
          c.expect("=");
          m.placeholderPolicy[static_cast<int>(n)] = policyValue(c);
        } else {
          std::string key = c.ident();
          c.expect("=");
          VariantPolicy p = policyValue(c);
          if (key == "default")
            m.defaultPolicy = p;
          else
            m.layoutPolicy[key] = p;
        }
        if (!c.atEnd())
          c.fail("unexpected trailing input" + c.found());
      }
    } catch (const Error &e) {
      if (e.kind() == ErrorKind::ManifestSyntax)
        throw;
      SourceLoc at = loc;
      if (e.location() && section != "facts")
        at = *e.location();
      else if (e.location())
        at = {line, column + e.location()->column - 1};
      throw Error(ErrorKind::ManifestSyntax, e.detail(), at);
    }
    if (end == text.size())
      break;
    begin = end + 1;
  }
  return m;
}

LayoutTable resolveLayouts(const Manifest &manifest,
                           const ParseOptions &options) {
  LayoutTable table;
  for (const auto &decl : manifest.layouts) {
    try {
      table.emplace(decl.name, parseLayout(decl.dsl, options));
    } catch (const Error &e) {
      SourceLoc at = decl.loc;
      if (e.location()) {
        // `decl.dsl` is a single line.
        at.column += e.location()->column - 1;
      }
      throw Error(e.kind(), "layout '" + decl.name + "': " + e.detail(), at);
    }
  }
  return table;
}

} // namespace lego
