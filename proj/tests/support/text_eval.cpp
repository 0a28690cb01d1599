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

#include "text_eval.hpp"

#include <cctype>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace lego::testing {
namespace {

int64_t floorDiv(int64_t a, int64_t b) {
  int64_t q = a / b;
  return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

int64_t floorMod(int64_t a, int64_t b) { return a - floorDiv(a, b) * b; }

int64_t isqrt(int64_t v) {
  if (v < 0)
    throw std::runtime_error("isqrt of a negative value");
  auto r = static_cast<int64_t>(std::sqrt(static_cast<double>(v)));
  while (r * r > v)
    --r;
  while ((r + 1) * (r + 1) <= v)
    ++r;
  return r;
}

class Evaluator {
public:
  Evaluator(std::string_view text, Dialect d, const TextEnv &env)
      : s_(text), d_(d), env_(env) {}

  std::vector<int64_t> tuple() {
    std::vector<int64_t> out;
    skip();
    if (peek('(')) {
      // Only a top-level parenthesized list is a tuple.
      std::size_t save = i_;
      ++i_;
      out.push_back(expr());
      if (accept(",")) {
        do
          out.push_back(expr());
        while (accept(","));
        expect(")");
        finish();
        return out;
      }
      i_ = save;
      out.clear();
    }
    out.push_back(expr());
    finish();
    return out;
  }

  int64_t single() {
    int64_t v = expr();
    finish();
    return v;
  }

private:
  std::string_view s_;
  Dialect d_;
  const TextEnv &env_;
  std::size_t i_ = 0;

  bool python() const { return d_ != Dialect::C; }

  [[noreturn]] void fail(const std::string &msg) const {
    throw std::runtime_error(msg + " at offset " + std::to_string(i_) +
                             " in '" + std::string(s_) + "'");
  }

  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_])))
      ++i_;
  }

  bool peek(char c) {
    skip();
    return i_ < s_.size() && s_[i_] == c;
  }

  static bool identChar(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  bool accept(std::string_view tok) {
    skip();
    if (s_.substr(i_, tok.size()) != tok)
      return false;
    std::size_t end = i_ + tok.size();
    if (identChar(tok.back()) && end < s_.size() && identChar(s_[end]))
      return false;
    // Keep "//" from matching "/" and "<=" from matching "<".
    if ((tok == "/" || tok == "<" || tok == ">" || tok == "&") &&
        end < s_.size() && (s_[end] == '/' || s_[end] == '=' || s_[end] == '&'))
      return false;
    i_ = end;
    return true;
  }

  void expect(std::string_view tok) {
    if (!accept(tok))
      fail("expected '" + std::string(tok) + "'");
  }

  void finish() {
    skip();
    if (i_ != s_.size())
      fail("trailing text");
  }

  int64_t expr() {
    if (python()) {
      int64_t a = logicalAnd();
      if (accept("if")) {
        int64_t c = logicalAnd();
        expect("else");
        int64_t b = expr();
        return c ? a : b;
      }
      return a;
    }
    int64_t c = logicalAnd();
    if (accept("?")) {
      int64_t a = expr();
      expect(":");
      int64_t b = expr();
      return c ? a : b;
    }
    return c;
  }

  int64_t logicalAnd() {
    int64_t v = python() ? compare() : bitAnd();
    while (accept(python() ? "and" : "&&")) {
      int64_t r = python() ? compare() : bitAnd();
      v = (v && r) ? 1 : 0;
    }
    return v;
  }

  // Python binds '&' tighter than comparisons; C looser.
  int64_t bitAnd() {
    int64_t v = python() ? additive() : compare();
    while (accept("&"))
      v &= python() ? additive() : compare();
    return v;
  }

  int64_t compare() {
    int64_t v = python() ? bitAnd() : additive();
    auto next = [&] { return python() ? bitAnd() : additive(); };
    while (true) {
      if (accept("<="))
        v = v <= next();
      else if (accept(">="))
        v = v >= next();
      else if (accept("=="))
        v = v == next();
      else if (accept("!="))
        v = v != next();
      else if (accept("<"))
        v = v < next();
      else if (accept(">"))
        v = v > next();
      else
        return v;
    }
  }

  int64_t additive() {
    int64_t v = multiplicative();
    while (true) {
      if (accept("+"))
        v += multiplicative();
      else if (accept("-"))
        v -= multiplicative();
      else
        return v;
    }
  }

  int64_t divide(int64_t a, int64_t b, bool floor) {
    if (b == 0)
      fail("division by zero");
    return floor ? floorDiv(a, b) : a / b;
  }

  int64_t modulo(int64_t a, int64_t b, bool floor) {
    if (b == 0)
      fail("modulo by zero");
    return floor ? floorMod(a, b) : a % b;
  }

  int64_t multiplicative() {
    int64_t v = unary();
    bool floors = d_ == Dialect::Python;
    while (true) {
      if (accept("*"))
        v *= unary();
      else if (python() && accept("//"))
        v = divide(v, unary(), floors);
      else if (!python() && accept("/"))
        v = divide(v, unary(), false);
      else if (accept("%"))
        v = modulo(v, unary(), floors);
      else
        return v;
    }
  }

  int64_t unary() {
    if (accept("-"))
      return -unary();
    if (accept("+"))
      return unary();
    return primary();
  }

  std::vector<int64_t> args() {
    expect("(");
    std::vector<int64_t> a;
    if (accept(")"))
      return a;
    do
      a.push_back(expr());
    while (accept(","));
    expect(")");
    return a;
  }

  int64_t arange() {
    auto a = args();
    if (a.size() != 2)
      fail("tl.arange takes two bounds");
    std::size_t axis = 0, axes = 1;
    if (accept("[")) {
      axes = 0;
      bool found = false;
      do {
        if (accept(":")) {
          axis = axes;
          found = true;
        } else {
          expect("None");
        }
        ++axes;
      } while (accept(","));
      expect("]");
      if (!found)
        fail("broadcast without ':'");
    }
    if (axis >= env_.aranges.size())
      fail("no value for range axis " + std::to_string(axis));
    int64_t v = env_.aranges[axis];
    if (v < a[0] || v >= a[1])
      fail("range value " + std::to_string(v) + " outside tl.arange bounds");
    return v;
  }

  int64_t primary() {
    skip();
    if (accept("(")) {
      int64_t v = expr();
      expect(")");
      return v;
    }
    if (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
      int64_t v = 0;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_])))
        v = v * 10 + (s_[i_++] - '0');
      return v;
    }
    std::size_t start = i_;
    while (i_ < s_.size() && (identChar(s_[i_]) || s_[i_] == '.'))
      ++i_;
    std::string name(s_.substr(start, i_ - start));
    if (name.empty())
      fail("expected an operand");
    if (name == "tl.arange" && d_ == Dialect::Triton)
      return arange();
    if (name == "tl.where" && d_ == Dialect::Triton) {
      auto a = args();
      if (a.size() != 3)
        fail("tl.where takes three arguments");
      return a[0] ? a[1] : a[2];
    }
    if ((name == "isqrt" && d_ != Dialect::Python) ||
        (name == "math.isqrt" && d_ == Dialect::Python)) {
      auto a = args();
      if (a.size() != 1)
        fail("isqrt takes one argument");
      return isqrt(a[0]);
    }
    if (name == "lego_floordiv" || name == "lego_floormod") {
      auto a = args();
      if (a.size() != 2)
        fail(name + " takes two arguments");
      return name == "lego_floordiv" ? divide(a[0], a[1], true)
                                     : modulo(a[0], a[1], true);
    }
    auto it = env_.vars.find(name);
    if (it == env_.vars.end())
      fail("unknown name '" + name + "'");
    return it->second;
  }
};

} // namespace

int64_t evalText(std::string_view text, Dialect dialect, const TextEnv &env) {
  return Evaluator(text, dialect, env).single();
}

std::vector<int64_t> evalTuple(std::string_view text, Dialect dialect,
                               const TextEnv &env) {
  return Evaluator(text, dialect, env).tuple();
}

std::vector<std::string> placeholderRegions(const Template &t,
                                            std::string_view output) {
  std::vector<std::string> regions;
  std::size_t at = 0;
  std::optional<std::size_t> open;
  for (const auto &seg : t.segments()) {
    if (std::holds_alternative<Placeholder>(seg)) {
      if (open)
        throw std::runtime_error("adjacent placeholders cannot be separated");
      open = at;
      continue;
    }
    const std::string &lit = std::get<Literal>(seg).text;
    std::size_t found = open ? output.find(lit, at) : at;
    if (found == std::string_view::npos || output.substr(found, lit.size()) != lit)
      throw std::runtime_error("literal segment missing from output");
    if (open) {
      regions.emplace_back(output.substr(*open, found - *open));
      open.reset();
    }
    at = found + lit.size();
  }
  if (open)
    regions.emplace_back(output.substr(*open));
  else if (at != output.size())
    throw std::runtime_error("output has trailing text");
  return regions;
}

} // namespace lego::testing
