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

// Cursor-style scanning shared by the DSL, fact and template parsers.

#pragma once

#include <cctype>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "lego/error.hpp"
#include "lego/expr.hpp"

namespace lego::detail {

class Cursor {
public:
  /// `origin` is the location of text[0] inside the enclosing document.
  explicit Cursor(std::string_view text, SourceLoc origin = {})
      : text_(text), origin_(origin) {}

  void skipSpace() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }
  bool atEnd() {
    skipSpace();
    return pos_ >= text_.size();
  }
  char peek() {
    skipSpace();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool peekIs(std::string_view tok) {
    skipSpace();
    return text_.substr(pos_, tok.size()) == tok;
  }
  bool accept(std::string_view tok) {
    if (!peekIs(tok))
      return false;
    pos_ += tok.size();
    return true;
  }
  void expect(std::string_view tok) {
    if (!accept(tok))
      fail("expected '" + std::string(tok) + "'" + found());
  }
  bool peekIdent() {
    char c = peek();
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  std::string ident() {
    if (!peekIdent())
      fail("expected a name" + found());
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }
  bool peekInt() {
    char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
  }
  int64_t integer() {
    skipSpace();
    std::size_t start = pos_;
    bool neg = accept("-");
    skipSpace();
    if (!peekInt())
      fail("expected an integer" + found());
    int64_t v = 0;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      int64_t digit = text_[pos_] - '0';
      if (v > (std::numeric_limits<int64_t>::max() - digit) / 10) {
        pos_ = start;
        fail("integer literal out of range");
      }
      v = v * 10 + digit;
      ++pos_;
    }
    return neg ? -v : v;
  }

  std::size_t pos() const { return pos_; }
  void setPos(std::size_t p) { pos_ = p; }
  std::string_view text() const { return text_; }

  SourceLoc locAt(std::size_t offset) const {
    SourceLoc l = locate(text_, offset);
    if (l.line == 1)
      return {origin_.line, origin_.column + l.column - 1};
    return {origin_.line + l.line - 1, l.column};
  }
  SourceLoc loc() { return locAt(pos_); }

  [[noreturn]] void fail(const std::string &msg,
                         ErrorKind kind = ErrorKind::SyntaxError) {
    skipSpace();
    throw Error(kind, msg, loc());
  }
  [[noreturn]] void failAt(std::size_t offset, const std::string &msg,
                           ErrorKind kind) {
    throw Error(kind, msg, locAt(offset));
  }

  std::string found() {
    skipSpace();
    if (pos_ >= text_.size())
      return ", found end of input";
    return std::string(", found '") + text_[pos_] + "'";
  }

private:
  std::string_view text_;
  SourceLoc origin_;
  std::size_t pos_ = 0;
};

/// Parses one additive expression at the cursor.
Expr parseExprAt(Cursor &c);

} // namespace lego::detail
