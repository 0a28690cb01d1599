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

// Text front ends: the layout DSL, integer expressions and fact lists.
//
// Layout grammar (whitespace-insensitive):
//
//   layout  := group | 'ExpandBy' '(' shape ',' shape ',' group ')'
//   group   := head ( '.' 'OrderBy' '(' perm (',' perm)* ')' )*
//   head    := 'GroupBy' '(' shapes ')' | 'TileBy' '(' shapes ')'
//            | 'TileOrderBy' '(' perm (',' perm)* ')'
//   perm    := 'RegP' '(' shape ',' ['sigma' '='] shape ')'
//            | 'GenP' '(' shape ',' name ')'
//            | ('Row' | 'Col') '(' shape | int (',' int)* ')'
//   shape   := '[' int (',' int)* ']'

#pragma once

#include <string>
#include <string_view>

#include "lego/layout.hpp"
#include "lego/simplify.hpp"

namespace lego {

struct ParseOptions {
  PermRegistry registry = PermRegistry::builtins();
  /// GenP tiles up to this many elements are checked exhaustively.
  int64_t genpBound = 4096;
};

/// Parses and validates a layout. Errors carry the source location of the
/// offending construct: SyntaxError, ShapeMismatch, UnknownBuiltinPerm,
/// BijectivityViolation, InvalidShape, InvalidSigma, ArityMismatch.
Layout parseLayout(std::string_view text, const ParseOptions &options = {});

/// Integer expression over named variables: + - * / // % with unary minus,
/// parentheses and isqrt(...). Both '/' and '//' are floor division.
/// Variables come back unranged.
Expr parseExpr(std::string_view text);

/// One fact per line: `v in [lo, hi)` or `v % k == 0`. Blank lines and
/// text after '#' are ignored.
FactSet parseFacts(std::string_view text);

} // namespace lego
