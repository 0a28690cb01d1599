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

// Code templates with `{{ ... }}` placeholders, the manifest that declares
// their layouts and variables, and instantiation.
//
// Placeholder language:
//
//   L.apply(a, b, ...)   layout apply; L[a, b, ...] is the same
//   L.inv(e)             layout inverse, emitted as a tuple "(x, y)"
//   e                    any integer expression over declared variables
//
// An apply argument is an expression, `:` (the whole dimension) or
// `lo:hi` with constant bounds. Slices become broadcast index vectors in
// the Triton target, with axes numbered by slice position, left to right.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lego/dsl.hpp"
#include "lego/emit.hpp"
#include "lego/layout.hpp"
#include "lego/simplify.hpp"

namespace lego {

struct SliceArg {
  /// Both absent for `:`.
  std::optional<Expr> lo;
  std::optional<Expr> hi;
};

using PlaceholderArg = std::variant<Expr, SliceArg>;

struct LayoutApply {
  std::string layout;
  std::vector<PlaceholderArg> args;
};

struct LayoutInv {
  std::string layout;
  Expr arg;
};

struct RawExpr {
  Expr expr;
};

using PlaceholderAst = std::variant<LayoutApply, LayoutInv, RawExpr>;

struct Literal {
  std::string text;
  SourceLoc loc;
};

struct Placeholder {
  /// Source text including the braces.
  std::string raw;
  PlaceholderAst ast;
  SourceLoc loc;
  /// 1-based position among the template's placeholders.
  int ordinal = 0;
};

using Segment = std::variant<Literal, Placeholder>;

class Template {
public:
  explicit Template(std::vector<Segment> segments)
      : segments_(std::move(segments)) {}

  const std::vector<Segment> &segments() const { return segments_; }
  std::vector<const Placeholder *> placeholders() const;
  /// Reproduces the parsed source byte for byte.
  std::string serialize() const;

private:
  std::vector<Segment> segments_;
};

/// Throws UnterminatedPlaceholder or PlaceholderSyntax with the location.
Template parseTemplate(std::string_view text);

struct LayoutDecl {
  std::string name;
  std::string dsl;
  SourceLoc loc; // of the DSL text
};

/// Manifest sections, each introduced by a `[name]` line; '#' comments.
///
///   [layouts]   Name = <layout DSL>
///   [vars]      v in [lo, hi)
///   [facts]     v in [lo, hi)  |  v % k == 0
///   [target]    c | python | triton
///   [policy]    default = auto  |  @N = expanded  |  Name = unexpanded
struct Manifest {
  std::vector<LayoutDecl> layouts;
  std::map<std::string, VarRange> vars;
  FactSet facts;
  TargetProfile target = TargetProfile::python();
  VariantPolicy defaultPolicy = VariantPolicy::Auto;
  std::map<int, VariantPolicy> placeholderPolicy;
  std::map<std::string, VariantPolicy> layoutPolicy;

  /// Policy for one placeholder: by ordinal, then by layout, then default.
  VariantPolicy policyFor(int ordinal, const std::string *layout) const;
};

/// Throws ManifestSyntax with the location.
Manifest parseManifest(std::string_view text);

using LayoutTable = std::map<std::string, Layout>;

/// Parses every declared layout; errors keep their kind and point into the
/// manifest.
LayoutTable resolveLayouts(const Manifest &manifest,
                           const ParseOptions &options = {});

/// Replaces each placeholder with emitted code. Throws UnknownLayout,
/// UnknownVariable, SliceOnNonConstantDim, UnsupportedNode or
/// ArityMismatch, located at the placeholder.
std::string instantiate(const Template &t, const Manifest &manifest,
                        const LayoutTable &layouts);

} // namespace lego
