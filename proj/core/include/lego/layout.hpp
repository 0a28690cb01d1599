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

// The layout algebra: permutations of tiles (RegP, GenP), reordering stages
// (OrderBy), logical views glued to reorder chains (GroupBy) and padded
// views (ExpandBy).
//
// Every node evaluates in two modes. Concrete mode maps integer indices and
// checks bounds. Symbolic mode builds Expr trees for code generation; the
// result agrees with concrete mode at every in-range point.

#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lego/expr.hpp"
#include "lego/simplify.hpp"

namespace lego {

/// Extents n_1..n_d of a tile, each at least 1.
class Shape {
public:
  Shape() = default;
  explicit Shape(std::vector<int64_t> extents);
  Shape(std::initializer_list<int64_t> extents)
      : Shape(std::vector<int64_t>(extents)) {}

  std::size_t rank() const { return extents_.size(); }
  int64_t operator[](std::size_t k) const { return extents_.at(k); }
  std::span<const int64_t> extents() const { return extents_; }
  /// Number of elements; throws InvalidShape if it overflows int64.
  int64_t numel() const;
  std::string toString() const;

  friend bool operator==(const Shape &, const Shape &) = default;

private:
  std::vector<int64_t> extents_;
};

/// Concatenates the dimensions of several shapes.
Shape concat(std::span<const Shape> shapes);

/// A 1-based permutation of [1..d].
class Sigma {
public:
  explicit Sigma(std::vector<int> perm);
  static Sigma identity(std::size_t d);
  static Sigma reversed(std::size_t d);

  std::size_t rank() const { return perm_.size(); }
  int operator[](std::size_t k) const { return perm_.at(k); }
  std::span<const int> values() const { return perm_; }
  Sigma inverse() const;
  std::string toString() const;

  /// Gathers v by the permutation: result[k] = v[sigma[k] - 1].
  template <class T> std::vector<T> apply(std::span<const T> v) const {
    checkRank(v.size());
    std::vector<T> out;
    out.reserve(v.size());
    for (int p : perm_)
      out.push_back(v[static_cast<std::size_t>(p - 1)]);
    return out;
  }
  Shape apply(const Shape &s) const {
    return Shape(apply<int64_t>(s.extents()));
  }

  friend bool operator==(const Sigma &, const Sigma &) = default;

private:
  void checkRank(std::size_t n) const;
  std::vector<int> perm_;
};

/// The permutation r with r[sigma[k] - 1] = k + 1.
Sigma sigmaInverse(const Sigma &sigma);

/// The hierarchical interleaving sigma_{d x q}: flatten(A) with
/// A[k][h] = k + 1 + d*h, for q tile levels of d dimensions.
Sigma tileSigma(std::size_t d, std::size_t q);

int64_t canonFlatten(const Shape &shape, std::span<const int64_t> idx);
Expr canonFlatten(const Shape &shape, std::span<const Expr> idx);
std::vector<int64_t> canonUnflatten(const Shape &shape, int64_t flat);
std::vector<Expr> canonUnflatten(const Shape &shape, const Expr &flat);

/// A user-defined bijection between a tile's multi-index space and its
/// flat space, in both evaluation modes. Implementations must be pure.
struct PermFn {
  std::string name;
  std::function<int64_t(std::span<const int64_t>)> fwd;
  std::function<std::vector<int64_t>(int64_t)> inv;
  std::function<Expr(std::span<const Expr>)> fwdSymbolic;
  std::function<std::vector<Expr>(const Expr &)> invSymbolic;
  /// When set, validation skips the exhaustive bijectivity check.
  bool trusted = false;
};

/// Builds a PermFn bound to a concrete tile shape; throws InvalidShape for
/// shapes it does not support.
using PermFactory = std::function<PermFn(const Shape &)>;

/// Named GenP implementations that the DSL can reference.
class PermRegistry {
public:
  /// identity, rev1d, rev2d, rev and antidiag.
  static PermRegistry builtins();
  /// builtins plus a deliberately broken permutation named "corrupt",
  /// flagged trusted so that only an exhaustive check catches it.
  static PermRegistry withTestHooks();

  PermRegistry &add(const std::string &name, PermFactory factory);
  bool contains(const std::string &name) const;
  /// Throws UnknownBuiltinPerm.
  PermFn make(const std::string &name, const Shape &shape) const;
  std::vector<std::string> names() const;

private:
  std::map<std::string, PermFactory> factories_;
};

/// Antidiagonal ordering of an n x n tile.
PermFn antidiagPerm(int64_t n);

/// Permutes the dimensions of a tile by sigma, then flattens row-major.
class RegP {
public:
  RegP(Shape shape, Sigma sigma);

  const Shape &shape() const { return shape_; }
  const Sigma &sigma() const { return sigma_; }
  std::size_t rank() const { return shape_.rank(); }
  int64_t numel() const { return shape_.numel(); }

  int64_t apply(std::span<const int64_t> idx) const;
  std::vector<int64_t> inv(int64_t flat) const;
  Expr apply(std::span<const Expr> idx) const;
  std::vector<Expr> inv(const Expr &flat) const;
  std::string toString() const;

private:
  Shape shape_;
  Sigma sigma_;
  Shape permuted_;
};

/// A tile reordered by a user-defined bijection.
class GenP {
public:
  GenP(Shape shape, PermFn fn);

  const Shape &shape() const { return shape_; }
  const PermFn &fn() const { return fn_; }
  std::size_t rank() const { return shape_.rank(); }
  int64_t numel() const { return shape_.numel(); }

  int64_t apply(std::span<const int64_t> idx) const;
  std::vector<int64_t> inv(int64_t flat) const;
  Expr apply(std::span<const Expr> idx) const;
  std::vector<Expr> inv(const Expr &flat) const;
  std::string toString() const;

private:
  Shape shape_;
  PermFn fn_;
};

class Perm {
public:
  Perm(RegP p) : v_(std::move(p)) {} // NOLINT(google-explicit-constructor)
  Perm(GenP p) : v_(std::move(p)) {} // NOLINT(google-explicit-constructor)

  bool isRegP() const { return std::holds_alternative<RegP>(v_); }
  const RegP *regP() const { return std::get_if<RegP>(&v_); }
  const GenP *genP() const { return std::get_if<GenP>(&v_); }

  const Shape &shape() const;
  std::size_t rank() const { return shape().rank(); }
  int64_t numel() const { return shape().numel(); }

  int64_t apply(std::span<const int64_t> idx) const;
  std::vector<int64_t> inv(int64_t flat) const;
  Expr apply(std::span<const Expr> idx) const;
  std::vector<Expr> inv(const Expr &flat) const;
  std::string toString() const;

private:
  std::variant<RegP, GenP> v_;
};

/// Row-major: RegP(shape, [1..d]).
Perm row(const Shape &shape);
/// Column-major: RegP(reversed shape, [d..1]).
Perm col(const Shape &shape);

/// One reordering stage: consecutive perms own consecutive slices of the
/// index, and their flat results are combined outermost first.
class OrderBy {
public:
  explicit OrderBy(std::vector<Perm> perms);
  OrderBy(std::initializer_list<Perm> perms)
      : OrderBy(std::vector<Perm>(perms)) {}

  const std::vector<Perm> &perms() const { return perms_; }
  /// Concatenated perm dimensions.
  const Shape &dims() const { return dims_; }
  std::size_t rank() const { return dims_.rank(); }
  int64_t numel() const { return dims_.numel(); }

  int64_t apply(std::span<const int64_t> idx) const;
  std::vector<int64_t> inv(int64_t flat) const;
  Expr apply(std::span<const Expr> idx) const;
  std::vector<Expr> inv(const Expr &flat) const;
  std::string toString() const;

private:
  std::vector<Perm> perms_;
  Shape dims_;
};

/// A logical view built from a tile hierarchy followed by a chain of
/// reordering stages, applied in dot order.
///
/// The element-count invariant is not enforced by the constructor so that
/// broken layouts can be inspected by validate(); apply and inv throw
/// ShapeMismatch on them.
class GroupBy {
public:
  explicit GroupBy(std::vector<Shape> tiles, std::vector<OrderBy> chain = {});

  /// An apply-only layout: one tile reordered by a single GenP of the same
  /// shape whose fwd need only be injective (its image may exceed the tile).
  static GroupBy injectiveOnly(Shape tile, GenP perm);

  /// Appends a stage: `g.orderBy(...)` mirrors the DSL's dot chain.
  GroupBy orderBy(OrderBy stage) const;

  const std::vector<Shape> &tiles() const { return tiles_; }
  const std::vector<OrderBy> &chain() const { return chain_; }
  /// Concatenated tile dimensions.
  const Shape &logicalShape() const { return logical_; }
  std::size_t rank() const { return logical_.rank(); }
  int64_t numel() const { return logical_.numel(); }
  bool injective() const { return injective_; }

  int64_t apply(std::span<const int64_t> idx) const;
  std::vector<int64_t> inv(int64_t flat) const;

  /// Unranged Var coordinates get their dimension's extent as range.
  Expr applySymbolic(std::span<const Expr> idx, const FactSet &facts = {},
                     VariantPolicy policy = VariantPolicy::Auto) const;
  std::vector<Expr>
  invSymbolic(const Expr &flat, const FactSet &facts = {},
              VariantPolicy policy = VariantPolicy::Auto) const;

  std::string toString() const;

private:
  void checkCounts() const;
  void checkInvertible() const;

  std::vector<Shape> tiles_;
  std::vector<OrderBy> chain_;
  Shape logical_;
  bool injective_ = false;
};

/// Pads a physical space up to an expanded space that the inner layout
/// tiles exactly; indices landing in the padding map to no position.
class ExpandBy {
public:
  ExpandBy(Shape physical, Shape expanded, GroupBy inner);

  const Shape &physical() const { return physical_; }
  const Shape &expanded() const { return expanded_; }
  const GroupBy &inner() const { return inner_; }

  /// nullopt for padding indices.
  std::optional<int64_t> apply(std::span<const int64_t> idx) const;
  std::vector<int64_t> inv(int64_t flat) const;
  /// Select(mask, position, -1).
  Expr applySymbolic(std::span<const Expr> idx, const FactSet &facts = {},
                     VariantPolicy policy = VariantPolicy::Auto) const;
  std::vector<Expr>
  invSymbolic(const Expr &flat, const FactSet &facts = {},
              VariantPolicy policy = VariantPolicy::Auto) const;

  std::string toString() const;

private:
  Shape physical_;
  Shape expanded_;
  GroupBy inner_;
};

/// Either top-level layout form.
class Layout {
public:
  Layout(GroupBy g) : v_(std::move(g)) {}  // NOLINT(google-explicit-constructor)
  Layout(ExpandBy x) : v_(std::move(x)) {} // NOLINT(google-explicit-constructor)

  const GroupBy *groupBy() const { return std::get_if<GroupBy>(&v_); }
  const ExpandBy *expandBy() const { return std::get_if<ExpandBy>(&v_); }

  const Shape &logicalShape() const;
  std::size_t rank() const { return logicalShape().rank(); }
  /// Number of logical indices.
  int64_t logicalSize() const { return logicalShape().numel(); }
  /// Number of physical positions.
  int64_t physicalSize() const;
  bool invertible() const;

  std::optional<int64_t> apply(std::span<const int64_t> idx) const;
  std::vector<int64_t> inv(int64_t flat) const;
  Expr applySymbolic(std::span<const Expr> idx, const FactSet &facts = {},
                     VariantPolicy policy = VariantPolicy::Auto) const;
  std::vector<Expr>
  invSymbolic(const Expr &flat, const FactSet &facts = {},
              VariantPolicy policy = VariantPolicy::Auto) const;

  std::string toString() const;

private:
  std::variant<GroupBy, ExpandBy> v_;
};

/// Hierarchical tiling: GroupBy(tiles).OrderBy(RegP(concat, sigma_{d x q})),
/// laying out level h's coordinate k next to the other levels of dim k.
GroupBy tileBy(std::vector<Shape> tiles);
/// Hierarchical reordering over the merged d-dim space: regroups the
/// interleaved coordinates per tile, then applies each perm to its tile.
GroupBy tileOrderBy(std::vector<Perm> perms);

struct ValidationCheck {
  std::string name;
  bool passed = true;
  std::optional<ErrorKind> failure;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool ok() const;
  const ValidationCheck *firstFailure() const;
};

/// Element counts, ExpandBy shape relations and, for GenPs with at most
/// `genpBound` elements, exhaustive bijectivity and concrete/symbolic
/// agreement.
ValidationReport validate(const Layout &layout, int64_t genpBound = 4096);

} // namespace lego
