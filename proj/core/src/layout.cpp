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

#include "lego/layout.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "range_impl.hpp"

namespace lego {
namespace {

std::string joined(std::span<const int64_t> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i)
      s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

void checkArity(std::size_t expected, std::size_t got, const char *what) {
  if (expected != got)
    throw Error(ErrorKind::ArityMismatch,
                std::string(what) + " expects " + std::to_string(expected) +
                    " coordinates, got " + std::to_string(got));
}

void checkFlat(int64_t flat, int64_t n, const char *what) {
  if (flat < 0 || flat >= n)
    throw Error(ErrorKind::OutOfBounds,
                std::string(what) + ": flat index " + std::to_string(flat) +
                    " outside [0, " + std::to_string(n) + ")");
}

// Attaches the extent of each dimension to unranged Var coordinates.
std::vector<Expr> ranged(std::span<const Expr> idx, const Shape &shape) {
  std::vector<Expr> out;
  out.reserve(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const Expr &e = idx[k];
    if (e.isVar() && !e.range())
      out.push_back(Expr::var(e.name(), VarRange(0, shape[k])));
    else
      out.push_back(e);
  }
  return out;
}

Expr rangedFlat(const Expr &flat, int64_t n) {
  if (flat.isVar() && !flat.range())
    return Expr::var(flat.name(), VarRange(0, n));
  return flat;
}

std::vector<Expr> simplifyAll(std::vector<Expr> v, const FactSet &facts) {
  for (auto &e : v)
    e = simplify(e, facts);
  return v;
}

} // namespace

// ---- Shape / Sigma ----------------------------------------------------------

Shape::Shape(std::vector<int64_t> extents) : extents_(std::move(extents)) {
  if (extents_.empty())
    throw Error(ErrorKind::InvalidShape, "shape must have at least one extent");
  for (int64_t n : extents_)
    if (n < 1)
      throw Error(ErrorKind::InvalidShape,
                  "extent " + std::to_string(n) + " in [" + joined(extents_) +
                      "] is not positive");
  (void)numel();
}

int64_t Shape::numel() const {
  detail::Wide n = 1;
  for (int64_t e : extents_) {
    n *= e;
    if (n > std::numeric_limits<int64_t>::max())
      throw Error(ErrorKind::InvalidShape,
                  "shape [" + joined(extents_) + "] has too many elements");
  }
  return static_cast<int64_t>(n);
}

std::string Shape::toString() const { return "[" + joined(extents_) + "]"; }

Shape concat(std::span<const Shape> shapes) {
  std::vector<int64_t> all;
  for (const auto &s : shapes)
    all.insert(all.end(), s.extents().begin(), s.extents().end());
  return Shape(std::move(all));
}

Sigma::Sigma(std::vector<int> perm) : perm_(std::move(perm)) {
  std::vector<int> sorted = perm_;
  std::sort(sorted.begin(), sorted.end());
  bool ok = !sorted.empty();
  for (std::size_t k = 0; k < sorted.size() && ok; ++k)
    ok = sorted[k] == static_cast<int>(k + 1);
  if (!ok) {
    std::string s;
    for (std::size_t k = 0; k < perm_.size(); ++k)
      s += (k ? "," : "") + std::to_string(perm_[k]);
    throw Error(ErrorKind::InvalidSigma,
                "[" + s + "] is not a permutation of [1.." +
                    std::to_string(perm_.size()) + "]");
  }
}

Sigma Sigma::identity(std::size_t d) {
  std::vector<int> p(d);
  std::iota(p.begin(), p.end(), 1);
  return Sigma(std::move(p));
}

Sigma Sigma::reversed(std::size_t d) {
  std::vector<int> p(d);
  for (std::size_t k = 0; k < d; ++k)
    p[k] = static_cast<int>(d - k);
  return Sigma(std::move(p));
}

Sigma Sigma::inverse() const {
  std::vector<int> r(perm_.size());
  for (std::size_t k = 0; k < perm_.size(); ++k)
    r[static_cast<std::size_t>(perm_[k] - 1)] = static_cast<int>(k + 1);
  return Sigma(std::move(r));
}

std::string Sigma::toString() const {
  std::string s = "[";
  for (std::size_t k = 0; k < perm_.size(); ++k)
    s += (k ? "," : "") + std::to_string(perm_[k]);
  return s + "]";
}

void Sigma::checkRank(std::size_t n) const {
  checkArity(perm_.size(), n, "sigma");
}

Sigma sigmaInverse(const Sigma &sigma) { return sigma.inverse(); }

Sigma tileSigma(std::size_t d, std::size_t q) {
  std::vector<int> p;
  p.reserve(d * q);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t h = 0; h < q; ++h)
      p.push_back(static_cast<int>(k + 1 + d * h));
  return Sigma(std::move(p));
}

// ---- canonical bijections ---------------------------------------------------

int64_t canonFlatten(const Shape &shape, std::span<const int64_t> idx) {
  checkArity(shape.rank(), idx.size(), "canonical flatten");
  int64_t f = 0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] < 0 || idx[k] >= shape[k])
      throw Error(ErrorKind::OutOfBounds,
                  "coordinate " + std::to_string(idx[k]) + " of [" +
                      joined(idx) + "] outside extent " +
                      std::to_string(shape[k]) + " of " + shape.toString());
    f = f * shape[k] + idx[k];
  }
  return f;
}

Expr canonFlatten(const Shape &shape, std::span<const Expr> idx) {
  checkArity(shape.rank(), idx.size(), "canonical flatten");
  Expr f = idx[0];
  for (std::size_t k = 1; k < idx.size(); ++k)
    f = f * Expr(shape[k]) + idx[k];
  return f;
}

std::vector<int64_t> canonUnflatten(const Shape &shape, int64_t flat) {
  checkFlat(flat, shape.numel(), "canonical unflatten");
  std::vector<int64_t> idx(shape.rank());
  for (std::size_t k = shape.rank(); k-- > 0;) {
    idx[k] = flat % shape[k];
    flat /= shape[k];
  }
  return idx;
}

std::vector<Expr> canonUnflatten(const Shape &shape, const Expr &flat) {
  std::size_t q = shape.rank();
  std::vector<Expr> idx(q, Expr(0));
  Expr rest = flat;
  for (std::size_t k = q; k-- > 1;) {
    idx[k] = rest % Expr(shape[k]);
    rest = rest / Expr(shape[k]);
  }
  idx[0] = rest;
  return idx;
}

// ---- RegP / GenP / Perm -----------------------------------------------------

RegP::RegP(Shape shape, Sigma sigma)
    : shape_(std::move(shape)), sigma_(std::move(sigma)) {
  if (sigma_.rank() != shape_.rank())
    throw Error(ErrorKind::ArityMismatch,
                "RegP sigma " + sigma_.toString() + " does not match shape " +
                    shape_.toString());
  permuted_ = sigma_.apply(shape_);
}

int64_t RegP::apply(std::span<const int64_t> idx) const {
  checkArity(rank(), idx.size(), "RegP");
  for (std::size_t k = 0; k < idx.size(); ++k)
    if (idx[k] < 0 || idx[k] >= shape_[k])
      throw Error(ErrorKind::OutOfBounds,
                  "index [" + joined(idx) + "] outside " + shape_.toString());
  auto p = sigma_.apply(idx);
  return canonFlatten(permuted_, p);
}

std::vector<int64_t> RegP::inv(int64_t flat) const {
  auto p = canonUnflatten(permuted_, flat);
  return sigma_.inverse().apply<int64_t>(p);
}

Expr RegP::apply(std::span<const Expr> idx) const {
  checkArity(rank(), idx.size(), "RegP");
  auto p = sigma_.apply(idx);
  return canonFlatten(permuted_, p);
}

std::vector<Expr> RegP::inv(const Expr &flat) const {
  auto p = canonUnflatten(permuted_, flat);
  return sigma_.inverse().apply<Expr>(p);
}

std::string RegP::toString() const {
  return "RegP(" + shape_.toString() + "," + sigma_.toString() + ")";
}

GenP::GenP(Shape shape, PermFn fn) : shape_(std::move(shape)), fn_(std::move(fn)) {
  if (!fn_.fwd || !fn_.inv || !fn_.fwdSymbolic || !fn_.invSymbolic)
    throw Error(ErrorKind::InvalidShape,
                "GenP '" + fn_.name + "' must provide all four functions");
}

int64_t GenP::apply(std::span<const int64_t> idx) const {
  checkArity(rank(), idx.size(), "GenP");
  for (std::size_t k = 0; k < idx.size(); ++k)
    if (idx[k] < 0 || idx[k] >= shape_[k])
      throw Error(ErrorKind::OutOfBounds,
                  "index [" + joined(idx) + "] outside " + shape_.toString());
  return fn_.fwd(idx);
}

std::vector<int64_t> GenP::inv(int64_t flat) const {
  checkFlat(flat, numel(), "GenP");
  auto idx = fn_.inv(flat);
  checkArity(rank(), idx.size(), "GenP inverse");
  return idx;
}

Expr GenP::apply(std::span<const Expr> idx) const {
  checkArity(rank(), idx.size(), "GenP");
  return fn_.fwdSymbolic(idx);
}

std::vector<Expr> GenP::inv(const Expr &flat) const {
  auto idx = fn_.invSymbolic(flat);
  checkArity(rank(), idx.size(), "GenP inverse");
  return idx;
}

std::string GenP::toString() const {
  return "GenP(" + shape_.toString() + "," + fn_.name + ")";
}

const Shape &Perm::shape() const {
  return std::visit([](const auto &p) -> const Shape & { return p.shape(); },
                    v_);
}
int64_t Perm::apply(std::span<const int64_t> idx) const {
  return std::visit([&](const auto &p) { return p.apply(idx); }, v_);
}
std::vector<int64_t> Perm::inv(int64_t flat) const {
  return std::visit([&](const auto &p) { return p.inv(flat); }, v_);
}
Expr Perm::apply(std::span<const Expr> idx) const {
  return std::visit([&](const auto &p) { return p.apply(idx); }, v_);
}
std::vector<Expr> Perm::inv(const Expr &flat) const {
  return std::visit([&](const auto &p) { return p.inv(flat); }, v_);
}
std::string Perm::toString() const {
  return std::visit([](const auto &p) { return p.toString(); }, v_);
}

Perm row(const Shape &shape) { return RegP(shape, Sigma::identity(shape.rank())); }

Perm col(const Shape &shape) {
  return RegP(shape, Sigma::reversed(shape.rank()));
}

// ---- OrderBy ----------------------------------------------------------------

namespace {
Shape dimsOf(const std::vector<Perm> &perms) {
  if (perms.empty())
    throw Error(ErrorKind::InvalidShape, "OrderBy needs at least one perm");
  std::vector<Shape> shapes;
  for (const auto &p : perms)
    shapes.push_back(p.shape());
  return concat(shapes);
}
} // namespace

OrderBy::OrderBy(std::vector<Perm> perms)
    : perms_(std::move(perms)), dims_(dimsOf(perms_)) {}

int64_t OrderBy::apply(std::span<const int64_t> idx) const {
  checkArity(rank(), idx.size(), "OrderBy");
  int64_t flat = 0;
  std::size_t at = 0;
  for (const auto &p : perms_) {
    int64_t cur = p.apply(idx.subspan(at, p.rank()));
    flat = cur + flat * p.numel();
    at += p.rank();
  }
  return flat;
}

std::vector<int64_t> OrderBy::inv(int64_t flat) const {
  checkFlat(flat, numel(), "OrderBy");
  std::vector<int64_t> idx(rank());
  std::size_t end = rank();
  for (auto it = perms_.rbegin(); it != perms_.rend(); ++it) {
    int64_t cur = flat % it->numel();
    flat /= it->numel();
    auto sub = it->inv(cur);
    end -= it->rank();
    std::copy(sub.begin(), sub.end(), idx.begin() + static_cast<long>(end));
  }
  return idx;
}

Expr OrderBy::apply(std::span<const Expr> idx) const {
  checkArity(rank(), idx.size(), "OrderBy");
  std::optional<Expr> flat;
  std::size_t at = 0;
  for (const auto &p : perms_) {
    Expr cur = p.apply(idx.subspan(at, p.rank()));
    flat = flat ? cur + *flat * Expr(p.numel()) : cur;
    at += p.rank();
  }
  return *flat;
}

std::vector<Expr> OrderBy::inv(const Expr &flat) const {
  std::vector<Expr> idx(rank(), Expr(0));
  std::size_t end = rank();
  Expr rest = flat;
  for (std::size_t i = perms_.size(); i-- > 0;) {
    const Perm &p = perms_[i];
    Expr cur = i == 0 ? rest : rest % Expr(p.numel());
    if (i != 0)
      rest = rest / Expr(p.numel());
    auto sub = p.inv(cur);
    end -= p.rank();
    std::copy(sub.begin(), sub.end(), idx.begin() + static_cast<long>(end));
  }
  return idx;
}

std::string OrderBy::toString() const {
  std::string s = "OrderBy(";
  for (std::size_t i = 0; i < perms_.size(); ++i)
    s += (i ? ", " : "") + perms_[i].toString();
  return s + ")";
}

// ---- GroupBy ----------------------------------------------------------------

GroupBy::GroupBy(std::vector<Shape> tiles, std::vector<OrderBy> chain)
    : tiles_(std::move(tiles)), chain_(std::move(chain)) {
  if (tiles_.empty())
    throw Error(ErrorKind::InvalidShape, "GroupBy needs at least one tile");
  logical_ = concat(tiles_);
}

GroupBy GroupBy::injectiveOnly(Shape tile, GenP perm) {
  if (!(perm.shape() == tile))
    throw Error(ErrorKind::ShapeMismatch,
                "an injective layout's GenP must have the tile shape " +
                    tile.toString() + ", got " + perm.shape().toString());
  GroupBy g({std::move(tile)}, {OrderBy({Perm(std::move(perm))})});
  g.injective_ = true;
  return g;
}

GroupBy GroupBy::orderBy(OrderBy stage) const {
  if (injective_)
    throw Error(ErrorKind::InjectiveOnly,
                "an injective layout admits exactly one OrderBy");
  GroupBy g = *this;
  g.chain_.push_back(std::move(stage));
  return g;
}

void GroupBy::checkCounts() const {
  int64_t n = numel();
  for (std::size_t i = 0; i < chain_.size(); ++i)
    if (chain_[i].numel() != n)
      throw Error(ErrorKind::ShapeMismatch,
                  "OrderBy #" + std::to_string(i + 1) + " covers " +
                      std::to_string(chain_[i].numel()) +
                      " elements but the GroupBy has " + std::to_string(n));
}

void GroupBy::checkInvertible() const {
  if (injective_)
    throw Error(ErrorKind::InjectiveOnly,
                "injective layouts export apply only");
}

int64_t GroupBy::apply(std::span<const int64_t> idx) const {
  checkArity(rank(), idx.size(), "GroupBy");
  checkCounts();
  int64_t flat = canonFlatten(logical_, idx);
  if (injective_) {
    auto sub = canonUnflatten(chain_[0].dims(), flat);
    const GenP &p = *chain_[0].perms()[0].genP();
    return p.fn().fwd(sub);
  }
  for (const auto &o : chain_)
    flat = o.apply(canonUnflatten(o.dims(), flat));
  return flat;
}

std::vector<int64_t> GroupBy::inv(int64_t flat) const {
  checkInvertible();
  checkCounts();
  checkFlat(flat, numel(), "GroupBy");
  for (auto it = chain_.rbegin(); it != chain_.rend(); ++it)
    flat = canonFlatten(it->dims(), it->inv(flat));
  return canonUnflatten(logical_, flat);
}

Expr GroupBy::applySymbolic(std::span<const Expr> idx, const FactSet &facts,
                            VariantPolicy policy) const {
  checkArity(rank(), idx.size(), "GroupBy");
  checkCounts();
  auto in = ranged(idx, logical_);
  Expr flat = simplify(canonFlatten(logical_, in), facts);
  for (const auto &o : chain_) {
    auto sub = simplifyAll(canonUnflatten(o.dims(), flat), facts);
    flat = simplify(o.apply(sub), facts);
  }
  return bestVariant(flat, facts, policy);
}

std::vector<Expr> GroupBy::invSymbolic(const Expr &flat, const FactSet &facts,
                                       VariantPolicy policy) const {
  checkInvertible();
  checkCounts();
  Expr f = simplify(rangedFlat(flat, numel()), facts);
  for (auto it = chain_.rbegin(); it != chain_.rend(); ++it) {
    auto sub = simplifyAll(it->inv(f), facts);
    f = simplify(canonFlatten(it->dims(), sub), facts);
  }
  auto out = canonUnflatten(logical_, f);
  for (auto &e : out)
    e = bestVariant(e, facts, policy);
  return out;
}

std::string GroupBy::toString() const {
  std::string s = "GroupBy(";
  for (std::size_t i = 0; i < tiles_.size(); ++i)
    s += (i ? ", " : "") + tiles_[i].toString();
  s += ")";
  for (const auto &o : chain_)
    s += "." + o.toString();
  return s;
}

// ---- ExpandBy ---------------------------------------------------------------

ExpandBy::ExpandBy(Shape physical, Shape expanded, GroupBy inner)
    : physical_(std::move(physical)), expanded_(std::move(expanded)),
      inner_(std::move(inner)) {
  if (inner_.injective())
    throw Error(ErrorKind::InjectiveOnly,
                "ExpandBy cannot wrap an injective layout");
  if (physical_.rank() != expanded_.rank())
    throw Error(ErrorKind::ArityMismatch,
                "ExpandBy physical " + physical_.toString() +
                    " and expanded " + expanded_.toString() +
                    " differ in rank");
  for (std::size_t k = 0; k < physical_.rank(); ++k)
    if (expanded_[k] < physical_[k])
      throw Error(ErrorKind::InvalidShape,
                  "expanded " + expanded_.toString() + " is smaller than " +
                      "physical " + physical_.toString());
  if (inner_.numel() != expanded_.numel())
    throw Error(ErrorKind::ShapeMismatch,
                "ExpandBy inner layout has " + std::to_string(inner_.numel()) +
                    " elements, expanded space " +
                    std::to_string(expanded_.numel()));
}

std::optional<int64_t> ExpandBy::apply(std::span<const int64_t> idx) const {
  auto c = canonUnflatten(expanded_, inner_.apply(idx));
  for (std::size_t k = 0; k < c.size(); ++k)
    if (c[k] >= physical_[k])
      return std::nullopt;
  return canonFlatten(physical_, c);
}

std::vector<int64_t> ExpandBy::inv(int64_t flat) const {
  return inner_.inv(canonFlatten(expanded_, canonUnflatten(physical_, flat)));
}

Expr ExpandBy::applySymbolic(std::span<const Expr> idx, const FactSet &facts,
                             VariantPolicy policy) const {
  Expr f = inner_.applySymbolic(idx, facts, policy);
  auto c = simplifyAll(canonUnflatten(expanded_, f), facts);
  std::optional<Cond> mask;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (expanded_[k] == physical_[k])
      continue;
    Cond ck = Cond::lt(c[k], Expr(physical_[k]));
    mask = mask ? Cond::conj(*mask, ck) : ck;
  }
  Expr pos = simplify(canonFlatten(physical_, c), facts);
  if (!mask)
    return bestVariant(pos, facts, policy);
  return bestVariant(Expr::select(*mask, pos, Expr(-1)), facts, policy);
}

std::vector<Expr> ExpandBy::invSymbolic(const Expr &flat, const FactSet &facts,
                                        VariantPolicy policy) const {
  Expr f = rangedFlat(flat, physical_.numel());
  auto c = simplifyAll(canonUnflatten(physical_, f), facts);
  Expr e = simplify(canonFlatten(expanded_, c), facts);
  // The expanded flat index is not a Var, so the inner layout sees its
  // range through interval reasoning rather than an attached range.
  return inner_.invSymbolic(e, facts, policy);
}

std::string ExpandBy::toString() const {
  return "ExpandBy(" + physical_.toString() + ", " + expanded_.toString() +
         ", " + inner_.toString() + ")";
}

// ---- Layout -----------------------------------------------------------------

const Shape &Layout::logicalShape() const {
  if (auto g = groupBy())
    return g->logicalShape();
  return expandBy()->inner().logicalShape();
}

int64_t Layout::physicalSize() const {
  if (auto g = groupBy())
    return g->numel();
  return expandBy()->physical().numel();
}

bool Layout::invertible() const {
  if (auto g = groupBy())
    return !g->injective();
  return true;
}

std::optional<int64_t> Layout::apply(std::span<const int64_t> idx) const {
  if (auto g = groupBy())
    return g->apply(idx);
  return expandBy()->apply(idx);
}

std::vector<int64_t> Layout::inv(int64_t flat) const {
  if (auto g = groupBy())
    return g->inv(flat);
  return expandBy()->inv(flat);
}

Expr Layout::applySymbolic(std::span<const Expr> idx, const FactSet &facts,
                           VariantPolicy policy) const {
  if (auto g = groupBy())
    return g->applySymbolic(idx, facts, policy);
  return expandBy()->applySymbolic(idx, facts, policy);
}

std::vector<Expr> Layout::invSymbolic(const Expr &flat, const FactSet &facts,
                                      VariantPolicy policy) const {
  if (auto g = groupBy())
    return g->invSymbolic(flat, facts, policy);
  return expandBy()->invSymbolic(flat, facts, policy);
}

std::string Layout::toString() const {
  if (auto g = groupBy())
    return g->toString();
  return expandBy()->toString();
}

// ---- sugar ------------------------------------------------------------------

GroupBy tileBy(std::vector<Shape> tiles) {
  if (tiles.empty())
    throw Error(ErrorKind::InvalidShape, "TileBy needs at least one tile");
  std::size_t d = tiles[0].rank();
  for (const auto &t : tiles)
    if (t.rank() != d)
      throw Error(ErrorKind::ArityMismatch,
                  "TileBy tiles must share one dimensionality; got " +
                      tiles[0].toString() + " and " + t.toString());
  Shape all = concat(tiles);
  Sigma sigma = tileSigma(d, tiles.size());
  return GroupBy(std::move(tiles), {OrderBy({RegP(all, sigma)})});
}

GroupBy tileOrderBy(std::vector<Perm> perms) {
  if (perms.empty())
    throw Error(ErrorKind::InvalidShape, "TileOrderBy needs at least one perm");
  std::size_t d = perms[0].rank();
  std::vector<Shape> shapes;
  std::vector<int64_t> merged(d, 1);
  for (const auto &p : perms) {
    if (p.rank() != d)
      throw Error(ErrorKind::ArityMismatch,
                  "TileOrderBy perms must share one dimensionality; got " +
                      perms[0].shape().toString() + " and " +
                      p.shape().toString());
    shapes.push_back(p.shape());
    for (std::size_t k = 0; k < d; ++k)
      merged[k] *= p.shape()[k];
  }
  Sigma sigma = tileSigma(d, perms.size());
  Shape interleaved = sigma.apply(concat(shapes));
  GroupBy g({Shape(std::move(merged))});
  return g.orderBy(OrderBy({RegP(interleaved, sigma.inverse())}))
      .orderBy(OrderBy(std::move(perms)));
}

} // namespace lego
