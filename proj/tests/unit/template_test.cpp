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

#include <gtest/gtest.h>

#include <random>

#include "files.hpp"
#include "lego/template.hpp"
#include "text_eval.hpp"
#include "thrown.hpp"

namespace lego {
namespace {

using testing::thrownKind;

struct Pipeline {
  Manifest manifest;
  LayoutTable layouts;
  std::string run(std::string_view text) const {
    return instantiate(parseTemplate(text), manifest, layouts);
  }
};

Pipeline pipeline(std::string_view manifest) {
  Pipeline p{parseManifest(manifest), {}};
  p.layouts = resolveLayouts(p.manifest);
  return p;
}

Error errorOf(const auto &f) {
  try {
    f();
  } catch (const Error &e) {
    return e;
  }
  ADD_FAILURE() << "no error";
  return Error(ErrorKind::SyntaxError, "none");
}

TEST(ParseTemplate, Segments) {
  Template t = parseTemplate("x = {{ A.apply(i, j) }};");
  ASSERT_EQ(t.segments().size(), 3u);
  ASSERT_EQ(t.placeholders().size(), 1u);
  const auto &ast = std::get<LayoutApply>(t.placeholders()[0]->ast);
  EXPECT_EQ(ast.layout, "A");
  EXPECT_EQ(ast.args.size(), 2u);

  EXPECT_EQ(parseTemplate("no placeholders here\n").segments().size(), 1u);

  Template s = parseTemplate("{{ A[pid_m, :] }}");
  const auto &sl = std::get<LayoutApply>(s.placeholders()[0]->ast);
  EXPECT_TRUE(std::holds_alternative<Expr>(sl.args[0]));
  EXPECT_TRUE(std::holds_alternative<SliceArg>(sl.args[1]));

  EXPECT_TRUE(std::holds_alternative<LayoutInv>(parseTemplate("{{ G.inv(pid) }}").placeholders()[0]->ast));
  EXPECT_TRUE(std::holds_alternative<RawExpr>(parseTemplate("{{ i*4 + j }}").placeholders()[0]->ast));
}

TEST(ParseTemplate, SerializeIsByteIdentical) {
  for (std::string text : {std::string("a {{ A[i, 2:4] }} b\n{{x}}{{  L.inv(p)  }}"),
                           testing::readText(testing::samplePath("matmul/matmul.py.tmpl")),
                           testing::readText(testing::samplePath("nw/nw.c.tmpl"))})
    EXPECT_EQ(parseTemplate(text).serialize(), text);
}

TEST(ParseTemplate, ErrorsAreLocated) {
  Error u = errorOf([] { parseTemplate("line one\n  {{ A.apply(i) "); });
  EXPECT_EQ(u.kind(), ErrorKind::UnterminatedPlaceholder);
  EXPECT_EQ(u.location()->line, 2);
  EXPECT_EQ(u.location()->column, 3);
  EXPECT_EQ(errorOf([] { parseTemplate("{{ A.apply(i,, j) }}"); }).kind(),
            ErrorKind::PlaceholderSyntax);
  EXPECT_EQ(errorOf([] { parseTemplate("{{ a {{ b }} }}"); }).kind(),
            ErrorKind::PlaceholderSyntax);
}

TEST(Manifest, SectionsAndErrors) {
  Manifest m = parseManifest(
      "[layouts]\nL = GroupBy([8])\n[vars]\ni in [0, 8)\n[facts]\nn % 4 == 0\n"
      "[target]\nc\n[policy]\ndefault = expanded\n@2 = unexpanded\nL = auto\n");
  EXPECT_EQ(m.layouts.size(), 1u);
  EXPECT_EQ(m.target.target, Target::C);
  EXPECT_EQ(m.facts.divisorOf("n"), 4);
  std::string name = "L";
  EXPECT_EQ(m.policyFor(2, &name), VariantPolicy::Unexpanded);
  EXPECT_EQ(m.policyFor(1, &name), VariantPolicy::Auto);
  EXPECT_EQ(m.policyFor(1, nullptr), VariantPolicy::Expanded);

  Error e = errorOf([] { parseManifest("[layouts]\nL = GroupBy([8])\n[nope]\n"); });
  EXPECT_EQ(e.kind(), ErrorKind::ManifestSyntax);
  EXPECT_EQ(e.location()->line, 3);
  EXPECT_EQ(errorOf([] { parseManifest("[layouts]\nL = GroupBy([8])\nL = GroupBy([4])\n"); }).kind(),
            ErrorKind::ManifestSyntax);

  // Layout errors keep their kind and point into the manifest.
  Manifest bad = parseManifest("[layouts]\n\nL = GroupBy([4]).OrderBy(Row([5]))\n");
  Error r = errorOf([&] { resolveLayouts(bad); });
  EXPECT_EQ(r.kind(), ErrorKind::ShapeMismatch);
  EXPECT_EQ(r.location()->line, 3);
}

TEST(Instantiate, IdentityLayout) {
  auto p = pipeline("[layouts]\nL = GroupBy([8])\n[vars]\ni in [0, 8)\n");
  EXPECT_EQ(p.run("{{ L.apply(i) }}"), "i");
  EXPECT_EQ(p.run("{{ L[i] }}"), "i");
  EXPECT_EQ(p.run("untouched text\n"), "untouched text\n");
}

TEST(Instantiate, IsDeterministic) {
  auto p = pipeline(testing::readText(testing::samplePath("matmul/matmul.manifest")));
  std::string tmpl = testing::readText(testing::samplePath("matmul/matmul.py.tmpl"));
  EXPECT_EQ(p.run(tmpl), p.run(tmpl));
}

TEST(Instantiate, ErrorsAreLocatedAtPlaceholder) {
  auto p = pipeline("[layouts]\nL = GroupBy([4,4])\n[vars]\ni in [0, 4)\nn in [1, 4)\n");
  Error unknown = errorOf([&] { p.run("ok\n  x = {{ M[i, i] }}"); });
  EXPECT_EQ(unknown.kind(), ErrorKind::UnknownLayout);
  EXPECT_EQ(unknown.location()->line, 2);
  EXPECT_EQ(unknown.location()->column, 7);
  EXPECT_EQ(errorOf([&] { p.run("{{ L[i, q] }}"); }).kind(), ErrorKind::UnknownVariable);
  EXPECT_EQ(errorOf([&] { p.run("{{ L[i] }}"); }).kind(), ErrorKind::ArityMismatch);
  // Slices need the triton target and constant bounds.
  EXPECT_EQ(errorOf([&] { p.run("{{ L[i, :] }}"); }).kind(), ErrorKind::UnsupportedNode);
  auto t = pipeline("[layouts]\nL = GroupBy([4,4])\n[vars]\ni in [0, 4)\nn in [1, 4)\n"
                    "[target]\ntriton\n");
  EXPECT_EQ(errorOf([&] { t.run("{{ L[i, 0:n] }}"); }).kind(),
            ErrorKind::SliceOnNonConstantDim);
  EXPECT_EQ(errorOf([&] { t.run("{{ L[i, 0:5] }}"); }).kind(), ErrorKind::OutOfBounds);
  EXPECT_EQ(t.run("{{ L[i, 1:3] }}"), "i*4 + tl.arange(1, 3)");
}

TEST(Instantiate, PolicyOverridesPerPlaceholder) {
  std::string base = "[layouts]\nL = GroupBy([4,4]).OrderBy(Row([4,4]))\n[vars]\ni in [0, 4)\n";
  auto p = pipeline(base + "[policy]\ndefault = unexpanded\n@2 = expanded\n");
  std::string out = p.run("{{ (i + 1)*4 }} {{ (i + 1)*4 }}");
  EXPECT_EQ(out, "(i + 1)*4 i*4 + 4");
}

TEST(Instantiate, MatmulSampleIsSemanticallyExact) {
  std::string manifestText = testing::readText(testing::samplePath("matmul/matmul.manifest"));
  auto p = pipeline(manifestText);
  Template t = parseTemplate(testing::readText(testing::samplePath("matmul/matmul.py.tmpl")));
  std::string out = instantiate(t, p.manifest, p.layouts);
  auto regions = testing::placeholderRegions(t, out);
  ASSERT_EQ(regions.size(), 4u);
  const Layout &d = p.layouts.at("D");
  const Layout &g = p.layouts.at("G");
  std::mt19937_64 rng(31);
  auto pick = [&](int64_t n) { return std::uniform_int_distribution<int64_t>(0, n - 1)(rng); };
  for (int s = 0; s < 1000; ++s) {
    int64_t pid = pick(16), pm = pick(4), pn = pick(4), k = pick(4), tm = pick(32), tn = pick(32);
    testing::TextEnv env{{{"pid", pid}, {"pid_m", pm}, {"pid_n", pn}, {"k", k}}, {tm, tn}};
    auto coords = testing::evalTuple(regions[0], testing::Dialect::Triton, env);
    EXPECT_EQ(coords, g.inv(pid));
    using V = std::vector<int64_t>;
    EXPECT_EQ(testing::evalText(regions[1], testing::Dialect::Triton, env), d.apply(V{pm, k, tm, tn}));
    EXPECT_EQ(testing::evalText(regions[2], testing::Dialect::Triton, env), d.apply(V{k, pn, tm, tn}));
    EXPECT_EQ(testing::evalText(regions[3], testing::Dialect::Triton, env), d.apply(V{pm, pn, tm, tn}));
  }
}

TEST(Instantiate, WavefrontSampleMatchesAllPoints) {
  auto p = pipeline(testing::readText(testing::samplePath("nw/nw.manifest")));
  Template t = parseTemplate(testing::readText(testing::samplePath("nw/nw.c.tmpl")));
  auto regions = testing::placeholderRegions(t, instantiate(t, p.manifest, p.layouts));
  ASSERT_EQ(regions.size(), 1u);
  EXPECT_NE(regions[0].find('?'), std::string::npos);
  const Layout &w = p.layouts.at("W");
  for (int64_t i = 0; i < 6; ++i)
    for (int64_t j = 0; j < 6; ++j)
      EXPECT_EQ(testing::evalText(regions[0], testing::Dialect::C, {{{"i", i}, {"j", j}}, {}}),
                w.apply(std::vector<int64_t>{i, j}));
}

} // namespace
} // namespace lego
