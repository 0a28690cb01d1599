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

// lego: command-line front end for the layout algebra.
//
// Exit codes: 0 success, 1 usage or layout error, 2 out-of-range input,
// 3 check failure, 4 resolution or instantiation error.

#include <charconv>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "lego/dsl.hpp"
#include "lego/emit.hpp"
#include "lego/layout.hpp"
#include "lego/template.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kOutOfRange = 2, kCheckFailed = 3,
            kResolution = 4 };

/// A failure that maps straight onto an exit code.
struct Failure {
  int code;
  std::string message;
};

std::string readFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Failure{kUsage, "cannot read '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string located(const std::string &file, const lego::Error &e) {
  std::string where = file;
  if (e.location())
    where += ":" + std::to_string(e.location()->line) + ":" +
             std::to_string(e.location()->column);
  return where + ": " + std::string(lego::toString(e.kind())) + ": " +
         e.detail();
}

int64_t parseInt(std::string_view text, const std::string &what) {
  while (!text.empty() && text.front() == ' ')
    text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ')
    text.remove_suffix(1);
  int64_t v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty())
    throw Failure{kUsage, "malformed " + what + " '" + std::string(text) + "'"};
  return v;
}

std::vector<int64_t> parseIndex(const std::string &text) {
  std::vector<int64_t> idx;
  std::size_t begin = 0;
  while (true) {
    std::size_t comma = text.find(',', begin);
    idx.push_back(parseInt(std::string_view(text).substr(
                               begin, comma == std::string::npos
                                          ? std::string::npos
                                          : comma - begin),
                           "index"));
    if (comma == std::string::npos)
      return idx;
    begin = comma + 1;
  }
}

std::string joinIndex(std::span<const int64_t> idx) {
  std::string s;
  for (std::size_t i = 0; i < idx.size(); ++i)
    s += (i ? "," : "") + std::to_string(idx[i]);
  return s;
}

struct LayoutSource {
  std::string inlineText;
  std::string file;
  bool testHooks = false;

  lego::Layout load() const {
    std::string text = file.empty() ? inlineText : readFile(file);
    lego::ParseOptions options;
    if (testHooks)
      options.registry = lego::PermRegistry::withTestHooks();
    try {
      return lego::parseLayout(text, options);
    } catch (const lego::Error &e) {
      throw Failure{kUsage, located(file.empty() ? "<layout>" : file, e)};
    }
  }
};

void addLayoutOptions(CLI::App *cmd, LayoutSource &src) {
  auto *inl = cmd->add_option("--layout", src.inlineText, "Layout DSL text");
  auto *file =
      cmd->add_option("--layout-file", src.file, "File holding the layout DSL");
  inl->excludes(file);
  file->excludes(inl);
}

// Runs f, turning index errors into exit code 2.
template <class F> auto indexing(F &&f) {
  try {
    return f();
  } catch (const lego::Error &e) {
    if (e.kind() == lego::ErrorKind::OutOfBounds ||
        e.kind() == lego::ErrorKind::ArityMismatch)
      throw Failure{kOutOfRange, std::string(e.what())};
    throw;
  }
}

void requireBound(const lego::Layout &layout, int64_t bound) {
  if (layout.logicalSize() > bound)
    throw Failure{kUsage, std::string("ExhaustiveBoundExceeded: ") +
                              std::to_string(layout.logicalSize()) +
                              " points exceed --bound " +
                              std::to_string(bound)};
}

int cmdApply(const LayoutSource &src, const std::string &index) {
  lego::Layout layout = src.load();
  auto idx = parseIndex(index);
  auto f = indexing([&] { return layout.apply(idx); });
  std::cout << (f ? *f : -1) << "\n";
  return kOk;
}

int cmdInv(const LayoutSource &src, const std::string &flat) {
  lego::Layout layout = src.load();
  int64_t f = parseInt(flat, "flat index");
  auto idx = indexing([&] { return layout.inv(f); });
  std::cout << joinIndex(idx) << "\n";
  return kOk;
}

int cmdTable(const LayoutSource &src, int64_t bound) {
  lego::Layout layout = src.load();
  requireBound(layout, bound);
  const lego::Shape &shape = layout.logicalShape();
  std::string out;
  for (int64_t p = 0; p < layout.logicalSize(); ++p) {
    auto idx = lego::canonUnflatten(shape, p);
    auto f = layout.apply(idx);
    out += joinIndex(idx) + " -> " + std::to_string(f ? *f : -1) + "\n";
  }
  std::cout << out;
  return kOk;
}

int cmdCheck(const LayoutSource &src, int64_t bound) {
  lego::Layout layout = src.load();
  requireBound(layout, bound);
  const lego::Shape &shape = layout.logicalShape();
  int64_t n = layout.logicalSize();
  int64_t phys = layout.physicalSize();
  std::vector<int64_t> owner(static_cast<std::size_t>(phys), -1);
  int64_t masked = 0;
  auto failWith = [&](const std::string &why) {
    std::cout << "FAIL: " << layout.toString() << "\n  " << why << "\n";
    return kCheckFailed;
  };
  for (int64_t p = 0; p < n; ++p) {
    auto idx = lego::canonUnflatten(shape, p);
    std::optional<int64_t> f;
    try {
      f = layout.apply(idx);
    } catch (const lego::Error &e) {
      return failWith("apply(" + joinIndex(idx) + ") raised " + e.what());
    }
    if (!f) {
      ++masked;
      continue;
    }
    if (*f < 0 || *f >= phys)
      return failWith("apply(" + joinIndex(idx) + ") = " + std::to_string(*f) +
                      " is outside [0, " + std::to_string(phys) + ")");
    auto &o = owner[static_cast<std::size_t>(*f)];
    if (o >= 0)
      return failWith("apply(" + joinIndex(lego::canonUnflatten(shape, o)) +
                      ") = apply(" + joinIndex(idx) + ") = " +
                      std::to_string(*f));
    o = p;
    auto back = layout.inv(*f);
    if (back != idx)
      return failWith("inv(apply(" + joinIndex(idx) + ")) = inv(" +
                      std::to_string(*f) + ") = " + joinIndex(back));
  }
  int64_t hit = n - masked;
  if (hit != phys)
    return failWith("apply reaches " + std::to_string(hit) + " of " +
                    std::to_string(phys) + " physical positions");
  std::cout << "pass: " << n << " points";
  if (masked)
    std::cout << " (" << masked << " masked)";
  std::cout << ", apply is a bijection onto [0, " << phys
            << ") and inv is its inverse\n";
  return kOk;
}

struct EmitArgs {
  std::string vars;
  std::string target = "python";
  std::string factsFile;
  std::string policy = "auto";
  std::string direction = "apply";
};

int cmdEmit(const LayoutSource &src, const EmitArgs &args) {
  lego::Layout layout = src.load();
  auto profile = lego::TargetProfile::fromName(args.target);
  if (!profile)
    throw Failure{kUsage, "unknown target '" + args.target + "'"};
  auto policy = lego::parseVariantPolicy(args.policy);
  if (!policy)
    throw Failure{kUsage, "unknown policy '" + args.policy + "'"};
  lego::FactSet facts;
  if (!args.factsFile.empty()) {
    try {
      facts = lego::parseFacts(readFile(args.factsFile));
    } catch (const lego::Error &e) {
      throw Failure{kUsage, located(args.factsFile, e)};
    }
  }
  std::vector<lego::Expr> vars;
  std::stringstream ss(args.vars);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    std::string name = item.substr(0, eq);
    if (name.empty())
      throw Failure{kUsage, "empty variable name in --vars"};
    if (eq == std::string::npos) {
      vars.push_back(lego::Expr::var(name));
      continue;
    }
    std::string range = item.substr(eq + 1);
    auto colon = range.find(':');
    if (colon == std::string::npos)
      throw Failure{kUsage, "expected name=lo:hi in --vars, got '" + item + "'"};
    int64_t lo = parseInt(range.substr(0, colon), "range bound");
    int64_t hi = parseInt(range.substr(colon + 1), "range bound");
    if (lo >= hi)
      throw Failure{kUsage, "empty range for '" + name + "'"};
    vars.push_back(lego::Expr::var(name, lego::VarRange(lo, hi)));
  }
  try {
    if (args.direction == "inv") {
      if (vars.size() != 1)
        throw Failure{kUsage, "--direction inv takes exactly one variable"};
      for (const auto &e : layout.invSymbolic(vars[0], facts, *policy))
        std::cout << lego::emitExpr(e, *profile) << "\n";
      return kOk;
    }
    if (args.direction != "apply")
      throw Failure{kUsage, "--direction must be apply or inv"};
    if (vars.size() != layout.rank())
      throw Failure{kUsage, "layout has " + std::to_string(layout.rank()) +
                                " dimensions but --vars names " +
                                std::to_string(vars.size())};
    for (std::size_t k = 0; k < vars.size(); ++k) {
      const auto &r = vars[k].range();
      int64_t extent = layout.logicalShape()[k];
      if (r && (r->lo < 0 || r->hi > extent))
        throw Failure{kOutOfRange, "range of '" + vars[k].name() +
                                       "' leaves [0, " +
                                       std::to_string(extent) + ")"};
    }
    std::cout << lego::emitExpr(layout.applySymbolic(vars, facts, *policy),
                                *profile)
              << "\n";
  } catch (const lego::Error &e) {
    throw Failure{e.kind() == lego::ErrorKind::UnsupportedNode ? kResolution
                                                               : kUsage,
                  e.what()};
  }
  return kOk;
}

int cmdInstantiate(const std::string &templatePath,
                   const std::string &manifestPath, const std::string &out,
                   bool testHooks) {
  std::string manifestText = readFile(manifestPath);
  std::string templateText = readFile(templatePath);
  lego::Manifest manifest;
  lego::LayoutTable layouts;
  try {
    manifest = lego::parseManifest(manifestText);
    lego::ParseOptions options;
    if (testHooks)
      options.registry = lego::PermRegistry::withTestHooks();
    layouts = lego::resolveLayouts(manifest, options);
  } catch (const lego::Error &e) {
    throw Failure{kResolution, located(manifestPath, e)};
  }
  std::string text;
  try {
    text = lego::instantiate(lego::parseTemplate(templateText), manifest,
                             layouts);
  } catch (const lego::Error &e) {
    throw Failure{kResolution, located(templatePath, e)};
  }
  if (out.empty()) {
    std::cout << text;
    return kOk;
  }
  std::ofstream file(out, std::ios::binary);
  if (!file || !(file << text))
    throw Failure{kResolution, "cannot write '" + out + "'"};
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"lego: evaluate, check and generate code for data layouts"};
  app.require_subcommand(1);
  app.fallthrough();
  bool testHooks = false;
  app.add_flag("--test-hooks", testHooks)->group(""); // hidden
  int64_t bound = 1'000'000;

  LayoutSource src;
  std::string index, flat;
  auto *apply = app.add_subcommand("apply", "Map a logical index to its position");
  addLayoutOptions(apply, src);
  apply->add_option("index", index, "Comma-separated logical index, e.g. 4,1")
      ->required();

  auto *inv = app.add_subcommand("inv", "Map a position back to its logical index");
  addLayoutOptions(inv, src);
  inv->add_option("flat", flat, "Flat physical position")->required();

  auto *check = app.add_subcommand("check", "Exhaustively verify bijectivity");
  addLayoutOptions(check, src);
  check->add_option("--bound", bound, "Largest logical space to sweep")
      ->capture_default_str();

  auto *table = app.add_subcommand("table", "Print the full mapping");
  addLayoutOptions(table, src);
  table->add_option("--bound", bound, "Largest logical space to print")
      ->capture_default_str();

  EmitArgs emitArgs;
  auto *emit = app.add_subcommand("emit", "Print the simplified index expression");
  addLayoutOptions(emit, src);
  emit->add_option("--vars", emitArgs.vars,
                   "Index variables: i,j or i=0:8,j=0:4")
      ->required();
  emit->add_option("--target", emitArgs.target, "c, python or triton")
      ->capture_default_str();
  emit->add_option("--facts", emitArgs.factsFile, "File of variable facts");
  emit->add_option("--policy", emitArgs.policy, "auto, expanded or unexpanded")
      ->capture_default_str();
  emit->add_option("--direction", emitArgs.direction, "apply or inv")
      ->capture_default_str();

  std::string templatePath, manifestPath, outPath;
  auto *inst = app.add_subcommand("instantiate", "Fill a code template");
  inst->add_option("template", templatePath, "Template file")->required();
  inst->add_option("manifest", manifestPath, "Manifest file")->required();
  inst->add_option("--out", outPath, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }
  src.testHooks = testHooks;

  try {
    auto needLayout = [&] {
      if (src.inlineText.empty() && src.file.empty())
        throw Failure{kUsage, "one of --layout or --layout-file is required"};
    };
    if (*apply)
      return needLayout(), cmdApply(src, index);
    if (*inv)
      return needLayout(), cmdInv(src, flat);
    if (*check)
      return needLayout(), cmdCheck(src, bound);
    if (*table)
      return needLayout(), cmdTable(src, bound);
    if (*emit)
      return needLayout(), cmdEmit(src, emitArgs);
    if (*inst)
      return cmdInstantiate(templatePath, manifestPath, outPath, testHooks);
  } catch (const Failure &f) {
    std::cerr << "lego: error: " << f.message << "\n";
    return f.code;
  } catch (const lego::Error &e) {
    std::cerr << "lego: error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
