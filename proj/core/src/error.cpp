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

#include "lego/error.hpp"

namespace lego {

std::string_view toString(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::UnboundVariable: return "UnboundVariable";
  case ErrorKind::DivisionByZero: return "DivisionByZero";
  case ErrorKind::InvalidRange: return "InvalidRange";
  case ErrorKind::InvalidShape: return "InvalidShape";
  case ErrorKind::InvalidSigma: return "InvalidSigma";
  case ErrorKind::ArityMismatch: return "ArityMismatch";
  case ErrorKind::OutOfBounds: return "OutOfBounds";
  case ErrorKind::ShapeMismatch: return "ShapeMismatch";
  case ErrorKind::BijectivityViolation: return "BijectivityViolation";
  case ErrorKind::InjectiveOnly: return "InjectiveOnly";
  case ErrorKind::UnknownBuiltinPerm: return "UnknownBuiltinPerm";
  case ErrorKind::SyntaxError: return "SyntaxError";
  case ErrorKind::UnsupportedNode: return "UnsupportedNode";
  case ErrorKind::UnterminatedPlaceholder: return "UnterminatedPlaceholder";
  case ErrorKind::PlaceholderSyntax: return "PlaceholderSyntax";
  case ErrorKind::UnknownLayout: return "UnknownLayout";
  case ErrorKind::UnknownVariable: return "UnknownVariable";
  case ErrorKind::SliceOnNonConstantDim: return "SliceOnNonConstantDim";
  case ErrorKind::ExhaustiveBoundExceeded: return "ExhaustiveBoundExceeded";
  case ErrorKind::ManifestSyntax: return "ManifestSyntax";
  }
  return "Unknown";
}

namespace {
std::string render(ErrorKind kind, const std::string &message,
                   const std::optional<SourceLoc> &loc) {
  std::string out(toString(kind));
  if (loc)
    out += " at " + std::to_string(loc->line) + ":" +
           std::to_string(loc->column);
  out += ": ";
  out += message;
  return out;
}
} // namespace

Error::Error(ErrorKind kind, const std::string &message,
             std::optional<SourceLoc> loc)
    : std::runtime_error(render(kind, message, loc)), kind_(kind),
      detail_(message), loc_(loc) {}

SourceLoc locate(std::string_view text, std::size_t offset) {
  SourceLoc loc;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++loc.line;
      loc.column = 1;
    } else {
      ++loc.column;
    }
  }
  return loc;
}

} // namespace lego
