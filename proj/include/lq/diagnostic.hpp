#pragma once

#include <string>
#include <vector>

#include "lq/syntax.hpp"

namespace lq {

struct Diagnostic {
  enum class Kind {
    UnboundVariable,
    LinearityMismatch,
    UnjoinableUsage,
    ArityMismatch,
    TypeMismatch,
    FreshnessViolation,
    MalformedDecl,
    SyntaxError,
  };
  Kind kind;
  SrcLoc loc;
  std::string message;
};

using Diagnostics = std::vector<Diagnostic>;

std::string kind_name(Diagnostic::Kind k);
/// `line:col: Kind: message`
std::string to_string(const Diagnostic& d);

}  // namespace lq
