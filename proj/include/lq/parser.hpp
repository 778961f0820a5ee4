#pragma once

// Parser for the `.lq` surface syntax.
//
// Constructor applications and datatype applications are parsed using the
// arity of their declaration, so the parser needs every datatype in scope:
// pass the prelude declarations as `known`.

#include <string>
#include <vector>

#include "lq/diagnostic.hpp"
#include "lq/result.hpp"
#include "lq/syntax.hpp"

namespace lq {

Result<SourceFile, Diagnostic> parse_source(const std::string& text, const std::vector<DataDecl>& known = {});
Result<Term, Diagnostic> parse_term(const std::string& text, const std::vector<DataDecl>& known = {});
Result<Type, Diagnostic> parse_type(const std::string& text, const std::vector<DataDecl>& known = {});
Result<MultExpr, Diagnostic> parse_mult(const std::string& text);

/// Text of the prelude: the file named by LLQ_PRELUDE if set, else the
/// built-in copy.
std::string prelude_text();
std::string builtin_prelude_text();
/// Parsed prelude declarations.
Result<std::vector<DataDecl>, Diagnostic> load_prelude();

}  // namespace lq
