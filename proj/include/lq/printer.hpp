#pragma once

// Pretty-printer producing the `.lq` surface syntax accepted by the parser.

#include <string>

#include "lq/syntax.hpp"

namespace lq {

std::string print_type(const Type& t);
std::string print_term(const Term& t);
/// Single-line rendering cut to at most `max_len` characters.
std::string print_term_short(const Term& t, std::size_t max_len = 60);
std::string print_decl(const DataDecl& d);
std::string print_source(const SourceFile& f);

}  // namespace lq
