#pragma once

// Translation to explicit-sharing form: every application argument and
// every constructor or primitive argument becomes a variable.

#include "lq/syntax.hpp"
#include "lq/typecheck.hpp"

namespace lq {

/// `typed` must carry the annotations produced by infer(). Applications in
/// the result keep their arrow multiplicity annotation.
Term to_sharing(const Term& typed, const DeclTable& decls);

/// Translation for terms that were never typechecked: introduced bindings
/// get an unknown type and application lets use multiplicity w.
Term to_sharing_untyped(const Term& t, const DeclTable& decls);

/// True if every App/Con/Prim argument is a variable.
bool is_sharing_form(const Term& t);

/// Names introduced by the translation start with this character, which the
/// surface syntax cannot produce.
inline constexpr char kFreshPrefix = '%';

}  // namespace lq
