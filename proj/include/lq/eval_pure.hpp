#pragma once

// Evaluation over annotated states: an ambient context, a typed environment
// whose linear bindings disappear once forced, a focus term with its demand,
// and a typed stack. Arrays are immutable values copied by write.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lq/outcome.hpp"
#include "lq/syntax.hpp"
#include "lq/typecheck.hpp"

namespace lq {

struct AnnState {
  struct Binding {
    bool linear = false;  // demand 1 if true, w otherwise
    Type type;
    Term term;
  };
  struct Frame {
    Term term;
    bool linear = false;
    /// Computed on demand when absent.
    std::optional<Type> type;
  };

  /// Ambient context; every entry has multiplicity w.
  std::map<std::string, Type> xi;
  std::map<std::string, Binding> env;
  Term focus;
  bool focus_linear = true;
  std::optional<Type> focus_type;
  /// back() is the top of the stack.
  std::vector<Frame> stack;

  explicit AnnState(Term t) : focus(std::move(t)) {}
  std::size_t linear_bindings() const;
};

/// Declarations plus the internal pair and unit types used to encode stacks.
DeclTable with_state_decls(const DeclTable& decls);

/// The closed term whose typing decides whether `s` is well typed: the
/// environment as nested lets around the focus paired with every stack
/// entry at its demand.
Term encode_state(const AnnState& s, const DeclTable& state_decls);

bool state_welltyped(const AnnState& s, const DeclTable& decls);

struct PureStats {
  std::uint64_t array_allocations = 0;
  std::uint64_t newmarray_rules = 0;
  std::uint64_t write_rules = 0;
};

struct PureOptions : EvalOptions {
  /// Check state well-typedness at the conclusion of every rule.
  bool instrumented = false;
};

struct PureRun {
  Outcome outcome;
  std::vector<TraceRecord> trace;
  PureStats stats;
  /// Linear bindings left in the environment at the end.
  std::size_t final_linear_bindings = 0;
  std::size_t final_env_size = 0;

  bool precondition_ok = true;
  std::uint64_t checks = 0;
  std::uint64_t violations = 0;
  /// Rule and state summary of the first failed check.
  std::string violation;
};

/// Evaluates `s` (focus in sharing form). `decls` must declare every
/// constructor used by the program.
PureRun run_pure(AnnState s, const DeclTable& decls, const PureOptions& opts);
/// Whole-program run from the empty state at demand 1.
PureRun run_pure(const Term& t, const DeclTable& decls, const PureOptions& opts);

Outcome eval_pure(AnnState s, const DeclTable& decls, std::uint64_t fuel);
/// Checks the precondition, then evaluates checking every rule conclusion;
/// stops at the first violation.
PureRun instrumented_eval(AnnState s, const DeclTable& decls, std::uint64_t fuel);

}  // namespace lq
