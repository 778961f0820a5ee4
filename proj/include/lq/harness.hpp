#pragma once

// Program loading, random generation of well-typed programs, and the
// differential runs that compare the two evaluators.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lq/eval_ordinary.hpp"
#include "lq/eval_pure.hpp"
#include "lq/outcome.hpp"
#include "lq/result.hpp"
#include "lq/syntax.hpp"
#include "lq/typecheck.hpp"

namespace lq {

/// A source file ready to run: declarations in scope and `main` (with the
/// definitions elaborated around it) in sharing form.
struct LoadedProgram {
  SourceFile source;
  DeclTable decls;
  Term sharing;
  /// Absent when typechecking was skipped.
  std::optional<Type> type;
};

/// Parses `text` (after the prelude unless `with_prelude` is false),
/// typechecks it unless `typecheck` is false, and translates it.
Result<LoadedProgram, Diagnostics> load_program(const std::string& text, bool with_prelude = true,
                                                bool typecheck = true);
Result<LoadedProgram, Diagnostics> load_checked(SourceFile source, const std::vector<DataDecl>& prelude);

struct GenConfig {
  std::uint64_t seed = 1;
  /// Height of the generated derivation; 1 yields a single axiom.
  int max_depth = 6;
  int max_datatypes = 2;
  /// Relative weights of multiplicity choices. The variable weight is the
  /// chance of introducing a multiplicity-polymorphic helper.
  double weight_one = 2.0;
  double weight_omega = 1.0;
  double weight_var = 0.5;
  /// Chance that an Int-typed position becomes an array computation.
  double array_prob = 0.25;
  /// Result type; a random ground type when absent.
  std::optional<Type> target;
  int max_attempts = 50;

  /// Empty when valid, else a description of the problem.
  std::string validate() const;
};

struct GeneratedProgram {
  SourceFile source;
  Type type;
  int attempts = 1;
};

struct GenerationExhausted {
  int attempts = 0;
  std::string last_error;
};

/// Deterministic in `cfg`. The prelude declarations are assumed in scope;
/// `source.decls` holds only the extra generated datatypes.
Result<GeneratedProgram, GenerationExhausted> gen_welltyped(const GenConfig& cfg);

/// Seed of the `index`-th program of a fuzz run started from `seed`.
std::uint64_t program_seed(std::uint64_t seed, std::uint64_t index);

struct DiffReport {
  std::string id;
  Outcome ordinary;
  Outcome pure;
  bool agree = false;
  std::uint64_t fuel = 0;
  std::uint64_t ordinary_steps = 0;
  std::uint64_t pure_steps = 0;
  OrdinaryStats ordinary_stats;
  PureStats pure_stats;
  std::size_t pure_final_linear_bindings = 0;
};

/// Runs both evaluators with ground forcing. If exactly one side runs out
/// of fuel, both are rerun once with twice the fuel.
DiffReport bisim_run(const LoadedProgram& program, std::uint64_t fuel, const std::string& id = "");

struct FuzzSummary {
  std::uint64_t programs = 0;
  std::uint64_t generation_failures = 0;
  std::uint64_t progress_violations = 0;
  std::uint64_t preservation_violations = 0;
  std::uint64_t disagreements = 0;
  std::uint64_t blackholes = 0;
  std::uint64_t fuel_outs = 0;
  std::uint64_t state_checks = 0;
  std::vector<std::string> reproducers;

  bool clean() const { return progress_violations == 0 && preservation_violations == 0 && disagreements == 0; }
  FuzzSummary& merge(const FuzzSummary& o);
};

struct FuzzOptions {
  std::uint64_t count = 100;
  std::uint64_t fuel = 100000;
  /// Run instrumented evaluation on every program.
  bool check_preservation = true;
  /// Directory for reproducer files; none are written when empty.
  std::string repro_dir;
};

Result<FuzzSummary, std::string> fuzz(const GenConfig& cfg, const FuzzOptions& opts);

/// Fixed-field text table.
std::string format_summary(const FuzzSummary& s);

}  // namespace lq
