#pragma once

// Results shared by both evaluators.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lq/syntax.hpp"

namespace lq {

enum class BlockReason { MissingLinearBinding, TypestateViolation, MissingBranch, PrimitiveMisuse };

std::string reason_name(BlockReason r);

/// One rule application, recorded when the rule starts (pre-order).
struct TraceRecord {
  std::string rule;
  std::string redex;
  /// Change in the number of environment bindings across the rule.
  long heap_delta = 0;
};

/// A fully forced result. Functions and arrays are opaque.
struct GroundValue {
  enum class Kind { Int, Con, Opaque };
  Kind kind = Kind::Int;
  std::int64_t value = 0;
  std::string name;  // constructor name, or "<function>" / "<array>"
  std::vector<GroundValue> fields;

  static GroundValue integer(std::int64_t v) { return GroundValue{Kind::Int, v, {}, {}}; }
  static GroundValue opaque(std::string what) { return GroundValue{Kind::Opaque, 0, std::move(what), {}}; }

  bool is_ground() const;
  bool operator==(const GroundValue& o) const;
  bool operator!=(const GroundValue& o) const { return !(*this == o); }
};

/// `7`, `True`, `MkPair 1 (Cons 2 Nil)`, `<function>`.
std::string to_string(const GroundValue& v);

struct Outcome {
  enum class Kind { Value, Blocked, OutOfFuel, Blackhole };
  Kind kind = Kind::Value;
  /// Weak-head value (Kind::Value only).
  std::optional<Term> value;
  /// Forced result, when forcing was requested and completed.
  std::optional<GroundValue> ground;
  BlockReason reason = BlockReason::PrimitiveMisuse;
  /// Rule that blocked, or the head of the partial derivation.
  std::string rule;
  /// Heap name involved in a block or blackhole, if any.
  std::string location;
  std::string message;
  std::uint64_t steps = 0;

  bool is_value() const { return kind == Kind::Value; }
};

/// "value", "blocked", "fuel" or "blackhole".
std::string outcome_kind_name(Outcome::Kind k);
/// One-line human readable summary.
std::string describe(const Outcome& o);

struct EvalOptions {
  std::uint64_t fuel = 100000;
  bool trace = false;
  /// Force constructor fields of the result recursively.
  bool force_ground = false;
};

/// Runs `fn` on a thread with a large stack; the evaluators recurse once per
/// rule application.
void run_with_large_stack(const std::function<void()>& fn);

}  // namespace lq
