#pragma once

// Lazy evaluation with a mutable heap: suspensions are updated in place after
// forcing, and arrays are cells mutated by write.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lq/outcome.hpp"
#include "lq/syntax.hpp"

namespace lq {

struct Heap {
  struct Suspension {
    Type type;
    Term term;
    bool under_evaluation = false;
  };
  struct Cell {
    bool frozen = false;  // false: tagged MArray, true: tagged Array
    Type elem;
    std::vector<std::string> elems;
  };

  std::map<std::string, Suspension> vars;
  std::map<std::string, Cell> cells;

  std::size_t size() const { return vars.size() + cells.size(); }
};

struct OrdinaryStats {
  std::uint64_t cell_allocations = 0;
  std::uint64_t newmarray_rules = 0;
  std::uint64_t write_rules = 0;
  std::uint64_t freeze_rules = 0;
  std::uint64_t index_rules = 0;
};

struct OrdinaryRun {
  Outcome outcome;
  Heap heap;
  std::vector<TraceRecord> trace;
  OrdinaryStats stats;
};

/// `t` must be in sharing form.
OrdinaryRun run_ordinary(const Term& t, const EvalOptions& opts, Heap heap = {});

Outcome eval(Heap& heap, const Term& t, std::uint64_t fuel);
std::pair<Outcome, std::vector<TraceRecord>> trace_eval(Heap& heap, const Term& t, std::uint64_t fuel);

}  // namespace lq
