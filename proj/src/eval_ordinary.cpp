#include "lq/eval_ordinary.hpp"

#include "lq/printer.hpp"

namespace lq {

namespace {

struct Stop {
  Outcome outcome;
};

std::string base_name(const std::string& x) {
  auto pos = x.find('#');
  return pos == std::string::npos ? x : x.substr(0, pos);
}

class Machine {
 public:
  Machine(Heap heap, const EvalOptions& opts) : heap_(std::move(heap)), opts_(opts), fuel_(opts.fuel) {}

  Heap heap_;
  std::vector<TraceRecord> trace_;
  OrdinaryStats stats_;

  std::uint64_t steps() const { return opts_.fuel - fuel_; }

  Term eval(const Term& t) {
    switch (t.kind()) {
      case Term::Kind::Lam: {
        Rule r(*this, "abs", t);
        return t;
      }
      case Term::Kind::MultLam: {
        Rule r(*this, "m.abs", t);
        return t;
      }
      case Term::Kind::Con: {
        Rule r(*this, "constructor", t);
        return t;
      }
      case Term::Kind::IntLit: {
        Rule r(*this, "literal", t);
        return t;
      }
      case Term::Kind::Loc: {
        Rule r(*this, "mutable cell", t);
        return t;
      }
      case Term::Kind::Var:
        return eval_var(t);
      case Term::Kind::App: {
        Rule r(*this, "application", t);
        if (t.arg().kind() != Term::Kind::Var)
          block(BlockReason::PrimitiveMisuse, "application", "", "argument is not a variable");
        Term f = eval(t.fun());
        if (f.kind() != Term::Kind::Lam)
          block(BlockReason::PrimitiveMisuse, "application", "", "applying a non-function");
        return eval(rename_vars(f.body(), {{f.name(), t.arg().name()}}));
      }
      case Term::Kind::MultApp: {
        Rule r(*this, "m.app", t);
        Term f = eval(t.fun());
        if (f.kind() != Term::Kind::MultLam)
          block(BlockReason::PrimitiveMisuse, "m.app", "", "multiplicity application to a non-abstraction");
        return eval(subst_mult(f.body(), f.name(), t.mult()));
      }
      case Term::Kind::Let: {
        Rule r(*this, "let", t);
        std::map<std::string, std::string> ren;
        for (const auto& b : t.bindings()) ren[b.name] = fresh(b.name);
        for (const auto& b : t.bindings()) {
          Term rhs = t.recursive() ? rename_vars(b.rhs, ren) : b.rhs;
          heap_.vars.insert_or_assign(ren[b.name], Heap::Suspension{b.type, rhs, false});
        }
        return eval(rename_vars(t.body(), ren));
      }
      case Term::Kind::Case: {
        Rule r(*this, "case", t);
        Term v = eval(t.scrut());
        if (v.kind() != Term::Kind::Con)
          block(BlockReason::PrimitiveMisuse, "case", "", "case on a non-constructor");
        for (const auto& br : t.branches()) {
          if (br.con != v.name()) continue;
          if (br.binders.size() != v.args().size())
            block(BlockReason::PrimitiveMisuse, "case", "", "pattern arity differs from constructor");
          std::map<std::string, std::string> ren;
          for (std::size_t i = 0; i < br.binders.size(); ++i) {
            if (v.args()[i].kind() != Term::Kind::Var)
              block(BlockReason::PrimitiveMisuse, "case", "", "constructor field is not a variable");
            ren[br.binders[i]] = v.args()[i].name();
          }
          return eval(rename_vars(br.body, ren));
        }
        block(BlockReason::MissingBranch, "case", "", "no branch for '" + v.name() + "'");
      }
      case Term::Kind::Prim:
        return eval_prim(t);
      case Term::Kind::ArrayLit:
        block(BlockReason::PrimitiveMisuse, "array", "", "array values do not occur in this semantics");
    }
    block(BlockReason::PrimitiveMisuse, "?", "", "unknown term");
  }

  GroundValue force(const Term& v) {
    switch (v.kind()) {
      case Term::Kind::IntLit:
        return GroundValue::integer(v.int_value());
      case Term::Kind::Con: {
        GroundValue g{GroundValue::Kind::Con, 0, v.name(), {}};
        for (const auto& a : v.args()) g.fields.push_back(force(eval(a)));
        return g;
      }
      case Term::Kind::Loc:
        return GroundValue::opaque("<array>");
      default:
        return GroundValue::opaque("<function>");
    }
  }

  [[noreturn]] void block(BlockReason reason, const std::string& rule, const std::string& loc,
                          const std::string& msg) {
    Outcome o;
    o.kind = Outcome::Kind::Blocked;
    o.reason = reason;
    o.rule = rule;
    o.location = loc;
    o.message = msg;
    throw Stop{o};
  }

 private:
  const EvalOptions& opts_;
  std::uint64_t fuel_;
  std::uint64_t next_name_ = 0;

  // Charges one unit of fuel and records the rule in pre-order.
  struct Rule {
    Machine& m;
    std::size_t index = SIZE_MAX;
    std::size_t heap_before;
    Rule(Machine& mm, const char* name, const Term& redex) : m(mm), heap_before(mm.heap_.size()) {
      if (m.fuel_ == 0) {
        Outcome o;
        o.kind = Outcome::Kind::OutOfFuel;
        o.rule = name;
        o.message = print_term_short(redex);
        throw Stop{o};
      }
      --m.fuel_;
      if (m.opts_.trace) {
        index = m.trace_.size();
        m.trace_.push_back(TraceRecord{name, print_term_short(redex), 0});
      }
    }
    ~Rule() {
      if (index != SIZE_MAX)
        m.trace_[index].heap_delta = static_cast<long>(m.heap_.size()) - static_cast<long>(heap_before);
    }
  };

  std::string fresh(const std::string& x) { return base_name(x) + "#" + std::to_string(++next_name_); }

  Term eval_var(const Term& t) {
    Rule r(*this, "variable", t);
    const std::string& x = t.name();
    auto it = heap_.vars.find(x);
    if (it == heap_.vars.end()) block(BlockReason::MissingLinearBinding, "variable", x, "unbound variable");
    if (it->second.under_evaluation) {
      Outcome o;
      o.kind = Outcome::Kind::Blackhole;
      o.rule = "variable";
      o.location = x;
      throw Stop{o};
    }
    it->second.under_evaluation = true;
    Term body = it->second.term;
    Term z = eval(body);
    auto& s = heap_.vars.at(x);
    s.term = z;
    s.under_evaluation = false;
    return z;
  }

  std::int64_t eval_int(const Term& t, const char* rule) {
    Term v = eval(t);
    if (v.kind() != Term::Kind::IntLit) block(BlockReason::PrimitiveMisuse, rule, "", "expected an integer");
    return v.int_value();
  }

  std::pair<std::string, Heap::Cell*> eval_cell(const Term& t, const char* rule) {
    Term v = eval(t);
    if (v.kind() != Term::Kind::Loc) block(BlockReason::PrimitiveMisuse, rule, "", "expected an array");
    auto it = heap_.cells.find(v.name());
    if (it == heap_.cells.end()) block(BlockReason::MissingLinearBinding, rule, v.name(), "array cell is missing");
    return {v.name(), &it->second};
  }

  const std::string& var_arg(const Term& t, const char* rule) {
    if (t.kind() != Term::Kind::Var) block(BlockReason::PrimitiveMisuse, rule, "", "argument is not a variable");
    return t.name();
  }

  static std::size_t check_index(Machine& m, std::int64_t i, const Heap::Cell& c, const char* rule,
                                 const std::string& l) {
    if (i < 0 || static_cast<std::size_t>(i) >= c.elems.size())
      m.block(BlockReason::PrimitiveMisuse, rule, l,
              "index " + std::to_string(i) + " out of bounds for size " + std::to_string(c.elems.size()));
    return static_cast<std::size_t>(i);
  }

  Term eval_prim(const Term& t) {
    const auto& args = t.args();
    switch (t.prim_op()) {
      case PrimOp::NewMArray: {
        Rule r(*this, "newMArray", t);
        ++stats_.newmarray_rules;
        if (args.size() != 3) block(BlockReason::PrimitiveMisuse, "newMArray", "", "wrong number of arguments");
        std::int64_t n = eval_int(args[0], "newMArray");
        if (n < 0) block(BlockReason::PrimitiveMisuse, "newMArray", "", "negative array size");
        const std::string& a = var_arg(args[1], "newMArray");
        std::string l = "@" + std::to_string(++next_name_);
        Type elem = Type::hole();
        if (auto it = heap_.vars.find(a); it != heap_.vars.end()) elem = it->second.type;
        heap_.cells.emplace(l, Heap::Cell{false, elem, std::vector<std::string>(static_cast<std::size_t>(n), a)});
        ++stats_.cell_allocations;
        Term k = Term::let({LetBinding{"%arr", MultExpr::one(), Type::marray(elem), Term::loc(l)}}, false,
                           Term::app(args[2], Term::var("%arr")));
        Term v = eval(k);
        if (v.kind() != Term::Kind::Con || v.name() != "Unrestricted")
          block(BlockReason::PrimitiveMisuse, "newMArray", l, "continuation did not return Unrestricted");
        return v;
      }
      case PrimOp::Write: {
        Rule r(*this, "write", t);
        ++stats_.write_rules;
        if (args.size() != 3) block(BlockReason::PrimitiveMisuse, "write", "", "wrong number of arguments");
        std::int64_t i = eval_int(args[1], "write");
        auto [l, cell] = eval_cell(args[0], "write");
        if (cell->frozen) block(BlockReason::TypestateViolation, "write", l, "cell is tagged Array, not MArray");
        std::size_t k = check_index(*this, i, *cell, "write", l);
        cell->elems[k] = var_arg(args[2], "write");
        return Term::loc(l);
      }
      case PrimOp::Freeze: {
        Rule r(*this, "freeze", t);
        ++stats_.freeze_rules;
        if (args.size() != 1) block(BlockReason::PrimitiveMisuse, "freeze", "", "wrong number of arguments");
        auto [l, cell] = eval_cell(args[0], "freeze");
        if (cell->frozen) block(BlockReason::TypestateViolation, "freeze", l, "cell is tagged Array, not MArray");
        cell->frozen = true;
        Type at = Type::array(cell->elem);
        std::string x = fresh("%frozen");
        heap_.vars.emplace(x, Heap::Suspension{at, Term::loc(l), false});
        return Term::con("Unrestricted", {at}, {}, {Term::var(x)});
      }
      case PrimOp::Index: {
        Rule r(*this, "index", t);
        ++stats_.index_rules;
        if (args.size() != 2) block(BlockReason::PrimitiveMisuse, "index", "", "wrong number of arguments");
        std::int64_t i = eval_int(args[1], "index");
        auto [l, cell] = eval_cell(args[0], "index");
        if (!cell->frozen) block(BlockReason::TypestateViolation, "index", l, "cell is tagged MArray, not Array");
        std::size_t k = check_index(*this, i, *cell, "index", l);
        std::string a = cell->elems[k];
        return eval(Term::var(a));
      }
      default: {
        Rule r(*this, "primitive", t);
        if (args.size() != 2) block(BlockReason::PrimitiveMisuse, "primitive", "", "wrong number of arguments");
        auto a = static_cast<std::uint64_t>(eval_int(args[0], "primitive"));
        auto b = static_cast<std::uint64_t>(eval_int(args[1], "primitive"));
        switch (t.prim_op()) {
          case PrimOp::Add: return Term::int_lit(static_cast<std::int64_t>(a + b));
          case PrimOp::Sub: return Term::int_lit(static_cast<std::int64_t>(a - b));
          case PrimOp::Mul: return Term::int_lit(static_cast<std::int64_t>(a * b));
          case PrimOp::Eq: return Term::con(a == b ? "True" : "False", {}, {}, {});
          default:
            return Term::con(static_cast<std::int64_t>(a) < static_cast<std::int64_t>(b) ? "True" : "False", {}, {},
                             {});
        }
      }
    }
  }
};

}  // namespace

OrdinaryRun run_ordinary(const Term& t, const EvalOptions& opts, Heap heap) {
  OrdinaryRun run;
  run_with_large_stack([&] {
    Machine m(std::move(heap), opts);
    try {
      Term v = m.eval(t);
      run.outcome.kind = Outcome::Kind::Value;
      run.outcome.value = v;
      if (opts.force_ground) run.outcome.ground = m.force(v);
    } catch (const Stop& s) {
      run.outcome = s.outcome;
    }
    run.outcome.steps = m.steps();
    run.heap = std::move(m.heap_);
    run.trace = std::move(m.trace_);
    run.stats = m.stats_;
  });
  return run;
}

Outcome eval(Heap& heap, const Term& t, std::uint64_t fuel) {
  EvalOptions opts;
  opts.fuel = fuel;
  auto run = run_ordinary(t, opts, std::move(heap));
  heap = std::move(run.heap);
  return run.outcome;
}

std::pair<Outcome, std::vector<TraceRecord>> trace_eval(Heap& heap, const Term& t, std::uint64_t fuel) {
  EvalOptions opts;
  opts.fuel = fuel;
  opts.trace = true;
  auto run = run_ordinary(t, opts, std::move(heap));
  heap = std::move(run.heap);
  return {run.outcome, std::move(run.trace)};
}

}  // namespace lq
