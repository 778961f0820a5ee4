#include "lq/eval_pure.hpp"

#include <algorithm>
#include <functional>

#include "lq/printer.hpp"

namespace lq {

std::size_t AnnState::linear_bindings() const {
  std::size_t n = 0;
  for (const auto& [x, b] : env) n += b.linear ? 1 : 0;
  return n;
}

namespace {

const char* const kPair = "%WPair";
const char* const kUnit = "%Unit";

MultExpr demand(bool linear) { return linear ? MultExpr::one() : MultExpr::omega(); }

Type unit_type() { return Type::data(kUnit, {}, {}); }

// Environment bindings grouped into strongly connected components of the
// "right-hand side mentions" relation, dependencies first.
std::vector<std::vector<std::string>> binding_groups(const std::map<std::string, AnnState::Binding>& env,
                                                     std::set<std::string>& self_loops) {
  std::vector<std::string> names;
  std::map<std::string, std::size_t> index_of;
  for (const auto& [x, b] : env) {
    index_of[x] = names.size();
    names.push_back(x);
  }
  std::vector<std::vector<std::size_t>> edges(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (const auto& y : free_vars(env.at(names[i]).term)) {
      auto it = index_of.find(y);
      if (it == index_of.end()) continue;
      edges[i].push_back(it->second);
      if (it->second == i) self_loops.insert(names[i]);
    }
  }
  std::vector<int> index(names.size(), -1), low(names.size(), 0);
  std::vector<bool> on_stack(names.size(), false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::string>> out;
  int counter = 0;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w : edges[v]) {
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::string> group;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        group.push_back(names[w]);
      } while (w != v);
      out.push_back(std::move(group));
    }
  };
  for (std::size_t v = 0; v < names.size(); ++v)
    if (index[v] < 0) visit(v);
  return out;
}

std::map<std::string, Type> ambient_types(const AnnState& s) {
  auto amb = s.xi;
  for (const auto& [x, b] : s.env) amb.insert_or_assign(x, b.type);
  return amb;
}

std::optional<Type> type_under(const Term& t, const DeclTable& decls, const std::map<std::string, Type>& amb) {
  TypeEnv env(decls);
  env.set_ambient(&amb);
  auto r = check_judgement(env, t);
  if (!r) return std::nullopt;
  return *r;
}

std::optional<Term> encode(const AnnState& s, const DeclTable& decls) {
  auto amb = ambient_types(s);
  auto type_of = [&](const Term& t, const std::optional<Type>& known) -> std::optional<Type> {
    if (known) return known;
    return type_under(t, decls, amb);
  };
  Term rest = Term::con(kUnit, {}, {}, {});
  Type rest_type = unit_type();
  auto pair = [&](const Term& t, const Type& ty, bool linear) {
    rest = Term::con(kPair, {ty, rest_type}, {demand(linear)}, {t, rest});
    rest_type = Type::data(kPair, {demand(linear)}, {ty, rest_type});
  };
  for (const auto& f : s.stack) {
    auto ty = type_of(f.term, f.type);
    if (!ty) return std::nullopt;
    pair(f.term, *ty, f.linear);
  }
  auto fty = type_of(s.focus, s.focus_type);
  if (!fty) return std::nullopt;
  pair(s.focus, *fty, s.focus_linear);

  std::set<std::string> self_loops;
  auto groups = binding_groups(s.env, self_loops);
  Term body = rest;
  for (auto it = groups.rbegin(); it != groups.rend(); ++it) {
    bool recursive = it->size() > 1 || self_loops.count(it->front());
    std::vector<LetBinding> bs;
    for (const auto& x : *it) {
      const auto& b = s.env.at(x);
      bs.push_back(LetBinding{x, demand(b.linear), b.type, b.term});
    }
    body = Term::let(std::move(bs), recursive, body);
  }
  return body;
}

bool welltyped_with(const AnnState& s, const DeclTable& state_decls) {
  auto term = encode(s, state_decls);
  if (!term) return false;
  TypeEnv env(state_decls);
  for (const auto& [x, ty] : s.xi) env.bind(x, ty, MultExpr::omega());
  return check_judgement(env, *term).has_value();
}

struct Stop {
  Outcome outcome;
};

std::string base_name(const std::string& x) {
  auto pos = x.find('#');
  return pos == std::string::npos ? x : x.substr(0, pos);
}

bool is_one(const std::optional<MultExpr>& m) { return m && mult_normalize(*m).is_one(); }

class PureMachine {
 public:
  PureMachine(AnnState s, const DeclTable& decls, const PureOptions& opts)
      : st_(std::move(s)), decls_(with_state_decls(decls)), opts_(opts), fuel_(opts.fuel) {
    // Names already present must not be reused.
    for (const auto& [x, b] : st_.env) note_name(x);
    for (const auto& [x, t] : st_.xi) note_name(x);
  }

  AnnState st_;
  std::vector<TraceRecord> trace_;
  PureStats stats_;
  std::uint64_t checks_ = 0;
  std::uint64_t violations_ = 0;
  std::string violation_;

  std::uint64_t steps() const { return opts_.fuel - fuel_; }

  bool check_initial() {
    ++checks_;
    return welltyped_with(st_, decls_);
  }

  Term eval(const Term& t, bool lin) {
    switch (t.kind()) {
      case Term::Kind::Lam:
        return axiom("abs", t, lin);
      case Term::Kind::MultLam:
        return axiom("m.abs", t, lin);
      case Term::Kind::Con:
        return axiom("constructor", t, lin);
      case Term::Kind::IntLit:
        return axiom("literal", t, lin);
      case Term::Kind::ArrayLit:
        return axiom("array", t, lin);
      case Term::Kind::Var:
        return eval_var(t, lin);
      case Term::Kind::App: {
        Rule r(*this, "app", t);
        if (t.arg().kind() != Term::Kind::Var)
          block(BlockReason::PrimitiveMisuse, "app", "", "argument is not a variable");
        bool arg_lin = lin && is_one(t.arrow_annotation());
        push(t.arg(), arg_lin);
        Term f = eval(t.fun(), lin);
        pop();
        if (f.kind() != Term::Kind::Lam) block(BlockReason::PrimitiveMisuse, "app", "", "applying a non-function");
        Term z = eval(rename_vars(f.body(), {{f.name(), t.arg().name()}}), lin);
        return conclude("app", z, lin);
      }
      case Term::Kind::MultApp: {
        Rule r(*this, "m.app", t);
        Term f = eval(t.fun(), lin);
        if (f.kind() != Term::Kind::MultLam)
          block(BlockReason::PrimitiveMisuse, "m.app", "", "multiplicity application to a non-abstraction");
        Term z = eval(subst_mult(f.body(), f.name(), t.mult()), lin);
        return conclude("m.app", z, lin);
      }
      case Term::Kind::Let: {
        Rule r(*this, "let", t);
        std::map<std::string, std::string> ren;
        for (const auto& b : t.bindings()) ren[b.name] = fresh(b.name);
        for (const auto& b : t.bindings()) {
          Term rhs = t.recursive() ? rename_vars(b.rhs, ren) : b.rhs;
          bool blin = lin && mult_normalize(b.mult).is_one();
          st_.env.insert_or_assign(ren[b.name], AnnState::Binding{blin, b.type, rhs});
        }
        Term z = eval(rename_vars(t.body(), ren), lin);
        return conclude("let", z, lin);
      }
      case Term::Kind::Case: {
        Rule r(*this, "case", t);
        std::string h = fresh("%scrut");
        if (opts_.instrumented) {
          auto ty = type_under(t.scrut(), decls_, ambient_types(st_));
          if (ty) st_.xi.insert_or_assign(h, *ty);
        }
        push(Term::case_(t.mult(), Term::var(h), t.branches()), lin);
        bool scrut_lin = lin && mult_normalize(t.mult()).is_one();
        Term v = eval(t.scrut(), scrut_lin);
        pop();
        if (v.kind() != Term::Kind::Con) block(BlockReason::PrimitiveMisuse, "case", "", "case on a non-constructor");
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
          Term z = eval(rename_vars(br.body, ren), lin);
          return conclude("case", z, lin);
        }
        block(BlockReason::MissingBranch, "case", "", "no branch for '" + v.name() + "'");
      }
      case Term::Kind::Prim:
        return eval_prim(t, lin);
      case Term::Kind::Loc:
        block(BlockReason::PrimitiveMisuse, "mutable cell", t.name(), "array names do not occur in this semantics");
    }
    block(BlockReason::PrimitiveMisuse, "?", "", "unknown term");
  }

  GroundValue force(const Term& v, bool lin) {
    switch (v.kind()) {
      case Term::Kind::IntLit:
        return GroundValue::integer(v.int_value());
      case Term::Kind::Con: {
        std::vector<bool> field_lin(v.args().size(), false);
        if (auto info = decls_.find_con(v.name()); info && info->con().fields.size() == v.args().size()) {
          auto fields = decls_.instantiate_fields(*info, v.type_inst(), v.mult_inst());
          for (std::size_t i = 0; i < fields.size(); ++i)
            field_lin[i] = lin && mult_normalize(fields[i].second).is_one();
        }
        // Pending fields stay on the stack while earlier ones are forced.
        std::size_t base = st_.stack.size();
        for (std::size_t i = v.args().size(); i-- > 0;) push(v.args()[i], field_lin[i]);
        GroundValue g{GroundValue::Kind::Con, 0, v.name(), {}};
        for (std::size_t i = 0; i < v.args().size(); ++i) {
          pop();
          Term fv = eval(v.args()[i], field_lin[i]);
          g.fields.push_back(force(fv, field_lin[i]));
        }
        (void)base;
        return g;
      }
      case Term::Kind::ArrayLit:
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
  DeclTable decls_;
  const PureOptions& opts_;
  std::uint64_t fuel_;
  std::uint64_t next_name_ = 0;
  std::uint64_t next_array_ = 0;
  std::set<std::string> active_;

  struct Rule {
    PureMachine& m;
    std::size_t index = SIZE_MAX;
    std::size_t env_before;
    Rule(PureMachine& mm, const char* name, const Term& redex) : m(mm), env_before(mm.st_.env.size()) {
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
        m.trace_[index].heap_delta = static_cast<long>(m.st_.env.size()) - static_cast<long>(env_before);
    }
  };

  void note_name(const std::string& x) {
    auto pos = x.find('#');
    if (pos == std::string::npos) return;
    try {
      next_name_ = std::max<std::uint64_t>(next_name_, std::stoull(x.substr(pos + 1)));
    } catch (const std::exception&) {
    }
  }

  std::string fresh(const std::string& x) { return base_name(x) + "#" + std::to_string(++next_name_); }

  void push(const Term& t, bool lin) { st_.stack.push_back(AnnState::Frame{t, lin, std::nullopt}); }
  void pop() { st_.stack.pop_back(); }

  Term axiom(const char* rule, const Term& t, bool lin) {
    Rule r(*this, rule, t);
    return conclude(rule, t, lin);
  }

  // Records the conclusion of a rule and, when instrumented, checks it.
  Term conclude(const char* rule, const Term& z, bool lin) {
    if (!opts_.instrumented) return z;
    AnnState probe(z);
    probe.xi = st_.xi;
    probe.env = st_.env;
    probe.focus_linear = lin;
    probe.stack = st_.stack;
    ++checks_;
    if (!welltyped_with(probe, decls_)) {
      ++violations_;
      violation_ = std::string("after rule '") + rule + "' with focus " + print_term_short(z, 80);
      Outcome o;
      o.kind = Outcome::Kind::Blocked;
      o.reason = BlockReason::PrimitiveMisuse;
      o.rule = rule;
      o.message = "preservation violation: " + violation_;
      throw Stop{o};
    }
    return z;
  }

  Term eval_var(const Term& t, bool lin) {
    const std::string& x = t.name();
    auto it = st_.env.find(x);
    if (it == st_.env.end()) {
      Rule r(*this, "variable", t);
      if (active_.count(x)) {
        Outcome o;
        o.kind = Outcome::Kind::Blackhole;
        o.rule = "shared variable";
        o.location = x;
        throw Stop{o};
      }
      block(BlockReason::MissingLinearBinding, "variable", x, "no binding in the environment");
    }
    if (!it->second.linear) {
      Rule r(*this, "shared variable", t);
      AnnState::Binding b = std::move(it->second);
      st_.env.erase(it);
      st_.xi.insert_or_assign(x, b.type);
      active_.insert(x);
      Term z = eval(b.term, false);
      active_.erase(x);
      st_.env.insert_or_assign(x, AnnState::Binding{false, b.type, z});
      return conclude("shared variable", z, lin);
    }
    Rule r(*this, "linear variable", t);
    if (!lin) block(BlockReason::MissingLinearBinding, "linear variable", x, "linear binding demanded at w");
    Term e = it->second.term;
    st_.env.erase(it);
    Term z = eval(e, true);
    return conclude("linear variable", z, lin);
  }

  std::int64_t eval_int(const Term& t, bool lin, const char* rule) {
    Term v = eval(t, lin);
    if (v.kind() != Term::Kind::IntLit) block(BlockReason::PrimitiveMisuse, rule, "", "expected an integer");
    return v.int_value();
  }

  Term eval_array(const Term& t, bool lin, const char* rule) {
    Term v = eval(t, lin);
    if (v.kind() != Term::Kind::ArrayLit) block(BlockReason::PrimitiveMisuse, rule, "", "expected an array");
    return v;
  }

  std::size_t check_index(std::int64_t i, const Term& arr, const char* rule) {
    if (i < 0 || static_cast<std::size_t>(i) >= arr.elems().size())
      block(BlockReason::PrimitiveMisuse, rule, "",
            "index " + std::to_string(i) + " out of bounds for size " + std::to_string(arr.elems().size()));
    return static_cast<std::size_t>(i);
  }

  const std::string& var_arg(const Term& t, const char* rule) {
    if (t.kind() != Term::Kind::Var) block(BlockReason::PrimitiveMisuse, rule, "", "argument is not a variable");
    return t.name();
  }

  Type type_of_var(const std::string& x) {
    if (!opts_.instrumented) return Type::hole();
    if (auto it = st_.env.find(x); it != st_.env.end()) return it->second.type;
    if (auto it = st_.xi.find(x); it != st_.xi.end()) return it->second;
    return Type::hole();
  }

  Term eval_prim(const Term& t, bool lin) {
    const auto& args = t.args();
    switch (t.prim_op()) {
      case PrimOp::NewMArray: {
        Rule r(*this, "newMArray", t);
        ++stats_.newmarray_rules;
        if (args.size() != 3) block(BlockReason::PrimitiveMisuse, "newMArray", "", "wrong number of arguments");
        const std::string& a = var_arg(args[1], "newMArray");
        push(args[2], lin);
        push(args[1], false);
        std::int64_t n = eval_int(args[0], lin, "newMArray");
        pop();
        pop();
        if (n < 0) block(BlockReason::PrimitiveMisuse, "newMArray", "", "negative array size");
        Type elem = type_of_var(a);
        Term arr = Term::array_lit(elem, false, std::vector<std::string>(static_cast<std::size_t>(n), a),
                                   ++next_array_);
        ++stats_.array_allocations;
        Term app = Term::app(args[2], Term::var("%arr"));
        app = app.annotated(Type::hole(), MultExpr::one());
        Term k = Term::let({LetBinding{"%arr", MultExpr::one(), Type::marray(elem), arr}}, false, app);
        Term v = eval(k, true);
        if (v.kind() != Term::Kind::Con || v.name() != "Unrestricted")
          block(BlockReason::PrimitiveMisuse, "newMArray", "", "continuation did not return Unrestricted");
        return conclude("newMArray", v, lin);
      }
      case PrimOp::Write: {
        Rule r(*this, "write", t);
        ++stats_.write_rules;
        if (args.size() != 3) block(BlockReason::PrimitiveMisuse, "write", "", "wrong number of arguments");
        const std::string& a = var_arg(args[2], "write");
        push(args[2], false);
        push(args[0], lin);
        std::int64_t i = eval_int(args[1], lin, "write");
        pop();
        Term arr = eval_array(args[0], lin, "write");
        pop();
        if (arr.frozen()) block(BlockReason::TypestateViolation, "write", "", "array has type Array, not MArray");
        std::size_t k = check_index(i, arr, "write");
        auto elems = arr.elems();
        elems[k] = a;
        Term out = Term::array_lit(arr.elem_type(), false, std::move(elems), ++next_array_);
        ++stats_.array_allocations;
        return conclude("write", out, lin);
      }
      case PrimOp::Freeze: {
        Rule r(*this, "freeze", t);
        if (args.size() != 1) block(BlockReason::PrimitiveMisuse, "freeze", "", "wrong number of arguments");
        Term arr = eval_array(args[0], lin, "freeze");
        if (arr.frozen()) block(BlockReason::TypestateViolation, "freeze", "", "array has type Array, not MArray");
        std::string x = fresh("%frozen");
        Type at = Type::array(arr.elem_type());
        st_.env.insert_or_assign(
            x, AnnState::Binding{false, at, Term::array_lit(arr.elem_type(), true, arr.elems(), arr.array_id())});
        Term out = Term::con("Unrestricted", {at}, {}, {Term::var(x)});
        return conclude("freeze", out, lin);
      }
      case PrimOp::Index: {
        Rule r(*this, "index", t);
        if (args.size() != 2) block(BlockReason::PrimitiveMisuse, "index", "", "wrong number of arguments");
        push(args[0], false);
        std::int64_t i = eval_int(args[1], lin, "index");
        pop();
        Term arr = eval_array(args[0], false, "index");
        if (!arr.frozen()) block(BlockReason::TypestateViolation, "index", "", "array has type MArray, not Array");
        std::size_t k = check_index(i, arr, "index");
        Term z = eval(Term::var(arr.elems()[k]), lin);
        return conclude("index", z, lin);
      }
      default: {
        Rule r(*this, "primitive", t);
        if (args.size() != 2) block(BlockReason::PrimitiveMisuse, "primitive", "", "wrong number of arguments");
        push(args[1], lin);
        auto a = static_cast<std::uint64_t>(eval_int(args[0], lin, "primitive"));
        pop();
        auto b = static_cast<std::uint64_t>(eval_int(args[1], lin, "primitive"));
        Term out = Term::int_lit(0);
        switch (t.prim_op()) {
          case PrimOp::Add: out = Term::int_lit(static_cast<std::int64_t>(a + b)); break;
          case PrimOp::Sub: out = Term::int_lit(static_cast<std::int64_t>(a - b)); break;
          case PrimOp::Mul: out = Term::int_lit(static_cast<std::int64_t>(a * b)); break;
          case PrimOp::Eq: out = Term::con(a == b ? "True" : "False", {}, {}, {}); break;
          default:
            out = Term::con(static_cast<std::int64_t>(a) < static_cast<std::int64_t>(b) ? "True" : "False", {}, {},
                            {});
        }
        return conclude("primitive", out, lin);
      }
    }
  }
};

}  // namespace

DeclTable with_state_decls(const DeclTable& decls) {
  DeclTable out = decls;
  DataDecl pair;
  pair.name = kPair;
  pair.mult_params = {"p"};
  pair.type_params = {"a", "b"};
  pair.constructors.push_back(
      ConstructorDecl{kPair, {{Type::var("a"), MultExpr::var("p")}, {Type::var("b"), MultExpr::one()}}, {}});
  out.add(pair);
  DataDecl unit;
  unit.name = kUnit;
  unit.constructors.push_back(ConstructorDecl{kUnit, {}, {}});
  out.add(unit);
  return out;
}

Term encode_state(const AnnState& s, const DeclTable& state_decls) {
  auto t = encode(s, state_decls);
  return t ? *t : Term::var("%ill-typed");
}

bool state_welltyped(const AnnState& s, const DeclTable& decls) {
  bool ok = false;
  run_with_large_stack([&] { ok = welltyped_with(s, with_state_decls(decls)); });
  return ok;
}

PureRun run_pure(AnnState s, const DeclTable& decls, const PureOptions& opts) {
  PureRun run;
  run_with_large_stack([&] {
    PureMachine m(std::move(s), decls, opts);
    if (opts.instrumented && !m.check_initial()) {
      run.precondition_ok = false;
      run.checks = m.checks_;
      run.outcome.kind = Outcome::Kind::Blocked;
      run.outcome.rule = "precondition";
      run.outcome.message = "initial state is not well typed";
      return;
    }
    try {
      bool lin = m.st_.focus_linear;
      Term v = m.eval(m.st_.focus, lin);
      run.outcome.kind = Outcome::Kind::Value;
      run.outcome.value = v;
      if (opts.force_ground) run.outcome.ground = m.force(v, lin);
    } catch (const Stop& stop) {
      run.outcome = stop.outcome;
    }
    run.outcome.steps = m.steps();
    run.trace = std::move(m.trace_);
    run.stats = m.stats_;
    run.checks = m.checks_;
    run.violations = m.violations_;
    run.violation = m.violation_;
    run.final_linear_bindings = m.st_.linear_bindings();
    run.final_env_size = m.st_.env.size();
  });
  return run;
}

PureRun run_pure(const Term& t, const DeclTable& decls, const PureOptions& opts) {
  return run_pure(AnnState(t), decls, opts);
}

Outcome eval_pure(AnnState s, const DeclTable& decls, std::uint64_t fuel) {
  PureOptions opts;
  opts.fuel = fuel;
  return run_pure(std::move(s), decls, opts).outcome;
}

PureRun instrumented_eval(AnnState s, const DeclTable& decls, std::uint64_t fuel) {
  PureOptions opts;
  opts.fuel = fuel;
  opts.instrumented = true;
  return run_pure(std::move(s), decls, opts);
}

}  // namespace lq
