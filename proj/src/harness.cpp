#include "lq/harness.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "lq/parser.hpp"
#include "lq/printer.hpp"
#include "lq/translate.hpp"

namespace lq {

Result<LoadedProgram, Diagnostics> load_checked(SourceFile source, const std::vector<DataDecl>& prelude) {
  std::vector<DataDecl> all = prelude;
  all.insert(all.end(), source.decls.begin(), source.decls.end());
  auto checked = check_program(all, source.defs, source.main);
  if (!checked) return checked.error();
  Term sharing = to_sharing(checked->typed, checked->decls);
  return LoadedProgram{std::move(source), std::move(checked->decls), std::move(sharing), checked->type};
}

Result<LoadedProgram, Diagnostics> load_program(const std::string& text, bool with_prelude, bool typecheck) {
  std::vector<DataDecl> prelude;
  if (with_prelude) {
    auto p = load_prelude();
    if (!p) return Diagnostics{p.error()};
    prelude = std::move(*p);
  }
  auto src = parse_source(text, prelude);
  if (!src) return Diagnostics{src.error()};
  if (typecheck) return load_checked(std::move(*src), prelude);
  DeclTable table;
  for (const auto& d : prelude) table.add(d);
  for (const auto& d : src->decls) table.add(d);
  Term sharing = to_sharing_untyped(elaborate_program(src->defs, src->main), table);
  return LoadedProgram{std::move(*src), std::move(table), std::move(sharing), std::nullopt};
}

std::string GenConfig::validate() const {
  if (max_depth < 1) return "max depth must be at least 1";
  if (max_datatypes < 0) return "datatype pool size must be nonnegative";
  if (weight_one < 0 || weight_omega < 0 || weight_var < 0) return "multiplicity weights must be nonnegative";
  if (weight_one + weight_omega + weight_var <= 0) return "multiplicity weights must not all be zero";
  if (array_prob < 0 || array_prob > 1) return "array probability must lie in [0, 1]";
  if (max_attempts < 1) return "at least one attempt is required";
  return "";
}

std::uint64_t program_seed(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

namespace {

const std::vector<DataDecl>& prelude_decls() {
  static const std::vector<DataDecl> decls = [] {
    auto p = load_prelude();
    return p ? *p : std::vector<DataDecl>{};
  }();
  return decls;
}

Type int_t() { return Type::int_(); }
Type bool_t() { return Type::data("Bool", {}, {}); }
Type list_int_t() { return Type::data("List", {}, {int_t()}); }
Type unr_t(Type a) { return Type::data("Unrestricted", {}, {std::move(a)}); }
Type pair_t(MultExpr p, MultExpr q, Type a, Type b) {
  return Type::data("Pair", {std::move(p), std::move(q)}, {std::move(a), std::move(b)});
}

bool is_one(const MultExpr& m) { return mult_normalize(m).is_one(); }

const char* const kSumL = "sumL";

// The helper that consumes an Int list linearly.
Def sum_list_def() {
  Term body = Term::case_(
      MultExpr::one(), Term::var("xs"),
      {Branch{"Nil", {}, Term::int_lit(0)},
       Branch{"Cons", {"h", "t"},
              Term::prim(PrimOp::Add, {Term::var("h"), Term::app(Term::var(kSumL), Term::var("t"))})}});
  return Def{kSumL, Type::arrow(list_int_t(), MultExpr::one(), int_t()), MultExpr::omega(),
             Term::lam(MultExpr::one(), "xs", list_int_t(), body), {}};
}

struct Var {
  std::string name;
  Type type;
};
using Vars = std::vector<Var>;

class Generator {
 public:
  Generator(const GenConfig& cfg, std::uint64_t seed) : cfg_(cfg), rng_(seed) {
    for (const auto& d : prelude_decls()) table_.add(d);
  }

  GeneratedProgram run() {
    make_pool();
    Type target = cfg_.target ? *cfg_.target : ground_type(2);
    unr_.push_back(Var{kSumL, Type::arrow(list_int_t(), MultExpr::one(), int_t())});
    Term main = gen(target, {}, cfg_.max_depth);
    GeneratedProgram out{SourceFile{pool_, {sum_list_def()}, main}, target, 1};
    return out;
  }

 private:
  const GenConfig& cfg_;
  std::mt19937_64 rng_;
  DeclTable table_;
  std::vector<DataDecl> pool_;
  Vars unr_;
  int counter_ = 0;

  struct Scope {
    Vars& v;
    std::size_t size;
    explicit Scope(Vars& vv) : v(vv), size(vv.size()) {}
    ~Scope() { v.erase(v.begin() + static_cast<long>(size), v.end()); }
  };

  bool chance(double p) { return std::uniform_real_distribution<double>(0, 1)(rng_) < p; }
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  std::int64_t small_int() { return std::uniform_int_distribution<std::int64_t>(-3, 9)(rng_); }
  std::string fresh(const std::string& base) { return base + std::to_string(counter_++); }

  MultExpr concrete_mult() {
    double w1 = cfg_.weight_one, ww = cfg_.weight_omega;
    if (w1 + ww <= 0) return MultExpr::one();
    return chance(w1 / (w1 + ww)) ? MultExpr::one() : MultExpr::omega();
  }
  bool want_poly() {
    double total = cfg_.weight_one + cfg_.weight_omega + cfg_.weight_var;
    return chance(cfg_.weight_var / total);
  }

  // Splits `vs` into `n` random parts.
  std::vector<Vars> split(const Vars& vs, std::size_t n) {
    std::vector<Vars> parts(n);
    for (const auto& v : vs) parts[pick(n)].push_back(v);
    return parts;
  }

  void make_pool() {
    int n = cfg_.max_datatypes == 0 ? 0 : static_cast<int>(pick(static_cast<std::size_t>(cfg_.max_datatypes) + 1));
    for (int i = 0; i < n; ++i) {
      DataDecl d;
      d.name = "T" + std::to_string(i);
      std::size_t ncons = 1 + pick(3);
      for (std::size_t c = 0; c < ncons; ++c) {
        ConstructorDecl con;
        con.name = d.name + static_cast<char>('a' + c);
        std::size_t nfields = pick(3);
        for (std::size_t f = 0; f < nfields; ++f) {
          std::vector<Type> choices{int_t(), bool_t(), list_int_t()};
          for (const auto& e : pool_) choices.push_back(Type::data(e.name, {}, {}));
          con.fields.emplace_back(choices[pick(choices.size())], concrete_mult());
        }
        d.constructors.push_back(std::move(con));
      }
      pool_.push_back(d);
      table_.add(d);
    }
  }

  Type ground_type(int depth) {
    std::size_t options = depth > 0 ? 5 : 3;
    std::size_t k = pick(options + (pool_.empty() ? 0 : 1));
    if (k == options) return Type::data(pool_[pick(pool_.size())].name, {}, {});
    switch (k) {
      case 0: return int_t();
      case 1: return bool_t();
      case 2: return list_int_t();
      case 3: return pair_t(concrete_mult(), concrete_mult(), ground_type(depth - 1), ground_type(depth - 1));
      default: return unr_t(ground_type(depth - 1));
    }
  }

  Type any_type(int depth) {
    if (depth > 0 && chance(0.25)) return Type::arrow(ground_type(depth - 1), concrete_mult(), any_type(depth - 1));
    return ground_type(depth);
  }

  Term con_of(const Type& t, std::size_t index, std::vector<Term> args) {
    const DataDecl* d = table_.find_type(t.name());
    return Term::con(d->constructors[index].name, t.type_args(), t.mult_args(), std::move(args));
  }

  std::vector<std::pair<Type, MultExpr>> fields_of(const Type& t, std::size_t index) {
    const DataDecl* d = table_.find_type(t.name());
    auto info = table_.find_con(d->constructors[index].name);
    return table_.instantiate_fields(*info, t.type_args(), t.mult_args());
  }

  // A term of type `t` that uses every variable in `lin` exactly once.
  Term gen(const Type& t, const Vars& lin, int depth) {
    if (depth <= 1) return finish(t, lin);
    for (;;) {
      switch (pick(9)) {
        case 0:
        case 1:
        case 2:
          if (auto r = intro(t, lin, depth)) return *r;
          break;
        case 3: {
          Type a = ground_type(1);
          auto parts = split(lin, 2);
          std::string x = fresh("x");
          Term rhs = gen(a, parts[0], depth - 1);
          parts[1].push_back(Var{x, a});
          Term body = gen(t, parts[1], depth - 1);
          return Term::let({LetBinding{x, MultExpr::one(), a, rhs}}, false, body);
        }
        case 4: {
          Type a = any_type(1);
          std::string x = fresh("s");
          Term rhs = gen(a, {}, depth - 1);
          Scope s(unr_);
          unr_.push_back(Var{x, a});
          Term body = gen(t, lin, depth - 1);
          return Term::let({LetBinding{x, MultExpr::omega(), a, rhs}}, true, body);
        }
        case 5:
          return gen_case(t, lin, depth);
        case 6: {
          Type a = any_type(1);
          MultExpr m = concrete_mult();
          std::string x = fresh("y");
          auto parts = is_one(m) ? split(lin, 2) : std::vector<Vars>{lin, {}};
          Term arg = gen(a, parts[1], depth - 1);
          Scope s(unr_);
          if (is_one(m))
            parts[0].push_back(Var{x, a});
          else
            unr_.push_back(Var{x, a});
          Term body = gen(t, parts[0], depth - 1);
          return Term::app(Term::lam(m, x, a, body), arg);
        }
        case 7:
          if (auto r = use_variable(t, lin, depth)) return *r;
          break;
        default:
          if (want_poly()) return poly_helper(t, lin, depth);
          if (!lin.empty()) {
            std::size_t i = pick(lin.size());
            Vars rest = lin;
            rest.erase(rest.begin() + static_cast<long>(i));
            return consume(Term::var(lin[i].name), lin[i].type, t, rest, depth);
          }
          break;
      }
    }
  }

  std::optional<Term> intro(const Type& t, const Vars& lin, int depth) {
    switch (t.kind()) {
      case Type::Kind::Int: {
        if (chance(cfg_.array_prob)) {
          Term arr = array_program(depth);
          if (lin.empty()) return arr;
          return Term::prim(PrimOp::Add, {arr, gen(int_t(), lin, depth - 1)});
        }
        if (lin.empty() && chance(0.4)) return Term::int_lit(small_int());
        static const PrimOp ops[] = {PrimOp::Add, PrimOp::Sub, PrimOp::Mul};
        auto parts = split(lin, 2);
        return Term::prim(ops[pick(3)], {gen(int_t(), parts[0], depth - 1), gen(int_t(), parts[1], depth - 1)});
      }
      case Type::Kind::Arrow: {
        std::string x = fresh("z");
        Vars body_lin = lin;
        Scope s(unr_);
        if (is_one(t.mult()))
          body_lin.push_back(Var{x, t.dom()});
        else
          unr_.push_back(Var{x, t.dom()});
        return Term::lam(t.mult(), x, t.dom(), gen(t.cod(), body_lin, depth - 1));
      }
      case Type::Kind::Data: {
        if (t.name() == "Bool" && chance(0.3)) {
          auto parts = split(lin, 2);
          return Term::prim(chance(0.5) ? PrimOp::Eq : PrimOp::Lt,
                            {gen(int_t(), parts[0], depth - 1), gen(int_t(), parts[1], depth - 1)});
        }
        const DataDecl* d = table_.find_type(t.name());
        std::size_t c = pick(d->constructors.size());
        auto fields = fields_of(t, c);
        std::vector<std::size_t> linear;
        for (std::size_t i = 0; i < fields.size(); ++i)
          if (is_one(fields[i].second)) linear.push_back(i);
        if (!lin.empty() && linear.empty()) return std::nullopt;
        std::vector<Vars> parts(fields.size());
        if (!linear.empty()) {
          auto lparts = split(lin, linear.size());
          for (std::size_t i = 0; i < linear.size(); ++i) parts[linear[i]] = lparts[i];
        }
        std::vector<Term> args;
        for (std::size_t i = 0; i < fields.size(); ++i) args.push_back(gen(fields[i].first, parts[i], depth - 1));
        return con_of(t, c, std::move(args));
      }
      default:
        return std::nullopt;
    }
  }

  std::optional<Term> use_variable(const Type& t, const Vars& lin, int depth) {
    if (lin.size() == 1 && types_equal(lin[0].type, t)) return Term::var(lin[0].name);
    std::vector<const Var*> same, funs;
    for (const auto& v : unr_) {
      if (types_equal(v.type, t)) same.push_back(&v);
      if (v.type.kind() == Type::Kind::Arrow && types_equal(v.type.cod(), t)) funs.push_back(&v);
    }
    if (lin.empty() && !same.empty()) return Term::var(same[pick(same.size())]->name);
    if (funs.empty()) return std::nullopt;
    Var f = *funs[pick(funs.size())];
    if (!lin.empty() && !is_one(f.type.mult())) return std::nullopt;
    return Term::app(Term::var(f.name), gen(f.type.dom(), lin, depth - 1));
  }

  Term gen_case(const Type& t, const Vars& lin, int depth) {
    Type a = ground_type(1);
    while (a.kind() == Type::Kind::Int) a = ground_type(1);
    bool linear = chance(0.7);
    auto parts = linear ? split(lin, 2) : std::vector<Vars>{{}, lin};
    Term scrut = gen(a, parts[0], depth - 1);
    return case_on(scrut, a, linear, t, parts[1], depth);
  }

  // case[m] scrut of { every constructor -> a term of type t }.
  Term case_on(const Term& scrut, const Type& a, bool linear, const Type& t, const Vars& lin, int depth) {
    const DataDecl* d = table_.find_type(a.name());
    std::vector<Branch> branches;
    for (std::size_t c = 0; c < d->constructors.size(); ++c) {
      auto fields = fields_of(a, c);
      Scope s(unr_);
      Vars body_lin = lin;
      Branch br{d->constructors[c].name, {}, Term::int_lit(0)};
      for (const auto& [ft, fm] : fields) {
        std::string x = fresh("f");
        br.binders.push_back(x);
        if (linear && is_one(fm))
          body_lin.push_back(Var{x, ft});
        else
          unr_.push_back(Var{x, ft});
      }
      br.body = gen(t, body_lin, depth - 1);
      branches.push_back(std::move(br));
    }
    return Term::case_(linear ? MultExpr::one() : MultExpr::omega(), scrut, std::move(branches));
  }

  // Uses `e : b` exactly once, together with `rest`, to build a term of type t.
  Term consume(const Term& e, const Type& b, const Type& t, const Vars& rest, int depth) {
    if (rest.empty() && types_equal(b, t)) return e;
    switch (b.kind()) {
      case Type::Kind::Int:
        if (t.kind() == Type::Kind::Int) return Term::prim(PrimOp::Add, {e, gen(int_t(), rest, depth - 1)});
        return case_on(Term::prim(PrimOp::Lt, {e, Term::int_lit(small_int())}), bool_t(), true, t, rest, depth);
      case Type::Kind::Arrow:
        return consume(Term::app(e, gen(b.dom(), {}, depth - 1)), b.cod(), t, rest, depth);
      case Type::Kind::Data:
        if (types_equal(b, list_int_t()))
          return consume(Term::app(Term::var(kSumL), e), int_t(), t, rest, depth);
        return case_on(e, b, true, t, rest, depth);
      default:
        return e;
    }
  }

  Term finish(const Type& t, const Vars& lin) {
    if (lin.empty()) {
      std::vector<const Var*> same;
      for (const auto& v : unr_)
        if (types_equal(v.type, t)) same.push_back(&v);
      if (!same.empty() && chance(0.5)) return Term::var(same[pick(same.size())]->name);
      return minimal(t);
    }
    Vars rest(lin.begin() + 1, lin.end());
    return consume(Term::var(lin[0].name), lin[0].type, t, rest, 0);
  }

  Term minimal(const Type& t) {
    switch (t.kind()) {
      case Type::Kind::Int:
        return Term::int_lit(small_int());
      case Type::Kind::Arrow: {
        std::string x = fresh("z");
        Scope s(unr_);
        Term body = is_one(t.mult()) ? consume(Term::var(x), t.dom(), t.cod(), {}, 0) : minimal(t.cod());
        return Term::lam(t.mult(), x, t.dom(), body);
      }
      default: {
        const DataDecl* d = table_.find_type(t.name());
        std::size_t c = t.name() == "List" ? 0 : pick(d->constructors.size());
        std::vector<Term> args;
        for (const auto& f : fields_of(t, c)) args.push_back(minimal(f.first));
        return con_of(t, c, std::move(args));
      }
    }
  }

  // let mk = /\p. \[p] y : A . MkPair y k in a body that may apply mk at
  // several multiplicities.
  Term poly_helper(const Type& t, const Vars& lin, int depth) {
    Type a = ground_type(0);
    std::string p = fresh("p");
    std::string y = fresh("y");
    std::string mk = fresh("mk");
    Type fn_type = Type::forall(p, Type::arrow(a, MultExpr::var(p), pair_t(MultExpr::var(p), MultExpr::omega(), a, int_t())));
    Term k = gen(int_t(), {}, depth - 1);
    Term fn = Term::mult_lam(
        p, Term::lam(MultExpr::var(p), y, a,
                     Term::con("MkPair", {a, int_t()}, {MultExpr::var(p), MultExpr::omega()}, {Term::var(y), k})));
    Scope s(unr_);
    unr_.push_back(Var{mk, fn_type});
    MultExpr m = concrete_mult();
    auto parts = is_one(m) ? split(lin, 2) : std::vector<Vars>{{}, lin};
    Term use = Term::app(Term::mult_app(Term::var(mk), m), gen(a, parts[0], depth - 1));
    Term body = consume(use, pair_t(m, MultExpr::omega(), a, int_t()), t, parts[1], depth - 1);
    return Term::let({LetBinding{mk, MultExpr::omega(), fn_type, fn}}, true, body);
  }

  // case newMArray(n, a, \ma. writes, freeze, reads) of { Unrestricted r -> r }
  Term array_program(int depth) {
    std::int64_t n = 1 + static_cast<std::int64_t>(pick(4));
    auto idx = [&] { return Term::int_lit(static_cast<std::int64_t>(pick(static_cast<std::size_t>(n)))); };
    std::string ma = fresh("ma");
    std::string arr = fresh("arr");
    std::string r = fresh("r");
    Term init = gen(int_t(), {}, depth - 2);
    Term cur = Term::var(ma);
    std::vector<LetBinding> steps;
    std::size_t writes = 1 + pick(3);
    for (std::size_t i = 0; i < writes; ++i) {
      cur = Term::prim(PrimOp::Write, {cur, idx(), gen(int_t(), {}, depth - 2)});
      if (chance(0.3)) {
        std::string m = fresh("mw");
        steps.push_back(LetBinding{m, MultExpr::one(), Type::marray(int_t()), cur});
        cur = Term::var(m);
      }
    }
    Term reads = Term::prim(PrimOp::Index, {Term::var(arr), idx()});
    {
      Scope s(unr_);
      unr_.push_back(Var{arr, Type::array(int_t())});
      if (chance(0.5))
        reads = Term::prim(PrimOp::Add, {reads, Term::prim(PrimOp::Index, {Term::var(arr), idx()})});
      if (chance(0.3)) reads = Term::prim(PrimOp::Mul, {reads, gen(int_t(), {}, depth - 2)});
    }
    Term body = Term::case_(MultExpr::one(), Term::prim(PrimOp::Freeze, {cur}),
                            {Branch{"Unrestricted", {arr}, Term::con("Unrestricted", {int_t()}, {}, {reads})}});
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) body = Term::let({*it}, false, body);
    Term f = Term::lam(MultExpr::one(), ma, Type::marray(int_t()), body);
    return Term::case_(MultExpr::one(), Term::prim(PrimOp::NewMArray, {Term::int_lit(n), init, f}),
                       {Branch{"Unrestricted", {r}, Term::var(r)}});
  }
};

}  // namespace

Result<GeneratedProgram, GenerationExhausted> gen_welltyped(const GenConfig& cfg) {
  GenerationExhausted fail;
  if (auto err = cfg.validate(); !err.empty()) {
    fail.last_error = err;
    return fail;
  }
  for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
    std::uint64_t seed = attempt == 1 ? cfg.seed : program_seed(cfg.seed, static_cast<std::uint64_t>(attempt));
    GeneratedProgram g = Generator(cfg, seed).run();
    g.attempts = attempt;
    auto checked = load_checked(g.source, prelude_decls());
    if (checked && types_equal(*checked->type, g.type)) return g;
    fail.attempts = attempt;
    fail.last_error = checked ? "result type differs from the target" : to_string(checked.error().front());
  }
  return fail;
}

DiffReport bisim_run(const LoadedProgram& program, std::uint64_t fuel, const std::string& id) {
  DiffReport rep;
  rep.id = id;
  auto run_both = [&](std::uint64_t f) {
    EvalOptions o;
    o.fuel = f;
    o.force_ground = true;
    OrdinaryRun ord = run_ordinary(program.sharing, o);
    PureOptions po;
    po.fuel = f;
    po.force_ground = true;
    PureRun pure = run_pure(program.sharing, program.decls, po);
    rep.ordinary = ord.outcome;
    rep.pure = pure.outcome;
    rep.ordinary_stats = ord.stats;
    rep.pure_stats = pure.stats;
    rep.pure_final_linear_bindings = pure.final_linear_bindings;
    rep.fuel = f;
  };
  run_both(fuel);
  bool ord_fuel = rep.ordinary.kind == Outcome::Kind::OutOfFuel;
  bool pure_fuel = rep.pure.kind == Outcome::Kind::OutOfFuel;
  if (ord_fuel != pure_fuel) run_both(fuel * 2);
  rep.ordinary_steps = rep.ordinary.steps;
  rep.pure_steps = rep.pure.steps;
  const auto& a = rep.ordinary;
  const auto& b = rep.pure;
  if (a.is_value() && b.is_value())
    rep.agree = a.ground && b.ground && a.ground->is_ground() && *a.ground == *b.ground;
  else
    rep.agree = a.kind == Outcome::Kind::OutOfFuel && b.kind == Outcome::Kind::OutOfFuel;
  return rep;
}

FuzzSummary& FuzzSummary::merge(const FuzzSummary& o) {
  programs += o.programs;
  generation_failures += o.generation_failures;
  progress_violations += o.progress_violations;
  preservation_violations += o.preservation_violations;
  disagreements += o.disagreements;
  blackholes += o.blackholes;
  fuel_outs += o.fuel_outs;
  state_checks += o.state_checks;
  reproducers.insert(reproducers.end(), o.reproducers.begin(), o.reproducers.end());
  return *this;
}

namespace {

std::string write_reproducer(const std::string& dir, std::uint64_t seed, std::uint64_t index,
                             const SourceFile& src, const std::string& why) {
  std::filesystem::create_directories(dir);
  auto path = std::filesystem::path(dir) / ("fuzz_" + std::to_string(seed) + "_" + std::to_string(index) + ".lq");
  std::ofstream out(path);
  out << "-- seed " << seed << ", program " << index << ": " << why << "\n" << print_source(src);
  return path.string();
}

FuzzSummary fuzz_one(const GenConfig& base, const FuzzOptions& opts, std::uint64_t index) {
  FuzzSummary s;
  s.programs = 1;
  GenConfig cfg = base;
  cfg.seed = program_seed(base.seed, index);
  auto g = gen_welltyped(cfg);
  if (!g) {
    s.generation_failures = 1;
    return s;
  }
  auto loaded = load_checked(g->source, prelude_decls());
  if (!loaded) {
    s.generation_failures = 1;
    return s;
  }
  std::vector<std::string> problems;
  DiffReport rep = bisim_run(*loaded, opts.fuel, std::to_string(index));
  for (const Outcome* o : {&rep.ordinary, &rep.pure}) {
    if (o->kind == Outcome::Kind::Blocked) problems.push_back("blocked: " + describe(*o));
    if (o->kind == Outcome::Kind::Blackhole) ++s.blackholes;
    if (o->kind == Outcome::Kind::OutOfFuel) ++s.fuel_outs;
  }
  if (!problems.empty()) s.progress_violations = 1;
  if (!rep.agree) {
    s.disagreements = 1;
    problems.push_back("disagreement: ordinary " + describe(rep.ordinary) + ", pure " + describe(rep.pure));
  }
  if (opts.check_preservation) {
    PureRun inst = instrumented_eval(AnnState(loaded->sharing), loaded->decls, opts.fuel);
    s.state_checks = inst.checks;
    if (!inst.precondition_ok || inst.violations > 0) {
      s.preservation_violations = 1;
      problems.push_back("preservation: " + (inst.precondition_ok ? inst.violation : "initial state ill typed"));
    }
  }
  if (!problems.empty() && !opts.repro_dir.empty()) {
    std::string why;
    for (const auto& p : problems) why += (why.empty() ? "" : "; ") + p;
    s.reproducers.push_back(write_reproducer(opts.repro_dir, base.seed, index, g->source, why));
  }
  return s;
}

}  // namespace

Result<FuzzSummary, std::string> fuzz(const GenConfig& cfg, const FuzzOptions& opts) {
  if (opts.count < 1) return std::string("count must be at least 1");
  if (auto err = cfg.validate(); !err.empty()) return err;
  FuzzSummary total;
  for (std::uint64_t i = 0; i < opts.count; ++i) total.merge(fuzz_one(cfg, opts, i));
  return total;
}

std::string format_summary(const FuzzSummary& s) {
  std::ostringstream out;
  auto row = [&](const char* name, std::uint64_t v) {
    out << name << std::string(26 - std::string(name).size(), ' ') << v << "\n";
  };
  row("programs", s.programs);
  row("generation failures", s.generation_failures);
  row("progress violations", s.progress_violations);
  row("preservation violations", s.preservation_violations);
  row("disagreements", s.disagreements);
  row("blackholes", s.blackholes);
  row("fuel exhaustions", s.fuel_outs);
  row("state checks", s.state_checks);
  for (const auto& r : s.reproducers) out << "reproducer " << r << "\n";
  return out.str();
}

}  // namespace lq
