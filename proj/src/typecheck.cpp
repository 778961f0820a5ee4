#include "lq/typecheck.hpp"

#include <functional>

#include "lq/printer.hpp"

namespace lq {

// ---------------------------------------------------------------------------
// DeclTable

DeclTable::DeclTable(const DeclTable& other) {
  for (const auto& d : other.decls_) add(*d);
}

DeclTable& DeclTable::operator=(const DeclTable& other) {
  if (this != &other) {
    decls_.clear();
    types_.clear();
    cons_.clear();
    for (const auto& d : other.decls_) add(*d);
  }
  return *this;
}

void DeclTable::add(DataDecl d) {
  std::size_t idx;
  auto it = types_.find(d.name);
  if (it != types_.end()) {
    idx = it->second;
    for (const auto& c : decls_[idx]->constructors) cons_.erase(c.name);
    *decls_[idx] = std::move(d);
  } else {
    idx = decls_.size();
    decls_.push_back(std::make_unique<DataDecl>(std::move(d)));
    types_[decls_[idx]->name] = idx;
  }
  const auto& cs = decls_[idx]->constructors;
  for (std::size_t i = 0; i < cs.size(); ++i) cons_[cs[i].name] = {idx, i};
}

const DataDecl* DeclTable::find_type(const std::string& name) const {
  auto it = types_.find(name);
  return it == types_.end() ? nullptr : decls_[it->second].get();
}

std::optional<DeclTable::ConInfo> DeclTable::find_con(const std::string& name) const {
  auto it = cons_.find(name);
  if (it == cons_.end()) return std::nullopt;
  return ConInfo{decls_[it->second.first].get(), it->second.second};
}

std::vector<DataDecl> DeclTable::decls() const {
  std::vector<DataDecl> out;
  for (const auto& d : decls_) out.push_back(*d);
  return out;
}

std::vector<std::pair<Type, MultExpr>> DeclTable::instantiate_fields(const ConInfo& c,
                                                                     const std::vector<Type>& types,
                                                                     const std::vector<MultExpr>& mults) const {
  std::map<std::string, Type> tmap;
  for (std::size_t i = 0; i < c.decl->type_params.size() && i < types.size(); ++i)
    tmap.emplace(c.decl->type_params[i], types[i]);
  std::map<std::string, MultExpr> mmap;
  for (std::size_t i = 0; i < c.decl->mult_params.size() && i < mults.size(); ++i)
    mmap.emplace(c.decl->mult_params[i], mults[i]);
  std::vector<std::pair<Type, MultExpr>> out;
  for (const auto& [ty, m] : c.con().fields) out.emplace_back(instantiate(ty, tmap, mmap), mult_subst(m, mmap));
  return out;
}

// ---------------------------------------------------------------------------
// TypeEnv

TypeEnv& TypeEnv::bind(const std::string& x, Type type, MultExpr mult) {
  vars_.emplace_back(x, Binding{std::move(type), std::move(mult)});
  return *this;
}

TypeEnv& TypeEnv::bind_mult_var(const std::string& p) {
  mult_vars_.push_back(p);
  return *this;
}

// ---------------------------------------------------------------------------
// Checker

namespace {

struct CheckError {
  Diagnostic diag;
};

[[noreturn]] void fail(Diagnostic::Kind k, SrcLoc loc, std::string msg) {
  throw CheckError{Diagnostic{k, loc, std::move(msg)}};
}

std::string show(const Type& t) { return "'" + print_type(t) + "'"; }

class Checker {
 public:
  Checker(const DeclTable& decls, bool annotate) : decls_(decls), annotate_(annotate) {}

  void load(const TypeEnv& env) {
    for (const auto& [x, b] : env.bindings()) scope_[x].push_back(b);
    for (const auto& p : env.mult_vars()) ++mvars_[p];
    ambient_ = env.ambient();
  }

  struct Out {
    Type type;
    Usage usage;
    std::optional<Term> typed;
  };

  // Well-formedness of a type. With `tyvars` set, type variables must be
  // among them (declaration fields); otherwise they are rigid and free.
  void wf(const Type& t, SrcLoc loc, const std::set<std::string>* tyvars = nullptr) {
    switch (t.kind()) {
      case Type::Kind::Int:
        return;
      case Type::Kind::Hole:
        fail(Diagnostic::Kind::TypeMismatch, loc, "missing type annotation");
      case Type::Kind::TypeVar:
        if (tyvars && !tyvars->count(t.name()))
          fail(Diagnostic::Kind::MalformedDecl, loc, "type variable '" + t.name() + "' is not a parameter");
        return;
      case Type::Kind::MArray:
      case Type::Kind::Array:
        wf(t.elem(), loc, tyvars);
        return;
      case Type::Kind::Arrow:
        wf_mult(t.mult(), loc, tyvars != nullptr);
        wf(t.dom(), loc, tyvars);
        wf(t.cod(), loc, tyvars);
        return;
      case Type::Kind::ForallMult:
        ++mvars_[t.name()];
        wf(t.body(), loc, tyvars);
        if (--mvars_[t.name()] == 0) mvars_.erase(t.name());
        return;
      case Type::Kind::Data: {
        const DataDecl* d = decls_.find_type(t.name());
        if (!d) fail(Diagnostic::Kind::UnboundVariable, loc, "unknown datatype '" + t.name() + "'");
        if (d->mult_params.size() != t.mult_args().size() || d->type_params.size() != t.type_args().size())
          fail(Diagnostic::Kind::ArityMismatch, loc,
               "datatype '" + t.name() + "' expects " + std::to_string(d->mult_params.size()) +
                   " multiplicity and " + std::to_string(d->type_params.size()) + " type arguments");
        for (const auto& m : t.mult_args()) wf_mult(m, loc, tyvars != nullptr);
        for (const auto& a : t.type_args()) wf(a, loc, tyvars);
        return;
      }
    }
  }

  void wf_mult(const MultExpr& m, SrcLoc loc, bool in_decl = false) {
    for (const auto& v : free_mult_vars(m))
      if (!mvars_.count(v))
        fail(in_decl ? Diagnostic::Kind::MalformedDecl : Diagnostic::Kind::UnboundVariable, loc,
             "multiplicity variable '" + v + "' is not in scope");
  }

  Out go(const Term& t) {
    switch (t.kind()) {
      case Term::Kind::Var: {
        Type ty = lookup(t.name(), t.loc());
        return finish(t, ty, Usage::single(t.name()), [&] { return t; });
      }
      case Term::Kind::IntLit:
        return finish(t, Type::int_(), {}, [&] { return t; });
      case Term::Kind::Loc:
        fail(Diagnostic::Kind::TypeMismatch, t.loc(), "array locations have no static type");
      case Term::Kind::ArrayLit: {
        wf(t.elem_type(), t.loc());
        Usage u;
        for (const auto& e : t.elems()) {
          Type et = lookup(e, t.loc());
          if (!types_equal(et, t.elem_type()))
            fail(Diagnostic::Kind::TypeMismatch, t.loc(),
                 "array element '" + e + "' has type " + show(et) + ", expected " + show(t.elem_type()));
          u = usage_add(u, Usage::single(e, MultNF::omega()));
        }
        Type ty = t.frozen() ? Type::array(t.elem_type()) : Type::marray(t.elem_type());
        return finish(t, ty, u, [&] { return t; });
      }
      case Term::Kind::Lam: {
        wf_mult(t.mult(), t.loc());
        wf(t.binder_type(), t.loc());
        push(t.name(), t.binder_type(), t.mult());
        Out body = go(t.body());
        pop(t.name());
        check_binder(t.name(), body.usage, t.mult(), t.loc());
        body.usage.erase(t.name());
        Type ty = Type::arrow(t.binder_type(), t.mult(), body.type);
        return finish(t, ty, body.usage,
                      [&] { return Term::lam(t.mult(), t.name(), t.binder_type(), *body.typed, t.loc()); });
      }
      case Term::Kind::App: {
        Out f = go(t.fun());
        if (f.type.kind() != Type::Kind::Arrow)
          fail(Diagnostic::Kind::TypeMismatch, t.loc(), "applying a non-function of type " + show(f.type));
        Out a = go(t.arg());
        if (!types_equal(f.type.dom(), a.type))
          fail(Diagnostic::Kind::TypeMismatch, t.arg().loc(),
               "argument has type " + show(a.type) + ", expected " + show(f.type.dom()));
        Usage u = usage_add(f.usage, usage_scale(f.type.mult(), a.usage));
        MultExpr arrow = f.type.mult();
        return finish(
            t, f.type.cod(), u, [&] { return Term::app(*f.typed, *a.typed, t.loc()); }, arrow);
      }
      case Term::Kind::MultLam: {
        const std::string& p = t.name();
        check_fresh(p, t.loc());
        ++mvars_[p];
        Out body = go(t.body());
        if (--mvars_[p] == 0) mvars_.erase(p);
        Usage u;
        for (const auto& [x, m] : body.usage.entries()) u.set(x, m.vars().count(p) ? MultNF::omega() : m);
        return finish(t, Type::forall(p, body.type), u, [&] { return Term::mult_lam(p, *body.typed, t.loc()); });
      }
      case Term::Kind::MultApp: {
        wf_mult(t.mult(), t.loc());
        Out f = go(t.fun());
        if (f.type.kind() != Type::Kind::ForallMult)
          fail(Diagnostic::Kind::TypeMismatch, t.loc(),
               "multiplicity application to a term of type " + show(f.type));
        Type ty = subst_mult(f.type.body(), f.type.name(), t.mult());
        return finish(t, ty, f.usage, [&] { return Term::mult_app(*f.typed, t.mult(), t.loc()); });
      }
      case Term::Kind::Con:
        return go_con(t);
      case Term::Kind::Case:
        return go_case(t);
      case Term::Kind::Let:
        return go_let(t);
      case Term::Kind::Prim:
        return go_prim(t);
    }
    fail(Diagnostic::Kind::TypeMismatch, t.loc(), "unsupported term");
  }

  void check_fresh(const std::string& p, SrcLoc loc) {
    if (mvars_.count(p))
      fail(Diagnostic::Kind::FreshnessViolation, loc, "multiplicity variable '" + p + "' is already in scope");
    for (const auto& [x, stack] : scope_) {
      for (const auto& b : stack) {
        if (free_mult_vars(b.type).count(p) || free_mult_vars(b.mult).count(p))
          fail(Diagnostic::Kind::FreshnessViolation, loc,
               "multiplicity variable '" + p + "' occurs in the type of '" + x + "'");
      }
    }
  }

  void check_binder(const std::string& x, const Usage& u, const MultExpr& declared, SrcLoc loc) {
    UsageMult used = u.get(x);
    if (!sub_usage(used, declared))
      fail(Diagnostic::Kind::LinearityMismatch, loc,
           "'" + x + "' is used at multiplicity " + to_string(used) + " but bound at " + to_string(declared));
  }

  void check_binder(const std::string& x, const Usage& u, const MultNF& declared, SrcLoc loc) {
    check_binder(x, u, declared.render(), loc);
  }

 private:
  const DeclTable& decls_;
  bool annotate_;
  std::map<std::string, std::vector<TypeEnv::Binding>> scope_;
  std::map<std::string, int> mvars_;
  const std::map<std::string, Type>* ambient_ = nullptr;

  template <typename Build>
  Out finish(const Term& t, Type ty, Usage u, Build&& build, std::optional<MultExpr> arrow = std::nullopt) {
    Out o{std::move(ty), std::move(u), std::nullopt};
    if (annotate_) o.typed = build().annotated(o.type, std::move(arrow));
    (void)t;
    return o;
  }

  Type lookup(const std::string& x, SrcLoc loc) {
    auto it = scope_.find(x);
    if (it != scope_.end() && !it->second.empty()) return it->second.back().type;
    if (ambient_) {
      auto a = ambient_->find(x);
      if (a != ambient_->end()) return a->second;
    }
    fail(Diagnostic::Kind::UnboundVariable, loc, "unbound variable '" + x + "'");
  }

  void push(const std::string& x, const Type& ty, const MultExpr& m) { scope_[x].push_back({ty, m}); }
  void pop(const std::string& x) {
    auto it = scope_.find(x);
    it->second.pop_back();
    if (it->second.empty()) scope_.erase(it);
  }

  const DataDecl& need_decl(const std::string& name, std::size_t mults, std::size_t types, SrcLoc loc) {
    const DataDecl* d = decls_.find_type(name);
    if (!d || d->mult_params.size() != mults || d->type_params.size() != types)
      fail(Diagnostic::Kind::UnboundVariable, loc, "primitive needs the datatype '" + name + "'");
    return *d;
  }

  Out go_con(const Term& t) {
    auto info = decls_.find_con(t.name());
    if (!info) fail(Diagnostic::Kind::UnboundVariable, t.loc(), "unknown constructor '" + t.name() + "'");
    const DataDecl& d = *info->decl;
    if (t.type_inst().size() != d.type_params.size() || t.mult_inst().size() != d.mult_params.size())
      fail(Diagnostic::Kind::ArityMismatch, t.loc(),
           "constructor '" + t.name() + "' expects " + std::to_string(d.type_params.size()) + " type and " +
               std::to_string(d.mult_params.size()) + " multiplicity arguments");
    for (const auto& ty : t.type_inst()) wf(ty, t.loc());
    for (const auto& m : t.mult_inst()) wf_mult(m, t.loc());
    auto fields = decls_.instantiate_fields(*info, t.type_inst(), t.mult_inst());
    if (fields.size() != t.args().size())
      fail(Diagnostic::Kind::ArityMismatch, t.loc(),
           "constructor '" + t.name() + "' takes " + std::to_string(fields.size()) + " arguments, given " +
               std::to_string(t.args().size()));
    Usage u;
    std::vector<Term> typed;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      Out a = go(t.args()[i]);
      if (!types_equal(a.type, fields[i].first))
        fail(Diagnostic::Kind::TypeMismatch, t.args()[i].loc(),
             "field " + std::to_string(i + 1) + " of '" + t.name() + "' has type " + show(a.type) + ", expected " +
                 show(fields[i].first));
      u = usage_add(u, usage_scale(fields[i].second, a.usage));
      if (annotate_) typed.push_back(*a.typed);
    }
    Type ty = Type::data(d.name, t.mult_inst(), t.type_inst());
    return finish(t, ty, u, [&] { return Term::con(t.name(), t.type_inst(), t.mult_inst(), typed, t.loc()); });
  }

  Out go_case(const Term& t) {
    wf_mult(t.mult(), t.loc());
    Out s = go(t.scrut());
    if (s.type.kind() != Type::Kind::Data)
      fail(Diagnostic::Kind::TypeMismatch, t.scrut().loc(), "case on a value of type " + show(s.type));
    const DataDecl* d = decls_.find_type(s.type.name());
    if (!d) fail(Diagnostic::Kind::UnboundVariable, t.loc(), "unknown datatype '" + s.type.name() + "'");
    if (t.branches().empty()) fail(Diagnostic::Kind::TypeMismatch, t.loc(), "case without branches");
    std::optional<Type> result;
    std::optional<Usage> joined;
    std::set<std::string> seen;
    std::vector<Branch> typed;
    MultNF pi = mult_normalize(t.mult());
    for (const auto& br : t.branches()) {
      auto info = decls_.find_con(br.con);
      if (!info || info->decl->name != d->name)
        fail(Diagnostic::Kind::TypeMismatch, br.body.loc(),
             "constructor '" + br.con + "' does not belong to '" + d->name + "'");
      if (!seen.insert(br.con).second)
        fail(Diagnostic::Kind::TypeMismatch, br.body.loc(), "duplicate branch for '" + br.con + "'");
      auto fields = decls_.instantiate_fields(*info, s.type.type_args(), s.type.mult_args());
      if (fields.size() != br.binders.size())
        fail(Diagnostic::Kind::ArityMismatch, br.body.loc(),
             "pattern '" + br.con + "' binds " + std::to_string(br.binders.size()) + " variables, expected " +
                 std::to_string(fields.size()));
      std::vector<MultNF> ms;
      for (std::size_t i = 0; i < fields.size(); ++i) {
        MultNF m = pi * mult_normalize(fields[i].second);
        ms.push_back(m);
        push(br.binders[i], fields[i].first, m.render());
      }
      Out body = go(br.body);
      for (std::size_t i = fields.size(); i-- > 0;) pop(br.binders[i]);
      for (std::size_t i = 0; i < fields.size(); ++i) {
        check_binder(br.binders[i], body.usage, ms[i], br.body.loc());
        body.usage.erase(br.binders[i]);
      }
      if (!result) {
        result = body.type;
      } else if (!types_equal(*result, body.type)) {
        fail(Diagnostic::Kind::TypeMismatch, br.body.loc(),
             "branch has type " + show(body.type) + ", expected " + show(*result));
      }
      if (!joined) {
        joined = body.usage;
      } else {
        auto j = usage_join(*joined, body.usage);
        if (!j) {
          const auto& c = j.error();
          fail(Diagnostic::Kind::UnjoinableUsage, br.body.loc(),
               "branches use '" + c.var + "' at " + to_string(c.left) + " and " + to_string(c.right));
        }
        joined = *j;
      }
      if (annotate_) typed.push_back(Branch{br.con, br.binders, *body.typed});
    }
    Usage u = usage_add(usage_scale(pi, s.usage), *joined);
    return finish(t, *result, u, [&] { return Term::case_(t.mult(), *s.typed, typed, t.loc()); });
  }

  Out go_let(const Term& t) {
    const auto& bs = t.bindings();
    if (bs.empty()) fail(Diagnostic::Kind::TypeMismatch, t.loc(), "empty let");
    std::set<std::string> names;
    for (const auto& b : bs) {
      if (!names.insert(b.name).second)
        fail(Diagnostic::Kind::TypeMismatch, t.loc(), "duplicate binder '" + b.name + "' in let");
      wf_mult(b.mult, t.loc());
      wf(b.type, t.loc());
      if (t.recursive() && !mult_normalize(b.mult).is_omega())
        fail(Diagnostic::Kind::LinearityMismatch, t.loc(),
             "recursive binding '" + b.name + "' must have multiplicity w, found " + to_string(b.mult));
    }
    auto bind_all = [&] {
      for (const auto& b : bs) push(b.name, b.type, b.mult);
    };
    auto unbind_all = [&] {
      for (auto it = bs.rbegin(); it != bs.rend(); ++it) pop(it->name);
    };
    if (t.recursive()) bind_all();
    Usage rhs_usage;
    std::vector<LetBinding> typed;
    for (const auto& b : bs) {
      Out r = go(b.rhs);
      if (!types_equal(r.type, b.type))
        fail(Diagnostic::Kind::TypeMismatch, b.rhs.loc(),
             "'" + b.name + "' is declared " + show(b.type) + " but its definition has type " + show(r.type));
      rhs_usage = usage_add(rhs_usage, usage_scale(b.mult, r.usage));
      if (annotate_) typed.push_back(LetBinding{b.name, b.mult, b.type, *r.typed});
    }
    if (!t.recursive()) bind_all();
    Out body = go(t.body());
    unbind_all();
    Usage u;
    if (t.recursive()) {
      u = usage_add(body.usage, rhs_usage);
      for (const auto& b : bs) u.erase(b.name);
    } else {
      for (const auto& b : bs) {
        check_binder(b.name, body.usage, b.mult, t.loc());
        body.usage.erase(b.name);
      }
      u = usage_add(body.usage, rhs_usage);
    }
    return finish(t, body.type, u, [&] { return Term::let(typed, t.recursive(), *body.typed, t.loc()); });
  }

  Out go_prim(const Term& t) {
    PrimOp op = t.prim_op();
    auto mults = prim_arg_mults(op);
    if (t.args().size() != mults.size())
      fail(Diagnostic::Kind::ArityMismatch, t.loc(),
           "'" + prim_name(op) + "' takes " + std::to_string(mults.size()) + " arguments, given " +
               std::to_string(t.args().size()));
    std::vector<Out> args;
    for (const auto& a : t.args()) args.push_back(go(a));
    auto expect = [&](std::size_t i, const Type& want) {
      if (!types_equal(args[i].type, want))
        fail(Diagnostic::Kind::TypeMismatch, t.args()[i].loc(),
             "argument " + std::to_string(i + 1) + " of '" + prim_name(op) + "' has type " + show(args[i].type) +
                 ", expected " + show(want));
    };
    auto expect_kind = [&](std::size_t i, Type::Kind k, const char* what) {
      if (args[i].type.kind() != k)
        fail(Diagnostic::Kind::TypeMismatch, t.args()[i].loc(),
             "argument " + std::to_string(i + 1) + " of '" + prim_name(op) + "' has type " + show(args[i].type) +
                 ", expected " + what);
    };
    std::optional<Type> result;
    switch (op) {
      case PrimOp::NewMArray: {
        need_decl("Unrestricted", 0, 1, t.loc());
        expect(0, Type::int_());
        const Type& elem = args[1].type;
        const Type& f = args[2].type;
        bool ok = f.kind() == Type::Kind::Arrow && mult_normalize(f.mult()).is_one() &&
                  types_equal(f.dom(), Type::marray(elem)) && f.cod().kind() == Type::Kind::Data &&
                  f.cod().name() == "Unrestricted" && f.cod().type_args().size() == 1;
        if (!ok)
          fail(Diagnostic::Kind::TypeMismatch, t.args()[2].loc(),
               "argument 3 of 'newMArray' has type " + show(f) + ", expected " +
                   show(Type::arrow(Type::marray(elem), MultExpr::one(),
                                    Type::data("Unrestricted", {}, {Type::var("b")}))));
        result = f.cod();
        break;
      }
      case PrimOp::Write:
        expect_kind(0, Type::Kind::MArray, "an MArray");
        expect(1, Type::int_());
        expect(2, args[0].type.elem());
        result = args[0].type;
        break;
      case PrimOp::Freeze:
        need_decl("Unrestricted", 0, 1, t.loc());
        expect_kind(0, Type::Kind::MArray, "an MArray");
        result = Type::data("Unrestricted", {}, {Type::array(args[0].type.elem())});
        break;
      case PrimOp::Index:
        expect_kind(0, Type::Kind::Array, "an Array");
        expect(1, Type::int_());
        result = args[0].type.elem();
        break;
      case PrimOp::Add:
      case PrimOp::Sub:
      case PrimOp::Mul:
        expect(0, Type::int_());
        expect(1, Type::int_());
        result = Type::int_();
        break;
      case PrimOp::Eq:
      case PrimOp::Lt:
        need_decl("Bool", 0, 0, t.loc());
        expect(0, Type::int_());
        expect(1, Type::int_());
        result = Type::data("Bool", {}, {});
        break;
    }
    Usage u;
    std::vector<Term> typed;
    for (std::size_t i = 0; i < args.size(); ++i) {
      u = usage_add(u, usage_scale(mults[i], args[i].usage));
      if (annotate_) typed.push_back(*args[i].typed);
    }
    return finish(t, *result, u, [&] { return Term::prim(op, typed, t.loc()); });
  }
};

template <typename T, typename F>
Result<T, Diagnostics> guarded(F&& f) {
  try {
    return f();
  } catch (const CheckError& e) {
    return Diagnostics{e.diag};
  }
}

}  // namespace

Result<Inferred, Diagnostics> infer(const TypeEnv& env, const Term& t) {
  return guarded<Inferred>([&] {
    Checker c(env.decls(), true);
    c.load(env);
    auto out = c.go(t);
    return Inferred{out.type, out.usage, *out.typed};
  });
}

Result<Type, Diagnostics> check_judgement(const TypeEnv& env, const Term& t) {
  return guarded<Type>([&] {
    Checker c(env.decls(), false);
    c.load(env);
    auto out = c.go(t);
    std::set<std::string> done;
    const auto& bs = env.bindings();
    for (auto it = bs.rbegin(); it != bs.rend(); ++it) {
      if (!done.insert(it->first).second) continue;
      c.check_binder(it->first, out.usage, it->second.mult, t.loc());
    }
    return out.type;
  });
}

Result<std::monostate, Diagnostics> check_datadecl(const DataDecl& d, const DeclTable& table) {
  Diagnostics diags;
  auto malformed = [&](SrcLoc loc, std::string msg) {
    diags.push_back(Diagnostic{Diagnostic::Kind::MalformedDecl, loc, std::move(msg)});
  };
  std::set<std::string> mparams(d.mult_params.begin(), d.mult_params.end());
  std::set<std::string> tparams(d.type_params.begin(), d.type_params.end());
  if (mparams.size() != d.mult_params.size()) malformed(d.loc, "duplicate multiplicity parameter in '" + d.name + "'");
  if (tparams.size() != d.type_params.size()) malformed(d.loc, "duplicate type parameter in '" + d.name + "'");
  std::set<std::string> seen;
  for (const auto& c : d.constructors) {
    if (!seen.insert(c.name).second) malformed(c.loc, "duplicate constructor '" + c.name + "'");
    Checker chk(table, false);
    TypeEnv env(table);
    for (const auto& p : d.mult_params) env.bind_mult_var(p);
    chk.load(env);
    for (const auto& [ty, m] : c.fields) {
      try {
        chk.wf_mult(m, c.loc, true);
        chk.wf(ty, c.loc, &tparams);
      } catch (const CheckError& e) {
        diags.push_back(e.diag);
        diags.back().kind = Diagnostic::Kind::MalformedDecl;
        diags.back().message = "in constructor '" + c.name + "': " + diags.back().message;
      }
    }
  }
  if (!diags.empty()) return diags;
  return std::monostate{};
}

Term elaborate_program(const std::vector<Def>& defs, const Term& main) {
  std::vector<LetBinding> shared;
  std::vector<const Def*> linear;
  for (const auto& d : defs) {
    if (mult_normalize(d.mult).is_omega())
      shared.push_back(LetBinding{d.name, d.mult, d.type, d.body});
    else
      linear.push_back(&d);
  }
  Term body = main;
  for (auto it = linear.rbegin(); it != linear.rend(); ++it)
    body = Term::let({LetBinding{(*it)->name, (*it)->mult, (*it)->type, (*it)->body}}, false, body, (*it)->loc);
  if (!shared.empty()) body = Term::let(std::move(shared), true, body, defs.front().loc);
  return body;
}

Result<CheckedProgram, Diagnostics> check_program(const std::vector<DataDecl>& decls, const std::vector<Def>& defs,
                                                  const Term& main) {
  Diagnostics diags;
  DeclTable table;
  std::set<std::string> cons;
  for (const auto& d : decls) {
    if (table.find_type(d.name))
      diags.push_back(Diagnostic{Diagnostic::Kind::MalformedDecl, d.loc, "duplicate datatype '" + d.name + "'"});
    for (const auto& c : d.constructors)
      if (!cons.insert(c.name).second && table.find_con(c.name))
        diags.push_back(
            Diagnostic{Diagnostic::Kind::MalformedDecl, c.loc, "constructor '" + c.name + "' is declared twice"});
    table.add(d);
  }
  for (const auto& d : decls) {
    auto r = check_datadecl(d, table);
    if (!r) diags.insert(diags.end(), r.error().begin(), r.error().end());
  }
  std::set<std::string> def_names;
  for (const auto& d : defs)
    if (!def_names.insert(d.name).second)
      diags.push_back(Diagnostic{Diagnostic::Kind::TypeMismatch, d.loc, "duplicate definition '" + d.name + "'"});
  if (!diags.empty()) return diags;
  Term elaborated = elaborate_program(defs, main);
  TypeEnv env(table);
  auto r = infer(env, elaborated);
  if (!r) return r.error();
  return CheckedProgram{std::move(table), elaborated, r->typed, r->type};
}

}  // namespace lq
