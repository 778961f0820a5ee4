#include "lq/translate.hpp"

#include <functional>

namespace lq {

namespace {

class Translator {
 public:
  Translator(const DeclTable& decls, bool typed, std::uint64_t start) : decls_(decls), typed_(typed), next_(start) {}

  Term go(const Term& t) {
    switch (t.kind()) {
      case Term::Kind::Var:
      case Term::Kind::IntLit:
      case Term::Kind::Loc:
      case Term::Kind::ArrayLit:
        return t;
      case Term::Kind::Lam:
        return Term::lam(t.mult(), t.name(), t.binder_type(), go(t.body()), t.loc());
      case Term::Kind::MultLam:
        return Term::mult_lam(t.name(), go(t.body()), t.loc());
      case Term::Kind::MultApp:
        return Term::mult_app(go(t.fun()), t.mult(), t.loc());
      case Term::Kind::App: {
        MultExpr pi = MultExpr::omega();
        Type result = Type::hole();
        if (typed_ && t.type_annotation()) {
          pi = *t.arrow_annotation();
          result = *t.type_annotation();
        }
        Term fun = go(t.fun());
        if (t.arg().kind() == Term::Kind::Var)
          return Term::app(fun, t.arg(), t.loc()).annotated(result, pi);
        std::string y = fresh();
        Term app = Term::app(fun, Term::var(y, t.loc()), t.loc()).annotated(result, pi);
        return Term::let({LetBinding{y, pi, type_of(t.arg()), go(t.arg())}}, false, app, t.loc());
      }
      case Term::Kind::Con: {
        std::vector<MultExpr> mults;
        if (auto info = decls_.find_con(t.name());
            info && info->con().fields.size() == t.args().size() &&
            info->decl->mult_params.size() == t.mult_inst().size() &&
            info->decl->type_params.size() == t.type_inst().size()) {
          for (const auto& f : decls_.instantiate_fields(*info, t.type_inst(), t.mult_inst()))
            mults.push_back(f.second);
        } else {
          mults.assign(t.args().size(), MultExpr::omega());
        }
        return bind_args(t, mults, [&](std::vector<Term> args) {
          return Term::con(t.name(), t.type_inst(), t.mult_inst(), std::move(args), t.loc());
        });
      }
      case Term::Kind::Prim: {
        auto mults = prim_arg_mults(t.prim_op());
        mults.resize(t.args().size(), MultExpr::omega());
        return bind_args(t, mults,
                         [&](std::vector<Term> args) { return Term::prim(t.prim_op(), std::move(args), t.loc()); });
      }
      case Term::Kind::Case: {
        std::vector<Branch> branches;
        for (const auto& b : t.branches()) branches.push_back(Branch{b.con, b.binders, go(b.body)});
        return Term::case_(t.mult(), go(t.scrut()), std::move(branches), t.loc());
      }
      case Term::Kind::Let: {
        std::vector<LetBinding> bs;
        for (const auto& b : t.bindings()) bs.push_back(LetBinding{b.name, b.mult, b.type, go(b.rhs)});
        return Term::let(std::move(bs), t.recursive(), go(t.body()), t.loc());
      }
    }
    return t;
  }

 private:
  const DeclTable& decls_;
  bool typed_;
  std::uint64_t next_;

  std::string fresh() { return std::string(1, kFreshPrefix) + std::to_string(next_++); }

  Type type_of(const Term& t) const {
    if (typed_ && t.type_annotation()) return *t.type_annotation();
    return Type::hole();
  }

  Term bind_args(const Term& t, const std::vector<MultExpr>& mults,
                 const std::function<Term(std::vector<Term>)>& rebuild) {
    std::vector<LetBinding> bs;
    std::vector<Term> args;
    for (std::size_t i = 0; i < t.args().size(); ++i) {
      const Term& a = t.args()[i];
      if (a.kind() == Term::Kind::Var) {
        args.push_back(a);
        continue;
      }
      std::string x = fresh();
      bs.push_back(LetBinding{x, mults[i], type_of(a), go(a)});
      args.push_back(Term::var(x, a.loc()));
    }
    Term body = rebuild(std::move(args));
    if (bs.empty()) return body;
    return Term::let(std::move(bs), false, body, t.loc());
  }
};

// Largest counter already used by a fresh name in `t`, so a second
// translation never reuses one.
void scan_fresh(const Term& t, std::uint64_t& next) {
  auto note = [&](const std::string& name) {
    if (name.size() > 1 && name[0] == kFreshPrefix) {
      try {
        next = std::max<std::uint64_t>(next, std::stoull(name.substr(1)) + 1);
      } catch (const std::exception&) {
      }
    }
  };
  switch (t.kind()) {
    case Term::Kind::Var:
      note(t.name());
      return;
    case Term::Kind::Lam:
      note(t.name());
      scan_fresh(t.body(), next);
      return;
    case Term::Kind::MultLam:
    case Term::Kind::MultApp:
      scan_fresh(t.body(), next);
      return;
    case Term::Kind::App:
      scan_fresh(t.fun(), next);
      scan_fresh(t.arg(), next);
      return;
    case Term::Kind::Con:
    case Term::Kind::Prim:
      for (const auto& a : t.args()) scan_fresh(a, next);
      return;
    case Term::Kind::Case:
      scan_fresh(t.scrut(), next);
      for (const auto& b : t.branches()) {
        for (const auto& x : b.binders) note(x);
        scan_fresh(b.body, next);
      }
      return;
    case Term::Kind::Let:
      for (const auto& b : t.bindings()) {
        note(b.name);
        scan_fresh(b.rhs, next);
      }
      scan_fresh(t.body(), next);
      return;
    default:
      return;
  }
}

}  // namespace

Term to_sharing(const Term& typed, const DeclTable& decls) {
  std::uint64_t start = 1;
  scan_fresh(typed, start);
  return Translator(decls, true, start).go(typed);
}

Term to_sharing_untyped(const Term& t, const DeclTable& decls) {
  std::uint64_t start = 1;
  scan_fresh(t, start);
  return Translator(decls, false, start).go(t);
}

bool is_sharing_form(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var:
    case Term::Kind::IntLit:
    case Term::Kind::Loc:
    case Term::Kind::ArrayLit:
      return true;
    case Term::Kind::Lam:
    case Term::Kind::MultLam:
    case Term::Kind::MultApp:
      return is_sharing_form(t.body());
    case Term::Kind::App:
      return t.arg().kind() == Term::Kind::Var && is_sharing_form(t.fun());
    case Term::Kind::Con:
    case Term::Kind::Prim:
      for (const auto& a : t.args())
        if (a.kind() != Term::Kind::Var) return false;
      return true;
    case Term::Kind::Case:
      if (!is_sharing_form(t.scrut())) return false;
      for (const auto& b : t.branches())
        if (!is_sharing_form(b.body)) return false;
      return true;
    case Term::Kind::Let:
      for (const auto& b : t.bindings())
        if (!is_sharing_form(b.rhs)) return false;
      return is_sharing_form(t.body());
  }
  return false;
}

}  // namespace lq
