#include "lq/syntax.hpp"

#include <cassert>
#include <utility>

namespace lq {

// ---------------------------------------------------------------------------
// Types

struct Type::Node {
  Kind kind;
  std::string name;
  std::optional<MultExpr> mult;
  std::vector<Type> kids;
  std::vector<MultExpr> mult_args;
};

Type Type::int_() {
  static const auto n = std::make_shared<const Node>(Node{Kind::Int, {}, {}, {}, {}});
  return Type(n);
}

Type Type::arrow(Type dom, MultExpr mult, Type cod) {
  return Type(std::make_shared<const Node>(
      Node{Kind::Arrow, {}, std::move(mult), {std::move(dom), std::move(cod)}, {}}));
}

Type Type::forall(std::string var, Type body) {
  return Type(std::make_shared<const Node>(Node{Kind::ForallMult, std::move(var), {}, {std::move(body)}, {}}));
}

Type Type::data(std::string name, std::vector<MultExpr> mults, std::vector<Type> types) {
  return Type(std::make_shared<const Node>(
      Node{Kind::Data, std::move(name), {}, std::move(types), std::move(mults)}));
}

Type Type::marray(Type elem) {
  return Type(std::make_shared<const Node>(Node{Kind::MArray, {}, {}, {std::move(elem)}, {}}));
}

Type Type::array(Type elem) {
  return Type(std::make_shared<const Node>(Node{Kind::Array, {}, {}, {std::move(elem)}, {}}));
}

Type Type::var(std::string name) {
  return Type(std::make_shared<const Node>(Node{Kind::TypeVar, std::move(name), {}, {}, {}}));
}

Type Type::hole() {
  static const auto n = std::make_shared<const Node>(Node{Kind::Hole, {}, {}, {}, {}});
  return Type(n);
}

Type::Kind Type::kind() const { return node_->kind; }
const Type& Type::dom() const { return node_->kids.at(0); }
const MultExpr& Type::mult() const { return *node_->mult; }
const Type& Type::cod() const { return node_->kids.at(1); }
const std::string& Type::name() const { return node_->name; }
const Type& Type::body() const { return node_->kids.at(0); }
const Type& Type::elem() const { return node_->kids.at(0); }
const std::vector<MultExpr>& Type::mult_args() const { return node_->mult_args; }
const std::vector<Type>& Type::type_args() const { return node_->kids; }

bool Type::operator==(const Type& other) const {
  if (node_ == other.node_) return true;
  return kind() == other.kind() && node_->name == other.node_->name && node_->mult == other.node_->mult &&
         node_->kids == other.node_->kids && node_->mult_args == other.node_->mult_args;
}

namespace {

std::string fresh_binder(const std::string& base, const std::set<std::string>& avoid) {
  std::string candidate = base + "'";
  while (avoid.count(candidate)) candidate += "'";
  return candidate;
}

void collect_free_mult_vars(const Type& t, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (t.kind()) {
    case Type::Kind::Arrow:
      for (const auto& v : free_mult_vars(t.mult()))
        if (!bound.count(v)) out.insert(v);
      collect_free_mult_vars(t.dom(), bound, out);
      collect_free_mult_vars(t.cod(), bound, out);
      return;
    case Type::Kind::ForallMult: {
      bool inserted = bound.insert(t.name()).second;
      collect_free_mult_vars(t.body(), bound, out);
      if (inserted) bound.erase(t.name());
      return;
    }
    case Type::Kind::Data:
      for (const auto& m : t.mult_args())
        for (const auto& v : free_mult_vars(m))
          if (!bound.count(v)) out.insert(v);
      for (const auto& a : t.type_args()) collect_free_mult_vars(a, bound, out);
      return;
    case Type::Kind::MArray:
    case Type::Kind::Array:
      collect_free_mult_vars(t.elem(), bound, out);
      return;
    default:
      return;
  }
}

bool mults_equal_under(const MultExpr& a, const MultExpr& b,
                       const std::vector<std::pair<std::string, std::string>>& binders) {
  std::map<std::string, MultExpr> left, right;
  // Innermost binders shadow outer ones.
  for (std::size_t i = binders.size(); i-- > 0;) {
    auto canon = MultExpr::var("%b" + std::to_string(i));
    left.emplace(binders[i].first, canon);
    right.emplace(binders[i].second, canon);
  }
  return mult_equiv(mult_subst(a, left), mult_subst(b, right));
}

bool types_equal_under(const Type& a, const Type& b, std::vector<std::pair<std::string, std::string>>& binders) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Type::Kind::Int:
    case Type::Kind::Hole:
      return true;
    case Type::Kind::TypeVar:
      return a.name() == b.name();
    case Type::Kind::MArray:
    case Type::Kind::Array:
      return types_equal_under(a.elem(), b.elem(), binders);
    case Type::Kind::Arrow:
      return mults_equal_under(a.mult(), b.mult(), binders) && types_equal_under(a.dom(), b.dom(), binders) &&
             types_equal_under(a.cod(), b.cod(), binders);
    case Type::Kind::ForallMult: {
      binders.emplace_back(a.name(), b.name());
      bool eq = types_equal_under(a.body(), b.body(), binders);
      binders.pop_back();
      return eq;
    }
    case Type::Kind::Data: {
      if (a.name() != b.name() || a.mult_args().size() != b.mult_args().size() ||
          a.type_args().size() != b.type_args().size())
        return false;
      for (std::size_t i = 0; i < a.mult_args().size(); ++i)
        if (!mults_equal_under(a.mult_args()[i], b.mult_args()[i], binders)) return false;
      for (std::size_t i = 0; i < a.type_args().size(); ++i)
        if (!types_equal_under(a.type_args()[i], b.type_args()[i], binders)) return false;
      return true;
    }
  }
  return false;
}

}  // namespace

bool types_equal(const Type& a, const Type& b) {
  std::vector<std::pair<std::string, std::string>> binders;
  return types_equal_under(a, b, binders);
}

std::set<std::string> free_mult_vars(const Type& t) {
  std::set<std::string> bound, out;
  collect_free_mult_vars(t, bound, out);
  return out;
}

Type instantiate(const Type& t, const std::map<std::string, Type>& types,
                 const std::map<std::string, MultExpr>& mults) {
  switch (t.kind()) {
    case Type::Kind::Int:
    case Type::Kind::Hole:
      return t;
    case Type::Kind::TypeVar: {
      auto it = types.find(t.name());
      return it == types.end() ? t : it->second;
    }
    case Type::Kind::MArray:
      return Type::marray(instantiate(t.elem(), types, mults));
    case Type::Kind::Array:
      return Type::array(instantiate(t.elem(), types, mults));
    case Type::Kind::Arrow:
      return Type::arrow(instantiate(t.dom(), types, mults), mult_subst(t.mult(), mults),
                         instantiate(t.cod(), types, mults));
    case Type::Kind::Data: {
      std::vector<MultExpr> ms;
      for (const auto& m : t.mult_args()) ms.push_back(mult_subst(m, mults));
      std::vector<Type> ts;
      for (const auto& a : t.type_args()) ts.push_back(instantiate(a, types, mults));
      return Type::data(t.name(), std::move(ms), std::move(ts));
    }
    case Type::Kind::ForallMult: {
      auto inner = mults;
      inner.erase(t.name());
      std::set<std::string> incoming;
      for (const auto& [v, m] : inner)
        for (const auto& fv : free_mult_vars(m)) incoming.insert(fv);
      for (const auto& [v, ty] : types)
        for (const auto& fv : free_mult_vars(ty)) incoming.insert(fv);
      std::string binder = t.name();
      if (incoming.count(binder)) {
        auto avoid = incoming;
        for (const auto& fv : free_mult_vars(t.body())) avoid.insert(fv);
        binder = fresh_binder(binder, avoid);
        inner.emplace(t.name(), MultExpr::var(binder));
      }
      return Type::forall(binder, instantiate(t.body(), types, inner));
    }
  }
  return t;
}

Type subst_mult(const Type& t, const std::string& var, const MultExpr& by) {
  return instantiate(t, {}, {{var, by}});
}

// ---------------------------------------------------------------------------
// Primitives

std::string prim_name(PrimOp op) {
  switch (op) {
    case PrimOp::NewMArray: return "newMArray";
    case PrimOp::Write: return "write";
    case PrimOp::Freeze: return "freeze";
    case PrimOp::Index: return "index";
    case PrimOp::Add: return "add";
    case PrimOp::Sub: return "sub";
    case PrimOp::Mul: return "mul";
    case PrimOp::Eq: return "eq";
    case PrimOp::Lt: return "lt";
  }
  return "?";
}

std::optional<PrimOp> prim_from_name(const std::string& name) {
  static const std::map<std::string, PrimOp> table = {
      {"newMArray", PrimOp::NewMArray}, {"write", PrimOp::Write}, {"freeze", PrimOp::Freeze},
      {"index", PrimOp::Index},         {"add", PrimOp::Add},     {"sub", PrimOp::Sub},
      {"mul", PrimOp::Mul},             {"eq", PrimOp::Eq},       {"lt", PrimOp::Lt}};
  auto it = table.find(name);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

std::size_t prim_arity(PrimOp op) { return prim_arg_mults(op).size(); }

std::vector<MultExpr> prim_arg_mults(PrimOp op) {
  auto one = MultExpr::one();
  auto w = MultExpr::omega();
  switch (op) {
    case PrimOp::NewMArray: return {one, w, one};
    case PrimOp::Write: return {one, one, w};
    case PrimOp::Freeze: return {one};
    case PrimOp::Index: return {w, one};
    default: return {one, one};
  }
}

// ---------------------------------------------------------------------------
// Terms

struct Term::Node {
  Kind kind = Kind::Var;
  SrcLoc loc;
  std::string name;
  std::optional<MultExpr> mult;
  std::optional<Type> type;
  std::vector<Term> kids;
  std::vector<Type> type_inst;
  std::vector<MultExpr> mult_inst;
  std::vector<Branch> branches;
  std::vector<LetBinding> bindings;
  bool recursive = false;
  bool frozen = false;
  std::int64_t value = 0;
  std::uint64_t id = 0;
  PrimOp prim = PrimOp::Add;
  std::vector<std::string> elems;
  std::optional<Type> ann_type;
  std::optional<MultExpr> ann_arrow;
};

Term Term::make(Node n) { return Term(std::make_shared<const Node>(std::move(n))); }

Term Term::var(std::string x, SrcLoc loc) {
  Node n;
  n.kind = Kind::Var;
  n.loc = loc;
  n.name = std::move(x);
  return make(std::move(n));
}

Term Term::lam(MultExpr mult, std::string x, Type type, Term body, SrcLoc loc) {
  Node n;
  n.kind = Kind::Lam;
  n.loc = loc;
  n.mult = std::move(mult);
  n.name = std::move(x);
  n.type = std::move(type);
  n.kids = {std::move(body)};
  return make(std::move(n));
}

Term Term::app(Term fun, Term arg, SrcLoc loc) {
  Node n;
  n.kind = Kind::App;
  n.loc = loc;
  n.kids = {std::move(fun), std::move(arg)};
  return make(std::move(n));
}

Term Term::mult_lam(std::string p, Term body, SrcLoc loc) {
  Node n;
  n.kind = Kind::MultLam;
  n.loc = loc;
  n.name = std::move(p);
  n.kids = {std::move(body)};
  return make(std::move(n));
}

Term Term::mult_app(Term fun, MultExpr mult, SrcLoc loc) {
  Node n;
  n.kind = Kind::MultApp;
  n.loc = loc;
  n.mult = std::move(mult);
  n.kids = {std::move(fun)};
  return make(std::move(n));
}

Term Term::con(std::string name, std::vector<Type> type_inst, std::vector<MultExpr> mult_inst,
               std::vector<Term> args, SrcLoc loc) {
  Node n;
  n.kind = Kind::Con;
  n.loc = loc;
  n.name = std::move(name);
  n.type_inst = std::move(type_inst);
  n.mult_inst = std::move(mult_inst);
  n.kids = std::move(args);
  return make(std::move(n));
}

Term Term::case_(MultExpr mult, Term scrut, std::vector<Branch> branches, SrcLoc loc) {
  Node n;
  n.kind = Kind::Case;
  n.loc = loc;
  n.mult = std::move(mult);
  n.kids = {std::move(scrut)};
  n.branches = std::move(branches);
  return make(std::move(n));
}

Term Term::let(std::vector<LetBinding> bindings, bool recursive, Term body, SrcLoc loc) {
  Node n;
  n.kind = Kind::Let;
  n.loc = loc;
  n.bindings = std::move(bindings);
  n.recursive = recursive;
  n.kids = {std::move(body)};
  return make(std::move(n));
}

Term Term::int_lit(std::int64_t value, SrcLoc loc) {
  Node n;
  n.kind = Kind::IntLit;
  n.loc = loc;
  n.value = value;
  return make(std::move(n));
}

Term Term::prim(PrimOp op, std::vector<Term> args, SrcLoc loc) {
  Node n;
  n.kind = Kind::Prim;
  n.loc = loc;
  n.prim = op;
  n.kids = std::move(args);
  return make(std::move(n));
}

Term Term::loc(std::string name) {
  Node n;
  n.kind = Kind::Loc;
  n.name = std::move(name);
  return make(std::move(n));
}

Term Term::array_lit(Type elem, bool frozen, std::vector<std::string> elems, std::uint64_t id) {
  Node n;
  n.kind = Kind::ArrayLit;
  n.type = std::move(elem);
  n.frozen = frozen;
  n.elems = std::move(elems);
  n.id = id;
  return make(std::move(n));
}

Term::Kind Term::kind() const { return node_->kind; }
SrcLoc Term::loc() const { return node_->loc; }
const std::string& Term::name() const { return node_->name; }
const MultExpr& Term::mult() const { return *node_->mult; }
const Type& Term::binder_type() const { return *node_->type; }
const Term& Term::body() const { return node_->kids.at(0); }
const Term& Term::fun() const { return node_->kids.at(0); }
const Term& Term::arg() const { return node_->kids.at(1); }
const Term& Term::scrut() const { return node_->kids.at(0); }
const std::vector<Term>& Term::args() const { return node_->kids; }
const std::vector<Type>& Term::type_inst() const { return node_->type_inst; }
const std::vector<MultExpr>& Term::mult_inst() const { return node_->mult_inst; }
const std::vector<Branch>& Term::branches() const { return node_->branches; }
const std::vector<LetBinding>& Term::bindings() const { return node_->bindings; }
bool Term::recursive() const { return node_->recursive; }
std::int64_t Term::int_value() const { return node_->value; }
PrimOp Term::prim_op() const { return node_->prim; }
const Type& Term::elem_type() const { return *node_->type; }
bool Term::frozen() const { return node_->frozen; }
const std::vector<std::string>& Term::elems() const { return node_->elems; }
std::uint64_t Term::array_id() const { return node_->id; }
const std::optional<Type>& Term::type_annotation() const { return node_->ann_type; }
const std::optional<MultExpr>& Term::arrow_annotation() const { return node_->ann_arrow; }

Term Term::annotated(Type type, std::optional<MultExpr> arrow) const {
  Node n = *node_;
  n.ann_type = std::move(type);
  n.ann_arrow = std::move(arrow);
  return make(std::move(n));
}

Term Term::without_annotations() const {
  Node n = *node_;
  n.ann_type.reset();
  n.ann_arrow.reset();
  for (auto& k : n.kids) k = k.without_annotations();
  for (auto& b : n.branches) b.body = b.body.without_annotations();
  for (auto& b : n.bindings) b.rhs = b.rhs.without_annotations();
  return make(std::move(n));
}

bool Term::is_value() const {
  switch (kind()) {
    case Kind::Lam:
    case Kind::MultLam:
    case Kind::IntLit:
    case Kind::Loc:
    case Kind::ArrayLit:
      return true;
    case Kind::Con:
      for (const auto& a : args())
        if (a.kind() != Kind::Var) return false;
      return true;
    default:
      return false;
  }
}

bool Term::equals(const Term& other, bool compare_annotations) const {
  if (node_ == other.node_) return true;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (a.kind != b.kind || a.name != b.name || a.mult != b.mult || a.type != b.type ||
      a.type_inst != b.type_inst || a.mult_inst != b.mult_inst || a.recursive != b.recursive ||
      a.frozen != b.frozen || a.value != b.value || a.id != b.id || a.prim != b.prim || a.elems != b.elems)
    return false;
  if (compare_annotations && (a.ann_type != b.ann_type || a.ann_arrow != b.ann_arrow)) return false;
  if (a.kids.size() != b.kids.size() || a.branches.size() != b.branches.size() ||
      a.bindings.size() != b.bindings.size())
    return false;
  for (std::size_t i = 0; i < a.kids.size(); ++i)
    if (!a.kids[i].equals(b.kids[i], compare_annotations)) return false;
  for (std::size_t i = 0; i < a.branches.size(); ++i) {
    const auto& x = a.branches[i];
    const auto& y = b.branches[i];
    if (x.con != y.con || x.binders != y.binders || !x.body.equals(y.body, compare_annotations)) return false;
  }
  for (std::size_t i = 0; i < a.bindings.size(); ++i) {
    const auto& x = a.bindings[i];
    const auto& y = b.bindings[i];
    if (x.name != y.name || !(x.mult == y.mult) || !(x.type == y.type) ||
        !x.rhs.equals(y.rhs, compare_annotations))
      return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Free variables and substitution

namespace {

void collect_free_vars(const Term& t, std::set<std::string>& bound, std::set<std::string>& out) {
  auto with_bound = [&](const std::vector<std::string>& names, auto&& fn) {
    std::vector<std::string> added;
    for (const auto& n : names)
      if (bound.insert(n).second) added.push_back(n);
    fn();
    for (const auto& n : added) bound.erase(n);
  };
  switch (t.kind()) {
    case Term::Kind::Var:
      if (!bound.count(t.name())) out.insert(t.name());
      return;
    case Term::Kind::Lam:
      with_bound({t.name()}, [&] { collect_free_vars(t.body(), bound, out); });
      return;
    case Term::Kind::App:
      collect_free_vars(t.fun(), bound, out);
      collect_free_vars(t.arg(), bound, out);
      return;
    case Term::Kind::MultLam:
    case Term::Kind::MultApp:
      collect_free_vars(t.body(), bound, out);
      return;
    case Term::Kind::Con:
    case Term::Kind::Prim:
      for (const auto& a : t.args()) collect_free_vars(a, bound, out);
      return;
    case Term::Kind::Case:
      collect_free_vars(t.scrut(), bound, out);
      for (const auto& br : t.branches())
        with_bound(br.binders, [&] { collect_free_vars(br.body, bound, out); });
      return;
    case Term::Kind::Let: {
      std::vector<std::string> names;
      for (const auto& b : t.bindings()) names.push_back(b.name);
      if (t.recursive()) {
        with_bound(names, [&] {
          for (const auto& b : t.bindings()) collect_free_vars(b.rhs, bound, out);
          collect_free_vars(t.body(), bound, out);
        });
      } else {
        for (const auto& b : t.bindings()) collect_free_vars(b.rhs, bound, out);
        with_bound(names, [&] { collect_free_vars(t.body(), bound, out); });
      }
      return;
    }
    case Term::Kind::ArrayLit:
      for (const auto& e : t.elems())
        if (!bound.count(e)) out.insert(e);
      return;
    case Term::Kind::IntLit:
    case Term::Kind::Loc:
      return;
  }
}

std::map<std::string, std::string> without(const std::map<std::string, std::string>& sigma,
                                           const std::vector<std::string>& names) {
  auto out = sigma;
  for (const auto& n : names) out.erase(n);
  return out;
}

}  // namespace

std::set<std::string> free_vars(const Term& t) {
  std::set<std::string> bound, out;
  collect_free_vars(t, bound, out);
  return out;
}

bool occurs_free(const std::string& x, const Term& t) { return free_vars(t).count(x) > 0; }

Term rename_vars(const Term& t, const std::map<std::string, std::string>& sigma) {
  if (sigma.empty()) return t;
  switch (t.kind()) {
    case Term::Kind::Var: {
      auto it = sigma.find(t.name());
      if (it == sigma.end()) return t;
      auto out = Term::var(it->second, t.loc());
      return t.type_annotation() ? out.annotated(*t.type_annotation()) : out;
    }
    case Term::Kind::IntLit:
    case Term::Kind::Loc:
      return t;
    case Term::Kind::ArrayLit: {
      auto elems = t.elems();
      for (auto& e : elems) {
        auto it = sigma.find(e);
        if (it != sigma.end()) e = it->second;
      }
      return Term::array_lit(t.elem_type(), t.frozen(), std::move(elems), t.array_id());
    }
    default:
      break;
  }
  Term out = t;
  switch (t.kind()) {
    case Term::Kind::Lam:
      out = Term::lam(t.mult(), t.name(), t.binder_type(), rename_vars(t.body(), without(sigma, {t.name()})),
                      t.loc());
      break;
    case Term::Kind::App:
      out = Term::app(rename_vars(t.fun(), sigma), rename_vars(t.arg(), sigma), t.loc());
      break;
    case Term::Kind::MultLam:
      out = Term::mult_lam(t.name(), rename_vars(t.body(), sigma), t.loc());
      break;
    case Term::Kind::MultApp:
      out = Term::mult_app(rename_vars(t.fun(), sigma), t.mult(), t.loc());
      break;
    case Term::Kind::Con: {
      std::vector<Term> args;
      for (const auto& a : t.args()) args.push_back(rename_vars(a, sigma));
      out = Term::con(t.name(), t.type_inst(), t.mult_inst(), std::move(args), t.loc());
      break;
    }
    case Term::Kind::Prim: {
      std::vector<Term> args;
      for (const auto& a : t.args()) args.push_back(rename_vars(a, sigma));
      out = Term::prim(t.prim_op(), std::move(args), t.loc());
      break;
    }
    case Term::Kind::Case: {
      std::vector<Branch> branches;
      for (const auto& br : t.branches())
        branches.push_back(Branch{br.con, br.binders, rename_vars(br.body, without(sigma, br.binders))});
      out = Term::case_(t.mult(), rename_vars(t.scrut(), sigma), std::move(branches), t.loc());
      break;
    }
    case Term::Kind::Let: {
      std::vector<std::string> names;
      for (const auto& b : t.bindings()) names.push_back(b.name);
      auto inner = without(sigma, names);
      const auto& rhs_sigma = t.recursive() ? inner : sigma;
      std::vector<LetBinding> bindings;
      for (const auto& b : t.bindings())
        bindings.push_back(LetBinding{b.name, b.mult, b.type, rename_vars(b.rhs, rhs_sigma)});
      out = Term::let(std::move(bindings), t.recursive(), rename_vars(t.body(), inner), t.loc());
      break;
    }
    default:
      break;
  }
  if (t.type_annotation()) out = out.annotated(*t.type_annotation(), t.arrow_annotation());
  return out;
}

Term subst_mult(const Term& t, const std::string& var, const MultExpr& by) {
  auto sm = [&](const MultExpr& m) { return mult_subst(m, var, by); };
  auto st = [&](const Type& ty) { return subst_mult(ty, var, by); };
  Term out = t;
  switch (t.kind()) {
    case Term::Kind::Var:
    case Term::Kind::IntLit:
    case Term::Kind::Loc:
      out = t;
      break;
    case Term::Kind::ArrayLit:
      return Term::array_lit(st(t.elem_type()), t.frozen(), t.elems(), t.array_id());
    case Term::Kind::Lam:
      out = Term::lam(sm(t.mult()), t.name(), st(t.binder_type()), subst_mult(t.body(), var, by), t.loc());
      break;
    case Term::Kind::App:
      out = Term::app(subst_mult(t.fun(), var, by), subst_mult(t.arg(), var, by), t.loc());
      break;
    case Term::Kind::MultLam: {
      if (t.name() == var) return t;
      auto incoming = free_mult_vars(by);
      if (incoming.count(t.name())) {
        auto fresh = fresh_binder(t.name(), incoming);
        auto body = subst_mult(t.body(), t.name(), MultExpr::var(fresh));
        out = Term::mult_lam(fresh, subst_mult(body, var, by), t.loc());
      } else {
        out = Term::mult_lam(t.name(), subst_mult(t.body(), var, by), t.loc());
      }
      break;
    }
    case Term::Kind::MultApp:
      out = Term::mult_app(subst_mult(t.fun(), var, by), sm(t.mult()), t.loc());
      break;
    case Term::Kind::Con: {
      std::vector<Type> ts;
      for (const auto& ty : t.type_inst()) ts.push_back(st(ty));
      std::vector<MultExpr> ms;
      for (const auto& m : t.mult_inst()) ms.push_back(sm(m));
      std::vector<Term> args;
      for (const auto& a : t.args()) args.push_back(subst_mult(a, var, by));
      out = Term::con(t.name(), std::move(ts), std::move(ms), std::move(args), t.loc());
      break;
    }
    case Term::Kind::Prim: {
      std::vector<Term> args;
      for (const auto& a : t.args()) args.push_back(subst_mult(a, var, by));
      out = Term::prim(t.prim_op(), std::move(args), t.loc());
      break;
    }
    case Term::Kind::Case: {
      std::vector<Branch> branches;
      for (const auto& br : t.branches())
        branches.push_back(Branch{br.con, br.binders, subst_mult(br.body, var, by)});
      out = Term::case_(sm(t.mult()), subst_mult(t.scrut(), var, by), std::move(branches), t.loc());
      break;
    }
    case Term::Kind::Let: {
      std::vector<LetBinding> bindings;
      for (const auto& b : t.bindings())
        bindings.push_back(LetBinding{b.name, sm(b.mult), st(b.type), subst_mult(b.rhs, var, by)});
      out = Term::let(std::move(bindings), t.recursive(), subst_mult(t.body(), var, by), t.loc());
      break;
    }
  }
  if (t.type_annotation()) {
    std::optional<MultExpr> arrow;
    if (t.arrow_annotation()) arrow = sm(*t.arrow_annotation());
    out = out.annotated(st(*t.type_annotation()), arrow);
  }
  return out;
}

}  // namespace lq
