#include "lq/mult.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace lq {

struct MultExpr::Node {
  Kind kind;
  std::string name;
  std::optional<MultExpr> lhs, rhs;
};

MultExpr MultExpr::one() {
  static const auto n = std::make_shared<const Node>(Node{Kind::One, {}, {}, {}});
  return MultExpr(n);
}

MultExpr MultExpr::omega() {
  static const auto n = std::make_shared<const Node>(Node{Kind::Omega, {}, {}, {}});
  return MultExpr(n);
}

MultExpr MultExpr::var(std::string name) {
  assert(!name.empty());
  return MultExpr(std::make_shared<const Node>(Node{Kind::Var, std::move(name), {}, {}}));
}

MultExpr MultExpr::add(MultExpr lhs, MultExpr rhs) {
  return MultExpr(std::make_shared<const Node>(Node{Kind::Add, {}, std::move(lhs), std::move(rhs)}));
}

MultExpr MultExpr::mul(MultExpr lhs, MultExpr rhs) {
  return MultExpr(std::make_shared<const Node>(Node{Kind::Mul, {}, std::move(lhs), std::move(rhs)}));
}

MultExpr::Kind MultExpr::kind() const { return node_->kind; }
const std::string& MultExpr::name() const { return node_->name; }
const MultExpr& MultExpr::lhs() const { return *node_->lhs; }
const MultExpr& MultExpr::rhs() const { return *node_->rhs; }

bool MultExpr::operator==(const MultExpr& other) const {
  if (node_ == other.node_) return true;
  if (kind() != other.kind()) return false;
  switch (kind()) {
    case Kind::One:
    case Kind::Omega:
      return true;
    case Kind::Var:
      return name() == other.name();
    case Kind::Add:
    case Kind::Mul:
      return lhs() == other.lhs() && rhs() == other.rhs();
  }
  return false;
}

// ---------------------------------------------------------------------------
// Normal forms

namespace {

Coef coef_add(Coef, Coef) { return Coef::Omega; }  // 1+1 = 1+w = w+w = w

Coef coef_mul(Coef a, Coef b) {
  return (a == Coef::One && b == Coef::One) ? Coef::One : Coef::Omega;
}

Monomial monomial_mul(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

MultNF MultNF::one() {
  MultNF m;
  m.terms_.emplace(Monomial{}, Coef::One);
  return m;
}

MultNF MultNF::omega() {
  MultNF m;
  m.terms_.emplace(Monomial{}, Coef::Omega);
  return m;
}

MultNF MultNF::var(const std::string& name) {
  MultNF m;
  m.terms_.emplace(Monomial{name}, Coef::One);
  return m;
}

MultNF MultNF::operator+(const MultNF& other) const {
  MultNF out = *this;
  for (const auto& [mono, c] : other.terms_) {
    auto [it, inserted] = out.terms_.emplace(mono, c);
    if (!inserted) it->second = coef_add(it->second, c);
  }
  return out;
}

MultNF MultNF::operator*(const MultNF& other) const {
  MultNF out;
  for (const auto& [m1, c1] : terms_) {
    for (const auto& [m2, c2] : other.terms_) {
      auto mono = monomial_mul(m1, m2);
      auto c = coef_mul(c1, c2);
      auto [it, inserted] = out.terms_.emplace(std::move(mono), c);
      if (!inserted) it->second = coef_add(it->second, c);
    }
  }
  return out;
}

bool MultNF::is_one() const {
  return terms_.size() == 1 && terms_.begin()->first.empty() && terms_.begin()->second == Coef::One;
}

bool MultNF::is_omega() const {
  return terms_.size() == 1 && terms_.begin()->first.empty() && terms_.begin()->second == Coef::Omega;
}

bool MultNF::is_constant() const { return is_one() || is_omega(); }

std::set<std::string> MultNF::vars() const {
  std::set<std::string> out;
  for (const auto& [mono, c] : terms_) out.insert(mono.begin(), mono.end());
  return out;
}

MultExpr MultNF::render() const {
  std::optional<MultExpr> sum;
  for (const auto& [mono, c] : terms_) {
    std::optional<MultExpr> prod;
    if (c == Coef::Omega || mono.empty()) prod = (c == Coef::Omega) ? MultExpr::omega() : MultExpr::one();
    for (const auto& v : mono) {
      prod = prod ? MultExpr::mul(*prod, MultExpr::var(v)) : MultExpr::var(v);
    }
    sum = sum ? MultExpr::add(*sum, *prod) : *prod;
  }
  assert(sum);
  return *sum;
}

MultNF mult_normalize(const MultExpr& e) {
  switch (e.kind()) {
    case MultExpr::Kind::One:
      return MultNF::one();
    case MultExpr::Kind::Omega:
      return MultNF::omega();
    case MultExpr::Kind::Var:
      return MultNF::var(e.name());
    case MultExpr::Kind::Add:
      return mult_normalize(e.lhs()) + mult_normalize(e.rhs());
    case MultExpr::Kind::Mul:
      return mult_normalize(e.lhs()) * mult_normalize(e.rhs());
  }
  return MultNF::one();
}

bool mult_equiv(const MultExpr& a, const MultExpr& b) {
  return mult_normalize(a) == mult_normalize(b);
}

MultExpr mult_subst(const MultExpr& e, const std::map<std::string, MultExpr>& sigma) {
  switch (e.kind()) {
    case MultExpr::Kind::One:
    case MultExpr::Kind::Omega:
      return e;
    case MultExpr::Kind::Var: {
      auto it = sigma.find(e.name());
      return it == sigma.end() ? e : it->second;
    }
    case MultExpr::Kind::Add:
      return MultExpr::add(mult_subst(e.lhs(), sigma), mult_subst(e.rhs(), sigma));
    case MultExpr::Kind::Mul:
      return MultExpr::mul(mult_subst(e.lhs(), sigma), mult_subst(e.rhs(), sigma));
  }
  return e;
}

MultExpr mult_subst(const MultExpr& e, const std::string& var, const MultExpr& by) {
  return mult_subst(e, std::map<std::string, MultExpr>{{var, by}});
}

std::set<std::string> free_mult_vars(const MultExpr& e) {
  std::set<std::string> out;
  std::vector<const MultExpr*> todo{&e};
  while (!todo.empty()) {
    const MultExpr* m = todo.back();
    todo.pop_back();
    switch (m->kind()) {
      case MultExpr::Kind::Var:
        out.insert(m->name());
        break;
      case MultExpr::Kind::Add:
      case MultExpr::Kind::Mul:
        todo.push_back(&m->lhs());
        todo.push_back(&m->rhs());
        break;
      default:
        break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Usage algebra

UsageMult mult_add(const UsageMult& a, const UsageMult& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return a.nf() + b.nf();
}

UsageMult mult_mul(const UsageMult& a, const UsageMult& b) {
  if (a.is_zero() || b.is_zero()) return UsageMult::zero();
  return a.nf() * b.nf();
}

Usage Usage::single(const std::string& x, MultNF m) {
  Usage u;
  u.entries_.emplace(x, std::move(m));
  return u;
}

UsageMult Usage::get(const std::string& x) const {
  auto it = entries_.find(x);
  if (it == entries_.end()) return UsageMult::zero();
  return it->second;
}

void Usage::set(const std::string& x, const UsageMult& m) {
  if (m.is_zero()) {
    entries_.erase(x);
  } else {
    entries_.insert_or_assign(x, m.nf());
  }
}

Usage usage_add(const Usage& a, const Usage& b) {
  Usage out = a;
  for (const auto& [x, m] : b.entries()) out.set(x, mult_add(out.get(x), m));
  return out;
}

Usage usage_scale(const MultNF& m, const Usage& u) {
  Usage out;
  for (const auto& [x, n] : u.entries()) out.set(x, m * n);
  return out;
}

Usage usage_scale(const MultExpr& m, const Usage& u) { return usage_scale(mult_normalize(m), u); }

Result<UsageMult, JoinConflict> mult_join(const UsageMult& a, const UsageMult& b) {
  if (a == b) return a;
  auto concrete = [](const UsageMult& m) { return m.is_zero() || m.nf().is_constant(); };
  if (concrete(a) && concrete(b)) {
    // Distinct members of {Zero, 1, w}: only an w binder covers both.
    return UsageMult(MultNF::omega());
  }
  return JoinConflict{{}, a, b};
}

Result<Usage, JoinConflict> usage_join(const Usage& a, const Usage& b) {
  Usage out;
  std::set<std::string> keys;
  for (const auto& [x, m] : a.entries()) keys.insert(x);
  for (const auto& [x, m] : b.entries()) keys.insert(x);
  for (const auto& x : keys) {
    auto j = mult_join(a.get(x), b.get(x));
    if (!j) {
      auto conflict = j.error();
      conflict.var = x;
      return conflict;
    }
    out.set(x, *j);
  }
  return out;
}

bool sub_usage(const UsageMult& u, const MultNF& declared) {
  if (declared.is_omega()) return true;
  return !u.is_zero() && u.nf() == declared;
}

bool sub_usage(const UsageMult& u, const MultExpr& declared) {
  return sub_usage(u, mult_normalize(declared));
}

// ---------------------------------------------------------------------------
// Printing

namespace {

// prec: 0 = sum context, 1 = product operand, 2 = atom
void print(std::ostream& os, const MultExpr& e, int prec) {
  switch (e.kind()) {
    case MultExpr::Kind::One:
      os << '1';
      return;
    case MultExpr::Kind::Omega:
      os << 'w';
      return;
    case MultExpr::Kind::Var:
      os << e.name();
      return;
    case MultExpr::Kind::Add:
      if (prec > 0) os << '(';
      print(os, e.lhs(), 0);
      os << " + ";
      print(os, e.rhs(), 1);
      if (prec > 0) os << ')';
      return;
    case MultExpr::Kind::Mul:
      if (prec > 1) os << '(';
      print(os, e.lhs(), 1);
      os << " * ";
      print(os, e.rhs(), 2);
      if (prec > 1) os << ')';
      return;
  }
}

}  // namespace

std::string to_string(const MultExpr& e) {
  std::ostringstream os;
  print(os, e, 0);
  return os.str();
}

std::string to_string(const MultNF& m) { return to_string(m.render()); }

std::string to_string(const UsageMult& m) { return m.is_zero() ? "0" : to_string(m.nf()); }

std::string to_string(const Usage& u) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& [x, m] : u.entries()) {
    if (!first) os << ", ";
    first = false;
    os << x << " -> " << to_string(m);
  }
  os << '}';
  return os.str();
}

}  // namespace lq
