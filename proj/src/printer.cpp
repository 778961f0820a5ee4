#include "lq/printer.hpp"

#include <sstream>

namespace lq {

namespace {

std::string mult_atom(const MultExpr& m) {
  auto s = to_string(m);
  if (m.kind() == MultExpr::Kind::Add || m.kind() == MultExpr::Kind::Mul) return "(" + s + ")";
  return s;
}

// prec: 0 = arrow/forall allowed, 1 = application operand head, 2 = atom
void print_type(std::ostream& os, const Type& t, int prec) {
  switch (t.kind()) {
    case Type::Kind::Int:
      os << "Int";
      return;
    case Type::Kind::Hole:
      os << "_";
      return;
    case Type::Kind::TypeVar:
      os << t.name();
      return;
    case Type::Kind::Arrow: {
      if (prec > 0) os << '(';
      print_type(os, t.dom(), 1);
      const auto& m = t.mult();
      if (m.kind() == MultExpr::Kind::One)
        os << " -o ";
      else if (m.kind() == MultExpr::Kind::Omega)
        os << " -> ";
      else
        os << " ->[" << to_string(m) << "] ";
      print_type(os, t.cod(), 0);
      if (prec > 0) os << ')';
      return;
    }
    case Type::Kind::ForallMult:
      if (prec > 0) os << '(';
      os << "forall " << t.name() << ". ";
      print_type(os, t.body(), 0);
      if (prec > 0) os << ')';
      return;
    case Type::Kind::MArray:
    case Type::Kind::Array:
      if (prec > 1) os << '(';
      os << (t.kind() == Type::Kind::MArray ? "MArray " : "Array ");
      print_type(os, t.elem(), 2);
      if (prec > 1) os << ')';
      return;
    case Type::Kind::Data: {
      bool nullary = t.mult_args().empty() && t.type_args().empty();
      if (nullary) {
        os << t.name();
        return;
      }
      if (prec > 1) os << '(';
      os << t.name();
      for (const auto& m : t.mult_args()) os << ' ' << mult_atom(m);
      for (const auto& a : t.type_args()) {
        os << ' ';
        print_type(os, a, 2);
      }
      if (prec > 1) os << ')';
      return;
    }
  }
}

template <typename T, typename F>
void join(std::ostream& os, const std::vector<T>& xs, const char* sep, F&& f) {
  bool first = true;
  for (const auto& x : xs) {
    if (!first) os << sep;
    first = false;
    f(x);
  }
}

// prec: 0 = binders extend right, 1 = application head, 2 = argument
void print_term(std::ostream& os, const Term& t, int prec) {
  switch (t.kind()) {
    case Term::Kind::Var:
      os << t.name();
      return;
    case Term::Kind::IntLit:
      if (t.int_value() < 0 && prec > 0)
        os << '(' << t.int_value() << ')';
      else
        os << t.int_value();
      return;
    case Term::Kind::Loc:
      os << '<' << t.name() << '>';
      return;
    case Term::Kind::ArrayLit:
      os << (t.frozen() ? "frozen[" : "[");
      join(os, t.elems(), ", ", [&](const std::string& e) { os << e; });
      os << ']';
      return;
    case Term::Kind::Prim:
      os << prim_name(t.prim_op()) << '(';
      join(os, t.args(), ", ", [&](const Term& a) { print_term(os, a, 0); });
      os << ')';
      return;
    case Term::Kind::Lam:
      if (prec > 0) os << '(';
      os << "\\[" << to_string(t.mult()) << "] " << t.name() << " : ";
      print_type(os, t.binder_type(), 0);
      os << " . ";
      print_term(os, t.body(), 0);
      if (prec > 0) os << ')';
      return;
    case Term::Kind::MultLam:
      if (prec > 0) os << '(';
      os << "/\\" << t.name() << " . ";
      print_term(os, t.body(), 0);
      if (prec > 0) os << ')';
      return;
    case Term::Kind::App:
      if (prec > 1) os << '(';
      print_term(os, t.fun(), 1);
      os << ' ';
      print_term(os, t.arg(), 2);
      if (prec > 1) os << ')';
      return;
    case Term::Kind::MultApp:
      if (prec > 1) os << '(';
      print_term(os, t.fun(), 1);
      os << " @[" << to_string(t.mult()) << ']';
      if (prec > 1) os << ')';
      return;
    case Term::Kind::Con: {
      bool bare = t.args().empty() && t.type_inst().empty() && t.mult_inst().empty();
      if (bare) {
        os << t.name();
        return;
      }
      bool parens = prec > 1 || (prec == 1 && !t.args().empty());
      if (parens) os << '(';
      os << t.name();
      if (!t.type_inst().empty()) {
        os << " @[";
        join(os, t.type_inst(), ", ", [&](const Type& ty) { print_type(os, ty, 0); });
        os << ']';
      }
      if (!t.mult_inst().empty()) {
        os << " @[";
        join(os, t.mult_inst(), ", ", [&](const MultExpr& m) { os << to_string(m); });
        os << ']';
      }
      for (const auto& a : t.args()) {
        os << ' ';
        print_term(os, a, 2);
      }
      if (parens) os << ')';
      return;
    }
    case Term::Kind::Case:
      if (prec > 0) os << '(';
      os << "case[" << to_string(t.mult()) << "] ";
      print_term(os, t.scrut(), 0);
      os << " of { ";
      join(os, t.branches(), " ; ", [&](const Branch& b) {
        os << b.con;
        for (const auto& x : b.binders) os << ' ' << x;
        os << " -> ";
        print_term(os, b.body, 0);
      });
      os << " }";
      if (prec > 0) os << ')';
      return;
    case Term::Kind::Let: {
      if (prec > 0) os << '(';
      const auto& bs = t.bindings();
      const MultExpr& head = bs.front().mult;
      os << "let[" << to_string(head) << "] ";
      join(os, bs, ", ", [&](const LetBinding& b) {
        os << b.name << (b.mult == head ? " : " : " :[" + to_string(b.mult) + "] ");
        print_type(os, b.type, 0);
        os << " = ";
        print_term(os, b.rhs, 0);
      });
      os << " in ";
      print_term(os, t.body(), 0);
      if (prec > 0) os << ')';
      return;
    }
  }
}

}  // namespace

std::string print_type(const Type& t) {
  std::ostringstream os;
  print_type(os, t, 0);
  return os.str();
}

std::string print_term(const Term& t) {
  std::ostringstream os;
  print_term(os, t, 0);
  return os.str();
}

std::string print_term_short(const Term& t, std::size_t max_len) {
  auto s = print_term(t);
  if (s.size() > max_len) s = s.substr(0, max_len > 3 ? max_len - 3 : 0) + "...";
  return s;
}

std::string print_decl(const DataDecl& d) {
  std::ostringstream os;
  os << "data " << d.name;
  if (!d.mult_params.empty()) {
    os << " [";
    join(os, d.mult_params, " ", [&](const std::string& p) { os << p; });
    os << ']';
  }
  for (const auto& a : d.type_params) os << ' ' << a;
  os << " where {";
  std::vector<MultExpr> ms;
  for (const auto& p : d.mult_params) ms.push_back(MultExpr::var(p));
  std::vector<Type> ts;
  for (const auto& a : d.type_params) ts.push_back(Type::var(a));
  Type result = Type::data(d.name, ms, ts);
  join(os, d.constructors, " ;", [&](const ConstructorDecl& c) {
    Type sig = result;
    for (auto it = c.fields.rbegin(); it != c.fields.rend(); ++it) sig = Type::arrow(it->first, it->second, sig);
    os << ' ' << c.name << " : " << print_type(sig);
  });
  os << " }";
  return os.str();
}

std::string print_source(const SourceFile& f) {
  std::ostringstream os;
  for (const auto& d : f.decls) os << print_decl(d) << '\n';
  for (const auto& d : f.defs)
    os << "def " << d.name << " : " << print_type(d.type) << " =[" << to_string(d.mult) << "] "
       << print_term(d.body) << '\n';
  os << "main = " << print_term(f.main) << '\n';
  return os.str();
}

}  // namespace lq
