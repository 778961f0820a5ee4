#pragma once

// Random multiplicity expressions and usages for property tests.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "lq/mult.hpp"

namespace lq::testing {

inline MultExpr random_mult(std::mt19937_64& rng, int depth, const std::vector<std::string>& vars = {"p", "q", "r"}) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 4 : 2);
  switch (pick(rng)) {
    case 0:
      return MultExpr::one();
    case 1:
      return MultExpr::omega();
    case 2: {
      if (vars.empty()) return MultExpr::one();
      std::uniform_int_distribution<std::size_t> v(0, vars.size() - 1);
      return MultExpr::var(vars[v(rng)]);
    }
    case 3:
      return MultExpr::add(random_mult(rng, depth - 1, vars), random_mult(rng, depth - 1, vars));
    default:
      return MultExpr::mul(random_mult(rng, depth - 1, vars), random_mult(rng, depth - 1, vars));
  }
}

inline Usage random_usage(std::mt19937_64& rng, int depth) {
  static const std::vector<std::string> names = {"x", "y", "z"};
  Usage u;
  std::bernoulli_distribution present(0.6);
  for (const auto& n : names)
    if (present(rng)) u.set(n, mult_normalize(random_mult(rng, depth)));
  return u;
}

// Independent model of the normal form: a list of (sorted variable list,
// saturating count) pairs where count 2 stands for w.
struct CountPoly {
  std::vector<std::pair<std::vector<std::string>, int>> terms;

  static CountPoly of(const MultExpr& e) {
    CountPoly out;
    switch (e.kind()) {
      case MultExpr::Kind::One:
        out.terms.push_back({{}, 1});
        break;
      case MultExpr::Kind::Omega:
        out.terms.push_back({{}, 2});
        break;
      case MultExpr::Kind::Var:
        out.terms.push_back({{e.name()}, 1});
        break;
      case MultExpr::Kind::Add: {
        auto a = of(e.lhs());
        auto b = of(e.rhs());
        out = a;
        for (const auto& t : b.terms) out.add_term(t.first, t.second);
        break;
      }
      case MultExpr::Kind::Mul: {
        auto a = of(e.lhs());
        auto b = of(e.rhs());
        for (const auto& [m1, c1] : a.terms)
          for (const auto& [m2, c2] : b.terms) {
            std::vector<std::string> m = m1;
            m.insert(m.end(), m2.begin(), m2.end());
            std::sort(m.begin(), m.end());
            out.add_term(m, (c1 == 1 && c2 == 1) ? 1 : 2);
          }
        break;
      }
    }
    return out;
  }

  void add_term(const std::vector<std::string>& m, int c) {
    for (auto& t : terms)
      if (t.first == m) {
        t.second = 2;
        return;
      }
    terms.push_back({m, c});
  }

  bool matches(const MultNF& nf) const {
    if (nf.terms().size() != terms.size()) return false;
    for (const auto& [m, c] : terms) {
      auto it = nf.terms().find(m);
      if (it == nf.terms().end()) return false;
      if ((it->second == Coef::Omega) != (c == 2)) return false;
    }
    return true;
  }
};

}  // namespace lq::testing
