#pragma once

// Multiplicities: syntactic expressions, their canonical normal forms, and the
// usage algebra (context addition, scaling and branch join) built on them.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lq/result.hpp"

namespace lq {

/// A multiplicity expression `1 | w | p | m + m | m * m`.
class MultExpr {
 public:
  enum class Kind { One, Omega, Var, Add, Mul };

  static MultExpr one();
  static MultExpr omega();
  static MultExpr var(std::string name);
  static MultExpr add(MultExpr lhs, MultExpr rhs);
  static MultExpr mul(MultExpr lhs, MultExpr rhs);

  Kind kind() const;
  const std::string& name() const;  // Var only
  const MultExpr& lhs() const;      // Add/Mul only
  const MultExpr& rhs() const;

  /// Syntactic equality (not equivalence).
  bool operator==(const MultExpr& other) const;

 private:
  struct Node;
  explicit MultExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

enum class Coef { One, Omega };

/// A monomial is a sorted multiset of multiplicity variables; the empty
/// monomial is the constant term.
using Monomial = std::vector<std::string>;

/// Canonical form of a multiplicity: a nonempty polynomial whose coefficients
/// live in {1, w} with 1 + 1 = w.
class MultNF {
 public:
  static MultNF one();
  static MultNF omega();
  static MultNF var(const std::string& name);

  MultNF operator+(const MultNF& other) const;
  MultNF operator*(const MultNF& other) const;
  bool operator==(const MultNF& other) const { return terms_ == other.terms_; }
  bool operator<(const MultNF& other) const { return terms_ < other.terms_; }

  bool is_one() const;
  bool is_omega() const;
  bool is_constant() const;  // one or omega
  std::set<std::string> vars() const;
  const std::map<Monomial, Coef>& terms() const { return terms_; }

  /// Canonical expression for this normal form; normalize(render()) == *this.
  MultExpr render() const;

 private:
  MultNF() = default;
  std::map<Monomial, Coef> terms_;
};

MultNF mult_normalize(const MultExpr& e);
bool mult_equiv(const MultExpr& a, const MultExpr& b);
/// Capture-free substitution (multiplicity expressions have no binders).
MultExpr mult_subst(const MultExpr& e, const std::string& var, const MultExpr& by);
MultExpr mult_subst(const MultExpr& e, const std::map<std::string, MultExpr>& sigma);
std::set<std::string> free_mult_vars(const MultExpr& e);

/// A usage multiplicity: either the bookkeeping Zero ("unused") or a proper
/// multiplicity. Zero never appears inside a MultNF.
class UsageMult {
 public:
  static UsageMult zero() { return UsageMult(); }
  UsageMult(MultNF nf) : nf_(std::move(nf)) {}

  bool is_zero() const { return !nf_.has_value(); }
  const MultNF& nf() const { return *nf_; }
  bool operator==(const UsageMult& other) const { return nf_ == other.nf_; }

 private:
  UsageMult() = default;
  std::optional<MultNF> nf_;
};

UsageMult mult_add(const UsageMult& a, const UsageMult& b);
UsageMult mult_mul(const UsageMult& a, const UsageMult& b);

/// Finite map from term variable to usage; absent entries read as Zero.
class Usage {
 public:
  Usage() = default;
  static Usage single(const std::string& x, MultNF m = MultNF::one());

  UsageMult get(const std::string& x) const;
  void set(const std::string& x, const UsageMult& m);
  void erase(const std::string& x) { entries_.erase(x); }
  const std::map<std::string, MultNF>& entries() const { return entries_; }
  bool operator==(const Usage& other) const { return entries_ == other.entries_; }

 private:
  std::map<std::string, MultNF> entries_;
};

Usage usage_add(const Usage& a, const Usage& b);
Usage usage_scale(const MultNF& m, const Usage& u);
Usage usage_scale(const MultExpr& m, const Usage& u);

struct JoinConflict {
  std::string var;
  UsageMult left;
  UsageMult right;
};
Result<UsageMult, JoinConflict> mult_join(const UsageMult& a, const UsageMult& b);
Result<Usage, JoinConflict> usage_join(const Usage& a, const Usage& b);

/// Does a computed usage fit a binder declared at multiplicity `declared`?
bool sub_usage(const UsageMult& u, const MultNF& declared);
bool sub_usage(const UsageMult& u, const MultExpr& declared);

std::string to_string(const MultExpr& e);
std::string to_string(const MultNF& m);
std::string to_string(const UsageMult& m);
std::string to_string(const Usage& u);

}  // namespace lq
