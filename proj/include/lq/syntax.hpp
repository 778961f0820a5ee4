#pragma once

// Abstract syntax of the core calculus: types, terms and datatype
// declarations. All nodes are immutable and shared; copies are cheap.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lq/mult.hpp"

namespace lq {

struct SrcLoc {
  int line = 0;
  int col = 0;
};

class Type {
 public:
  enum class Kind { Int, Arrow, ForallMult, Data, MArray, Array, TypeVar, Hole };

  static Type int_();
  static Type arrow(Type dom, MultExpr mult, Type cod);
  static Type forall(std::string var, Type body);
  static Type data(std::string name, std::vector<MultExpr> mults, std::vector<Type> types);
  static Type marray(Type elem);
  static Type array(Type elem);
  static Type var(std::string name);
  /// Placeholder for annotations that were never computed (untyped runs).
  static Type hole();

  Kind kind() const;
  const Type& dom() const;            // Arrow
  const MultExpr& mult() const;       // Arrow
  const Type& cod() const;            // Arrow
  const std::string& name() const;    // ForallMult binder, Data name, TypeVar
  const Type& body() const;           // ForallMult
  const Type& elem() const;           // MArray / Array
  const std::vector<MultExpr>& mult_args() const;  // Data
  const std::vector<Type>& type_args() const;      // Data

  /// Syntactic equality. Use types_equal() for equality up to multiplicity
  /// equivalence and renaming of bound multiplicity variables.
  bool operator==(const Type& other) const;

 private:
  struct Node;
  explicit Type(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Equality up to mult_equiv and alpha-renaming of forall binders.
bool types_equal(const Type& a, const Type& b);
std::set<std::string> free_mult_vars(const Type& t);
Type subst_mult(const Type& t, const std::string& var, const MultExpr& by);
/// Simultaneous instantiation of type variables and multiplicity variables.
Type instantiate(const Type& t, const std::map<std::string, Type>& types,
                 const std::map<std::string, MultExpr>& mults);

enum class PrimOp { NewMArray, Write, Freeze, Index, Add, Sub, Mul, Eq, Lt };

std::string prim_name(PrimOp op);
std::optional<PrimOp> prim_from_name(const std::string& name);
std::size_t prim_arity(PrimOp op);
/// Multiplicity at which each argument is consumed.
std::vector<MultExpr> prim_arg_mults(PrimOp op);

struct Branch;
struct LetBinding;

class Term {
 public:
  enum class Kind { Var, Lam, App, MultLam, MultApp, Con, Case, Let, IntLit, Prim, Loc, ArrayLit };

  static Term var(std::string x, SrcLoc loc = {});
  static Term lam(MultExpr mult, std::string x, Type type, Term body, SrcLoc loc = {});
  static Term app(Term fun, Term arg, SrcLoc loc = {});
  static Term mult_lam(std::string p, Term body, SrcLoc loc = {});
  static Term mult_app(Term fun, MultExpr mult, SrcLoc loc = {});
  static Term con(std::string name, std::vector<Type> type_inst, std::vector<MultExpr> mult_inst,
                  std::vector<Term> args, SrcLoc loc = {});
  static Term case_(MultExpr mult, Term scrut, std::vector<Branch> branches, SrcLoc loc = {});
  /// `recursive` groups see their own binders in every right-hand side.
  static Term let(std::vector<LetBinding> bindings, bool recursive, Term body, SrcLoc loc = {});
  static Term int_lit(std::int64_t value, SrcLoc loc = {});
  static Term prim(PrimOp op, std::vector<Term> args, SrcLoc loc = {});
  /// Runtime-only: name of a mutable array cell (ordinary semantics).
  static Term loc(std::string name);
  /// Runtime-only: an array value (pure semantics). `id` tags the allocation.
  static Term array_lit(Type elem, bool frozen, std::vector<std::string> elems, std::uint64_t id);

  Kind kind() const;
  SrcLoc loc() const;

  const std::string& name() const;     // Var, Lam/MultLam binder, Con name, Loc
  const MultExpr& mult() const;        // Lam, MultApp, Case
  const Type& binder_type() const;     // Lam
  const Term& body() const;            // Lam, MultLam, Let
  const Term& fun() const;             // App, MultApp
  const Term& arg() const;             // App
  const Term& scrut() const;           // Case
  const std::vector<Term>& args() const;            // Con, Prim
  const std::vector<Type>& type_inst() const;       // Con
  const std::vector<MultExpr>& mult_inst() const;   // Con
  const std::vector<Branch>& branches() const;      // Case
  const std::vector<LetBinding>& bindings() const;  // Let
  bool recursive() const;                            // Let
  std::int64_t int_value() const;                    // IntLit
  PrimOp prim_op() const;                            // Prim
  const Type& elem_type() const;                     // ArrayLit
  bool frozen() const;                               // ArrayLit
  const std::vector<std::string>& elems() const;     // ArrayLit
  std::uint64_t array_id() const;                    // ArrayLit

  // Typechecker annotations.
  const std::optional<Type>& type_annotation() const;
  const std::optional<MultExpr>& arrow_annotation() const;  // App
  Term annotated(Type type, std::optional<MultExpr> arrow = std::nullopt) const;
  Term without_annotations() const;

  bool is_value() const;

  /// Structural equality ignoring source locations.
  bool equals(const Term& other, bool compare_annotations = false) const;
  bool operator==(const Term& other) const { return equals(other, false); }

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Term make(Node n);
  std::shared_ptr<const Node> node_;
};

struct Branch {
  std::string con;
  std::vector<std::string> binders;
  Term body;
};

struct LetBinding {
  std::string name;
  MultExpr mult;
  Type type;
  Term rhs;
};

std::set<std::string> free_vars(const Term& t);
bool occurs_free(const std::string& x, const Term& t);
/// Replace free occurrences of variables. The replacement names must not be
/// bound anywhere inside `t`.
Term rename_vars(const Term& t, const std::map<std::string, std::string>& sigma);
/// Substitute a multiplicity for a multiplicity variable throughout a term,
/// including every annotation.
Term subst_mult(const Term& t, const std::string& var, const MultExpr& by);

struct ConstructorDecl {
  std::string name;
  std::vector<std::pair<Type, MultExpr>> fields;
  SrcLoc loc;
};

struct DataDecl {
  std::string name;
  std::vector<std::string> mult_params;
  std::vector<std::string> type_params;
  std::vector<ConstructorDecl> constructors;
  SrcLoc loc;
};

struct Def {
  std::string name;
  Type type;
  MultExpr mult;  // 1 or w
  Term body;
  SrcLoc loc;
};

/// A parsed `.lq` file: declarations, top-level definitions and `main`.
struct SourceFile {
  std::vector<DataDecl> decls;
  std::vector<Def> defs;
  Term main;
};

}  // namespace lq
