#pragma once

// Algorithmic linearity checker. Usages are synthesized bottom-up and
// compared against the declared multiplicity at every binder.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lq/diagnostic.hpp"
#include "lq/mult.hpp"
#include "lq/result.hpp"
#include "lq/syntax.hpp"

namespace lq {

/// Datatype declarations visible to a program.
class DeclTable {
 public:
  struct ConInfo {
    const DataDecl* decl;
    std::size_t index;
    const ConstructorDecl& con() const { return decl->constructors[index]; }
  };

  DeclTable() = default;
  DeclTable(const DeclTable& other);
  DeclTable& operator=(const DeclTable& other);
  DeclTable(DeclTable&&) = default;
  DeclTable& operator=(DeclTable&&) = default;

  /// Registers a declaration; an existing one of the same name is replaced.
  void add(DataDecl d);
  const DataDecl* find_type(const std::string& name) const;
  std::optional<ConInfo> find_con(const std::string& name) const;
  std::vector<DataDecl> decls() const;

  /// Field types and multiplicities of a constructor at an instantiation.
  std::vector<std::pair<Type, MultExpr>> instantiate_fields(const ConInfo& c, const std::vector<Type>& types,
                                                            const std::vector<MultExpr>& mults) const;

 private:
  std::vector<std::unique_ptr<DataDecl>> decls_;
  std::map<std::string, std::size_t> types_;
  std::map<std::string, std::pair<std::size_t, std::size_t>> cons_;
};

/// Typing context: term variables with their declared type and multiplicity,
/// multiplicity variables in scope, and the datatype table.
class TypeEnv {
 public:
  struct Binding {
    Type type;
    MultExpr mult;
  };

  explicit TypeEnv(const DeclTable& decls) : decls_(&decls) {}

  TypeEnv& bind(const std::string& x, Type type, MultExpr mult);
  TypeEnv& bind_mult_var(const std::string& p);
  /// Types for names that are not bound in the context proper. Used only to
  /// compute types of runtime terms whose free names live in a heap.
  TypeEnv& set_ambient(const std::map<std::string, Type>* ambient) {
    ambient_ = ambient;
    return *this;
  }

  const DeclTable& decls() const { return *decls_; }
  const std::vector<std::pair<std::string, Binding>>& bindings() const { return vars_; }
  const std::vector<std::string>& mult_vars() const { return mult_vars_; }
  const std::map<std::string, Type>* ambient() const { return ambient_; }

 private:
  const DeclTable* decls_;
  std::vector<std::pair<std::string, Binding>> vars_;
  std::vector<std::string> mult_vars_;
  const std::map<std::string, Type>* ambient_ = nullptr;
};

struct Inferred {
  Type type;
  Usage usage;
  /// The input term with every node annotated by its type and every
  /// application by its arrow multiplicity.
  Term typed;
};

Result<Inferred, Diagnostics> infer(const TypeEnv& env, const Term& t);

/// Checks `env ⊢ t : A` including the multiplicity of every binding in env.
Result<Type, Diagnostics> check_judgement(const TypeEnv& env, const Term& t);

/// Validates one declaration against a table that already contains it.
Result<std::monostate, Diagnostics> check_datadecl(const DataDecl& d, const DeclTable& table);

struct CheckedProgram {
  DeclTable decls;
  /// The program with definitions elaborated into lets around main.
  Term elaborated;
  /// Fully annotated form of `elaborated`.
  Term typed;
  Type type;
};

/// Top-level w-definitions form one recursive group; 1-definitions become
/// nested linear lets inside it, in source order.
Term elaborate_program(const std::vector<Def>& defs, const Term& main);

Result<CheckedProgram, Diagnostics> check_program(const std::vector<DataDecl>& decls, const std::vector<Def>& defs,
                                                  const Term& main);

}  // namespace lq
