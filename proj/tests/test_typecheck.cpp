#include <gtest/gtest.h>

#include <random>

#include "corpus.hpp"
#include "lq/parser.hpp"
#include "lq/printer.hpp"
#include "lq/typecheck.hpp"
#include "mult_gen.hpp"

using namespace lq;
using namespace lq::testing;

namespace {

const std::vector<DataDecl>& prelude() {
  static const std::vector<DataDecl> ds = *load_prelude();
  return ds;
}

const DeclTable& table() {
  static const DeclTable t = [] {
    DeclTable out;
    for (const auto& d : prelude()) out.add(d);
    return out;
  }();
  return t;
}

Term T(const std::string& text) {
  auto r = parse_term(text, prelude());
  if (!r) throw std::runtime_error(to_string(r.error()));
  return *r;
}

Type Ty(const std::string& text) { return *parse_type(text, prelude()); }

Result<Inferred, Diagnostics> infer_closed(const std::string& text) {
  TypeEnv env(table());
  return infer(env, T(text));
}

Diagnostic::Kind first_kind(const Result<Inferred, Diagnostics>& r) { return r.error().front().kind; }

Result<CheckedProgram, Diagnostics> check_text(const std::string& text) {
  auto src = parse_source(text, prelude());
  if (!src) return Diagnostics{src.error()};
  std::vector<DataDecl> all = prelude();
  all.insert(all.end(), src->decls.begin(), src->decls.end());
  return check_program(all, src->defs, src->main);
}

}  // namespace

// The six canonical verdicts.

TEST(Verdicts, SwapIsLinear) {
  auto r = infer_closed("\\[1] x : Pair 1 1 a b . case[1] x of { MkPair u v -> MkPair @[b, a] @[1, 1] v u }");
  ASSERT_TRUE(r.has_value()) << to_string(r.error().front());
  EXPECT_TRUE(types_equal(r->type, Ty("Pair 1 1 a b -o Pair 1 1 b a")));
}

TEST(Verdicts, FstNeedsUnrestrictedCase) {
  auto lin = infer_closed("\\[1] x : Pair 1 1 a b . case[1] x of { MkPair u v -> u }");
  ASSERT_FALSE(lin.has_value());
  EXPECT_EQ(first_kind(lin), Diagnostic::Kind::LinearityMismatch);
  auto unr = infer_closed("\\[w] x : Pair 1 1 a b . case[w] x of { MkPair u v -> u }");
  ASSERT_TRUE(unr.has_value());
  EXPECT_TRUE(types_equal(unr->type, Ty("Pair 1 1 a b -> a")));
}

TEST(Verdicts, F2LinearF1OnlyUnrestricted) {
  EXPECT_TRUE(infer_closed("\\[1] x : Pair 1 1 Int Int . case[1] x of { MkPair a b -> MkPair @[Int, Int] @[1, 1] b a }")
                  .has_value());
  auto f1_lin =
      infer_closed("\\[1] x : Pair 1 1 Int Int . case[1] x of { MkPair a b -> MkPair @[Int, Int] @[1, 1] a a }");
  ASSERT_FALSE(f1_lin.has_value());
  EXPECT_EQ(first_kind(f1_lin), Diagnostic::Kind::LinearityMismatch);
  EXPECT_TRUE(infer_closed("\\[w] x : Pair 1 1 Int Int . case[w] x of { MkPair a b -> MkPair @[Int, Int] @[1, 1] a a }")
                  .has_value());
}

TEST(Verdicts, DuplicatingLinearArgumentRejected) {
  auto r = infer_closed("\\[1] x : a . MkPair @[a, a] @[1, 1] x x");
  ASSERT_FALSE(r.has_value());
  EXPECT_EQ(first_kind(r), Diagnostic::Kind::LinearityMismatch);
}

TEST(Verdicts, PolymorphicIdentityRejected) {
  auto r = infer_closed("/\\p . \\[p] x : Int . x");
  ASSERT_FALSE(r.has_value());
  EXPECT_EQ(first_kind(r), Diagnostic::Kind::LinearityMismatch);
}

TEST(Verdicts, UnrestrictedWrapperOfLinearFunction) {
  TypeEnv env(table());
  env.bind("f", Ty("s -o t"), MultExpr::omega());
  auto r = infer(env, T("\\[w] x : s . f x"));
  ASSERT_TRUE(r.has_value());
  EXPECT_TRUE(types_equal(r->type, Ty("s -> t")));
}

TEST(Verdicts, UnusedUnrestrictedBindingIsWeakened) {
  TypeEnv env(table());
  env.bind("x", Ty("a"), MultExpr::one()).bind("y", Ty("b"), MultExpr::omega());
  auto r = check_judgement(env, T("x"));
  ASSERT_TRUE(r.has_value());
  EXPECT_TRUE(types_equal(*r, Ty("a")));
  TypeEnv lin(table());
  lin.bind("x", Ty("a"), MultExpr::one()).bind("y", Ty("b"), MultExpr::one());
  EXPECT_FALSE(check_judgement(lin, T("x")).has_value());
}

// Rule contracts.

TEST(Infer, VariableUsageIsOne) {
  TypeEnv env(table());
  env.bind("x", Type::int_(), MultExpr::one());
  auto r = infer(env, T("x"));
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->usage.get("x"), UsageMult(MultNF::one()));
}

TEST(Infer, ApplicationScalesArgumentUsage) {
  TypeEnv env(table());
  env.bind("f", Ty("Int -> Int"), MultExpr::omega()).bind("x", Type::int_(), MultExpr::omega());
  auto r = infer(env, T("f x"));
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->usage.get("x"), UsageMult(MultNF::omega()));
  EXPECT_EQ(r->usage.get("f"), UsageMult(MultNF::one()));
  EXPECT_TRUE(r->typed.arrow_annotation().has_value());
  EXPECT_TRUE(mult_equiv(*r->typed.arrow_annotation(), MultExpr::omega()));
}

TEST(Infer, ArrowMultiplicityMatchedUpToEquivalence) {
  TypeEnv env(table());
  env.bind_mult_var("p");
  env.bind("f", Ty("Int ->[1 * p] Int"), MultExpr::omega());
  env.bind("g", Ty("(Int ->[p] Int) -> Int"), MultExpr::omega());
  EXPECT_TRUE(infer(env, T("g f")).has_value());
}

TEST(Infer, CaseScalesScrutineeAndJoinsBranches) {
  TypeEnv env(table());
  env.bind("b", Ty("Bool"), MultExpr::omega()).bind("n", Type::int_(), MultExpr::omega());
  auto r = infer(env, T("case[w] b of { True -> n ; False -> 0 }"));
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->usage.get("b"), UsageMult(MultNF::omega()));
  EXPECT_EQ(r->usage.get("n"), UsageMult(MultNF::omega()));
}

TEST(Infer, UnjoinableBranchUsage) {
  auto r = infer_closed(
      "/\\p . \\[w] g : Int ->[p] Int . \\[p] x : Int . \\[w] b : Bool . case[w] b of { True -> g x ; False -> x }");
  ASSERT_FALSE(r.has_value());
  EXPECT_EQ(first_kind(r), Diagnostic::Kind::UnjoinableUsage);
}

TEST(Infer, LetScalesRightHandSides) {
  TypeEnv env(table());
  env.bind("y", Type::int_(), MultExpr::one());
  EXPECT_TRUE(infer(env, T("let[1] x : Int = y in x")).has_value());
  auto r = infer(env, T("let[w] x : Int = y in x"));
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->usage.get("y"), UsageMult(MultNF::omega()));
  EXPECT_FALSE(check_judgement(env, T("let[w] x : Int = y in x")).has_value());
}

TEST(Infer, RecursiveLetMustBeUnrestricted) {
  EXPECT_TRUE(infer_closed("let[w] loop : Int = loop in 1").has_value());
  auto src = check_text("def loop : Int =[1] loop\nmain = loop");
  EXPECT_FALSE(src.has_value());
}

TEST(Infer, MultiplicityAbstractionRequiresFreshVariable) {
  TypeEnv env(table());
  env.bind_mult_var("p");
  env.bind("f", Ty("Int ->[p] Int"), MultExpr::omega());
  auto r = infer(env, T("/\\p . f"));
  ASSERT_FALSE(r.has_value());
  EXPECT_EQ(r.error().front().kind, Diagnostic::Kind::FreshnessViolation);
}

TEST(Infer, MultiplicityApplicationSubstitutes) {
  auto r = infer_closed("(/\\p . \\[p] x : Int . MkPair @[Int, Int] @[p, w] x 1) @[1]");
  ASSERT_TRUE(r.has_value());
  EXPECT_TRUE(types_equal(r->type, Ty("Int -o Pair 1 w Int Int")));
}

TEST(Infer, OtherDiagnostics) {
  auto unbound = infer_closed("x");
  EXPECT_EQ(first_kind(unbound), Diagnostic::Kind::UnboundVariable);
  auto mismatch = infer_closed("add(True, 1)");
  EXPECT_EQ(first_kind(mismatch), Diagnostic::Kind::TypeMismatch);
  TypeEnv env(table());
  auto arity = infer(env, Term::con("MkPair", {Type::int_(), Type::int_()}, {MultExpr::one(), MultExpr::one()},
                                    {Term::int_lit(1)}));
  ASSERT_FALSE(arity.has_value());
  EXPECT_EQ(arity.error().front().kind, Diagnostic::Kind::ArityMismatch);
  auto bad_arg = infer_closed("(\\[1] x : Int . x) True");
  EXPECT_EQ(first_kind(bad_arg), Diagnostic::Kind::TypeMismatch);
}

TEST(Infer, DiagnosticsCarryLocations) {
  auto r = check_text("main =\n  \\[1] x : Int . add(x, x)");
  ASSERT_FALSE(r.has_value());
  EXPECT_EQ(r.error().front().loc.line, 2);
  EXPECT_GT(r.error().front().loc.col, 0);
}

// Programs and declarations.

TEST(CheckProgram, ArrayBuilderAccepted) {
  auto r = check_text(read_text(source_path("corpus/array_builder.lq")));
  ASSERT_TRUE(r.has_value()) << to_string(r.error().front());
  EXPECT_EQ(r->type.kind(), Type::Kind::Int);
}

TEST(CheckProgram, WriteToFrozenArrayIsTypeMismatch) {
  auto r = check_text(read_text(source_path("corpus/reject/write_after_freeze.lq")));
  ASSERT_FALSE(r.has_value());
  EXPECT_EQ(r.error().front().kind, Diagnostic::Kind::TypeMismatch);
}

TEST(CheckProgram, LiteralMain) {
  auto r = check_program({}, {}, Term::int_lit(5));
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->type.kind(), Type::Kind::Int);
}

TEST(CheckProgram, DuplicateDatatypeRejected) {
  std::vector<DataDecl> ds = prelude();
  ds.push_back(ds.front());
  auto r = check_program(ds, {}, Term::int_lit(5));
  ASSERT_FALSE(r.has_value());
  EXPECT_EQ(r.error().front().kind, Diagnostic::Kind::MalformedDecl);
}

TEST(CheckProgram, DefinitionsElaborateAroundMain) {
  auto src = parse_source("def a : Int =[w] 1\ndef b : Int =[1] a\ndef c : Int =[w] a\nmain = add(b, c)", prelude());
  ASSERT_TRUE(src.has_value());
  Term e = elaborate_program(src->defs, src->main);
  ASSERT_EQ(e.kind(), Term::Kind::Let);
  EXPECT_TRUE(e.recursive());
  EXPECT_EQ(e.bindings().size(), 2u);
  ASSERT_EQ(e.body().kind(), Term::Kind::Let);
  EXPECT_FALSE(e.body().recursive());
  EXPECT_EQ(e.body().bindings()[0].name, "b");
}

TEST(CheckProgram, RejectCorpus) {
  const std::map<std::string, Diagnostic::Kind> expected{
      {"dup_linear", Diagnostic::Kind::LinearityMismatch},  {"f1_linear", Diagnostic::Kind::LinearityMismatch},
      {"fst_linear", Diagnostic::Kind::LinearityMismatch},  {"id_poly", Diagnostic::Kind::LinearityMismatch},
      {"write_after_freeze", Diagnostic::Kind::TypeMismatch}};
  for (const auto& f : reject_files()) {
    auto r = check_text(read_text(f));
    ASSERT_FALSE(r.has_value()) << f;
    ASSERT_TRUE(expected.count(stem(f))) << f;
    EXPECT_EQ(r.error().front().kind, expected.at(stem(f))) << f;
  }
}

TEST(CheckProgram, CorpusAccepted) {
  for (const auto& f : corpus_files()) {
    auto r = check_text(read_text(f));
    EXPECT_TRUE(r.has_value()) << f << ": " << (r ? "" : to_string(r.error().front()));
  }
}

TEST(CheckDatadecl, UnrestrictedAccepted) {
  for (const auto& d : prelude()) EXPECT_TRUE(check_datadecl(d, table()).has_value()) << d.name;
}

TEST(CheckDatadecl, OutOfScopeMultiplicityRejected) {
  auto src = parse_source("data D [p] where { C : Int ->[q] D p }\nmain = 1", prelude());
  ASSERT_TRUE(src.has_value());
  DeclTable t = table();
  t.add(src->decls[0]);
  auto r = check_datadecl(src->decls[0], t);
  ASSERT_FALSE(r.has_value());
  EXPECT_EQ(r.error().front().kind, Diagnostic::Kind::MalformedDecl);
}

TEST(CheckDatadecl, ListHasLinearFields) {
  auto info = table().find_con("Cons");
  ASSERT_TRUE(info.has_value());
  for (const auto& f : info->con().fields) EXPECT_TRUE(mult_equiv(f.second, MultExpr::one()));
  EXPECT_TRUE(check_datadecl(*info->decl, table()).has_value());
}

// Properties.

namespace {

std::vector<CheckedProgram> sample_programs() {
  std::vector<CheckedProgram> out;
  for (const auto& f : corpus_files()) out.push_back(*check_text(read_text(f)));
  GenConfig cfg;
  for (std::uint64_t i = 0; i < 60; ++i) {
    cfg.seed = program_seed(9, i);
    auto g = gen_welltyped(cfg);
    std::vector<DataDecl> all = prelude();
    all.insert(all.end(), g->source.decls.begin(), g->source.decls.end());
    out.push_back(*check_program(all, g->source.defs, g->source.main));
  }
  return out;
}

}  // namespace

TEST(Properties, RecheckReproducesAnnotations) {
  for (const auto& p : sample_programs()) {
    TypeEnv env(p.decls);
    auto again = infer(env, p.typed.without_annotations());
    ASSERT_TRUE(again.has_value());
    EXPECT_TRUE(again->typed.equals(p.typed, true)) << print_term_short(p.elaborated, 200);
    auto twice = infer(env, p.typed);
    ASSERT_TRUE(twice.has_value());
    EXPECT_TRUE(twice->typed.equals(p.typed, true));
  }
}

TEST(Properties, Deterministic) {
  for (const auto& f : reject_files()) {
    auto a = check_text(read_text(f)), b = check_text(read_text(f));
    ASSERT_EQ(a.error().size(), b.error().size());
    for (std::size_t i = 0; i < a.error().size(); ++i) EXPECT_EQ(to_string(a.error()[i]), to_string(b.error()[i]));
  }
  for (const auto& p : sample_programs()) {
    TypeEnv env(p.decls);
    auto a = infer(env, p.elaborated), b = infer(env, p.elaborated);
    ASSERT_TRUE(a && b);
    EXPECT_TRUE(a->typed.equals(b->typed, true));
    EXPECT_TRUE(types_equal(a->type, b->type));
  }
}

TEST(Properties, UnusedUnrestrictedBindingsAreAccepted) {
  for (const auto& p : sample_programs()) {
    TypeEnv env(p.decls);
    env.bind("%unused", Ty("Int -o Bool"), MultExpr::omega());
    auto r = check_judgement(env, p.elaborated);
    ASSERT_TRUE(r.has_value());
    EXPECT_TRUE(types_equal(*r, p.type));
    auto wrapped = infer(TypeEnv(p.decls), Term::let({LetBinding{"unused0", MultExpr::omega(), Type::int_(),
                                                                 Term::int_lit(1)}},
                                                     true, p.elaborated));
    ASSERT_TRUE(wrapped.has_value());
    TypeEnv lin(p.decls);
    lin.bind("%unused", Type::int_(), MultExpr::one());
    EXPECT_FALSE(check_judgement(lin, p.elaborated).has_value());
  }
}

TEST(Properties, MultiplicityApplicationCommutesWithSubstitution) {
  std::mt19937_64 rng(42);
  const std::vector<std::string> polys{
      "/\\p . \\[p] x : Int . MkPair @[Int, Int] @[p, w] x 1",
      "/\\p . \\[w] f : Int ->[p] Int . \\[p] x : Int . f x",
      "/\\p . \\[w] xs : List Int . \\[p * p] y : Bool . MkPair @[Bool, List Int] @[p * p, w] y xs",
      "/\\p . /\\q . \\[p] x : Int . \\[q] y : Int . MkPair @[Int, Int] @[p, q] x y",
  };
  for (const auto& text : polys) {
    auto base = infer_closed(text);
    ASSERT_TRUE(base.has_value()) << text;
    ASSERT_EQ(base->type.kind(), Type::Kind::ForallMult);
    for (int i = 0; i < 50; ++i) {
      MultExpr m = random_mult(rng, 3, {});
      auto applied = infer_closed("(" + text + ") @[" + to_string(m) + "]");
      ASSERT_TRUE(applied.has_value()) << text << " @ " << to_string(m);
      Type expected = subst_mult(base->type.body(), base->type.name(), m);
      EXPECT_TRUE(types_equal(applied->type, expected)) << print_type(applied->type) << " vs " << print_type(expected);
      EXPECT_TRUE(applied->usage.entries().empty());
    }
  }
}
