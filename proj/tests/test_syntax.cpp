#include <gtest/gtest.h>

#include "lq/parser.hpp"
#include "lq/printer.hpp"
#include "lq/syntax.hpp"

using namespace lq;

namespace {

std::vector<DataDecl> prelude() { return *load_prelude(); }

Term T(const std::string& text) { return *parse_term(text, prelude()); }
Type Ty(const std::string& text) { return *parse_type(text, prelude()); }

}  // namespace

TEST(Types, EqualUpToMultiplicityEquivalence) {
  EXPECT_TRUE(types_equal(Ty("Int ->[1 * p] Int"), Ty("Int ->[p] Int")));
  EXPECT_TRUE(types_equal(Ty("Int ->[1 + 1] Int"), Ty("Int -> Int")));
  EXPECT_FALSE(types_equal(Ty("Int ->[p + q] Int"), Ty("Int -> Int")));
}

TEST(Types, EqualUpToBinderRenaming) {
  EXPECT_TRUE(types_equal(Ty("forall p. Int ->[p] Int"), Ty("forall q. Int ->[q] Int")));
  EXPECT_FALSE(types_equal(Ty("forall p. Int ->[p] Int"), Ty("forall q. Int ->[p] Int")));
}

TEST(Types, InstantiateIsCaptureAvoiding) {
  Type t = Ty("forall p. Int ->[q] Int ->[p] Int");
  Type r = instantiate(t, {}, {{"q", MultExpr::var("p")}});
  ASSERT_EQ(r.kind(), Type::Kind::ForallMult);
  EXPECT_NE(r.name(), "p");
  EXPECT_EQ(free_mult_vars(r), (std::set<std::string>{"p"}));
}

TEST(Types, InstantiateTypeParameters) {
  Type t = Type::data("Pair", {MultExpr::var("p"), MultExpr::one()}, {Type::var("a"), Type::var("b")});
  Type r = instantiate(t, {{"a", Type::int_()}, {"b", Ty("Bool")}}, {{"p", MultExpr::omega()}});
  EXPECT_TRUE(types_equal(r, Ty("Pair w 1 Int Bool")));
}

TEST(Terms, Values) {
  EXPECT_TRUE(T("\\[1] x : Int . x").is_value());
  EXPECT_TRUE(T("MkPair @[Int, Int] @[1, 1] x y").is_value());
  EXPECT_FALSE(T("MkPair @[Int, Int] @[1, 1] x 3").is_value());
  EXPECT_TRUE(T("3").is_value());
  EXPECT_FALSE(T("f x").is_value());
}

TEST(Terms, FreeVariables) {
  EXPECT_EQ(free_vars(T("\\[1] x : Int . add(x, y)")), (std::set<std::string>{"y"}));
  EXPECT_EQ(free_vars(T("case[1] p of { MkPair a b -> add(a, c) }")), (std::set<std::string>{"p", "c"}));
  EXPECT_EQ(free_vars(T("let[w] a : Int = b, b : Int = a in z")), (std::set<std::string>{"z"}));
  EXPECT_EQ(free_vars(T("let[1] a : Int = a in a")), (std::set<std::string>{"a"}));
}

TEST(Terms, RenameRespectsShadowing) {
  Term t = rename_vars(T("add(x, (\\[1] x : Int . x) x)"), {{"x", "z"}});
  EXPECT_EQ(print_term(t), print_term(T("add(z, (\\[1] x : Int . x) z)")));
}

TEST(Terms, MultiplicitySubstitutionAvoidsCapture) {
  Term t = subst_mult(T("/\\p . \\[q] x : Int . x"), "q", MultExpr::var("p"));
  ASSERT_EQ(t.kind(), Term::Kind::MultLam);
  EXPECT_NE(t.name(), "p");
  EXPECT_TRUE(mult_equiv(t.body().mult(), MultExpr::var("p")));
}

TEST(Terms, EqualityCanIgnoreAnnotations) {
  Term a = T("f x");
  Term b = a.annotated(Type::int_(), MultExpr::one());
  EXPECT_TRUE(a.equals(b));
  EXPECT_FALSE(a.equals(b, true));
  EXPECT_TRUE(b.without_annotations().equals(a, true));
}

TEST(Prims, ArgumentMultiplicities) {
  auto m = prim_arg_mults(PrimOp::NewMArray);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_TRUE(mult_equiv(m[1], MultExpr::omega()));
  EXPECT_TRUE(mult_equiv(prim_arg_mults(PrimOp::Write)[2], MultExpr::omega()));
  EXPECT_TRUE(mult_equiv(prim_arg_mults(PrimOp::Index)[0], MultExpr::omega()));
  EXPECT_EQ(prim_arity(PrimOp::Freeze), 1u);
  EXPECT_EQ(prim_from_name("lt"), PrimOp::Lt);
  EXPECT_FALSE(prim_from_name("div").has_value());
}

TEST(Printer, ArrowsAndConstructors) {
  EXPECT_EQ(print_type(Ty("Int ->[1] Int")), "Int -o Int");
  EXPECT_EQ(print_type(Ty("Int ->[w] Int")), "Int -> Int");
  EXPECT_EQ(print_type(Ty("Int ->[p] Int")), "Int ->[p] Int");
  EXPECT_EQ(print_term(T("Cons @[Int] 1 (Nil @[Int])")), "Cons @[Int] 1 (Nil @[Int])");
}

TEST(Printer, ShortFormIsBounded) {
  Term big = T("add(add(add(add(1, 2), 3), 4), add(add(5, 6), add(7, add(8, 9))))");
  EXPECT_LE(print_term_short(big, 20).size(), 20u);
}
