#include <gtest/gtest.h>

#include "corpus.hpp"
#include "lq/parser.hpp"
#include "lq/printer.hpp"

using namespace lq;
using namespace lq::testing;

namespace {

std::vector<DataDecl> prelude() { return *load_prelude(); }

Term T(const std::string& text) {
  auto r = parse_term(text, prelude());
  if (!r) throw std::runtime_error(to_string(r.error()));
  return *r;
}

Type Ty(const std::string& text) {
  auto r = parse_type(text, prelude());
  if (!r) throw std::runtime_error(to_string(r.error()));
  return *r;
}

bool same_source(const SourceFile& a, const SourceFile& b) {
  if (a.decls.size() != b.decls.size() || a.defs.size() != b.defs.size()) return false;
  for (std::size_t i = 0; i < a.decls.size(); ++i)
    if (print_decl(a.decls[i]) != print_decl(b.decls[i])) return false;
  for (std::size_t i = 0; i < a.defs.size(); ++i) {
    const auto &x = a.defs[i], &y = b.defs[i];
    if (x.name != y.name || !types_equal(x.type, y.type) || !mult_equiv(x.mult, y.mult) || !x.body.equals(y.body))
      return false;
  }
  return a.main.equals(b.main);
}

}  // namespace

TEST(Parse, LinearLambda) {
  Term t = T("\\[1] x : Int . x");
  ASSERT_EQ(t.kind(), Term::Kind::Lam);
  EXPECT_TRUE(mult_equiv(t.mult(), MultExpr::one()));
  EXPECT_EQ(t.name(), "x");
  EXPECT_EQ(t.binder_type().kind(), Type::Kind::Int);
  EXPECT_EQ(t.body(), Term::var("x"));
}

TEST(Parse, LollipopIsLinearArrow) {
  Type a = Ty("Int -o Bool"), b = Ty("Int ->[1] Bool");
  EXPECT_TRUE(types_equal(a, b));
  EXPECT_TRUE(types_equal(Ty("Int -> Int"), Ty("Int ->[w] Int")));
}

TEST(Parse, ArrowsAssociateRight) {
  Type t = Ty("Int -o Int -> Int");
  ASSERT_EQ(t.kind(), Type::Kind::Arrow);
  EXPECT_EQ(t.cod().kind(), Type::Kind::Arrow);
  EXPECT_EQ(t.dom().kind(), Type::Kind::Int);
}

TEST(Parse, ApplicationAssociatesLeft) {
  Term t = T("f x y");
  ASSERT_EQ(t.kind(), Term::Kind::App);
  EXPECT_EQ(t.arg(), Term::var("y"));
  EXPECT_EQ(t.fun().kind(), Term::Kind::App);
}

TEST(Parse, MultiplicityExpressions) {
  auto m = parse_mult("p * (q + 1)");
  ASSERT_TRUE(m.has_value());
  EXPECT_TRUE(mult_equiv(*m, *parse_mult("p * q + p")));
}

TEST(Parse, ConstructorInstantiation) {
  Term t = T("MkPair @[Int, Bool] @[1, w] 3 True");
  ASSERT_EQ(t.kind(), Term::Kind::Con);
  EXPECT_EQ(t.args().size(), 2u);
  EXPECT_EQ(t.type_inst().size(), 2u);
  EXPECT_TRUE(mult_equiv(t.mult_inst()[1], MultExpr::omega()));
}

TEST(Parse, LetGroupAndOverride) {
  Term rec = T("let[w] a : Int = 1, b : Int = a in b");
  EXPECT_TRUE(rec.recursive());
  EXPECT_EQ(rec.bindings().size(), 2u);
  Term lin = T("let[1] a : Int = 1 in a");
  EXPECT_FALSE(lin.recursive());
}

TEST(Parse, NegativeLiteralAndPrimitive) {
  Term t = T("add(-3, 4)");
  ASSERT_EQ(t.kind(), Term::Kind::Prim);
  EXPECT_EQ(t.args()[0].int_value(), -3);
}

TEST(Parse, SyntaxErrorsArePositioned) {
  auto r = parse_source("main = case[1] x of { True -> 1 ", prelude());
  ASSERT_FALSE(r.has_value());
  EXPECT_EQ(r.error().kind, Diagnostic::Kind::SyntaxError);
  EXPECT_EQ(r.error().loc.line, 1);
  EXPECT_GT(r.error().loc.col, 0);
  auto r2 = parse_source("main = \\[1] x Int . x", prelude());
  ASSERT_FALSE(r2.has_value());
  EXPECT_EQ(r2.error().loc.col, 15);
}

TEST(Parse, MissingMainIsAnError) {
  EXPECT_FALSE(parse_source("def x : Int =[w] 1\n", prelude()).has_value());
}

TEST(Parse, UnknownConstructorIsAnError) {
  EXPECT_FALSE(parse_source("main = Nope 1", prelude()).has_value());
}

TEST(Parse, ConstructorResultMustBeTheDeclaredType) {
  auto r = parse_source("data D where { C : Int -o Bool }\nmain = 1", prelude());
  ASSERT_FALSE(r.has_value());
  EXPECT_EQ(r.error().kind, Diagnostic::Kind::MalformedDecl);
}

TEST(Prelude, DeclaresTheFourDatatypes) {
  auto ds = prelude();
  std::vector<std::string> names;
  for (const auto& d : ds) names.push_back(d.name);
  EXPECT_EQ(names, (std::vector<std::string>{"Bool", "Pair", "List", "Unrestricted"}));
}

TEST(Prelude, RoundTripsThroughThePrinter) {
  auto first = parse_source(prelude_text() + "\nmain = 0\n");
  ASSERT_TRUE(first.has_value());
  std::string printed = print_source(*first);
  auto second = parse_source(printed);
  ASSERT_TRUE(second.has_value()) << printed;
  EXPECT_TRUE(same_source(*first, *second));
  EXPECT_EQ(print_source(*second), printed);
}

TEST(Prelude, OverriddenByEnvironment) {
  auto path = std::filesystem::temp_directory_path() / "lq_prelude_test.lq";
  {
    std::ofstream out(path);
    out << "data Bool where { False : Bool ; True : Bool }\n";
  }
  setenv("LLQ_PRELUDE", path.c_str(), 1);
  auto ds = load_prelude();
  unsetenv("LLQ_PRELUDE");
  ASSERT_TRUE(ds.has_value());
  EXPECT_EQ(ds->size(), 1u);
  setenv("LLQ_PRELUDE", "/nonexistent/prelude.lq", 1);
  EXPECT_FALSE(load_prelude().has_value());
  unsetenv("LLQ_PRELUDE");
}

TEST(RoundTrip, CorpusIsStableUnderPrintAndParse) {
  auto files = corpus_files();
  auto rejects = reject_files();
  files.insert(files.end(), rejects.begin(), rejects.end());
  for (const auto& f : files) {
    auto first = parse_source(read_text(f), prelude());
    ASSERT_TRUE(first.has_value()) << f;
    std::string printed = print_source(*first);
    auto second = parse_source(printed, prelude());
    ASSERT_TRUE(second.has_value()) << f << "\n" << printed;
    EXPECT_TRUE(same_source(*first, *second)) << f;
    EXPECT_EQ(print_source(*second), printed) << f;
  }
}

TEST(RoundTrip, GeneratedProgramsAreStable) {
  GenConfig cfg;
  for (std::uint64_t i = 0; i < 100; ++i) {
    cfg.seed = program_seed(5, i);
    auto g = gen_welltyped(cfg);
    ASSERT_TRUE(g.has_value());
    std::string printed = print_source(g->source);
    auto parsed = parse_source(printed, prelude());
    ASSERT_TRUE(parsed.has_value()) << printed;
    EXPECT_TRUE(same_source(g->source, *parsed)) << printed;
  }
}
