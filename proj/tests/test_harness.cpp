#include <gtest/gtest.h>

#include "corpus.hpp"
#include "lq/parser.hpp"
#include "lq/printer.hpp"

using namespace lq;
using namespace lq::testing;

TEST(Generate, DepthOneIntIsLiteral) {
  GenConfig cfg;
  cfg.max_depth = 1;
  cfg.target = Type::int_();
  for (std::uint64_t s = 1; s <= 10; ++s) {
    cfg.seed = s;
    auto g = gen_welltyped(cfg);
    ASSERT_TRUE(g.has_value());
    EXPECT_EQ(g->source.main.kind(), Term::Kind::IntLit);
    EXPECT_EQ(g->type.kind(), Type::Kind::Int);
  }
}

TEST(Generate, ProgramsTypecheckAtTheirReportedType) {
  GenConfig cfg;
  for (std::uint64_t i = 0; i < 100; ++i) {
    cfg.seed = program_seed(3, i);
    auto g = gen_welltyped(cfg);
    ASSERT_TRUE(g.has_value()) << g.error().last_error;
    std::vector<DataDecl> all = *load_prelude();
    all.insert(all.end(), g->source.decls.begin(), g->source.decls.end());
    auto r = check_program(all, g->source.defs, g->source.main);
    ASSERT_TRUE(r.has_value()) << print_source(g->source) << "\n" << to_string(r.error().front());
    EXPECT_TRUE(types_equal(r->type, g->type));
  }
}

TEST(Generate, RequestedTargetIsHonoured) {
  GenConfig cfg;
  cfg.target = *parse_type("Bool", *load_prelude());
  for (std::uint64_t i = 0; i < 20; ++i) {
    cfg.seed = program_seed(4, i);
    auto g = gen_welltyped(cfg);
    ASSERT_TRUE(g.has_value());
    EXPECT_TRUE(types_equal(g->type, *cfg.target));
  }
}

TEST(Generate, DeterministicInConfig) {
  GenConfig cfg;
  for (std::uint64_t i = 0; i < 20; ++i) {
    cfg.seed = program_seed(8, i);
    auto a = gen_welltyped(cfg), b = gen_welltyped(cfg);
    ASSERT_TRUE(a && b);
    EXPECT_EQ(print_source(a->source), print_source(b->source));
  }
}

TEST(Generate, SeedsAreSpread) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(program_seed(1, i));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_NE(program_seed(1, 0), program_seed(2, 0));
}

TEST(Generate, InvalidConfigRejected) {
  GenConfig cfg;
  cfg.weight_one = -1;
  EXPECT_FALSE(cfg.validate().empty());
  cfg = GenConfig{};
  cfg.max_depth = 0;
  EXPECT_FALSE(cfg.validate().empty());
  cfg = GenConfig{};
  cfg.array_prob = 1.5;
  EXPECT_FALSE(cfg.validate().empty());
  EXPECT_TRUE(GenConfig{}.validate().empty());
}

TEST(Bisim, ArrayRoundTrip) {
  auto p = load_file(source_path("corpus/array7.lq"));
  auto d = bisim_run(p, 100000, "array7");
  EXPECT_TRUE(d.agree);
  EXPECT_EQ(*d.ordinary.ground, GroundValue::integer(7));
  EXPECT_EQ(*d.pure.ground, GroundValue::integer(7));
  EXPECT_EQ(d.ordinary_stats.cell_allocations, 1u);
  EXPECT_EQ(d.pure_stats.array_allocations, 2u);
}

TEST(Bisim, BooleanResult) {
  auto p = load_text("main = case[1] lt(1, 2) of { True -> False ; False -> True }");
  auto d = bisim_run(p, 1000);
  EXPECT_TRUE(d.agree);
  EXPECT_EQ(to_string(*d.pure.ground), "False");
}

TEST(Bisim, CorpusAgrees) {
  for (const auto& f : corpus_files()) {
    auto d = bisim_run(load_file(f), 100000, stem(f));
    EXPECT_TRUE(d.agree) << f << ": " << describe(d.ordinary) << " / " << describe(d.pure);
    EXPECT_TRUE(d.ordinary.is_value()) << f;
  }
}

TEST(Bisim, BothOutOfFuelAgree) {
  auto p = load_file(source_path("corpus/fib.lq"));
  auto d = bisim_run(p, 5);
  EXPECT_EQ(d.ordinary.kind, Outcome::Kind::OutOfFuel);
  EXPECT_EQ(d.pure.kind, Outcome::Kind::OutOfFuel);
  EXPECT_TRUE(d.agree);
}

TEST(Fuzz, ZeroCountRejected) {
  FuzzOptions o;
  o.count = 0;
  EXPECT_FALSE(fuzz(GenConfig{}, o).has_value());
}

TEST(Fuzz, InvalidConfigRejected) {
  GenConfig cfg;
  cfg.max_datatypes = -1;
  EXPECT_FALSE(fuzz(cfg, FuzzOptions{}).has_value());
}

TEST(Fuzz, WithoutArraysIsClean) {
  GenConfig cfg;
  cfg.array_prob = 0;
  FuzzOptions o;
  o.count = 50;
  auto s = fuzz(cfg, o);
  ASSERT_TRUE(s.has_value());
  EXPECT_TRUE(s->clean()) << format_summary(*s);
  EXPECT_EQ(s->programs, 50u);
  EXPECT_GT(s->state_checks, 0u);
}

TEST(Fuzz, ReproducibleFromSeed) {
  GenConfig cfg;
  cfg.seed = 99;
  FuzzOptions o;
  o.count = 30;
  o.check_preservation = false;
  auto a = fuzz(cfg, o), b = fuzz(cfg, o);
  ASSERT_TRUE(a && b);
  EXPECT_EQ(format_summary(*a), format_summary(*b));
  EXPECT_EQ(a->state_checks, 0u);
}

TEST(Fuzz, CleanRunWritesNoReproducers) {
  auto dir = std::filesystem::temp_directory_path() / "lq_fuzz_repro_test";
  std::filesystem::remove_all(dir);
  GenConfig cfg;
  FuzzOptions o;
  o.count = 20;
  o.repro_dir = dir.string();
  auto s = fuzz(cfg, o);
  ASSERT_TRUE(s.has_value());
  EXPECT_TRUE(s->clean());
  EXPECT_TRUE(s->reproducers.empty());
  EXPECT_TRUE(!std::filesystem::exists(dir) || std::filesystem::is_empty(dir));
}

TEST(Fuzz, SummariesMerge) {
  FuzzSummary a, b;
  a.programs = 3;
  a.disagreements = 1;
  a.reproducers = {"x.lq"};
  b.programs = 4;
  b.state_checks = 10;
  b.reproducers = {"y.lq"};
  a.merge(b);
  EXPECT_EQ(a.programs, 7u);
  EXPECT_EQ(a.state_checks, 10u);
  EXPECT_EQ(a.reproducers.size(), 2u);
  EXPECT_FALSE(a.clean());
  EXPECT_TRUE(b.clean());
}
