#include <gtest/gtest.h>

#include "corpus.hpp"
#include "lq/eval_pure.hpp"
#include "lq/parser.hpp"

using namespace lq;
using namespace lq::testing;

namespace {

const DeclTable& prelude_table() {
  static const DeclTable table = [] {
    DeclTable t;
    auto prelude = load_prelude();
    for (const auto& d : *prelude) t.add(d);
    return t;
  }();
  return table;
}

Term T(const std::string& text) {
  auto r = parse_term(text, prelude_table().decls());
  if (!r) throw std::runtime_error(to_string(r.error()));
  return *r;
}

AnnState with_linear_int(const std::string& x, std::int64_t v, const Term& focus) {
  AnnState s(focus);
  s.env.emplace(x, AnnState::Binding{true, Type::int_(), Term::int_lit(v)});
  return s;
}

bool is_ground_result(const Type& t) {
  return t.kind() == Type::Kind::Int || (t.kind() == Type::Kind::Data && t.name() == "Bool");
}

std::size_t count_rule(const std::vector<TraceRecord>& trace, const std::string& rule) {
  std::size_t n = 0;
  for (const auto& r : trace) n += r.rule == rule;
  return n;
}

}  // namespace

TEST(EvalPure, ArrayProgramYieldsSevenWithFreshArrayPerWrite) {
  auto p = load_file(source_path("corpus/array7.lq"));
  PureOptions o;
  o.force_ground = true;
  auto run = run_pure(p.sharing, p.decls, o);
  ASSERT_TRUE(run.outcome.is_value()) << describe(run.outcome);
  EXPECT_EQ(*run.outcome.ground, GroundValue::integer(7));
  EXPECT_EQ(run.stats.write_rules, 1u);
  EXPECT_EQ(run.stats.array_allocations, 2u);
}

TEST(EvalPure, SecondUseOfLinearBindingBlocks) {
  auto s = with_linear_int("x", 3, T("add(x, x)"));
  Outcome o = eval_pure(s, prelude_table(), 1000);
  EXPECT_EQ(o.kind, Outcome::Kind::Blocked);
  EXPECT_EQ(o.reason, BlockReason::MissingLinearBinding);
  EXPECT_EQ(o.location, "x");
}

TEST(EvalPure, UnrestrictedDemandOfLinearBindingBlocks) {
  auto s = with_linear_int("x", 3, T("x"));
  s.focus_linear = false;
  Outcome o = eval_pure(s, prelude_table(), 1000);
  EXPECT_EQ(o.kind, Outcome::Kind::Blocked);
  EXPECT_EQ(o.reason, BlockReason::MissingLinearBinding);
  EXPECT_EQ(o.rule, "linear variable");
}

TEST(EvalPure, IllFoundedRecursionIsBlackhole) {
  auto run = run_pure(T("let[w] loop : Int = loop in loop"), prelude_table(), PureOptions{});
  EXPECT_EQ(run.outcome.kind, Outcome::Kind::Blackhole);
}

TEST(EvalPure, OutOfFuelAtZero) {
  PureOptions o;
  o.fuel = 0;
  o.trace = true;
  auto run = run_pure(T("3"), prelude_table(), o);
  EXPECT_EQ(run.outcome.kind, Outcome::Kind::OutOfFuel);
  EXPECT_TRUE(run.trace.empty());
}

TEST(EvalPure, SharedVariableIsUpdatedWithItsValue) {
  PureOptions o;
  o.trace = true;
  auto run = run_pure(T("let[w] x : Int = mul(6, 7) in add(x, x)"), prelude_table(), o);
  ASSERT_TRUE(run.outcome.is_value());
  EXPECT_EQ(run.outcome.value->int_value(), 84);
  EXPECT_EQ(count_rule(run.trace, "shared variable"), 2u);
  EXPECT_EQ(count_rule(run.trace, "primitive"), 2u);  // mul once, add once
}

TEST(EvalPure, TraceUsesRuleLabels) {
  auto p = load_file(source_path("corpus/array7.lq"));
  PureOptions o;
  o.trace = true;
  auto run = run_pure(p.sharing, p.decls, o);
  for (const char* rule : {"case", "newMArray", "write", "freeze", "index", "linear variable", "app", "let"})
    EXPECT_GT(count_rule(run.trace, rule), 0u) << rule;
  EXPECT_EQ(count_rule(run.trace, "mutable cell"), 0u);
}

TEST(EvalPure, GroundProgramsLeaveNoLinearBindings) {
  for (const auto& f : corpus_files()) {
    auto p = load_file(f);
    if (!is_ground_result(*p.type)) continue;
    PureOptions o;
    o.force_ground = true;
    auto run = run_pure(p.sharing, p.decls, o);
    ASSERT_TRUE(run.outcome.is_value()) << f;
    EXPECT_EQ(run.final_linear_bindings, 0u) << f;
  }
}

TEST(EvalPure, WritesNeverMutate) {
  // Every write produces a new array value; the initial one comes from
  // newMArray.
  for (const auto& f : corpus_files()) {
    auto p = load_file(f);
    auto run = run_pure(p.sharing, p.decls, PureOptions{});
    EXPECT_EQ(run.stats.array_allocations, run.stats.newmarray_rules + run.stats.write_rules) << f;
  }
}

TEST(StateWelltyped, InitialStateOfCorpusProgram) {
  for (const auto& f : corpus_files()) {
    auto p = load_file(f);
    EXPECT_TRUE(state_welltyped(AnnState(p.sharing), p.decls)) << f;
  }
}

TEST(StateWelltyped, LinearBindingDemandedUnrestrictedly) {
  auto s = with_linear_int("x", 3, T("x"));
  s.focus_linear = false;
  EXPECT_FALSE(state_welltyped(s, prelude_table()));
  s.focus_linear = true;
  EXPECT_TRUE(state_welltyped(s, prelude_table()));
}

TEST(StateWelltyped, FocusOnMissingVariable) {
  AnnState s(T("x"));
  EXPECT_FALSE(state_welltyped(s, prelude_table()));
}

TEST(StateWelltyped, StackEntriesCountTowardsUsage) {
  // x is consumed by the stack entry, so the focus may not mention it.
  auto s = with_linear_int("x", 3, T("4"));
  s.stack.push_back(AnnState::Frame{T("x"), true, std::nullopt});
  EXPECT_TRUE(state_welltyped(s, prelude_table()));
  s.focus = T("x");
  EXPECT_FALSE(state_welltyped(s, prelude_table()));
}

TEST(StateWelltyped, UnusedLinearBindingIsIllTyped) {
  auto s = with_linear_int("x", 3, T("4"));
  EXPECT_FALSE(state_welltyped(s, prelude_table()));
}

TEST(StateWelltyped, EncodingPairsFocusWithEveryStackEntry) {
  auto s = with_linear_int("x", 3, T("4"));
  s.stack.push_back(AnnState::Frame{T("x"), true, std::nullopt});
  s.stack.push_back(AnnState::Frame{T("5"), false, std::nullopt});
  Term enc = encode_state(s, with_state_decls(prelude_table()));
  ASSERT_EQ(enc.kind(), Term::Kind::Let);
  std::size_t pairs = 0;
  for (Term t = enc.body(); t.kind() == Term::Kind::Con && !t.args().empty(); t = t.args()[1]) ++pairs;
  EXPECT_EQ(pairs, s.stack.size() + 1);
}

TEST(InstrumentedEval, CorpusHasNoViolations) {
  for (const auto& f : corpus_files()) {
    auto p = load_file(f);
    auto run = instrumented_eval(AnnState(p.sharing), p.decls, 100000);
    EXPECT_TRUE(run.precondition_ok) << f;
    EXPECT_TRUE(run.outcome.is_value()) << f << ": " << describe(run.outcome);
    EXPECT_EQ(run.violations, 0u) << f << ": " << run.violation;
    EXPECT_GT(run.checks, 1u) << f;
  }
}

TEST(InstrumentedEval, IllTypedInitialStateIsRejected) {
  auto s = with_linear_int("x", 3, T("add(x, x)"));
  auto run = instrumented_eval(s, prelude_table(), 1000);
  EXPECT_FALSE(run.precondition_ok);
  EXPECT_EQ(run.outcome.rule, "precondition");
}

TEST(InstrumentedEval, LinearVariableRemovesBindingAndStaysWelltyped) {
  auto s = with_linear_int("x", 3, T("x"));
  PureOptions o;
  o.instrumented = true;
  o.trace = true;
  auto run = run_pure(s, prelude_table(), o);
  ASSERT_TRUE(run.outcome.is_value());
  EXPECT_EQ(run.outcome.value->int_value(), 3);
  EXPECT_EQ(count_rule(run.trace, "linear variable"), 1u);
  EXPECT_EQ(run.final_linear_bindings, 0u);
  EXPECT_EQ(run.final_env_size, 0u);
  EXPECT_EQ(run.violations, 0u);
  EXPECT_GE(run.checks, 3u);  // initial state, literal, linear variable
}

TEST(InstrumentedEval, GeneratedProgramsHaveNoViolations) {
  GenConfig cfg;
  for (std::uint64_t i = 0; i < 60; ++i) {
    cfg.seed = program_seed(77, i);
    auto g = gen_welltyped(cfg);
    ASSERT_TRUE(g.has_value());
    auto p = load_checked(g->source, *load_prelude());
    ASSERT_TRUE(p.has_value());
    auto run = instrumented_eval(AnnState(p->sharing), p->decls, 100000);
    EXPECT_EQ(run.violations, 0u) << i << ": " << run.violation;
    EXPECT_NE(run.outcome.kind, Outcome::Kind::Blocked) << i << ": " << describe(run.outcome);
  }
}
