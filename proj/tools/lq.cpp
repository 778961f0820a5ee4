// Command-line driver: check, run and fuzz `.lq` programs.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lq/eval_ordinary.hpp"
#include "lq/eval_pure.hpp"
#include "lq/harness.hpp"
#include "lq/printer.hpp"

namespace {

using nlohmann::json;

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

void print_diagnostics(const std::string& path, const lq::Diagnostics& ds) {
  for (const auto& d : ds) std::cerr << path << ":" << lq::to_string(d) << "\n";
}

std::string value_text(const lq::Outcome& o) {
  if (o.ground) return lq::to_string(*o.ground);
  if (o.value) return lq::print_term_short(*o.value, 200);
  return "";
}

struct SemResult {
  std::string semantics;
  lq::Outcome outcome;
  std::vector<lq::TraceRecord> trace;
};

json to_json(const SemResult& r, bool with_trace) {
  json j;
  j["outcome"] = lq::outcome_kind_name(r.outcome.kind);
  if (r.outcome.is_value()) j["value"] = value_text(r.outcome);
  if (r.outcome.kind == lq::Outcome::Kind::Blocked) j["reason"] = lq::reason_name(r.outcome.reason);
  j["steps"] = r.outcome.steps;
  j["semantics"] = r.semantics;
  if (with_trace) {
    json t = json::array();
    for (const auto& rec : r.trace) t.push_back({{"rule", rec.rule}, {"redex", rec.redex}});
    j["trace"] = t;
  }
  return j;
}

void print_text(const SemResult& r, bool with_trace, bool label) {
  if (with_trace) {
    for (const auto& rec : r.trace) std::cout << "  " << rec.rule << ": " << rec.redex << "\n";
  }
  if (label) std::cout << r.semantics << ": ";
  if (r.outcome.is_value())
    std::cout << value_text(r.outcome) << "\n";
  else
    std::cout << lq::describe(r.outcome) << "\n";
}

int cmd_check(const std::string& path, bool no_prelude) {
  std::string text;
  if (!read_file(path, text)) {
    std::cerr << "lq: cannot read " << path << "\n";
    return kUsage;
  }
  auto prog = lq::load_program(text, !no_prelude, true);
  if (!prog) {
    print_diagnostics(path, prog.error());
    return kFail;
  }
  std::cout << "main : " << lq::print_type(*prog->type) << "\n";
  return kOk;
}

int cmd_run(const std::string& path, const std::string& sem, std::uint64_t fuel, bool trace, bool as_json,
            bool no_prelude, bool no_typecheck) {
  std::string text;
  if (!read_file(path, text)) {
    std::cerr << "lq: cannot read " << path << "\n";
    return kUsage;
  }
  auto prog = lq::load_program(text, !no_prelude, !no_typecheck);
  if (!prog) {
    print_diagnostics(path, prog.error());
    return kFail;
  }
  std::vector<SemResult> results;
  if (sem == "ordinary" || sem == "both") {
    lq::EvalOptions o;
    o.fuel = fuel;
    o.trace = trace;
    o.force_ground = true;
    auto run = lq::run_ordinary(prog->sharing, o);
    results.push_back(SemResult{"ordinary", run.outcome, std::move(run.trace)});
  }
  if (sem == "pure" || sem == "both") {
    lq::PureOptions o;
    o.fuel = fuel;
    o.trace = trace;
    o.force_ground = true;
    auto run = lq::run_pure(prog->sharing, prog->decls, o);
    results.push_back(SemResult{"pure", run.outcome, std::move(run.trace)});
  }
  bool both = results.size() == 2;
  for (const auto& r : results) {
    if (as_json)
      std::cout << to_json(r, trace).dump() << "\n";
    else
      print_text(r, trace, both);
  }
  if (both) {
    const auto& a = results[0].outcome;
    const auto& b = results[1].outcome;
    bool agree = a.is_value() && b.is_value() ? a.ground && b.ground && *a.ground == *b.ground
                                              : a.kind == b.kind && a.kind == lq::Outcome::Kind::OutOfFuel;
    if (!agree) {
      std::cerr << "lq: the two semantics disagree\n";
      return kFail;
    }
    if (!as_json && a.is_value()) std::cout << value_text(a) << "\n";
  }
  for (const auto& r : results)
    if (!r.outcome.is_value()) return kFail;
  return kOk;
}

int cmd_fuzz(const lq::GenConfig& cfg, const lq::FuzzOptions& opts, bool as_json) {
  auto summary = lq::fuzz(cfg, opts);
  if (!summary) {
    std::cerr << "lq: " << summary.error() << "\n";
    return kUsage;
  }
  const auto& s = *summary;
  if (as_json) {
    json j = {{"programs", s.programs},
              {"generation_failures", s.generation_failures},
              {"progress_violations", s.progress_violations},
              {"preservation_violations", s.preservation_violations},
              {"disagreements", s.disagreements},
              {"blackholes", s.blackholes},
              {"fuel_outs", s.fuel_outs},
              {"state_checks", s.state_checks},
              {"reproducers", s.reproducers}};
    std::cout << j.dump() << "\n";
  } else {
    std::cout << lq::format_summary(s);
  }
  return s.clean() ? kOk : kFail;
}

int cmd_gen(lq::GenConfig cfg, std::uint64_t index) {
  cfg.seed = lq::program_seed(cfg.seed, index);
  auto g = lq::gen_welltyped(cfg);
  if (!g) {
    std::cerr << "lq: generation exhausted after " << g.error().attempts << " attempts: " << g.error().last_error
              << "\n";
    return kFail;
  }
  std::cout << lq::print_source(g->source);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear core calculus: typechecker, two evaluators and a differential fuzzer"};
  app.require_subcommand(1);

  std::string file;
  bool no_prelude = false;

  auto* check = app.add_subcommand("check", "Typecheck a program");
  check->add_option("file", file, "Source file")->required();
  check->add_flag("--no-prelude", no_prelude, "Do not prepend the prelude");

  std::string sem = "ordinary";
  std::uint64_t fuel = 100000;
  bool trace = false, as_json = false, no_typecheck = false;
  auto* run = app.add_subcommand("run", "Evaluate a program");
  run->add_option("file", file, "Source file")->required();
  run->add_option("--sem", sem, "Semantics")->check(CLI::IsMember({"ordinary", "pure", "both"}));
  run->add_option("--fuel", fuel, "Rule applications allowed");
  run->add_flag("--trace", trace, "Print every rule application");
  run->add_flag("--json", as_json, "Machine-readable output");
  run->add_flag("--no-prelude", no_prelude, "Do not prepend the prelude");
  run->add_flag("--no-typecheck", no_typecheck, "Skip typechecking (debugging aid)");

  lq::GenConfig cfg;
  lq::FuzzOptions fopts;
  bool fuzz_json = false;
  auto* fz = app.add_subcommand("fuzz", "Generate programs and compare the evaluators");
  fz->add_option("--count", fopts.count, "Number of programs");
  fz->add_option("--seed", cfg.seed, "Base seed");
  fz->add_option("--fuel", fopts.fuel, "Fuel per evaluation");
  fz->add_option("--depth", cfg.max_depth, "Maximum derivation height");
  fz->add_option("--array-prob", cfg.array_prob, "Chance of array computations at Int positions");
  fz->add_option("--repro-dir", fopts.repro_dir, "Directory for reproducer files");
  fz->add_flag("--json", fuzz_json, "Machine-readable output");

  lq::GenConfig gcfg;
  std::uint64_t gindex = 0;
  auto* gen = app.add_subcommand("gen", "Print the program a fuzz run generates at an index");
  gen->add_option("--seed", gcfg.seed, "Base seed");
  gen->add_option("--index", gindex, "Program index");
  gen->add_option("--depth", gcfg.max_depth, "Maximum derivation height");
  gen->add_option("--array-prob", gcfg.array_prob, "Chance of array computations at Int positions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (*check) return cmd_check(file, no_prelude);
  if (*run) return cmd_run(file, sem, fuel, trace, as_json, no_prelude, no_typecheck);
  if (*gen) return cmd_gen(gcfg, gindex);
  return cmd_fuzz(cfg, fopts, fuzz_json);
}
