#include "repfair/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <random>
#include <sstream>

#include "repfair/axioms.hpp"
#include "repfair/io.hpp"
#include "repfair/repro.hpp"
#include "repfair/solvers_general.hpp"
#include "repfair/solvers_two.hpp"
#include "repfair/variable_k.hpp"

namespace repfair {

namespace {

struct Options {
  std::optional<std::uint64_t> budget_nodes;

  std::string instance;
  std::string sequence;
  std::string output;
  std::string fraction;

  std::string axioms = "ef,ef1,weak-ef1,prop,prop1,prop11,po";
  std::string scope = "both";

  std::string goal;
  std::optional<std::int64_t> k;
  std::string predicate;
  bool max_welfare = false;

  std::int64_t n = 2;
  std::int64_t m = 3;
  std::uint64_t seed = 0;
  std::int64_t lo = -5;
  std::int64_t hi = 5;
  std::int64_t max_den = 1;
  std::string mode = "mixed";
};

bool single_round_only(Axiom a) {
  return a == Axiom::EF1 || a == Axiom::WeakEF1 || a == Axiom::PROP1 || a == Axiom::PROP11;
}

std::vector<Axiom> parse_axiom_list(const std::string& text) {
  std::vector<Axiom> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (!part.empty()) out.push_back(parse_axiom(part));
  }
  if (out.empty()) throw PreconditionError("no axioms given");
  return out;
}

std::string utilities_line(const Instance& inst, const CountMatrix& cm) {
  std::ostringstream os;
  const auto u = utility_vector(inst, cm);
  for (AgentIndex i = 0; i < u.size(); ++i) os << (i ? " " : "") << inst.agents()[i] << "=" << u[i];
  return os.str();
}

// Writes the sequence to --output, or to stdout with the summary going to stderr.
void emit_sequence(const Options& opt, const Instance& inst, const Sequence& seq, const std::string& summary,
                   std::ostream& out, std::ostream& err) {
  const std::string text = format_sequence(inst, seq);
  if (opt.output.empty()) {
    out << text;
    err << summary;
  } else {
    write_text_file(opt.output, text);
    out << summary;
  }
}

int cmd_check(const Options& opt, const SearchBudget& budget, std::ostream& out) {
  const Instance inst = parse_instance(read_text_file(opt.instance));
  const Sequence seq = parse_sequence(inst, read_text_file(opt.sequence));
  const auto axioms = parse_axiom_list(opt.axioms);
  const bool per_round = opt.scope == "both" || parse_scope(opt.scope == "both" ? "per-round" : opt.scope) == Scope::PerRound;
  const bool whole = opt.scope == "both" || parse_scope(opt.scope) == Scope::Overall;

  bool all = true;
  const CountMatrix cm = overall(seq);
  out << "rounds: " << seq.size() << "\n";
  out << "overall utilities: " << utilities_line(inst, cm) << "\n";
  for (const Axiom a : axioms) {
    if (per_round) {
      std::size_t failures = 0;
      std::string first;
      for (std::size_t r = 0; r < seq.size(); ++r) {
        const AxiomVerdict v = check_round(inst, seq[r], a, budget);
        if (!v.holds && failures++ == 0) first = "round " + std::to_string(r + 1) + ": " + describe(inst, v);
      }
      out << axiom_name(a) << " per-round: ";
      if (failures == 0) {
        out << "holds\n";
      } else {
        out << "FAILS in " << failures << " of " << seq.size() << " rounds (" << first << ")\n";
        all = false;
      }
    }
    if (whole) {
      if (single_round_only(a)) {
        if (opt.scope != "both") throw PreconditionError(std::string(axiom_name(a)) + " is defined for single rounds only");
        continue;
      }
      const AxiomVerdict v = check_overall(inst, cm, a, budget);
      out << axiom_name(a) << " overall: " << (v.holds ? "holds" : "FAILS (" + describe(inst, v) + ")") << "\n";
      all = all && v.holds;
    }
  }
  return all ? kExitOk : kExitFails;
}

int cmd_solve(const Options& opt, const SearchBudget& budget, std::ostream& out, std::ostream& err) {
  const Instance inst = parse_instance(read_text_file(opt.instance));
  const std::int64_t n = static_cast<std::int64_t>(inst.num_agents());
  Sequence seq;
  std::string goal_pred;
  std::ostringstream note;
  if (opt.goal == "prop-po") {
    const auto sol = solve_prop_po(inst, opt.k.value_or(n), budget);
    seq = sol.sequence;
    goal_pred = "prop & po";
  } else if (opt.goal == "ef-po-2") {
    seq = solve_ef_po_two(inst, opt.k.value_or(2), budget).sequence;
    goal_pred = "ef & po";
  } else if (opt.goal == "ef-po-ef1-2x2") {
    if (opt.k.value_or(2) != 2) throw PreconditionError("goal ef-po-ef1-2x2 needs k=2");
    seq = refine_ef1_k2(inst, solve_ef_po_two(inst, 2, budget).sequence, budget);
    goal_pred = "ef & po & ef1:per-round";
  } else if (opt.goal == "weak-ef1-2") {
    std::size_t moves = 0;
    seq = refine_weak_ef1(inst, solve_ef_po_two(inst, opt.k.value_or(2), budget).sequence, &moves, budget);
    note << "transfers: " << moves << "\n";
    goal_pred = "ef & po & weak-ef1:per-round";
  } else if (opt.goal == "ef-ef1-2") {
    seq = solve_ef_perround_ef1(inst, opt.k.value_or(2));
    goal_pred = "ef & ef1:per-round";
  } else if (opt.goal == "variable-k") {
    std::optional<FractionalAllocation> x;
    if (!opt.fraction.empty()) x = parse_fraction(inst, read_text_file(opt.fraction));
    const VariableKSolution sol = solve_variable_k(inst, x);
    if (opt.k && *opt.k != sol.k) note << "note: --k ignored; the lottery fixes k=" << sol.k << "\n";
    seq = sol.sequence;
    goal_pred = "ef & po & prop11:per-round";
  } else {
    throw PreconditionError("unknown goal '" + opt.goal + "'");
  }

  const Predicate pred = Predicate::parse(goal_pred);
  const bool ok = satisfies(inst, seq, pred, budget);
  std::ostringstream summary;
  summary << "goal " << opt.goal << ", k=" << seq.size() << "\n"
          << "overall utilities: " << utilities_line(inst, overall(seq)) << "\n"
          << note.str() << (ok ? "verified: " : "VERIFICATION FAILED: ") << pred.str() << "\n";
  emit_sequence(opt, inst, seq, summary.str(), out, err);
  return ok ? kExitOk : kExitFails;
}

int cmd_oracle(const Options& opt, const SearchBudget& budget, std::ostream& out, std::ostream& err) {
  const Instance inst = parse_instance(read_text_file(opt.instance));
  const Predicate pred = Predicate::parse(opt.predicate);
  const auto r = exhaustive_search(inst, *opt.k, pred, budget,
                                   opt.max_welfare ? SearchMode::MaxWelfare : SearchMode::FirstFound);
  if (r.status == ExhaustiveResult::Status::CertifiedNone) {
    out << "CERTIFIED-NONE: no " << *opt.k << "-round sequence satisfies " << pred.str() << " (" << r.nodes
        << " nodes)\n";
    return kExitFails;
  }
  std::ostringstream summary;
  summary << "FOUND: " << pred.str() << ", k=" << *opt.k << " (" << r.nodes << " nodes)\n"
          << "overall utilities: " << utilities_line(inst, overall(*r.sequence)) << "\n";
  emit_sequence(opt, inst, *r.sequence, summary.str(), out, err);
  return kExitOk;
}

std::int64_t draw(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

int cmd_gen(const Options& opt, std::ostream& out) {
  if (opt.n < 1 || opt.m < 0) throw PreconditionError("need n >= 1 and m >= 0");
  if (opt.lo > opt.hi) throw PreconditionError("empty value range");
  if (opt.max_den < 1) throw PreconditionError("--max-den must be positive");
  std::int64_t lo = opt.lo;
  std::int64_t hi = opt.hi;
  if (opt.mode == "goods") {
    if (hi <= 0) throw PreconditionError("goods need a positive upper bound");
    lo = std::max<std::int64_t>(lo, 0);
  } else if (opt.mode == "chores") {
    if (lo >= 0) throw PreconditionError("chores need a negative lower bound");
    hi = std::min<std::int64_t>(hi, 0);
  } else if (opt.mode != "mixed") {
    throw PreconditionError("mode must be goods, chores or mixed");
  }
  std::mt19937_64 rng(opt.seed);
  std::vector<std::vector<Rational>> rows(static_cast<std::size_t>(opt.n));
  for (auto& row : rows) {
    for (std::int64_t o = 0; o < opt.m; ++o) {
      const std::int64_t den = draw(rng, 1, opt.max_den);
      std::int64_t num_lo = lo * den;
      std::int64_t num_hi = hi * den;
      if (opt.mode == "goods") num_lo = std::max<std::int64_t>(num_lo, 1);
      if (opt.mode == "chores") num_hi = std::min<std::int64_t>(num_hi, -1);
      row.emplace_back(static_cast<long>(draw(rng, num_lo, num_hi)), static_cast<long>(den));
    }
  }
  const std::string text = format_instance(Instance::from_matrix(std::move(rows)));
  if (opt.output.empty()) {
    out << text;
  } else {
    write_text_file(opt.output, text);
  }
  return kExitOk;
}

int cmd_decompose(const Options& opt, std::ostream& out) {
  const Instance inst = parse_instance(read_text_file(opt.instance));
  std::optional<FractionalAllocation> x;
  if (!opt.fraction.empty()) x = parse_fraction(inst, read_text_file(opt.fraction));
  const VariableKSolution sol = solve_variable_k(inst, x);
  const LaminarConstraintSet quotas = build_laminar_constraints(inst, sol.fraction);
  const AxiomVerdict support = verify_prop11_support(inst, sol.lottery);

  nlohmann::ordered_json doc;
  doc["fraction"] = nlohmann::ordered_json::parse(format_fraction(sol.fraction))["shares"];
  doc["support"] = nlohmann::ordered_json::parse(format_lottery(inst, sol.lottery))["support"];
  doc["k"] = sol.k;
  doc["rounds"] = nlohmann::ordered_json::parse(format_sequence(inst, sol.sequence))["rounds"];
  if (!opt.output.empty()) write_text_file(opt.output, doc.dump(2) + "\n");

  out << "fractional allocation:\n";
  for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
    out << "  " << inst.agents()[i] << ":";
    for (ItemIndex o = 0; o < inst.num_items(); ++o) out << ' ' << sol.fraction.share(i, o);
    out << "\n";
  }
  out << "quota sets: " << quotas.sets.size() << " (laminar: " << (quotas.is_laminar() ? "yes" : "no") << ")\n";
  out << "support size: " << sol.lottery.support.size() << "\n";
  for (const auto& [p, a] : sol.lottery.support) {
    out << "  p=" << p << ":";
    for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
      out << ' ' << inst.agents()[i] << "={";
      bool first = true;
      for (const ItemIndex o : a.bundle(i)) {
        out << (first ? "" : ",") << inst.items()[o];
        first = false;
      }
      out << '}';
    }
    out << "\n";
  }
  out << "support PROP[1,1]: " << describe(inst, support) << "\n";
  out << "k=" << sol.k << ", overall utilities: " << utilities_line(inst, overall(sol.sequence)) << "\n";
  return support.holds ? kExitOk : kExitFails;
}

int cmd_repro(const SearchBudget& budget, std::ostream& out) {
  const auto checks = run_reference_examples(budget);
  std::size_t passed = 0;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) out << " [" << c.detail << "]";
    out << "\n";
    passed += c.passed ? 1 : 0;
  }
  out << passed << "/" << checks.size() << " passed\n";
  return passed == checks.size() ? kExitOk : kExitFails;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Repeated fair division: checkers, solvers and exhaustive oracles", "repfair"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--budget-nodes", opt.budget_nodes, "Search node limit (overrides REPFAIR_BUDGET_NODES)");

  auto* check = app.add_subcommand("check", "Evaluate axioms on a sequence");
  check->add_option("--instance,-i", opt.instance, "Instance JSON")->required();
  check->add_option("--sequence,-s", opt.sequence, "Sequence JSON")->required();
  check->add_option("--axioms,-a", opt.axioms, "Comma-separated axioms")->capture_default_str();
  check->add_option("--scope", opt.scope, "per-round, overall or both")->capture_default_str();

  auto* solve = app.add_subcommand("solve", "Run a constructive solver");
  solve->add_option("--instance,-i", opt.instance, "Instance JSON")->required();
  solve->add_option("--goal,-g", opt.goal, "prop-po, ef-po-2, ef-po-ef1-2x2, weak-ef1-2, ef-ef1-2, variable-k")
      ->required();
  solve->add_option("--k,-k", opt.k, "Number of rounds");
  solve->add_option("--fraction,-x", opt.fraction, "Fractional allocation JSON (variable-k)");
  solve->add_option("--output,-o", opt.output, "Write the sequence here instead of stdout");

  auto* oracle = app.add_subcommand("oracle", "Exhaustive search over all k-round sequences");
  oracle->add_option("--instance,-i", opt.instance, "Instance JSON")->required();
  oracle->add_option("--k,-k", opt.k, "Number of rounds")->required();
  oracle->add_option("--predicate,-p", opt.predicate, "e.g. \"ef & po & ef1:per-round\"")->required();
  oracle->add_flag("--max-welfare", opt.max_welfare, "Return a welfare-maximal satisfier");
  oracle->add_option("--output,-o", opt.output, "Write the sequence here instead of stdout");

  auto* gen = app.add_subcommand("gen", "Generate a random instance");
  gen->add_option("--n", opt.n, "Agents")->capture_default_str();
  gen->add_option("--m", opt.m, "Items")->capture_default_str();
  gen->add_option("--seed", opt.seed, "RNG seed")->capture_default_str();
  gen->add_option("--lo", opt.lo, "Smallest utility")->capture_default_str();
  gen->add_option("--hi", opt.hi, "Largest utility")->capture_default_str();
  gen->add_option("--max-den", opt.max_den, "Largest denominator")->capture_default_str();
  gen->add_option("--mode", opt.mode, "goods, chores or mixed")->capture_default_str();
  gen->add_option("--output,-o", opt.output, "Write the instance here instead of stdout");

  auto* decompose_cmd = app.add_subcommand("decompose", "Show the fractional, lottery and sequence stages");
  decompose_cmd->add_option("--instance,-i", opt.instance, "Instance JSON")->required();
  decompose_cmd->add_option("--fraction,-x", opt.fraction, "Fractional allocation JSON (required for n >= 3)");
  decompose_cmd->add_option("--output,-o", opt.output, "Write all stages as JSON");

  auto* repro = app.add_subcommand("repro-paper", "Re-check the reference examples");

  std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    if (const auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
      err << sub->help();
    }
    return kExitInputError;
  }

  SearchBudget budget = SearchBudget::from_environment();
  if (opt.budget_nodes) budget.max_nodes = *opt.budget_nodes;
  try {
    if (*check) return cmd_check(opt, budget, out);
    if (*solve) return cmd_solve(opt, budget, out, err);
    if (*oracle) return cmd_oracle(opt, budget, out, err);
    if (*gen) return cmd_gen(opt, out);
    if (*decompose_cmd) return cmd_decompose(opt, out);
    if (*repro) return cmd_repro(budget, out);
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << " (not a nonexistence certificate)\n";
    return kExitBudget;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitFails;
  }
  return kExitInputError;
}

}  // namespace repfair
