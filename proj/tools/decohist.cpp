// Copyright 2026 The decohist authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// decohist: scenario ingestion, checks, and report emission.
//
// Exit codes: 0 pass, 1 check failure, 2 usage or IO error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "decohist/mereology.hpp"
#include "decohist/random.hpp"
#include "decohist/scenario.hpp"
#include "decohist/serialize.hpp"

namespace {

using namespace decohist;

constexpr int exit_pass = 0;
constexpr int exit_check_failed = 1;
constexpr int exit_usage = 2;

struct CommonOptions {
  std::string scenario_path;
  std::string out_dir = "reports";
  std::string format = "json";
  double tolerance = 1e-10;
  std::uint64_t seed = 0;
  std::size_t budget = default_history_budget;
  bool tolerance_given = false;
  bool seed_given = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool needs_scenario) {
  auto* scenario_opt =
      cmd->add_option("--scenario", opts.scenario_path, "Scenario file (JSON)");
  if (needs_scenario) scenario_opt->required();
  cmd->add_option("--out", opts.out_dir, "Report directory")
      ->capture_default_str();
  cmd->add_option("--tolerance", opts.tolerance, "Check tolerance")
      ->capture_default_str()
      ->each([&opts](const std::string&) { opts.tolerance_given = true; });
  cmd->add_option("--seed", opts.seed, "RNG seed")
      ->capture_default_str()
      ->each([&opts](const std::string&) { opts.seed_given = true; });
  cmd->add_option("--budget", opts.budget, "History enumeration budget")
      ->capture_default_str();
  cmd->add_option("--format", opts.format, "json | csv (csv adds tables)")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
}

/// Flags win; otherwise the scenario's own tolerance and seed apply.
void adopt_scenario_defaults(CommonOptions& opts, const Scenario& scenario) {
  if (!opts.tolerance_given) opts.tolerance = scenario.tolerance;
  if (!opts.seed_given) opts.seed = scenario.seed;
}

void write_report(const CommonOptions& opts, const std::string& name,
                  const Json& body) {
  std::filesystem::create_directories(opts.out_dir);
  const auto path = std::filesystem::path(opts.out_dir) / (name + ".json");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body.dump(2) << "\n";
  std::cout << "wrote " << path.string() << "\n";
}

void write_csv(const CommonOptions& opts, const std::string& name,
               const std::string& contents) {
  std::filesystem::create_directories(opts.out_dir);
  const auto path = std::filesystem::path(opts.out_dir) / (name + ".csv");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
  std::cout << "wrote " << path.string() << "\n";
}

std::string format_double(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

int run_validate(const CommonOptions& opts) {
  const auto scenario = load_scenario(opts.scenario_path);
  const auto space = build_space(scenario);
  Json body{{"scenario", scenario.name},
            {"dim", space.dim()},
            {"times", space.times()},
            {"cells_per_time", Json::array()},
            {"valid", true}};
  for (std::size_t k = 0; k < space.num_times(); ++k) {
    body["cells_per_time"].push_back(space.partition(k).size());
  }
  write_report(opts, "validate", make_report("validate", body));
  return exit_pass;
}

int run_consistency(const CommonOptions& opts) {
  const auto scenario = load_scenario(opts.scenario_path);
  const auto space = build_space(scenario);
  ConsistencyOptions copts;
  copts.budget = opts.budget;
  const auto report = consistency_check(space, copts);
  Json body = to_json(report);
  body["scenario"] = scenario.name;
  write_report(opts, "consistency", make_report("consistency", body));
  return report.consistent ? exit_pass : exit_check_failed;
}

int run_tree(const CommonOptions& opts, double prune) {
  const auto scenario = load_scenario(opts.scenario_path);
  const auto space = build_space(scenario);
  ConsistencyOptions copts;
  copts.budget = opts.budget;
  const auto tree = build_branch_tree(space, prune, copts);
  if (!tree.consistent) {
    std::cerr << "warning: space fails the consistency check "
                 "(max off-diagonal "
              << tree.consistency_max_offdiag << ")\n";
  }
  Json body = to_json(tree);
  body["scenario"] = scenario.name;
  write_report(opts, "tree", make_report("branch_tree", body));
  return exit_pass;
}

int run_stats(const CommonOptions& opts, double c2, std::size_t trials,
              std::optional<double> epsilon) {
  std::optional<Scenario> scenario;
  if (!opts.scenario_path.empty()) {
    scenario = load_scenario(opts.scenario_path);
    if (!scenario->model) {
      throw ScenarioError("stats needs a measurement-model scenario");
    }
    c2 = std::norm(scenario->model->c);
    trials = scenario->model->trials;
  }
  const auto prep = SpinPreparation<double>::from_up_probability(c2);
  const auto dist = frequency_distribution(prep, trials);
  Json body = to_json(dist);
  body["c2"] = c2;
  body["argmax"] = dist.argmax();
  if (epsilon) {
    body["epsilon"] = *epsilon;
    body["concentration"] = concentration_report(prep, trials, *epsilon);
  }
  write_report(opts, "stats", make_report("frequency_distribution", body));

  std::string csv = "M,x\n";
  for (std::size_t m = 0; m < dist.weights.size(); ++m) {
    csv += std::to_string(m) + "," + format_double(dist.weights[m]) + "\n";
  }
  write_csv(opts, "stats", csv);
  return exit_pass;
}

int run_sumrule(CommonOptions opts) {
  const auto scenario = load_scenario(opts.scenario_path);
  adopt_scenario_defaults(opts, scenario);
  const auto space = build_space(scenario);
  if (scenario.coarse_grainings.empty()) {
    throw ScenarioError("sumrule: scenario defines no coarse grainings");
  }
  Json groupings = Json::array();
  bool all_pass = true;
  for (const auto& [name, grouping] : scenario.coarse_grainings) {
    const auto report =
        sum_rule_check(space, grouping, opts.tolerance, opts.budget);
    Json entry = to_json(report);
    entry["grouping"] = name;
    groupings.push_back(std::move(entry));
    all_pass = all_pass && report.pass;
    std::cout << "sum rule [" << name << "]: "
              << (report.pass ? "pass" : "FAIL")
              << " (max discrepancy " << report.max_discrepancy << ")\n";
  }
  Json body{{"scenario", scenario.name}, {"groupings", groupings},
            {"pass", all_pass}};
  write_report(opts, "sumrule", make_report("sum_rule", body));
  return all_pass ? exit_pass : exit_check_failed;
}

int run_branching(CommonOptions opts) {
  const auto scenario = load_scenario(opts.scenario_path);
  adopt_scenario_defaults(opts, scenario);
  const auto space = build_space(scenario);
  BranchingOptions bopts;
  bopts.weight_tolerance = opts.tolerance;
  bopts.budget = opts.budget;
  const auto report = branching_structure_check(space, bopts);
  Json body = to_json(report);
  body["scenario"] = scenario.name;
  write_report(opts, "branching", make_report("branching_structure", body));
  std::cout << "unique-predecessor check: " << (report.pass ? "pass" : "FAIL")
            << "\n";
  return report.pass ? exit_pass : exit_check_failed;
}

int run_nogo(const CommonOptions& opts, double c2a, double c2b,
             std::size_t candidates, Index pointer_dim) {
  const auto prep_a = SpinPreparation<double>::from_up_probability(c2a);
  const auto prep_b = SpinPreparation<double>::from_up_probability(c2b);
  const auto vn = von_neumann_model(prep_a, pointer_dim);
  const auto& partition = vn.partition(0);
  const auto [pos_plus, pos_minus] = pointer_record_positions(pointer_dim);
  const auto cell_a = static_cast<std::size_t>(pos_plus);
  const auto cell_b = static_cast<std::size_t>(pos_minus);

  std::mt19937_64 rng(opts.seed);
  Json rows = Json::array();
  std::string csv =
      "candidate,input_overlap,output_overlap,residual_a,residual_b,"
      "meter_impossible\n";
  bool no_go_holds = true;
  double max_io_deviation = 0;
  NoGoReport<double> first_report{};

  for (std::size_t i = 0; i <= candidates; ++i) {
    // Candidate 0 is the pointer coupling itself; the rest are seeded Haar
    // unitaries.
    const Matrix<double> u =
        i == 0 ? vn.propagator(vn.time(0))
               : random_unitary<double>(2 * pointer_dim, rng);
    const auto report = no_go_check(prep_a, prep_b, u, partition, cell_a,
                                    cell_b, NoGoOptions{});
    if (i == 0) first_report = report;
    max_io_deviation = std::max(max_io_deviation,
                                static_cast<double>(report.unitarity_deviation));
    // A candidate "violates" the no-go only by beating it: registering both
    // preparations deterministically in orthogonal cells, or breaking the
    // input/output overlap identity.
    no_go_holds = no_go_holds && report.unitarity_ok &&
                  !(report.deterministic_within_delta && report.cells_orthogonal);
    Json row = to_json(report);
    row["candidate"] = i == 0 ? Json("coupling") : Json(i);
    rows.push_back(std::move(row));
    csv += (i == 0 ? std::string("coupling") : std::to_string(i)) + "," +
           format_double(report.input_overlap) + "," +
           format_double(report.output_overlap) + "," +
           format_double(report.residual_a) + "," +
           format_double(report.residual_b) + "," +
           (report.meter_impossible ? "1" : "0") + "\n";
  }

  Json body{{"c2_a", c2a},
            {"c2_b", c2b},
            {"candidates", candidates + 1},
            {"seed", opts.seed},
            {"max_io_deviation", max_io_deviation},
            {"contradiction_bound", first_report.contradiction_bound},
            {"input_overlap", first_report.input_overlap},
            {"no_go_holds", no_go_holds},
            {"reports", rows}};
  write_report(opts, "nogo", make_report("no_go", body));
  if (opts.format == "csv") write_csv(opts, "nogo", csv);
  std::cout << "no deterministic amplitude meter among " << candidates + 1
            << " candidates: " << (no_go_holds ? "confirmed" : "VIOLATED")
            << " (overlap " << first_report.input_overlap << " > bound "
            << first_report.contradiction_bound << ")\n";
  return no_go_holds ? exit_pass : exit_check_failed;
}

int run_mereology(CommonOptions opts) {
  const auto scenario = load_scenario(opts.scenario_path);
  adopt_scenario_defaults(opts, scenario);
  const auto space = build_space(scenario);
  typename BranchLattice<double>::Options lopts;
  lopts.consistency.budget = opts.budget;
  const auto lattice = BranchLattice<double>::from_space(space, lopts);
  AxiomOptions aopts;
  aopts.seed = opts.seed;
  const auto report = axioms_check(lattice, aopts);
  Json body = to_json(report);
  body["scenario"] = scenario.name;
  body["maximal_branches"] = lattice.branch_count();
  body["omega_deviation"] = lattice.omega_deviation();
  write_report(opts, "mereology", make_report("mereology", body));
  std::cout << "mereology axioms: " << (report.pass ? "pass" : "FAIL") << "\n";
  return report.pass ? exit_pass : exit_check_failed;
}

int run_semantics(const CommonOptions& opts, double threshold) {
  const auto scenario = load_scenario(opts.scenario_path);
  const auto space = build_space(scenario);
  if (scenario.predicates.empty()) {
    throw ScenarioError("semantics: scenario defines no predicates");
  }
  ConsistencyOptions copts;
  copts.budget = opts.budget;
  const auto tree = build_branch_tree(space, 0.0, copts);
  const auto verdicts = truth_table(tree, scenario.predicates, threshold);

  std::printf("%-12s %-6s %-16s %-8s %-6s %-6s\n", "branch", "time",
              "predicate", "present", "will", "might");
  for (const auto& v : verdicts) {
    std::printf("%-12s %-6g %-16s %-8d %-6d %-6d\n",
                node_path(v.branch).c_str(), v.time, v.predicate.c_str(),
                int(v.present), int(v.will), int(v.might));
  }

  Json body{{"scenario", scenario.name},
            {"threshold", threshold},
            {"verdicts", to_json(verdicts)}};
  write_report(opts, "semantics", make_report("semantics", body));
  return exit_pass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decoherent-histories toolkit: chain operators, consistency, "
               "branch weights, measurement models, vector mereology"};
  app.require_subcommand(1);

  CommonOptions opts;
  double prune = 0.0;
  double c2 = 0.5, c2a = 0.4, c2b = 0.6;
  std::size_t trials = 10, candidates = 200;
  Index pointer_dim = 2;
  std::optional<double> epsilon;
  double threshold = 0.0;

  auto* validate = app.add_subcommand("validate", "Load and validate a scenario");
  add_common(validate, opts, true);

  auto* consistency =
      app.add_subcommand("consistency", "Pairwise decoherence-functional check");
  add_common(consistency, opts, true);

  auto* tree = app.add_subcommand("tree", "Emit the branch tree");
  add_common(tree, opts, true);
  tree->add_option("--prune", prune, "Drop branches below this weight")
      ->capture_default_str();

  auto* stats = app.add_subcommand(
      "stats", "Frequency distribution x(M) and concentration");
  add_common(stats, opts, false);
  stats->add_option("--c2", c2, "Up probability |c|^2")->capture_default_str();
  stats->add_option("--N", trials, "Number of trials")->capture_default_str();
  stats->add_option("--epsilon", epsilon,
                    "Concentration window around |c|^2");

  auto* sumrule =
      app.add_subcommand("sumrule", "Weight additivity under coarse graining");
  add_common(sumrule, opts, true);

  auto* branching =
      app.add_subcommand("branching", "Unique-predecessor structure check");
  add_common(branching, opts, true);

  auto* nogo = app.add_subcommand(
      "nogo", "Deterministic amplitude-meter no-go search");
  add_common(nogo, opts, false);
  nogo->add_option("--c2a", c2a, "First preparation |c|^2")
      ->capture_default_str();
  nogo->add_option("--c2b", c2b, "Second preparation |c|^2")
      ->capture_default_str();
  nogo->add_option("--candidates", candidates, "Random unitary candidates")
      ->capture_default_str();
  nogo->add_option("--pointer-dim", pointer_dim, "Pointer dimension")
      ->capture_default_str();

  auto* mereology =
      app.add_subcommand("mereology", "Vector-parthood axiom suite");
  add_common(mereology, opts, true);

  auto* semantics =
      app.add_subcommand("semantics", "Branch-relative truth tables");
  add_common(semantics, opts, true);
  semantics
      ->add_option("--threshold", threshold,
                   "Modal 'might' conditional-weight threshold (required; "
                   "1e-3 is a reasonable starting point)")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_pass : exit_usage;
  }

  try {
    if (validate->parsed()) return run_validate(opts);
    if (consistency->parsed()) return run_consistency(opts);
    if (tree->parsed()) return run_tree(opts, prune);
    if (stats->parsed()) return run_stats(opts, c2, trials, epsilon);
    if (sumrule->parsed()) return run_sumrule(opts);
    if (branching->parsed()) return run_branching(opts);
    if (nogo->parsed()) return run_nogo(opts, c2a, c2b, candidates, pointer_dim);
    if (mereology->parsed()) return run_mereology(opts);
    if (semantics->parsed()) return run_semantics(opts, threshold);
  } catch (const ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return exit_usage;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  }
  return exit_usage;
}
