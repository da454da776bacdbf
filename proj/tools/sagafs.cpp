// sagafs: wrapper feature selection experiments (baseline tree, CHC, SAGA).
//
//   sagafs run --data d.csv --target class --arm saga --arm chc --reps 10 --out results/
//   sagafs tables --summary results/summary.json --out tables/
//   sagafs generate --kind dermatology --out data/dermatology_synth.csv
//   sagafs cost --a 2 --b 4
//
// Exit codes: 0 success, 1 config error, 2 data error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sagafs/analysis.hpp"
#include "sagafs/data.hpp"
#include "sagafs/experiment.hpp"
#include "sagafs/synthetic.hpp"

using namespace sagafs;

namespace {

struct Overrides {
  std::optional<int> b;
  std::optional<double> pr;
  std::optional<std::size_t> z;
  std::optional<int> fop;
  std::optional<int> sp;
  std::optional<int> so;
  std::optional<std::size_t> p0;
  std::optional<double> a;
  std::optional<std::size_t> pop;
  std::optional<std::size_t> stagnation;
  std::optional<std::size_t> max_generations;
  bool strict_reduction = false;
};

void apply(const Overrides& o, ArmSpec& arm) {
  SagaConfig& s = arm.saga;
  if (o.b) s.b = *o.b;
  if (o.pr) s.pr = *o.pr;
  if (o.z) s.z = *o.z;
  if (o.fop) s.fop = *o.fop != 0;
  if (o.sp) s.sp = *o.sp;
  if (o.so && arm.algorithm == Algorithm::Saga) s.so = *o.so != 0;
  if (o.p0) s.p0 = *o.p0;
  if (o.a) s.a = *o.a;
  if (o.strict_reduction) s.strict_pseudocode_reduction = true;
  if (o.pop) arm.chc.pop_size = *o.pop;
  for (ChcConfig* c : {&arm.chc, &s.chc}) {
    if (o.stagnation) c->stagnation_limit = *o.stagnation;
    if (o.max_generations) c->max_generations = *o.max_generations;
  }
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Surrogate-assisted wrapper feature selection"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run experiment arms on a CSV dataset");
  std::string config_path, data_path, target, dataset_id, out_dir;
  std::vector<std::string> arm_names, missing;
  std::optional<std::size_t> reps, jobs;
  std::optional<std::uint64_t> seed, split_seed;
  Overrides o;
  run->add_option("--config", config_path, "JSON experiment config");
  run->add_option("--data", data_path, "CSV dataset with a header row");
  run->add_option("--target", target, "Target column name");
  run->add_option("--dataset-id", dataset_id, "Name used in reports (default: file stem)");
  run->add_option("--arm", arm_names, "baseline | chc | saga | saga_so (repeatable)");
  run->add_option("--missing", missing, "Missing-value tokens (default: empty and ?)");
  run->add_option("--reps", reps, "Repetitions per arm");
  run->add_option("--seed", seed, "First run seed");
  run->add_option("--split-seed", split_seed, "Shuffle seed of the 60/20/20 split");
  run->add_option("--jobs", jobs, "Runs executed in parallel");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--b", o.b, "Surrogate levels");
  run->add_option("--pr", o.pr, "Population reduction rate");
  run->add_option("--z", o.z, "Generations between evolution-control checks");
  run->add_option("--fop", o.fop, "False-optimum prevention (0/1)");
  run->add_option("--sp", o.sp, "Surrogate perseverance");
  run->add_option("--so", o.so, "Surrogate stage only (0/1)");
  run->add_option("--p0", o.p0, "Initial SAGA population");
  run->add_option("--a", o.a, "Sampling schedule base");
  run->add_option("--pop", o.pop, "CHC population");
  run->add_option("--stagnation", o.stagnation, "Generations without improvement before stopping");
  run->add_option("--max-generations", o.max_generations, "Generation cap per CHC run");
  run->add_flag("--strict-reduction", o.strict_reduction, "Reduce the population after every level run");

  // tables
  auto* tables = app.add_subcommand("tables", "Rebuild table.csv and fig_trace.csv from summary.json files");
  std::vector<std::string> summaries;
  std::string tables_out = ".";
  tables->add_option("--summary", summaries, "summary.json files")->required();
  tables->add_option("--out", tables_out, "Output directory");

  // generate
  auto* gen = app.add_subcommand("generate", "Write a synthetic fixture dataset as CSV");
  std::string kind = "dermatology", gen_out;
  std::size_t rows = 2000, features = 20;
  std::vector<std::size_t> informative{2, 9, 15};
  double noise = 0.05;
  std::uint64_t gen_seed = 366;
  gen->add_option("--kind", kind, "dermatology | planted")->check(CLI::IsMember({"dermatology", "planted"}));
  gen->add_option("--rows", rows, "Rows (planted)");
  gen->add_option("--features", features, "Features (planted)");
  gen->add_option("--informative", informative, "Informative feature indices (planted)");
  gen->add_option("--noise", noise, "Label flip probability (planted)");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output CSV (default: stdout)");

  // cost
  auto* cost = app.add_subcommand("cost", "Surrogate-stage cost relative to a full-data stage");
  double cost_a = 2.0;
  int cost_b = 4;
  cost->add_option("--a", cost_a, "Schedule base");
  cost->add_option("--b", cost_b, "Levels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      ExperimentConfig cfg;
      if (!config_path.empty()) cfg = config_from_json(read_json(config_path));
      if (!data_path.empty()) cfg.dataset = data_path;
      if (!target.empty()) cfg.target = target;
      if (!dataset_id.empty()) cfg.dataset_id = dataset_id;
      if (!missing.empty()) cfg.csv.missing_tokens = missing;
      if (reps) cfg.repetitions = *reps;
      if (seed) cfg.run_seed = *seed;
      if (split_seed) cfg.split_seed = *split_seed;
      if (jobs) cfg.jobs = *jobs;
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      for (const auto& name : arm_names) cfg.arms.push_back(make_arm(name));
      if (cfg.arms.empty()) cfg.arms.push_back(make_arm("saga"));
      for (auto& arm : cfg.arms) apply(o, arm);
      if (cfg.dataset.empty() || cfg.target.empty()) throw ConfigError("--data and --target are required");

      const ExperimentResult result = run_experiment(cfg);
      write_outputs(result, cfg.output_dir);
      std::cout << table_csv({result});
    } else if (*tables) {
      std::vector<ExperimentResult> results;
      for (const auto& path : summaries) {
        try {
          results.push_back(result_from_summary(read_json(path)));
        } catch (const nlohmann::json::exception& e) {
          throw ConfigError("'" + path + "' is not a summary file: " + e.what());
        }
      }
      emit_tables(results, tables_out);
      std::cout << table_csv(results);
    } else if (*gen) {
      const RawTable raw = kind == "dermatology"
                               ? synthetic::dermatology_like(gen_seed)
                               : to_raw(synthetic::planted(rows, features, informative, noise, gen_seed), "y");
      if (gen_out.empty()) {
        write_csv(std::cout, raw);
      } else {
        std::ofstream out(gen_out);
        if (!out) throw std::runtime_error("cannot write '" + gen_out + "'");
        write_csv(out, raw);
      }
    } else if (*cost) {
      std::cout << "exponent,ratio\n";
      for (int c = 1; c <= 3; ++c) {
        std::printf("%d,%.10f\n", c, schedule_cost_ratio(CostModel<double>{double(c), cost_a, cost_b}));
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
