#include "sagafs/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "sagafs/analysis.hpp"
#include "sagafs/induction.hpp"

namespace sagafs {

using nlohmann::json;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Baseline: return "baseline";
    case Algorithm::Chc: return "chc";
    case Algorithm::Saga: return "saga";
  }
  return "?";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

json budget_json(const EvalBudgetCounter& c) {
  return json{{"surrogate_evals", c.surrogate_evals},   {"full_evals", c.full_evals},
              {"instances_processed", c.instances_processed},
              {"surrogate_instances", c.surrogate_instances},
              {"full_instances", c.full_instances}, {"cache_hits", c.cache_hits}};
}

EvalBudgetCounter budget_from(const json& j) {
  EvalBudgetCounter c;
  c.surrogate_evals = j.at("surrogate_evals").get<std::uint64_t>();
  c.full_evals = j.at("full_evals").get<std::uint64_t>();
  c.instances_processed = j.at("instances_processed").get<std::uint64_t>();
  c.surrogate_instances = j.at("surrogate_instances").get<std::uint64_t>();
  c.full_instances = j.at("full_instances").get<std::uint64_t>();
  c.cache_hits = j.at("cache_hits").get<std::uint64_t>();
  return c;
}

bool is_surrogate_only(const ArmSpec& arm) { return arm.algorithm == Algorithm::Saga && arm.saga.so; }

std::vector<double> collect(const std::vector<RunReport>& runs, const std::function<double(const RunReport&)>& f) {
  std::vector<double> out;
  out.reserve(runs.size());
  for (const auto& r : runs) out.push_back(f(r));
  return out;
}

double instances(const RunReport& r) { return static_cast<double>(r.budget.instances_processed); }
double test_pct(const RunReport& r) { return 100.0 * r.test_accuracy; }
double val_pct(const RunReport& r) { return 100.0 * r.validation_accuracy; }

}  // namespace

ArmSpec make_arm(const std::string& name) {
  ArmSpec arm;
  arm.label = name;
  if (name == "baseline") {
    arm.algorithm = Algorithm::Baseline;
  } else if (name == "chc") {
    arm.algorithm = Algorithm::Chc;
  } else if (name == "saga") {
    arm.algorithm = Algorithm::Saga;
  } else if (name == "saga_so") {
    arm.algorithm = Algorithm::Saga;
    arm.saga.so = true;
  } else {
    throw ConfigError("unknown arm '" + name + "' (expected baseline, chc, saga or saga_so)");
  }
  return arm;
}

void ExperimentConfig::validate() const {
  if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (arms.empty()) throw ConfigError("no arms configured");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
  for (const auto& arm : arms) {
    try {
      if (arm.algorithm == Algorithm::Saga) arm.saga.validate();
      if (arm.algorithm == Algorithm::Chc) arm.chc.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("arm '" + arm.label + "': " + e.what());
    }
  }
}

RunReport run_baseline(const SplitData& split, std::uint64_t seed, const std::string& dataset_id) {
  const Stopwatch clock;
  RunReport report;
  report.algorithm = "baseline";
  report.dataset_id = dataset_id;
  report.run_seed = seed;
  report.split_seed = split.split_seed;
  report.best_mask = FeatureMask::all(static_cast<std::size_t>(split.train.n_features()));
  FitnessEvaluator full(split.train, split.validation, report.budget, seed);
  report.validation_accuracy = full(report.best_mask);
  report.test_accuracy = holdout_accuracy(split.train, split.test, report.best_mask);
  report.elapsed_seconds = clock.seconds();
  return report;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const SplitData& split) {
  cfg.validate();
  ExperimentResult result;
  result.dataset_id = cfg.dataset_id;

  struct Job {
    std::size_t arm;
    std::size_t rep;
  };
  std::vector<Job> jobs;
  for (std::size_t a = 0; a < cfg.arms.size(); ++a) {
    result.arms.push_back(ArmResult{cfg.arms[a], std::vector<RunReport>(cfg.repetitions)});
    for (std::size_t r = 0; r < cfg.repetitions; ++r) jobs.push_back({a, r});
  }

  auto run_one = [&](const Job& job) {
    const ArmSpec& arm = cfg.arms[job.arm];
    const std::uint64_t seed = cfg.run_seed + job.rep;
    RunReport report;
    switch (arm.algorithm) {
      case Algorithm::Baseline:
        report = run_baseline(split, seed, cfg.dataset_id);
        break;
      case Algorithm::Chc: {
        ChcConfig c = arm.chc;
        c.seed = seed;
        report = run_chc(split, c, cfg.dataset_id);
        break;
      }
      case Algorithm::Saga: {
        SagaConfig s = arm.saga;
        s.seed = seed;
        report = run_saga(split, s, cfg.dataset_id);
        break;
      }
    }
    report.algorithm = arm.label;
    result.arms[job.arm].runs[job.rep] = std::move(report);
  };

  // every run owns its slot, so results do not depend on scheduling
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) run_one(jobs[i]);
  };
  const std::size_t n_threads = std::min(cfg.jobs, jobs.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const RawTable raw = load_csv(cfg.dataset, cfg.target, cfg.csv);
  const TableData data = preprocess(raw);
  const SplitData split = shuffle_split(data, cfg.split_seed);
  ExperimentConfig named = cfg;
  if (named.dataset_id.empty()) named.dataset_id = cfg.dataset.stem().string();
  return run_experiment(named, split);
}

json to_json(const RunReport& r) {
  json trace = json::array();
  for (const auto& e : r.trace) {
    trace.push_back(json{{"generation", e.generation}, {"stage", e.stage},
                         {"instances_processed", e.instances_processed},
                         {"surrogate_evals", e.surrogate_evals}, {"full_evals", e.full_evals},
                         {"best_true_fitness", e.best_true_fitness}});
  }
  json levels = json::array();
  for (const auto& l : r.levels) {
    levels.push_back(json{{"level", l.level}, {"repetition", l.repetition}, {"sample_size", l.sample_size},
                          {"pop_size", l.pop_size}, {"generations", l.generations},
                          {"switched_by_control", l.switched_by_control},
                          {"candidate_surrogate_fitness", l.candidate_surrogate_fitness},
                          {"candidate_true_fitness", l.candidate_true_fitness},
                          {"candidate", l.candidate.to_string()}});
  }
  json j{{"algorithm", r.algorithm},
         {"dataset_id", r.dataset_id},
         {"run_seed", r.run_seed},
         {"split_seed", r.split_seed},
         {"best_mask", r.best_mask.to_string()},
         {"n_selected", r.best_mask.count()},
         {"validation_accuracy", r.validation_accuracy},
         {"test_accuracy", r.test_accuracy},
         {"budget", budget_json(r.budget)},
         {"generations", r.generations},
         {"trace", trace},
         {"levels", levels}};
  if (r.surrogate_best) {
    j["surrogate_best"] = r.surrogate_best->to_string();
    j["surrogate_best_true_fitness"] = r.surrogate_best_true_fitness;
    j["surrogate_stage_budget"] = budget_json(r.surrogate_stage_budget);
  }
  return j;
}

RunReport run_report_from_json(const json& j) {
  RunReport r;
  r.algorithm = j.at("algorithm").get<std::string>();
  r.dataset_id = j.at("dataset_id").get<std::string>();
  r.run_seed = j.at("run_seed").get<std::uint64_t>();
  r.split_seed = j.at("split_seed").get<std::uint64_t>();
  r.best_mask = FeatureMask::from_string(j.at("best_mask").get<std::string>());
  r.validation_accuracy = j.at("validation_accuracy").get<double>();
  r.test_accuracy = j.at("test_accuracy").get<double>();
  r.budget = budget_from(j.at("budget"));
  r.generations = j.at("generations").get<std::uint64_t>();
  for (const auto& e : j.at("trace")) {
    TraceEvent ev;
    ev.generation = e.at("generation").get<std::uint64_t>();
    ev.stage = e.at("stage").get<std::string>();
    ev.instances_processed = e.at("instances_processed").get<std::uint64_t>();
    ev.surrogate_evals = e.at("surrogate_evals").get<std::uint64_t>();
    ev.full_evals = e.at("full_evals").get<std::uint64_t>();
    ev.best_true_fitness = e.at("best_true_fitness").get<double>();
    r.trace.push_back(std::move(ev));
  }
  for (const auto& l : j.at("levels")) {
    LevelRecord rec;
    rec.level = l.at("level").get<int>();
    rec.repetition = l.at("repetition").get<int>();
    rec.sample_size = l.at("sample_size").get<std::size_t>();
    rec.pop_size = l.at("pop_size").get<std::size_t>();
    rec.generations = l.at("generations").get<std::size_t>();
    rec.switched_by_control = l.at("switched_by_control").get<bool>();
    rec.candidate_surrogate_fitness = l.at("candidate_surrogate_fitness").get<double>();
    rec.candidate_true_fitness = l.at("candidate_true_fitness").get<double>();
    rec.candidate = FeatureMask::from_string(l.at("candidate").get<std::string>());
    r.levels.push_back(std::move(rec));
  }
  if (j.contains("surrogate_best")) {
    r.surrogate_best = FeatureMask::from_string(j.at("surrogate_best").get<std::string>());
    r.surrogate_best_true_fitness = j.at("surrogate_best_true_fitness").get<double>();
    r.surrogate_stage_budget = budget_from(j.at("surrogate_stage_budget"));
  }
  return r;
}

json to_json(const ArmSpec& arm) {
  json j{{"label", arm.label}, {"algorithm", algorithm_name(arm.algorithm)}};
  if (arm.algorithm == Algorithm::Saga) {
    const SagaConfig& s = arm.saga;
    j.update(json{{"b", s.b}, {"pr", s.pr}, {"z", s.z}, {"fop", s.fop}, {"sp", s.sp}, {"so", s.so},
                  {"p0", s.p0}, {"a", s.a}, {"strict_pseudocode_reduction", s.strict_pseudocode_reduction},
                  {"level_eval_budget", s.level_eval_budget}});
  }
  const ChcConfig& c = arm.algorithm == Algorithm::Saga ? arm.saga.chc : arm.chc;
  if (arm.algorithm == Algorithm::Chc) j["pop"] = c.pop_size;
  if (arm.algorithm != Algorithm::Baseline) {
    j.update(json{{"stagnation_limit", c.stagnation_limit}, {"max_generations", c.max_generations},
                  {"divergence_rate", c.divergence_rate}, {"init_inclusion_prob", c.init_inclusion_prob}});
  }
  return j;
}

ArmSpec arm_from_json(const json& j) {
  try {
    ArmSpec arm;
    const std::string algorithm = j.value("algorithm", j.value("label", std::string("saga")));
    arm = make_arm(algorithm == "saga" && j.value("so", false) ? "saga_so" : algorithm);
    arm.label = j.value("label", arm.label);
    SagaConfig& s = arm.saga;
    s.b = j.value("b", s.b);
    s.pr = j.value("pr", s.pr);
    s.z = j.value("z", s.z);
    s.fop = j.value("fop", s.fop);
    s.sp = j.value("sp", s.sp);
    s.so = j.value("so", s.so);
    s.p0 = j.value("p0", s.p0);
    s.a = j.value("a", s.a);
    s.strict_pseudocode_reduction = j.value("strict_pseudocode_reduction", s.strict_pseudocode_reduction);
    s.level_eval_budget = j.value("level_eval_budget", s.level_eval_budget);
    for (ChcConfig* c : {&arm.chc, &arm.saga.chc}) {
      c->stagnation_limit = j.value("stagnation_limit", c->stagnation_limit);
      c->max_generations = j.value("max_generations", c->max_generations);
      c->divergence_rate = j.value("divergence_rate", c->divergence_rate);
      c->init_inclusion_prob = j.value("init_inclusion_prob", c->init_inclusion_prob);
    }
    arm.chc.pop_size = j.value("pop", arm.chc.pop_size);
    return arm;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad arm entry: ") + e.what());
  }
}

ExperimentConfig config_from_json(const json& j) {
  try {
    ExperimentConfig cfg;
    cfg.dataset = j.value("dataset", std::string());
    cfg.target = j.value("target", std::string());
    cfg.dataset_id = j.value("dataset_id", std::string());
    if (j.contains("missing_tokens")) cfg.csv.missing_tokens = j.at("missing_tokens").get<std::vector<std::string>>();
    cfg.repetitions = j.value("repetitions", cfg.repetitions);
    cfg.split_seed = j.value("split_seed", cfg.split_seed);
    cfg.run_seed = j.value("run_seed", cfg.run_seed);
    cfg.jobs = j.value("jobs", cfg.jobs);
    cfg.output_dir = j.value("output_dir", cfg.output_dir.string());
    if (j.contains("arms")) {
      for (const auto& a : j.at("arms")) {
        cfg.arms.push_back(a.is_string() ? make_arm(a.get<std::string>()) : arm_from_json(a));
      }
    }
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
}

json summary_json(const ExperimentResult& result) {
  json arms = json::array();
  for (const auto& arm : result.arms) {
    json runs = json::array();
    for (const auto& r : arm.runs) runs.push_back(to_json(r));
    const Summary time = summarize(collect(arm.runs, instances));
    const Summary val = summarize(collect(arm.runs, val_pct));
    const Summary test = summarize(collect(arm.runs, test_pct));
    arms.push_back(json{{"spec", to_json(arm.spec)},
                        {"aggregate",
                         {{"instances_mean", time.mean}, {"instances_std", time.std},
                          {"validation_accuracy_pct_mean", val.mean}, {"validation_accuracy_pct_std", val.std},
                          {"test_accuracy_pct_mean", test.mean}, {"test_accuracy_pct_std", test.std}}},
                        {"runs", runs}});
  }
  return json{{"dataset_id", result.dataset_id}, {"arms", arms}};
}

ExperimentResult result_from_summary(const json& j) {
  ExperimentResult result;
  result.dataset_id = j.at("dataset_id").get<std::string>();
  for (const auto& a : j.at("arms")) {
    ArmResult arm;
    arm.spec = arm_from_json(a.at("spec"));
    for (const auto& r : a.at("runs")) arm.runs.push_back(run_report_from_json(r));
    result.arms.push_back(std::move(arm));
  }
  return result;
}

std::string table_csv(const std::vector<ExperimentResult>& results) {
  std::ostringstream os;
  os << "dataset,arm,runs,time_mean,time_std,val_acc_mean,val_acc_std,test_acc_mean,test_acc_std,"
        "features_mean,time_winner,acc_winner,p_time,p_acc,p_acc_paired\n";
  for (const auto& result : results) {
    if (result.arms.empty()) continue;
    std::vector<Summary> times, vals, tests, feats;
    for (const auto& arm : result.arms) {
      times.push_back(summarize(collect(arm.runs, instances)));
      vals.push_back(summarize(collect(arm.runs, val_pct)));
      tests.push_back(summarize(collect(arm.runs, test_pct)));
      feats.push_back(summarize(collect(arm.runs, [](const RunReport& r) {
        return static_cast<double>(r.best_mask.count());
      })));
    }
    double best_time = INFINITY;
    double best_acc = -INFINITY;
    for (std::size_t a = 0; a < result.arms.size(); ++a) {
      if (result.arms[a].spec.algorithm != Algorithm::Baseline) best_time = std::min(best_time, times[a].mean);
      best_acc = std::max(best_acc, tests[a].mean);
    }
    const auto& ref = result.arms.front().runs;
    for (std::size_t a = 0; a < result.arms.size(); ++a) {
      const auto& arm = result.arms[a];
      const bool search = arm.spec.algorithm != Algorithm::Baseline;
      os << result.dataset_id << ',' << arm.spec.label << ',' << arm.runs.size() << ','
         << num(times[a].mean) << ',' << num(times[a].std) << ',' << num(vals[a].mean) << ','
         << num(vals[a].std) << ',' << num(tests[a].mean) << ',' << num(tests[a].std) << ','
         << num(feats[a].mean) << ',' << (search && times[a].mean == best_time ? 1 : 0) << ','
         << (tests[a].mean == best_acc ? 1 : 0) << ',';
      const bool testable = a > 0 && arm.runs.size() >= 2 && ref.size() >= 2;
      if (testable) {
        os << num(welch_t(collect(arm.runs, instances), collect(ref, instances)).p) << ','
           << num(welch_t(collect(arm.runs, test_pct), collect(ref, test_pct)).p) << ',';
        if (arm.runs.size() == ref.size()) {
          os << num(paired_t(collect(arm.runs, test_pct), collect(ref, test_pct)).p);
        }
      } else {
        os << ",,";
      }
      os << '\n';
    }
  }
  return os.str();
}

std::string fig_trace_csv(const std::vector<ExperimentResult>& results) {
  std::ostringstream os;
  os << "x,mean,std,label\n";
  for (const auto& result : results) {
    for (const auto& arm : result.arms) {
      std::vector<Series> series;
      for (const auto& r : arm.runs) {
        if (r.trace.empty()) continue;
        Series s{Eigen::VectorXd(static_cast<Eigen::Index>(r.trace.size())),
                 Eigen::VectorXd(static_cast<Eigen::Index>(r.trace.size()))};
        for (std::size_t i = 0; i < r.trace.size(); ++i) {
          s.x(static_cast<Eigen::Index>(i)) = static_cast<double>(r.trace[i].instances_processed);
          s.y(static_cast<Eigen::Index>(i)) = r.trace[i].best_true_fitness;
        }
        series.push_back(std::move(s));
      }
      if (series.empty()) continue;
      const Band band = aligned_band(series);
      const std::string label = result.dataset_id + ":" + arm.spec.label;
      for (Eigen::Index i = 0; i < band.x.size(); ++i) {
        os << num(band.x(i)) << ',' << num(band.mean(i)) << ',' << num(band.std(i)) << ',' << label << '\n';
      }
    }
  }
  return os.str();
}

std::string compare_csv(const ExperimentResult& result) {
  const ArmResult* reference = nullptr;
  const ArmResult* baseline = nullptr;
  for (const auto& arm : result.arms) {
    if (!reference && is_surrogate_only(arm.spec)) reference = &arm;
    if (!baseline && arm.spec.algorithm == Algorithm::Chc) baseline = &arm;
  }
  if (!reference || !baseline) return {};
  const auto matches = compare_runs(reference->runs, baseline->runs);
  std::ostringstream os;
  os << "run,target_fitness,matched,chc_instances,chc_generation,reference_instances\n";
  for (std::size_t i = 0; i < matches.size(); ++i) {
    const auto& m = matches[i];
    os << i << ',' << num(m.target) << ',' << (m.matched ? 1 : 0) << ','
       << (m.matched ? std::to_string(m.instances_processed) : "") << ','
       << (m.matched ? std::to_string(m.generation) : "") << ','
       << reference->runs[i].budget.instances_processed << '\n';
  }
  return os.str();
}

void emit_tables(const std::vector<ExperimentResult>& results, const std::filesystem::path& dir) {
  if (results.empty()) throw std::invalid_argument("emit_tables: no results");
  std::filesystem::create_directories(dir);
  write_text(dir / "table.csv", table_csv(results));
  write_text(dir / "fig_trace.csv", fig_trace_csv(results));
}

void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "summary.json", summary_json(result).dump(2) + "\n");

  json timing = json::object();
  for (const auto& arm : result.arms) {
    json secs = json::array();
    for (const auto& r : arm.runs) secs.push_back(r.elapsed_seconds);
    timing[arm.spec.label] = secs;
  }
  write_text(dir / "timing.json", timing.dump(2) + "\n");

  for (const auto& arm : result.arms) {
    for (std::size_t i = 0; i < arm.runs.size(); ++i) {
      const auto& r = arm.runs[i];
      if (r.trace.empty()) continue;
      std::ostringstream os;
      os << "timestamp,instances_processed,surrogate_evals,full_evals,best_true_fitness\n";
      for (const auto& e : r.trace) {
        os << num(e.elapsed_seconds) << ',' << e.instances_processed << ',' << e.surrogate_evals << ','
           << e.full_evals << ',' << num(e.best_true_fitness) << '\n';
      }
      write_text(dir / ("trace_" + arm.spec.label + "_" + std::to_string(i) + ".csv"), os.str());
    }
  }
  if (const std::string cmp = compare_csv(result); !cmp.empty()) write_text(dir / "compare.csv", cmp);
  emit_tables({result}, dir);
}

}  // namespace sagafs
