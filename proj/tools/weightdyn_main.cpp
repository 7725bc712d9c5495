// Command-line front end: dataset generation, single runs, ensembles,
// Jacobian verification, classification and ROC export.
//
// Exit codes: 0 success, 1 input/configuration error, 2 numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "weightdyn/bayes.hpp"
#include "weightdyn/ensemble.hpp"
#include "weightdyn/errors.hpp"
#include "weightdyn/io.hpp"
#include "weightdyn/jacobian.hpp"
#include "weightdyn/roc.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wdyn;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;  // key=value pairs
  std::optional<std::uint64_t> seed;
  std::optional<std::string> activation;
  std::optional<std::string> init;
  std::optional<double> wide_sigma;
  std::optional<long> total_steps;
  std::optional<long> n_runs;
  std::optional<int> parallelism;
  std::optional<long> n;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--out-dir", o.out_dir, "output directory");
  cmd->add_option("--set", o.overrides, "config override key=value (repeatable)");
  cmd->add_option("--seed", o.seed, "base init seed");
  cmd->add_option("--activation", o.activation, "relu, tanh or gelu");
  cmd->add_option("--init", o.init, "he or wide");
  cmd->add_option("--wide-sigma", o.wide_sigma, "sigma of the wide-range initializer");
  cmd->add_option("--total-steps", o.total_steps, "integration steps per run");
  cmd->add_option("--n-runs", o.n_runs, "ensemble size");
  cmd->add_option("--parallelism", o.parallelism, "worker threads for ensembles");
  cmd->add_option("--n", o.n, "dataset size");
}

json override_to_json(const std::string& key, const std::string& value) {
  // Values parse as JSON when possible (numbers, arrays), else as strings.
  try {
    return json::parse(value);
  } catch (const json::exception&) {
    return json(value);
  }
}

// Flag and --set overrides beat config-file values beat built-in defaults.
EnsembleConfig resolve_config(const CommonOpts& o) {
  json merged = ensemble_config_to_json(EnsembleConfig{});
  if (!o.config_path.empty()) {
    std::ifstream is(o.config_path);
    if (!is) throw input_error("cannot open config '" + o.config_path + "'");
    json file_json;
    try {
      is >> file_json;
    } catch (const json::exception& e) {
      throw input_error("cannot parse '" + o.config_path + "': " + e.what());
    }
    (void)ensemble_config_from_json(file_json);  // key and type validation
    merged.merge_patch(file_json);
  }
  for (const std::string& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw input_error("override '" + kv + "' is not of the form key=value");
    const std::string key = kv.substr(0, eq);
    json patch;
    if (const auto dot = key.find('.'); dot != std::string::npos)
      patch[key.substr(0, dot)][key.substr(dot + 1)] = override_to_json(key, kv.substr(eq + 1));
    else
      patch[key] = override_to_json(key, kv.substr(eq + 1));
    merged.merge_patch(patch);
  }
  if (o.seed) merged["seeds"]["init"] = *o.seed;
  if (o.activation) merged["activation"] = *o.activation;
  if (o.init) merged["initializer"] = *o.init;
  if (o.wide_sigma) merged["wide_sigma"] = *o.wide_sigma;
  if (o.total_steps) merged["total_steps"] = *o.total_steps;
  if (o.n_runs) merged["n_runs"] = *o.n_runs;
  if (o.parallelism) merged["parallelism"] = *o.parallelism;
  if (o.n) merged["n"] = *o.n;
  return ensemble_config_from_json(merged);
}

void write_resolved(EnsembleConfig cfg, const fs::path& dir, const std::string& name) {
  cfg.base.checkpoints = cfg.base.resolved_checkpoints();
  fs::create_directories(dir);
  std::ofstream os(dir / (name + ".resolved.json"));
  os << ensemble_config_to_json(cfg).dump(2) << '\n';
}

void print_summary(const json& j) { std::cout << j.dump() << std::endl; }

int cmd_gen_data(const CommonOpts& o, const std::string& out_file) {
  EnsembleConfig cfg = resolve_config(o);
  if (o.seed) cfg.base.seeds.data = *o.seed;  // gen-data's --seed means the data seed
  const Dataset d = generate_dataset(cfg.dataset_n, cfg.base.seeds.data);
  const fs::path out = out_file.empty() ? fs::path(o.out_dir) / "data.csv" : fs::path(out_file);
  write_dataset_csv(d, out);
  write_resolved(cfg, out.has_parent_path() ? out.parent_path() : fs::path("."), "gen-data");
  print_summary({{"command", "gen-data"},
                 {"rows", d.size()},
                 {"seed", cfg.base.seeds.data},
                 {"out", out.string()}});
  return 0;
}

int cmd_run(const CommonOpts& o) {
  const EnsembleConfig cfg = resolve_config(o);
  cfg.validate();
  const Dataset data = generate_dataset(cfg.dataset_n, cfg.base.seeds.data);
  const RunRecord rec = train_run(cfg.base, data);
  const fs::path dir(o.out_dir);
  write_run_record_json(rec, dir / "run_record.json");
  write_resolved(cfg, dir, "run");
  print_summary({{"command", "run"},
                 {"c_f", rec.final_cost},
                 {"diverged", rec.diverged},
                 {"out", (dir / "run_record.json").string()}});
  return 0;
}

int cmd_ensemble(const CommonOpts& o) {
  const EnsembleConfig cfg = resolve_config(o);
  cfg.validate();
  const Dataset data = generate_dataset(cfg.dataset_n, cfg.base.seeds.data);
  const EnsembleResult result = run_ensemble(cfg, data);
  const fs::path dir(o.out_dir);
  write_outcome_csv(result.table, dir / "outcome.csv");
  write_le_vs_cf_csv(result, dir / "le_vs_cf.csv");
  write_resolved(cfg, dir, "ensemble");
  print_summary({{"command", "ensemble"},
                 {"n_runs", cfg.n_runs},
                 {"n_diverged", result.n_diverged},
                 {"outcome", (dir / "outcome.csv").string()},
                 {"scatter", (dir / "le_vs_cf.csv").string()}});
  return 0;
}

int cmd_jacobian_check(const CommonOpts& o, int trials, double h, std::uint64_t seed,
                       const std::string& activation) {
  const Activation act = activation_from_string(activation);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> entry(-2.0, 2.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  JacobianCheck worst;
  for (int t = 0; t < trials; ++t) {
    Params p = Params::zeros(2, 2, 1, act);
    for (auto* mat : {&p.w21, &p.w32})
      for (Eigen::Index c = 0; c < mat->cols(); ++c)
        for (Eigen::Index r = 0; r < mat->rows(); ++r) (*mat)(r, c) = entry(rng);
    for (Eigen::Index j = 0; j < p.b1.size(); ++j) p.b1[j] = entry(rng);
    for (Eigen::Index k = 0; k < p.b2.size(); ++k) p.b2[k] = entry(rng);
    Batch b;
    b.inputs.resize(2, 8);
    b.targets.resize(1, 8);
    for (int c = 0; c < 8; ++c) {
      b.inputs(0, c) = gauss(rng);
      b.inputs(1, c) = gauss(rng);
      b.targets(0, c) = gauss(rng);
    }
    if (act == Activation::relu) {
      // Stay away from the kink, where one-sided derivatives break the oracle.
      bool ok = true;
      for (int c = 0; c < 8 && ok; ++c)
        ok = ((p.w21 * b.inputs.col(c) + p.b1).cwiseAbs().minCoeff() > 1e-3);
      if (!ok) {
        --t;
        continue;
      }
    }
    const JacobianCheck rep = check_jacobian(p, b, h);
    worst.max_abs_error = std::max(worst.max_abs_error, rep.max_abs_error);
    worst.max_symmetry_defect = std::max(worst.max_symmetry_defect, rep.max_symmetry_defect);
  }
  print_summary({{"max_abs_error", worst.max_abs_error},
                 {"max_symmetry_defect", worst.max_symmetry_defect}});
  return 0;
}

std::vector<std::string> feature_group_columns(const OutcomeTable& table,
                                               const std::string& group, long checkpoint) {
  const std::string suffix = "_ck" + std::to_string(checkpoint);
  std::vector<std::string> cols;
  if (group == "ftle") {
    for (const std::string& c : table.columns)
      if (c.rfind("ftle", 0) == 0 && c.size() >= suffix.size() &&
          c.compare(c.size() - suffix.size(), suffix.size(), suffix) == 0)
        cols.push_back(c);
  } else if (group == "meancos" || group == "loss") {
    cols.push_back(group + suffix);
  } else {
    throw input_error("unknown feature group '" + group + "' (expected ftle, meancos or loss)");
  }
  if (cols.empty())
    throw input_error("no '" + group + "' columns for checkpoint " + std::to_string(checkpoint));
  return cols;
}

std::vector<long> table_checkpoints(const OutcomeTable& table) {
  std::vector<long> cks;
  for (const std::string& c : table.columns)
    if (c.rfind("meancos_ck", 0) == 0) cks.push_back(std::stol(c.substr(10)));
  if (cks.empty()) throw input_error("outcome table has no checkpoint columns");
  return cks;
}

struct EvalResult {
  double auc = 0.0;
  long n_pos = 0, n_neg = 0;
  RocCurve curve;
  Contingency table;
};

EvalResult evaluate(const OutcomeTable& table, double threshold, LabelDirection dir,
                    const std::vector<std::string>& cols, int bins) {
  const LabeledFeatures lf = label_outcomes(table, threshold, dir, cols);
  const BayesModel model = fit_naive_bayes(lf, bins);
  const std::vector<double> scores = predict_posterior(model, lf.test_features);
  EvalResult r;
  r.curve = roc_curve(scores, lf.test_labels);
  r.auc = r.curve.auc;
  for (auto l : lf.test_labels) (l ? r.n_pos : r.n_neg) += 1;
  r.table = contingency_table(scores, lf.test_labels, 0.5);
  return r;
}

int cmd_classify(const CommonOpts& o, const std::string& table_path, double threshold,
                 const std::string& direction, int bins, const std::string& feature,
                 long checkpoint) {
  const OutcomeTable table = read_outcome_csv(table_path);
  const LabelDirection dir = direction_from_string(direction);
  const fs::path out_dir(o.out_dir);
  fs::create_directories(out_dir);

  if (!feature.empty() && checkpoint > 0) {
    const auto cols = feature_group_columns(table, feature, checkpoint);
    const EvalResult r = evaluate(table, threshold, dir, cols, bins);
    print_summary({{"command", "classify"},
                   {"feature", feature},
                   {"checkpoint", checkpoint},
                   {"auc", r.auc},
                   {"n_pos", r.n_pos},
                   {"n_neg", r.n_neg},
                   {"contingency",
                    {{"tp", r.table.tp}, {"fp", r.table.fp}, {"tn", r.table.tn}, {"fn", r.table.fn}}}});
    return 0;
  }

  // Full feature x checkpoint AUC matrix.
  const std::vector<long> cks = table_checkpoints(table);
  const Eigen::Index dim = [&] {
    Eigen::Index d = 0;
    const std::string suffix = "_ck" + std::to_string(cks.front());
    for (const std::string& c : table.columns)
      if (c.rfind("ftle", 0) == 0 && c.size() >= suffix.size() &&
          c.compare(c.size() - suffix.size(), suffix.size(), suffix) == 0)
        ++d;
    return d;
  }();
  std::ofstream os(out_dir / "auc_matrix.csv");
  os << "feature,checkpoint,auc,n_pos,n_neg\n";
  double best_auc = 0.0;
  std::string best_feature;
  long best_ck = 0;
  const auto emit = [&](const std::string& name, long ck, const std::vector<std::string>& cols) {
    const EvalResult r = evaluate(table, threshold, dir, cols, bins);
    os << name << ',' << ck << ',' << format_double(r.auc) << ',' << r.n_pos << ',' << r.n_neg
       << '\n';
    if (r.auc > best_auc) {
      best_auc = r.auc;
      best_feature = name;
      best_ck = ck;
    }
  };
  for (long ck : cks) {
    for (Eigen::Index q = 1; q <= dim; ++q) {
      const std::string col = "ftle" + std::to_string(q) + "_ck" + std::to_string(ck);
      emit("ftle" + std::to_string(q), ck, {col});
    }
    emit("ftle_all", ck, feature_group_columns(table, "ftle", ck));
    emit("meancos", ck, {"meancos_ck" + std::to_string(ck)});
    emit("loss", ck, {"loss_ck" + std::to_string(ck)});
  }
  print_summary({{"command", "classify"},
                 {"out", (out_dir / "auc_matrix.csv").string()},
                 {"best_feature", best_feature},
                 {"best_checkpoint", best_ck},
                 {"best_auc", best_auc}});
  return 0;
}

int cmd_roc(const CommonOpts& o, const std::string& table_path, double threshold,
            const std::string& direction, int bins, const std::string& feature,
            long checkpoint) {
  const OutcomeTable table = read_outcome_csv(table_path);
  const LabelDirection dir = direction_from_string(direction);
  const auto cols = feature_group_columns(table, feature, checkpoint);
  const EvalResult r = evaluate(table, threshold, dir, cols, bins);
  const fs::path out_dir(o.out_dir);
  const fs::path roc_path =
      out_dir / ("roc_" + feature + "_ck" + std::to_string(checkpoint) + ".csv");
  write_roc_csv(r.curve, roc_path);
  const json summary = {{"auc", r.auc},
                        {"n_pos", r.n_pos},
                        {"n_neg", r.n_neg},
                        {"feature", feature},
                        {"checkpoint", checkpoint}};
  {
    fs::create_directories(out_dir);
    std::ofstream os(out_dir / ("roc_" + feature + "_ck" + std::to_string(checkpoint) + ".json"));
    os << summary.dump(2) << '\n';
  }
  print_summary(summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weight-dynamics training, stability analysis and loss prediction"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string out_file;
  int trials = 100;
  double fd_step = 1e-6;
  std::uint64_t check_seed = 12345;
  std::string check_activation = "tanh";
  std::string table_path;
  double threshold = 100.0;
  std::string direction = "above";
  int bins = 20;
  std::string feature;
  long checkpoint = 0;

  CLI::App* gen = app.add_subcommand("gen-data", "write the regression dataset as CSV");
  add_common(gen, opts);
  gen->add_option("--out", out_file, "output CSV path");

  CLI::App* run = app.add_subcommand("run", "train one network and record its stability");
  add_common(run, opts);

  CLI::App* ens = app.add_subcommand("ensemble", "train an ensemble and export the outcome table");
  add_common(ens, opts);

  CLI::App* jc = app.add_subcommand("jacobian-check", "verify the analytic Jacobian against finite differences");
  jc->add_option("--trials", trials, "number of random states");
  jc->add_option("--fd-step", fd_step, "finite-difference step");
  jc->add_option("--seed", check_seed, "RNG seed");
  jc->add_option("--activation", check_activation, "relu, tanh or gelu");

  CLI::App* cls = app.add_subcommand("classify", "naive-Bayes prediction quality from an outcome table");
  add_common(cls, opts);
  cls->add_option("--table", table_path, "outcome CSV")->required();
  cls->add_option("--threshold", threshold, "final-loss threshold");
  cls->add_option("--direction", direction, "below or above");
  cls->add_option("--bins", bins, "histogram bins");
  cls->add_option("--feature", feature, "ftle, meancos or loss (with --checkpoint: single report)");
  cls->add_option("--checkpoint", checkpoint, "checkpoint interval count");

  CLI::App* roc = app.add_subcommand("roc", "ROC curve for one feature group at one checkpoint");
  add_common(roc, opts);
  roc->add_option("--table", table_path, "outcome CSV")->required();
  roc->add_option("--threshold", threshold, "final-loss threshold");
  roc->add_option("--direction", direction, "below or above");
  roc->add_option("--bins", bins, "histogram bins");
  roc->add_option("--feature", feature, "ftle, meancos or loss")->required();
  roc->add_option("--checkpoint", checkpoint, "checkpoint interval count")->required();

  try {
    app.parse(argc, argv);
    if (gen->parsed()) return cmd_gen_data(opts, out_file);
    if (run->parsed()) return cmd_run(opts);
    if (ens->parsed()) return cmd_ensemble(opts);
    if (jc->parsed()) return cmd_jacobian_check(opts, trials, fd_step, check_seed, check_activation);
    if (cls->parsed()) return cmd_classify(opts, table_path, threshold, direction, bins, feature, checkpoint);
    if (roc->parsed()) return cmd_roc(opts, table_path, threshold, direction, bins, feature, checkpoint);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const input_error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  } catch (const numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}
