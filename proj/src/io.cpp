#include "weightdyn/io.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "weightdyn/errors.hpp"

namespace wdyn {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw input_error("cannot parse number '" + s + "'");
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw input_error("cannot open '" + path.string() + "' for writing");
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw input_error("cannot open '" + path.string() + "'");
  return is;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_dataset_csv(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream os = open_out(path);
  os << "x1,x2,y\n";
  for (Eigen::Index i = 0; i < d.size(); ++i)
    os << format_double(d.features(0, i)) << ',' << format_double(d.features(1, i)) << ','
       << format_double(d.targets(0, i)) << '\n';
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream is = open_in(path);
  std::string line;
  if (!std::getline(is, line) || split_csv_line(line) != std::vector<std::string>{"x1", "x2", "y"})
    throw input_error("'" + path.string() + "' is not a dataset CSV (expected header x1,x2,y)");
  std::vector<std::array<double, 3>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 3) throw input_error("malformed dataset row '" + line + "'");
    rows.push_back({parse_double(f[0]), parse_double(f[1]), parse_double(f[2])});
  }
  if (rows.empty()) throw input_error("dataset CSV has no rows");
  Dataset d;
  d.features.resize(2, static_cast<Eigen::Index>(rows.size()));
  d.targets.resize(1, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    d.features(0, static_cast<Eigen::Index>(i)) = rows[i][0];
    d.features(1, static_cast<Eigen::Index>(i)) = rows[i][1];
    d.targets(0, static_cast<Eigen::Index>(i)) = rows[i][2];
  }
  return d;
}

namespace {

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

nlohmann::json run_record_to_json(const RunRecord& rec) {
  nlohmann::json j;
  j["run_id"] = rec.run_id;
  j["c_f"] = rec.final_cost;
  j["spectrum"] = vector_to_json(rec.spectrum);
  nlohmann::json cks = nlohmann::json::array();
  for (const CheckpointRecord& ck : rec.checkpoints) {
    nlohmann::json c;
    c["interval"] = ck.interval;
    c["ftle"] = vector_to_json(ck.ftle);
    c["mean_cos_abs"] = ck.mean_cos_abs;
    c["cos_abs"] = matrix_to_json(ck.cos_abs);
    c["loss"] = ck.loss;
    cks.push_back(std::move(c));
  }
  j["checkpoints"] = std::move(cks);
  j["config_hash"] = rec.config_hash;
  j["diverged"] = rec.diverged;
  j["final_clv_cos_abs"] = matrix_to_json(rec.final_clv_cos_abs);
  j["final_clv_mean_cos_abs"] = rec.final_clv_mean_cos_abs;
  return j;
}

void write_run_record_json(const RunRecord& rec, const std::filesystem::path& path) {
  std::ofstream os = open_out(path);
  os << run_record_to_json(rec).dump(2) << '\n';
}

void write_outcome_csv(const OutcomeTable& table, const std::filesystem::path& path) {
  std::ofstream os = open_out(path);
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    os << (i ? "," : "") << table.columns[i];
  os << '\n';
  for (const OutcomeRow& row : table.rows) {
    os << row.run_id << ',' << row.seed << ',' << row.activation << ',' << row.init << ','
       << format_double(row.c_f);
    for (double f : row.features) os << ',' << format_double(f);
    os << '\n';
  }
}

OutcomeTable read_outcome_csv(const std::filesystem::path& path) {
  std::ifstream is = open_in(path);
  std::string line;
  if (!std::getline(is, line)) throw input_error("empty outcome CSV '" + path.string() + "'");
  OutcomeTable table;
  table.columns = split_csv_line(line);
  const std::vector<std::string> fixed = {"run_id", "seed", "activation", "init", "c_f"};
  if (table.columns.size() < fixed.size() ||
      !std::equal(fixed.begin(), fixed.end(), table.columns.begin()))
    throw input_error("'" + path.string() + "' is not an outcome CSV");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != table.columns.size())
      throw input_error("outcome row has " + std::to_string(f.size()) + " fields, expected " +
                        std::to_string(table.columns.size()));
    OutcomeRow row;
    row.run_id = std::stol(f[0]);
    row.seed = std::stoull(f[1]);
    row.activation = f[2];
    row.init = f[3];
    row.c_f = parse_double(f[4]);
    row.features.reserve(f.size() - 5);
    for (std::size_t i = 5; i < f.size(); ++i) row.features.push_back(parse_double(f[i]));
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_le_vs_cf_csv(const EnsembleResult& result, const std::filesystem::path& path) {
  std::ofstream os = open_out(path);
  os << "lq,cf,q\n";
  for (Eigen::Index run = 0; run < result.spectra.rows(); ++run)
    for (Eigen::Index q = 0; q < result.spectra.cols(); ++q)
      os << format_double(result.spectra(run, q)) << ','
         << format_double(result.table.rows[run].c_f) << ',' << (q + 1) << '\n';
}

void write_roc_csv(const RocCurve& curve, const std::filesystem::path& path) {
  std::ofstream os = open_out(path);
  os << "fpr,tpr\n";
  for (std::size_t i = 0; i < curve.fpr.size(); ++i)
    os << format_double(curve.fpr[i]) << ',' << format_double(curve.tpr[i]) << '\n';
}

nlohmann::json ensemble_config_to_json(const EnsembleConfig& cfg) {
  nlohmann::json j;
  j["dims"] = {cfg.base.n1, cfg.base.n2, cfg.base.n3};
  j["activation"] = to_string(cfg.base.activation);
  j["initializer"] = to_string(cfg.base.initializer);
  j["wide_sigma"] = cfg.base.wide_sigma;
  j["dt"] = cfg.base.dt;
  j["steps_per_interval"] = cfg.base.steps_per_interval;
  j["total_steps"] = cfg.base.total_steps;
  j["batch_size"] = cfg.base.batch_size;
  j["clv_window_intervals"] = cfg.base.clv_window_intervals;
  // Raw list: empty means "defaults, resolved against the final run length".
  j["checkpoints"] = cfg.base.checkpoints;
  j["ginelli_discard_frac"] = cfg.base.ginelli_discard_frac;
  j["seeds"] = {{"data", cfg.base.seeds.data},
                {"init", cfg.base.seeds.init},
                {"batch_order", cfg.base.seeds.batch_order},
                {"ginelli", cfg.base.seeds.ginelli}};
  j["n"] = cfg.dataset_n;
  j["n_runs"] = cfg.n_runs;
  j["parallelism"] = cfg.parallelism;
  return j;
}

EnsembleConfig ensemble_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw input_error("config must be a JSON object");
  EnsembleConfig cfg;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "dims") {
        if (!value.is_array() || value.size() != 3)
          throw input_error("dims must be a 3-element array");
        cfg.base.n1 = value[0].get<Eigen::Index>();
        cfg.base.n2 = value[1].get<Eigen::Index>();
        cfg.base.n3 = value[2].get<Eigen::Index>();
      } else if (key == "activation") {
        cfg.base.activation = activation_from_string(value.get<std::string>());
      } else if (key == "initializer") {
        cfg.base.initializer = initializer_from_string(value.get<std::string>());
      } else if (key == "wide_sigma") {
        cfg.base.wide_sigma = value.get<double>();
      } else if (key == "dt") {
        cfg.base.dt = value.get<double>();
      } else if (key == "steps_per_interval") {
        cfg.base.steps_per_interval = value.get<int>();
      } else if (key == "total_steps") {
        cfg.base.total_steps = value.get<long>();
      } else if (key == "batch_size") {
        cfg.base.batch_size = value.get<Eigen::Index>();
      } else if (key == "clv_window_intervals") {
        cfg.base.clv_window_intervals = value.get<int>();
      } else if (key == "checkpoints") {
        cfg.base.checkpoints = value.get<std::vector<long>>();
      } else if (key == "ginelli_discard_frac") {
        cfg.base.ginelli_discard_frac = value.get<double>();
      } else if (key == "seeds") {
        for (const auto& [skey, sval] : value.items()) {
          if (skey == "data")
            cfg.base.seeds.data = sval.get<std::uint64_t>();
          else if (skey == "init")
            cfg.base.seeds.init = sval.get<std::uint64_t>();
          else if (skey == "batch_order")
            cfg.base.seeds.batch_order = sval.get<std::uint64_t>();
          else if (skey == "ginelli")
            cfg.base.seeds.ginelli = sval.get<std::uint64_t>();
          else
            throw input_error("unknown seed key '" + skey + "'");
        }
      } else if (key == "n") {
        cfg.dataset_n = value.get<Eigen::Index>();
      } else if (key == "n_runs") {
        cfg.n_runs = value.get<long>();
      } else if (key == "parallelism") {
        cfg.parallelism = value.get<int>();
      } else {
        throw input_error("unknown config key '" + key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw input_error("bad value for config key '" + key + "': " + e.what());
    }
  }
  return cfg;
}

EnsembleConfig load_ensemble_config(const std::filesystem::path& path) {
  std::ifstream is = open_in(path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw input_error("cannot parse '" + path.string() + "': " + e.what());
  }
  return ensemble_config_from_json(j);
}

}  // namespace wdyn
