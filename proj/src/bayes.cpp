#include "weightdyn/bayes.hpp"

#include <cmath>

#include "weightdyn/errors.hpp"

namespace wdyn {

std::string_view to_string(LabelDirection d) {
  return d == LabelDirection::below ? "below" : "above";
}

LabelDirection direction_from_string(std::string_view name) {
  if (name == "below") return LabelDirection::below;
  if (name == "above") return LabelDirection::above;
  throw input_error("unknown direction '" + std::string(name) + "' (expected below or above)");
}

LabeledFeatures label_outcomes(const OutcomeTable& table, double threshold,
                               LabelDirection direction,
                               const std::vector<std::string>& feature_columns) {
  if (!std::isfinite(threshold)) throw input_error("label threshold must be finite");
  if (feature_columns.empty()) throw input_error("no feature columns selected");
  std::vector<std::size_t> idx;
  idx.reserve(feature_columns.size());
  for (const auto& name : feature_columns) idx.push_back(table.feature_index(name));

  LabeledFeatures out;
  out.feature_names = feature_columns;
  std::vector<std::vector<double>> train_rows, test_rows;
  for (const OutcomeRow& row : table.rows) {
    std::vector<double> f(idx.size());
    bool finite = true;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      f[i] = row.features.at(idx[i]);
      finite = finite && std::isfinite(f[i]);
    }
    if (!finite) {
      ++out.n_dropped_nonfinite;
      continue;
    }
    const bool positive = direction == LabelDirection::below ? row.c_f < threshold
                                                             : row.c_f > threshold;
    if (row.run_id % 2 == 0) {
      train_rows.push_back(std::move(f));
      out.train_labels.push_back(positive ? 1 : 0);
    } else {
      test_rows.push_back(std::move(f));
      out.test_labels.push_back(positive ? 1 : 0);
    }
  }

  const auto to_matrix = [&](const std::vector<std::vector<double>>& rows) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(idx.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < idx.size(); ++c)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return m;
  };
  out.train_features = to_matrix(train_rows);
  out.test_features = to_matrix(test_rows);

  long pos = 0;
  for (auto l : out.train_labels) pos += l;
  if (out.train_labels.empty() || pos == 0 || pos == static_cast<long>(out.train_labels.size()))
    throw input_error("train split does not contain both classes; classifier undefined");
  return out;
}

int BayesModel::bin_of(Eigen::Index feature, double value) const {
  const double width = (hi[feature] - lo[feature]) / static_cast<double>(bins);
  if (!(width > 0.0)) return 0;  // constant feature: one degenerate bin
  const double t = std::floor((value - lo[feature]) / width);
  if (t < 0.0) return 0;
  if (t >= static_cast<double>(bins)) return bins - 1;
  return static_cast<int>(t);
}

BayesModel fit_naive_bayes(const LabeledFeatures& data, int bins) {
  if (bins < 2) throw input_error("naive Bayes needs at least 2 bins");
  const Eigen::Index n = data.train_features.rows();
  const Eigen::Index f = data.train_features.cols();
  if (n < 1 || f < 1) throw input_error("empty training split");
  long n_pos = 0;
  for (auto l : data.train_labels) n_pos += l;
  const long n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw input_error("train split does not contain both classes; classifier undefined");

  BayesModel m;
  m.bins = bins;
  m.feature_names = data.feature_names;
  m.lo = data.train_features.colwise().minCoeff();
  m.hi = data.train_features.colwise().maxCoeff();
  m.log_prior_pos = std::log(static_cast<double>(n_pos) / static_cast<double>(n));
  m.log_prior_neg = std::log(static_cast<double>(n_neg) / static_cast<double>(n));

  Eigen::MatrixXd count_pos = Eigen::MatrixXd::Zero(f, bins);
  Eigen::MatrixXd count_neg = Eigen::MatrixXd::Zero(f, bins);
  for (Eigen::Index r = 0; r < n; ++r) {
    Eigen::MatrixXd& counts = data.train_labels[r] ? count_pos : count_neg;
    for (Eigen::Index c = 0; c < f; ++c) counts(c, m.bin_of(c, data.train_features(r, c))) += 1.0;
  }
  // Laplace smoothing: P(bin | class) = (count + 1) / (n_class + bins).
  m.log_cond_pos = ((count_pos.array() + 1.0) / static_cast<double>(n_pos + bins)).log();
  m.log_cond_neg = ((count_neg.array() + 1.0) / static_cast<double>(n_neg + bins)).log();
  return m;
}

double predict_posterior(const BayesModel& model, const Eigen::VectorXd& features) {
  if (features.size() != model.lo.size())
    throw input_error("feature count does not match the fitted model");
  double lp = model.log_prior_pos;
  double ln = model.log_prior_neg;
  for (Eigen::Index c = 0; c < features.size(); ++c) {
    const int b = model.bin_of(c, features[c]);
    lp += model.log_cond_pos(c, b);
    ln += model.log_cond_neg(c, b);
  }
  // P(pos | x) = 1 / (1 + exp(ln - lp))
  return 1.0 / (1.0 + std::exp(ln - lp));
}

std::vector<double> predict_posterior(const BayesModel& model, const Eigen::MatrixXd& rows) {
  std::vector<double> scores(rows.rows());
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    const Eigen::VectorXd features = rows.row(r).transpose();
    scores[r] = predict_posterior(model, features);
  }
  return scores;
}

}  // namespace wdyn
