#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "weightdyn/ensemble.hpp"

namespace wdyn {

enum class LabelDirection { below, above };

std::string_view to_string(LabelDirection d);
LabelDirection direction_from_string(std::string_view name);

// Outcome rows turned into a labeled train/test problem. The split is by
// run_id parity (even = train, odd = test); rows whose selected features are
// non-finite are dropped and counted, while an infinite c_f is a perfectly
// valid label.
struct LabeledFeatures {
  std::vector<std::string> feature_names;
  Eigen::MatrixXd train_features, test_features;  // rows x features
  std::vector<std::uint8_t> train_labels, test_labels;
  long n_dropped_nonfinite = 0;
};

LabeledFeatures label_outcomes(const OutcomeTable& table, double threshold,
                               LabelDirection direction,
                               const std::vector<std::string>& feature_columns);

// Binned naive Bayes: per feature, equal-width histograms over the train
// range with Laplace smoothing (alpha = 1); out-of-range values clamp to the
// edge bins. Priors are the train class frequencies.
struct BayesModel {
  int bins = 0;
  std::vector<std::string> feature_names;
  Eigen::VectorXd lo, hi;                       // per-feature train range
  Eigen::MatrixXd log_cond_pos, log_cond_neg;   // feature x bin
  double log_prior_pos = 0.0, log_prior_neg = 0.0;

  int bin_of(Eigen::Index feature, double value) const;
};

BayesModel fit_naive_bayes(const LabeledFeatures& data, int bins);

// P(positive | features), evaluated in log space.
double predict_posterior(const BayesModel& model, const Eigen::VectorXd& features);
std::vector<double> predict_posterior(const BayesModel& model, const Eigen::MatrixXd& rows);

}  // namespace wdyn
