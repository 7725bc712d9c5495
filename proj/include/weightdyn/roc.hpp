#pragma once

#include <cstdint>
#include <vector>

namespace wdyn {

// Threshold sweep over distinct scores, descending; tied scores move as one
// group (diagonal segments). Starts at (0,0), ends at (1,1); the trapezoid
// area equals the Mann-Whitney pair statistic with ties counted 1/2.
struct RocCurve {
  std::vector<double> fpr, tpr;
  double auc = 0.0;
};

RocCurve roc_curve(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels);

struct Contingency {
  long tp = 0, fp = 0, tn = 0, fn = 0;
};

// Predicted positive iff score >= threshold.
Contingency contingency_table(const std::vector<double>& scores,
                              const std::vector<std::uint8_t>& labels, double threshold);

}  // namespace wdyn
