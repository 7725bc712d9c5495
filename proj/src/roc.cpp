#include "weightdyn/roc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "weightdyn/errors.hpp"

namespace wdyn {

RocCurve roc_curve(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw input_error("scores and labels must be non-empty and aligned");
  long n_pos = 0;
  for (auto l : labels) n_pos += l ? 1 : 0;
  const long n_neg = static_cast<long>(labels.size()) - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw input_error("ROC needs both classes in the labels");
  for (double s : scores)
    if (std::isnan(s)) throw input_error("NaN score");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.fpr.push_back(0.0);
  curve.tpr.push_back(0.0);
  long tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double s = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == s; ++i) {
      if (labels[order[i]])
        ++tp;
      else
        ++fp;
    }
    const double x = static_cast<double>(fp) / static_cast<double>(n_neg);
    const double y = static_cast<double>(tp) / static_cast<double>(n_pos);
    curve.auc += (x - curve.fpr.back()) * (y + curve.tpr.back()) * 0.5;
    curve.fpr.push_back(x);
    curve.tpr.push_back(y);
  }
  return curve;
}

Contingency contingency_table(const std::vector<double>& scores,
                              const std::vector<std::uint8_t>& labels, double threshold) {
  if (scores.size() != labels.size())
    throw input_error("scores and labels must be aligned");
  Contingency c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i])
      predicted ? ++c.tp : ++c.fn;
    else
      predicted ? ++c.fp : ++c.tn;
  }
  return c;
}

}  // namespace wdyn
