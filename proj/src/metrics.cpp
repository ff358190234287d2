#include "s2p/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace s2p {

double plain_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

MetricsReport evaluate(const Vector& labels, const Vector& scores, double threshold) {
  require(labels.size() == scores.size(), "evaluate: length mismatch");
  require(!labels.empty(), "evaluate: empty input");
  const std::size_t n = labels.size();

  Vector clamped(n);
  for (std::size_t i = 0; i < n; ++i) {
    require(labels[i] == 0.0 || labels[i] == 1.0, "evaluate: labels must be 0/1");
    clamped[i] = std::min(1.0, std::max(0.0, scores[i]));
  }

  MetricsReport r;
  r.threshold = threshold;
  for (std::size_t i = 0; i < n; ++i) {
    bool pred = clamped[i] >= threshold;
    bool pos = labels[i] == 1.0;
    if (pred && pos) ++r.tp;
    else if (pred && !pos) ++r.fp;
    else if (!pred && pos) ++r.fn;
    else ++r.tn;
  }
  r.accuracy = static_cast<double>(r.tp + r.tn) / static_cast<double>(n);
  r.precision = (r.tp + r.fp) > 0 ? static_cast<double>(r.tp) / (r.tp + r.fp) : 0.0;
  r.recall = (r.tp + r.fn) > 0 ? static_cast<double>(r.tp) / (r.tp + r.fn) : 0.0;
  r.f1 = (r.precision + r.recall) > 0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
                                      : 0.0;

  // ROC sweep over distinct scores, descending; ties move together.
  long npos = r.tp + r.fn, nneg = r.fp + r.tn;
  if (npos == 0 || nneg == 0) {
    r.auc = 0.0;
    return r;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return clamped[i] > clamped[j]; });
  double auc = 0.0;
  long tp = 0, fp = 0, tp_prev = 0, fp_prev = 0;
  std::size_t i = 0;
  while (i < n) {
    double s = clamped[order[i]];
    while (i < n && clamped[order[i]] == s) {
      if (labels[order[i]] == 1.0) ++tp;
      else ++fp;
      ++i;
    }
    double tpr = static_cast<double>(tp) / npos, tpr_prev = static_cast<double>(tp_prev) / npos;
    double fpr = static_cast<double>(fp) / nneg, fpr_prev = static_cast<double>(fp_prev) / nneg;
    auc += (fpr - fpr_prev) * (tpr + tpr_prev) / 2.0;
    tp_prev = tp;
    fp_prev = fp;
  }
  r.auc = auc;
  return r;
}

}  // namespace s2p
