#pragma once

#include "s2p/matrix.hpp"

namespace s2p {

struct MetricsReport {
  double accuracy = 0, precision = 0, recall = 0, f1 = 0, auc = 0;
  long tp = 0, fp = 0, tn = 0, fn = 0;
  double threshold = 0.5;
};

// Binary-classification metrics at the given threshold (score >= threshold
// predicts 1), plus AUC by trapezoidal integration of the ROC curve over
// all distinct score cutoffs. Scores are clamped to [0, 1] first to absorb
// protocol noise. Precision/recall/F1 are 0 when their denominator is 0.
MetricsReport evaluate(const Vector& labels, const Vector& scores, double threshold = 0.5);

double plain_sigmoid(double x);

}  // namespace s2p
