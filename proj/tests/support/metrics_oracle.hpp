#pragma once

// Brute-force re-evaluation of the five report metrics, kept deliberately
// independent of the library implementation: per-class TP/FP/FN come from
// literal set counting and the aggregates from the textbook formulas.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace testsupport {

struct OracleMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double avg_loss = 0.0;
};

inline OracleMetrics brute_force_metrics(
    const std::vector<int>& y_true, const std::vector<int>& y_pred,
    const std::vector<std::array<double, 4>>& probs) {
  OracleMetrics out;
  const std::size_t n = y_true.size();

  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (y_true[i] == y_pred[i]) ++correct;
  out.accuracy = static_cast<double>(correct) / static_cast<double>(n);

  for (int c = 0; c < 4; ++c) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (y_pred[i] == c && y_true[i] == c) tp += 1;
      if (y_pred[i] == c && y_true[i] != c) fp += 1;
      if (y_pred[i] != c && y_true[i] == c) fn += 1;
    }
    double support = tp + fn;
    double prec = (tp + fp) > 0 ? tp / (tp + fp) : 0.0;
    double rec = (tp + fn) > 0 ? tp / (tp + fn) : 0.0;
    double f1 = (prec + rec) > 0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
    double w = support / static_cast<double>(n);
    out.precision += w * prec;
    out.recall += w * rec;
    out.f1 += w * f1;
  }

  for (std::size_t i = 0; i < n; ++i) {
    double p = probs[i][static_cast<std::size_t>(y_true[i])];
    if (p < 1e-12) p = 1e-12;
    out.avg_loss -= std::log(p);
  }
  out.avg_loss /= static_cast<double>(n);
  return out;
}

}  // namespace testsupport
