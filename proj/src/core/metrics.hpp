#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

// All functions here are pure; concurrent invocation is safe.

namespace mribench::metrics {

constexpr int kNumClasses = 4;

// Rows are true class, columns are predicted class.
struct ConfusionMatrix {
  std::array<std::array<std::int64_t, kNumClasses>, kNumClasses> counts{};

  std::int64_t total() const;
  std::int64_t trace() const;
  std::int64_t support(int true_class) const;   // row sum
  std::int64_t predicted(int pred_class) const; // column sum
};

struct PerClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;
};

struct AggregateMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricsReport {
  double avg_loss = 0.0;
  double accuracy = 0.0;
  double precision = 0.0;  // support-weighted
  double recall = 0.0;     // support-weighted; equals accuracy
  double f1 = 0.0;         // support-weighted mean of per-class F1
  AggregateMetrics macro;  // unweighted means, emitted for transparency
  std::array<PerClassMetrics, kNumClasses> per_class{};
  ConfusionMatrix confusion;
};

ConfusionMatrix confusion(const std::vector<int>& y_true,
                          const std::vector<int>& y_pred);

double accuracy(const ConfusionMatrix& cm);

// One-vs-rest precision/recall/F1 per class; 0/0 collapses to 0.
std::array<PerClassMetrics, kNumClasses> per_class_prf(
    const ConfusionMatrix& cm);

AggregateMetrics weighted_aggregate(
    const std::array<PerClassMetrics, kNumClasses>& per_class);

AggregateMetrics macro_aggregate(
    const std::array<PerClassMetrics, kNumClasses>& per_class);

// Mean over samples of -log(p[true class]). Each row of `probabilities` must
// hold kNumClasses entries summing to 1 within 1e-5; values are clamped to
// 1e-12 before the log.
double mean_cross_entropy(const std::vector<std::array<double, kNumClasses>>&
                              probabilities,
                          const std::vector<int>& labels);

// Argmax with ties broken toward the lowest class id.
int argmax_label(const std::array<double, kNumClasses>& row);

// Assembles the full report from raw predictions.
MetricsReport build_report(
    const std::vector<int>& y_true, const std::vector<int>& y_pred,
    const std::vector<std::array<double, kNumClasses>>& probabilities);

}  // namespace mribench::metrics
