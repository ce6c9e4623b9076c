#include "core/metrics.hpp"

#include <cmath>

#include "core/common.hpp"

namespace mribench::metrics {

std::int64_t ConfusionMatrix::total() const {
  std::int64_t n = 0;
  for (const auto& row : counts)
    for (auto c : row) n += c;
  return n;
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t n = 0;
  for (int i = 0; i < kNumClasses; ++i) n += counts[i][i];
  return n;
}

std::int64_t ConfusionMatrix::support(int true_class) const {
  std::int64_t n = 0;
  for (auto c : counts[static_cast<std::size_t>(true_class)]) n += c;
  return n;
}

std::int64_t ConfusionMatrix::predicted(int pred_class) const {
  std::int64_t n = 0;
  for (int t = 0; t < kNumClasses; ++t)
    n += counts[static_cast<std::size_t>(t)]
               [static_cast<std::size_t>(pred_class)];
  return n;
}

ConfusionMatrix confusion(const std::vector<int>& y_true,
                          const std::vector<int>& y_pred) {
  if (y_true.empty() || y_true.size() != y_pred.size()) {
    throw_runtime("confusion: label lists must be nonempty and equal length (" +
                  std::to_string(y_true.size()) + " vs " +
                  std::to_string(y_pred.size()) + ")");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    int t = y_true[i];
    int p = y_pred[i];
    if (t < 0 || t >= kNumClasses || p < 0 || p >= kNumClasses) {
      throw_runtime("confusion: label out of range at index " +
                    std::to_string(i));
    }
    ++cm.counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
  }
  return cm;
}

double accuracy(const ConfusionMatrix& cm) {
  std::int64_t n = cm.total();
  if (n <= 0) throw_runtime("accuracy: empty confusion matrix");
  return static_cast<double>(cm.trace()) / static_cast<double>(n);
}

namespace {
double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }
}  // namespace

std::array<PerClassMetrics, kNumClasses> per_class_prf(
    const ConfusionMatrix& cm) {
  std::array<PerClassMetrics, kNumClasses> out{};
  for (int c = 0; c < kNumClasses; ++c) {
    auto tp = static_cast<double>(cm.counts[static_cast<std::size_t>(c)]
                                           [static_cast<std::size_t>(c)]);
    auto pred = static_cast<double>(cm.predicted(c));
    auto sup = static_cast<double>(cm.support(c));
    PerClassMetrics& m = out[static_cast<std::size_t>(c)];
    m.precision = safe_div(tp, pred);
    m.recall = safe_div(tp, sup);
    m.f1 = safe_div(2.0 * m.precision * m.recall, m.precision + m.recall);
    m.support = cm.support(c);
  }
  return out;
}

AggregateMetrics weighted_aggregate(
    const std::array<PerClassMetrics, kNumClasses>& per_class) {
  double total = 0.0;
  AggregateMetrics agg;
  for (const auto& m : per_class) total += static_cast<double>(m.support);
  if (total <= 0.0) throw_runtime("weighted_aggregate: zero total support");
  for (const auto& m : per_class) {
    double w = static_cast<double>(m.support) / total;
    agg.precision += w * m.precision;
    agg.recall += w * m.recall;
    agg.f1 += w * m.f1;
  }
  return agg;
}

AggregateMetrics macro_aggregate(
    const std::array<PerClassMetrics, kNumClasses>& per_class) {
  AggregateMetrics agg;
  for (const auto& m : per_class) {
    agg.precision += m.precision / kNumClasses;
    agg.recall += m.recall / kNumClasses;
    agg.f1 += m.f1 / kNumClasses;
  }
  return agg;
}

double mean_cross_entropy(
    const std::vector<std::array<double, kNumClasses>>& probabilities,
    const std::vector<int>& labels) {
  if (probabilities.empty() || probabilities.size() != labels.size()) {
    throw_runtime("mean_cross_entropy: need equal-length nonempty inputs");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const auto& row = probabilities[i];
    double row_sum = 0.0;
    for (double p : row) row_sum += p;
    if (std::abs(row_sum - 1.0) > 1e-5) {
      throw_runtime("mean_cross_entropy: row " + std::to_string(i) +
                    " sums to " + std::to_string(row_sum) + ", expected 1");
    }
    int label = labels[i];
    if (label < 0 || label >= kNumClasses) {
      throw_runtime("mean_cross_entropy: label out of range at index " +
                    std::to_string(i));
    }
    double p = row[static_cast<std::size_t>(label)];
    if (p < 1e-12) p = 1e-12;
    sum -= std::log(p);
  }
  return sum / static_cast<double>(probabilities.size());
}

int argmax_label(const std::array<double, kNumClasses>& row) {
  int best = 0;
  for (int c = 1; c < kNumClasses; ++c) {
    if (row[static_cast<std::size_t>(c)] > row[static_cast<std::size_t>(best)])
      best = c;
  }
  return best;
}

MetricsReport build_report(
    const std::vector<int>& y_true, const std::vector<int>& y_pred,
    const std::vector<std::array<double, kNumClasses>>& probabilities) {
  MetricsReport report;
  report.confusion = confusion(y_true, y_pred);
  report.accuracy = accuracy(report.confusion);
  report.per_class = per_class_prf(report.confusion);
  AggregateMetrics agg = weighted_aggregate(report.per_class);
  report.precision = agg.precision;
  report.recall = agg.recall;
  report.f1 = agg.f1;
  report.macro = macro_aggregate(report.per_class);
  report.avg_loss = mean_cross_entropy(probabilities, y_true);
  return report;
}

}  // namespace mribench::metrics
