#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/common.hpp"
#include "core/metrics.hpp"
#include "core/rng.hpp"
#include "support/metrics_oracle.hpp"

using namespace mribench;
using namespace mribench::metrics;

TEST_CASE("confusion matrix basics") {
  SUBCASE("perfect prediction is diagonal") {
    auto cm = confusion({0, 1, 2, 3}, {0, 1, 2, 3});
    for (int t = 0; t < 4; ++t)
      for (int p = 0; p < 4; ++p)
        CHECK(cm.counts[t][p] == (t == p ? 1 : 0));
    CHECK(accuracy(cm) == doctest::Approx(1.0));
  }

  SUBCASE("hand-enumerated 4-sample case") {
    auto cm = confusion({0, 0, 1, 2}, {0, 1, 1, 2});
    CHECK(cm.counts[0][0] == 1);
    CHECK(cm.counts[0][1] == 1);
    CHECK(cm.counts[0][2] == 0);
    CHECK(cm.counts[0][3] == 0);
    CHECK(cm.counts[1][1] == 1);
    CHECK(cm.counts[1][0] == 0);
    CHECK(cm.counts[2][2] == 1);
    CHECK(accuracy(cm) == doctest::Approx(0.75));
  }

  SUBCASE("degenerate predictor puts all mass in column 0") {
    auto cm = confusion({0, 1, 2, 3}, {0, 0, 0, 0});
    CHECK(cm.predicted(0) == 4);
    CHECK(cm.predicted(1) == 0);
    CHECK(cm.predicted(2) == 0);
    CHECK(cm.predicted(3) == 0);
  }

  SUBCASE("contract violations") {
    CHECK_THROWS_AS(confusion({}, {}), Error);
    CHECK_THROWS_AS(confusion({0, 1}, {0}), Error);
    CHECK_THROWS_AS(confusion({0, 4}, {0, 0}), Error);
    CHECK_THROWS_AS(confusion({0, -1}, {0, 0}), Error);
  }
}

TEST_CASE("per-class precision/recall/F1") {
  auto cm = confusion({0, 0, 1, 2}, {0, 1, 1, 2});
  auto pc = per_class_prf(cm);

  SUBCASE("class 0 hand arithmetic") {
    CHECK(pc[0].precision == doctest::Approx(1.0));
    CHECK(pc[0].recall == doctest::Approx(0.5));
    CHECK(pc[0].f1 == doctest::Approx(2.0 * 0.5 / 1.5));
  }

  SUBCASE("0/0 convention: absent class") {
    CHECK(pc[3].support == 0);
    CHECK(pc[3].precision == 0.0);
    CHECK(pc[3].recall == 0.0);
    CHECK(pc[3].f1 == 0.0);
  }

  SUBCASE("P == R implies F1 == P") {
    // class 2: P = R = 1
    CHECK(pc[2].precision == pc[2].recall);
    CHECK(pc[2].f1 == doctest::Approx(pc[2].precision));
  }

  SUBCASE("F1 bounded by min/max of P and R") {
    for (const auto& m : pc) {
      CHECK(m.f1 >= std::min(m.precision, m.recall) - 1e-12);
      CHECK(m.f1 <= std::max(m.precision, m.recall) + 1e-12);
    }
  }
}

TEST_CASE("weighted aggregation") {
  SUBCASE("uniform support with equal values aggregates to that value") {
    ConfusionMatrix cm;
    for (int c = 0; c < 4; ++c) cm.counts[c][c] = 5;
    auto agg = weighted_aggregate(per_class_prf(cm));
    CHECK(agg.precision == doctest::Approx(1.0));
    CHECK(agg.recall == doctest::Approx(1.0));
    CHECK(agg.f1 == doctest::Approx(1.0));
  }

  SUBCASE("weighted recall equals accuracy on the hand case") {
    auto cm = confusion({0, 0, 1, 2}, {0, 1, 1, 2});
    auto agg = weighted_aggregate(per_class_prf(cm));
    CHECK(agg.recall == doctest::Approx((2 * 0.5 + 1 * 1.0 + 1 * 1.0) / 4.0));
    CHECK(agg.recall == doctest::Approx(accuracy(cm)).epsilon(1e-12));
  }
}

TEST_CASE("mean cross entropy") {
  SUBCASE("probability 1 on the true class gives zero loss") {
    std::vector<std::array<double, 4>> probs = {{1, 0, 0, 0}, {0, 0, 1, 0}};
    CHECK(mean_cross_entropy(probs, {0, 2}) == doctest::Approx(0.0));
  }

  SUBCASE("uniform rows give ln 4 for any labels") {
    std::vector<std::array<double, 4>> probs(7, {0.25, 0.25, 0.25, 0.25});
    std::vector<int> labels = {0, 1, 2, 3, 0, 1, 2};
    CHECK(mean_cross_entropy(probs, labels) ==
          doctest::Approx(std::log(4.0)).epsilon(1e-9));
  }

  SUBCASE("two samples with p_true 1 and e^-2 average to 1") {
    double e2 = std::exp(-2.0);
    double rest = (1.0 - e2) / 3.0;
    std::vector<std::array<double, 4>> probs = {{1, 0, 0, 0},
                                                {e2, rest, rest, rest}};
    CHECK(mean_cross_entropy(probs, {0, 0}) ==
          doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("clamp keeps saturated rows finite") {
    std::vector<std::array<double, 4>> probs = {{0.0, 1.0, 0.0, 0.0}};
    double loss = mean_cross_entropy(probs, {0});
    CHECK(std::isfinite(loss));
    CHECK(loss == doctest::Approx(-std::log(1e-12)));
  }

  SUBCASE("bad row sum rejected") {
    std::vector<std::array<double, 4>> probs = {{0.5, 0.5, 0.5, 0.5}};
    CHECK_THROWS_AS(mean_cross_entropy(probs, {0}), Error);
  }
}

namespace {

struct RandomInstance {
  std::vector<int> y_true;
  std::vector<int> y_pred;
  std::vector<std::array<double, 4>> probs;
};

RandomInstance random_instance(Rng& rng) {
  RandomInstance inst;
  auto n = static_cast<std::size_t>(1 + rng.below(50));
  for (std::size_t i = 0; i < n; ++i) {
    inst.y_true.push_back(static_cast<int>(rng.below(4)));
    std::array<double, 4> row{};
    double sum = 0.0;
    for (auto& v : row) {
      v = rng.uniform() + 1e-6;
      sum += v;
    }
    for (auto& v : row) v /= sum;
    inst.probs.push_back(row);
    inst.y_pred.push_back(argmax_label(row));
  }
  return inst;
}

}  // namespace

TEST_CASE("oracle equivalence on randomized instances") {
  Rng rng(20240817);
  for (int trial = 0; trial < 1000; ++trial) {
    auto inst = random_instance(rng);
    auto report = build_report(inst.y_true, inst.y_pred, inst.probs);
    auto expected =
        testsupport::brute_force_metrics(inst.y_true, inst.y_pred, inst.probs);

    REQUIRE(std::abs(report.accuracy - expected.accuracy) < 1e-9);
    REQUIRE(std::abs(report.precision - expected.precision) < 1e-9);
    REQUIRE(std::abs(report.recall - expected.recall) < 1e-9);
    REQUIRE(std::abs(report.f1 - expected.f1) < 1e-9);
    REQUIRE(std::abs(report.avg_loss - expected.avg_loss) < 1e-9);

    // Weighted recall == accuracy, the Table-I signature.
    REQUIRE(std::abs(report.recall - report.accuracy) < 1e-12);

    // Bounds.
    for (double v : {report.accuracy, report.precision, report.recall,
                     report.f1}) {
      REQUIRE(v >= 0.0);
      REQUIRE(v <= 1.0);
    }
    REQUIRE(report.avg_loss >= 0.0);
  }
}

TEST_CASE("permutation invariance") {
  Rng rng(7);
  auto inst = random_instance(rng);
  while (inst.y_true.size() < 2) inst = random_instance(rng);
  auto base = build_report(inst.y_true, inst.y_pred, inst.probs);

  std::vector<std::size_t> order(inst.y_true.size());
  std::iota(order.begin(), order.end(), 0u);
  rng.shuffle(order);

  RandomInstance shuffled;
  for (auto i : order) {
    shuffled.y_true.push_back(inst.y_true[i]);
    shuffled.y_pred.push_back(inst.y_pred[i]);
    shuffled.probs.push_back(inst.probs[i]);
  }
  auto perm = build_report(shuffled.y_true, shuffled.y_pred, shuffled.probs);

  CHECK(perm.accuracy == doctest::Approx(base.accuracy).epsilon(1e-12));
  CHECK(perm.precision == doctest::Approx(base.precision).epsilon(1e-12));
  CHECK(perm.recall == doctest::Approx(base.recall).epsilon(1e-12));
  CHECK(perm.f1 == doctest::Approx(base.f1).epsilon(1e-12));
  CHECK(perm.avg_loss == doctest::Approx(base.avg_loss).epsilon(1e-12));
}

TEST_CASE("argmax ties break toward the lowest class id") {
  CHECK(argmax_label({0.25, 0.25, 0.25, 0.25}) == 0);
  CHECK(argmax_label({0.1, 0.4, 0.4, 0.1}) == 1);
  CHECK(argmax_label({0.0, 0.0, 0.0, 1.0}) == 3);
}
