#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "ged/metrics.hpp"
#include "ged/rng.hpp"

using namespace ged;

namespace {

// Plain-definition reimplementations, kept independent of the library code.

std::vector<double> naive_average_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t below = 0, equal = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (v[j] < v[i]) ++below;
      if (v[j] == v[i]) ++equal;
    }
    ranks[i] = static_cast<double>(below) +
               (static_cast<double>(equal) + 1.0) / 2.0;
  }
  return ranks;
}

double naive_pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const auto n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  return cov / std::sqrt(va * vb);
}

double naive_spearman(const std::vector<double>& pred,
                      const std::vector<double>& truth) {
  return naive_pearson(naive_average_ranks(pred), naive_average_ranks(truth));
}

double naive_kendall(const std::vector<double>& pred,
                     const std::vector<double>& truth) {
  double concordant = 0, discordant = 0, tie_pred = 0, tie_truth = 0;
  const std::size_t n = pred.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dp = pred[i] - pred[j];
      const double dt = truth[i] - truth[j];
      if (dp == 0 && dt == 0) continue;
      if (dp == 0) {
        ++tie_pred;
      } else if (dt == 0) {
        ++tie_truth;
      } else if (dp * dt > 0) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double total = concordant + discordant;
  return (concordant - discordant) /
         std::sqrt((total + tie_pred) * (total + tie_truth));
}

double naive_precision(const std::vector<double>& pred,
                       const std::vector<double>& truth, int k) {
  auto top = [&](const std::vector<double>& v) {
    std::vector<int> idx(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) idx[i] = static_cast<int>(i);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return v[static_cast<std::size_t>(a)] < v[static_cast<std::size_t>(b)]; });
    return std::unordered_set<int>(idx.begin(), idx.begin() + k);
  };
  const auto pt = top(pred);
  const auto tt = top(truth);
  int hit = 0;
  for (int i : pt) hit += tt.count(i) ? 1 : 0;
  return static_cast<double>(hit) / k;
}

}  // namespace

TEST_CASE("error metrics on hand values") {
  CHECK(rmse({1, 2, 3}, {1, 2, 3}) == 0);
  CHECK(mae({1, 2, 3}, {1, 2, 3}) == 0);
  CHECK(rmse({0, 0}, {3, 4}) == doctest::Approx(std::sqrt(12.5)));
  CHECK(mae({0, 0}, {3, 4}) == doctest::Approx(3.5));
  CHECK_THROWS_AS(rmse({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(mae({1}, {1, 2}), std::invalid_argument);
}

TEST_CASE("rank correlations on hand values") {
  const std::vector<double> truth{1, 2, 3, 4};
  CHECK(spearman_rho({1, 3, 2, 4}, truth) == doctest::Approx(0.8));
  CHECK(kendall_tau({1, 3, 2, 4}, truth) == doctest::Approx(2.0 / 3.0));
  CHECK(spearman_rho(truth, truth) == doctest::Approx(1.0));
  CHECK(kendall_tau(truth, truth) == doctest::Approx(1.0));
  CHECK(spearman_rho({4, 3, 2, 1}, truth) == doctest::Approx(-1.0));
  CHECK(kendall_tau({4, 3, 2, 1}, truth) == doctest::Approx(-1.0));
}

TEST_CASE("tie handling matches the averaged-rank and tau-b definitions") {
  // pred {1,1,2}: pairs (0,1) pred-tied, (0,2) and (1,2) concordant.
  // tau-b = 2 / sqrt(3 * 2)
  CHECK(kendall_tau({1, 1, 2}, {1, 2, 3}) ==
        doctest::Approx(2.0 / std::sqrt(6.0)));
  CHECK(spearman_rho({1, 1, 2}, {1, 2, 3}) ==
        doctest::Approx(naive_spearman({1, 1, 2}, {1, 2, 3})));
}

TEST_CASE("constant inputs are a domain error") {
  CHECK_THROWS_AS(spearman_rho({1, 1, 1}, {1, 2, 3}), std::domain_error);
  CHECK_THROWS_AS(spearman_rho({1, 2, 3}, {5, 5, 5}), std::domain_error);
  CHECK_THROWS_AS(kendall_tau({1, 1, 1}, {1, 2, 3}), std::domain_error);
  CHECK_THROWS_AS(kendall_tau({1, 2, 3}, {5, 5, 5}), std::domain_error);
}

TEST_CASE("precision at k with ties resolved by index") {
  CHECK(precision_at_k({1, 2, 3, 4}, {1, 2, 3, 4}, 2) == 1.0);
  CHECK(precision_at_k({4, 3, 2, 1}, {1, 2, 3, 4}, 2) == 0.0);
  // prediction ties: indices 0 and 1 share the smallest value, index 0 wins
  CHECK(precision_at_k({5, 5, 9, 9}, {5, 6, 1, 2}, 1) == 0.0);
  CHECK(precision_at_k({5, 5, 9, 9}, {6, 5, 1, 2}, 1) == 0.0);
  CHECK(precision_at_k({5, 5, 9, 9}, {5, 6, 7, 8}, 2) == 1.0);
  CHECK_THROWS_AS(precision_at_k({1, 2}, {1, 2}, 0), std::invalid_argument);
  CHECK_THROWS_AS(precision_at_k({1, 2}, {1, 2}, 3), std::invalid_argument);
}

TEST_CASE("rank_by_value sorts ascending with index ties") {
  CHECK(rank_by_value({3, 1, 2}) == std::vector<int>{1, 2, 0});
  CHECK(rank_by_value({2, 1, 1}) == std::vector<int>{1, 2, 0});
  CHECK(rank_by_value({}) == std::vector<int>{});
}

TEST_CASE("library metrics agree with plain definitions on random data") {
  Rng rng(616);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + rng.below(40);
    std::vector<double> pred(n), truth(n);
    for (std::size_t i = 0; i < n; ++i) {
      // coarse grid forces plenty of ties
      pred[i] = std::floor(rng.real() * 8);
      truth[i] = std::floor(rng.real() * 8);
    }
    const bool pred_const =
        std::all_of(pred.begin(), pred.end(), [&](double v) { return v == pred[0]; });
    const bool truth_const = std::all_of(truth.begin(), truth.end(),
                                         [&](double v) { return v == truth[0]; });
    if (pred_const || truth_const) continue;

    CHECK(std::abs(spearman_rho(pred, truth) - naive_spearman(pred, truth)) <=
          1e-12);
    CHECK(std::abs(kendall_tau(pred, truth) - naive_kendall(pred, truth)) <=
          1e-12);
    for (int k : {1, 2, static_cast<int>(n)}) {
      CHECK(precision_at_k(pred, truth, k) ==
            doctest::Approx(naive_precision(pred, truth, k)).epsilon(1e-12));
    }
  }
}

TEST_CASE("evaluate aggregates per query group") {
  // two groups of 3 and one group of 2
  const std::vector<double> pred{1, 2, 3, 3, 2, 1, 5, 4};
  const std::vector<double> truth{1, 2, 3, 1, 2, 3, 4, 5};
  const std::vector<int> groups{0, 0, 0, 7, 7, 7, 2, 2};
  const EvalReport report = evaluate(pred, truth, groups, {1, 2, 3, 5});

  CHECK(report.pairs == 8);
  CHECK(report.groups == 3);
  CHECK(report.rmse == doctest::Approx(rmse(pred, truth)));
  CHECK(report.mae == doctest::Approx(mae(pred, truth)));
  CHECK(report.rho == doctest::Approx(spearman_rho(pred, truth)));
  CHECK(report.tau == doctest::Approx(kendall_tau(pred, truth)));

  // k=1: group0 hit, group7 miss, group2 miss -> 1/3
  CHECK(report.p_at_k.at(1) == doctest::Approx(1.0 / 3.0));
  // k=2: group0 2/2, group7 overlaps on one row, group2 2/2
  CHECK(report.p_at_k.at(2) == doctest::Approx((1.0 + 0.5 + 1.0) / 3.0));
  // k=3: only the two triples qualify
  CHECK(report.p_at_k.at(3) == doctest::Approx(1.0));
  // k=5: no group is large enough
  CHECK(report.p_at_k.count(5) == 0);
}

TEST_CASE("evaluate rejects mismatched lengths") {
  CHECK_THROWS_AS(evaluate({1, 2}, {1, 2}, {0}), std::invalid_argument);
  CHECK_THROWS_AS(evaluate({}, {}, {}), std::invalid_argument);
}
