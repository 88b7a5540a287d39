#include "ged/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace ged {
namespace {

void check_lengths(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("prediction/truth length mismatch");
  }
  if (a.empty()) throw std::invalid_argument("empty metric input");
}

// Average ranks, 1-based; tied values share the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n, 0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2 + 1;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const auto n = static_cast<double>(a.size());
  double mean_a = 0, mean_b = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= n;
  mean_b /= n;
  double cov = 0, var_a = 0, var_b = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0 || var_b == 0) {
    throw std::domain_error("rank correlation is undefined for constant input");
  }
  return cov / std::sqrt(var_a * var_b);
}

}  // namespace

double rmse(const std::vector<double>& pred, const std::vector<double>& truth) {
  check_lengths(pred, truth);
  double sum = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - truth[i];
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(pred.size()));
}

double mae(const std::vector<double>& pred, const std::vector<double>& truth) {
  check_lengths(pred, truth);
  double sum = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    sum += std::abs(pred[i] - truth[i]);
  }
  return sum / static_cast<double>(pred.size());
}

double spearman_rho(const std::vector<double>& pred,
                    const std::vector<double>& truth) {
  check_lengths(pred, truth);
  if (pred.size() < 2) {
    throw std::domain_error("rank correlation needs at least two rows");
  }
  return pearson(average_ranks(pred), average_ranks(truth));
}

double kendall_tau(const std::vector<double>& pred,
                   const std::vector<double>& truth) {
  check_lengths(pred, truth);
  const std::size_t n = pred.size();
  if (n < 2) throw std::domain_error("rank correlation needs at least two rows");

  std::int64_t concordant = 0, discordant = 0, ties_pred = 0, ties_truth = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dp = pred[i] - pred[j];
      const double dt = truth[i] - truth[j];
      if (dp == 0 && dt == 0) {
        ++ties_pred;
        ++ties_truth;
      } else if (dp == 0) {
        ++ties_pred;
      } else if (dt == 0) {
        ++ties_truth;
      } else if ((dp > 0) == (dt > 0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const std::int64_t total = static_cast<std::int64_t>(n) *
                             (static_cast<std::int64_t>(n) - 1) / 2;
  if (ties_pred == total || ties_truth == total) {
    throw std::domain_error("rank correlation is undefined for constant input");
  }
  const double denom = std::sqrt(static_cast<double>(total - ties_pred)) *
                       std::sqrt(static_cast<double>(total - ties_truth));
  return static_cast<double>(concordant - discordant) / denom;
}

std::vector<int> rank_by_value(const std::vector<double>& values) {
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return values[static_cast<std::size_t>(a)] < values[static_cast<std::size_t>(b)];
  });
  return order;
}

double precision_at_k(const std::vector<double>& pred,
                      const std::vector<double>& truth, int k) {
  check_lengths(pred, truth);
  if (k < 1 || static_cast<std::size_t>(k) > pred.size()) {
    throw std::invalid_argument("k must be within the number of rows");
  }
  const std::vector<int> by_pred = rank_by_value(pred);
  const std::vector<int> by_truth = rank_by_value(truth);
  std::unordered_set<int> top_truth(by_truth.begin(), by_truth.begin() + k);
  int hits = 0;
  for (int i = 0; i < k; ++i) {
    hits += top_truth.count(by_pred[static_cast<std::size_t>(i)]) ? 1 : 0;
  }
  return static_cast<double>(hits) / k;
}

EvalReport evaluate(const std::vector<double>& pred,
                    const std::vector<double>& truth,
                    const std::vector<int>& group_of,
                    const std::vector<int>& ks) {
  check_lengths(pred, truth);
  if (group_of.size() != pred.size()) {
    throw std::invalid_argument("group vector length mismatch");
  }

  EvalReport report;
  report.pairs = pred.size();
  report.rmse = rmse(pred, truth);
  report.mae = mae(pred, truth);
  report.rho = spearman_rho(pred, truth);
  report.tau = kendall_tau(pred, truth);

  // Group rows by query, preserving first-appearance order.
  std::vector<int> group_ids;
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < group_of.size(); ++i) {
    std::size_t g = 0;
    for (; g < group_ids.size(); ++g) {
      if (group_ids[g] == group_of[i]) break;
    }
    if (g == group_ids.size()) {
      group_ids.push_back(group_of[i]);
      members.emplace_back();
    }
    members[g].push_back(i);
  }
  report.groups = members.size();

  for (int k : ks) {
    double sum = 0;
    std::size_t qualifying = 0;
    for (const auto& rows : members) {
      if (rows.size() < static_cast<std::size_t>(k)) continue;
      std::vector<double> p, t;
      p.reserve(rows.size());
      t.reserve(rows.size());
      for (std::size_t row : rows) {
        p.push_back(pred[row]);
        t.push_back(truth[row]);
      }
      sum += precision_at_k(p, t, k);
      ++qualifying;
    }
    if (qualifying > 0) {
      report.p_at_k[k] = sum / static_cast<double>(qualifying);
    }
  }
  return report;
}

}  // namespace ged
