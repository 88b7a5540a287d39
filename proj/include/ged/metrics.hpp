#ifndef GED_METRICS_HPP
#define GED_METRICS_HPP

#include <map>
#include <vector>

namespace ged {

// All functions take parallel prediction/truth vectors and throw
// std::invalid_argument on length mismatch or empty input.

double rmse(const std::vector<double>& pred, const std::vector<double>& truth);
double mae(const std::vector<double>& pred, const std::vector<double>& truth);

// Rank correlation with average ranks for ties (Pearson over the ranks).
// Throws std::domain_error when either vector is constant.
double spearman_rho(const std::vector<double>& pred,
                    const std::vector<double>& truth);

// Tau-b: concordant minus discordant over the tie-corrected pair counts.
// Throws std::domain_error when either vector is constant.
double kendall_tau(const std::vector<double>& pred,
                   const std::vector<double>& truth);

// Overlap between the k smallest predictions and the k smallest truths,
// divided by k. Ties resolve to the lower index. Requires 1 <= k <= size.
double precision_at_k(const std::vector<double>& pred,
                      const std::vector<double>& truth, int k);

// Indices sorted by ascending value, ties by index.
std::vector<int> rank_by_value(const std::vector<double>& values);

struct EvalReport {
  double rmse = 0;
  double mae = 0;
  double rho = 0;
  double tau = 0;
  // k -> mean precision over query groups holding at least k rows; keys with
  // no qualifying group are absent.
  std::map<int, double> p_at_k;
  std::size_t pairs = 0;
  std::size_t groups = 0;
};

// Error metrics over the whole vector, correlations over the whole vector,
// and precision averaged per query group. group_of[i] names the query of
// row i.
EvalReport evaluate(const std::vector<double>& pred,
                    const std::vector<double>& truth,
                    const std::vector<int>& group_of,
                    const std::vector<int>& ks = {1, 5, 10});

}  // namespace ged

#endif
