#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "ged/classical.hpp"
#include "ged/exact.hpp"
#include "ged/generate.hpp"
#include "ged/graph.hpp"
#include "ged/rng.hpp"

using namespace ged;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double lap_by_enumeration(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double best = kInf;
  do {
    double total = 0;
    for (int i = 0; i < n; ++i)
      total += cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Graph random_graph(Rng& rng, int max_n, int alphabet) {
  const int n = static_cast<int>(rng.range(1, max_n));
  const double p = 0.2 + 0.6 * rng.real();
  return generate_synthetic(GraphModel::erdos_renyi, n, p, rng.fork_seed(),
                            alphabet);
}

}  // namespace

TEST_CASE("assignment solver on hand cases") {
  const LapResult r = solve_lap({{4, 1}, {2, 3}});
  CHECK(r.total == 3);
  CHECK(r.assignment == std::vector<int>{1, 0});

  const LapResult forced = solve_lap({{kInf, 1}, {1, kInf}});
  CHECK(forced.total == 2);
  CHECK(forced.assignment == std::vector<int>{1, 0});

  CHECK(solve_lap({{7}}).total == 7);
  CHECK(solve_lap({}).total == 0);
}

TEST_CASE("assignment solver matches exhaustive enumeration") {
  Rng rng(31);
  for (int trial = 0; trial < 120; ++trial) {
    const int n = static_cast<int>(rng.range(1, 6));
    std::vector<std::vector<double>> cost(
        static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
    for (auto& row : cost)
      for (double& c : row)
        c = rng.bernoulli(0.15) ? kInf : std::floor(rng.real() * 100.0) / 4.0;
    const double want = lap_by_enumeration(cost);
    if (!std::isfinite(want)) {
      CHECK_THROWS_AS(solve_lap(cost), std::runtime_error);
      continue;
    }
    const LapResult r = solve_lap(cost);
    CHECK(r.total == doctest::Approx(want).epsilon(1e-12));
    double rescored = 0;
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (int i = 0; i < n; ++i) {
      const int j = r.assignment[static_cast<std::size_t>(i)];
      CHECK(!used[static_cast<std::size_t>(j)]);
      used[static_cast<std::size_t>(j)] = true;
      rescored += cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    CHECK(rescored == doctest::Approx(r.total).epsilon(1e-12));
  }
}

TEST_CASE("assignment solver rejects bad input") {
  CHECK_THROWS_AS(solve_lap({{1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(solve_lap({{std::nan("")}}), std::invalid_argument);
  CHECK_THROWS_AS(solve_lap({{kInf}}), std::runtime_error);
}

TEST_CASE("bipartite estimate is an attainable upper bound") {
  Rng rng(47);
  const CostSetting settings[] = {CostSetting::uniform(), CostSetting::setting1(),
                                  CostSetting::setting2()};
  for (int trial = 0; trial < 60; ++trial) {
    const Graph q = random_graph(rng, 6, 2);
    const Graph d = random_graph(rng, 6, 2);
    for (const CostSetting& costs : settings) {
      const GedResult approx = vj_ged(q, d, costs);
      CHECK(!approx.optimal);
      CHECK(alignment_expense(q, d, approx.mapping, costs) == approx.expense);
      CHECK(approx.expense >= brute_force_ged(q, d, costs).expense - 1e-12);
    }
  }
}

TEST_CASE("bipartite estimate is exact when graphs are identical") {
  const Graph g = generate_synthetic(GraphModel::erdos_renyi, 6, 0.5, 11, 3);
  CHECK(vj_ged(g, g, CostSetting::setting1()).expense == 0);
}

TEST_CASE("beam expense never increases with width") {
  Rng rng(63);
  const CostSetting settings[] = {CostSetting::uniform(), CostSetting::setting1(),
                                  CostSetting::setting2()};
  for (int trial = 0; trial < 40; ++trial) {
    const Graph q = random_graph(rng, 6, 2);
    const Graph d = random_graph(rng, 6, 2);
    for (const CostSetting& costs : settings) {
      const double exact = brute_force_ged(q, d, costs).expense;
      double prev = kInf;
      for (int width : {1, 2, 4, 8, 16}) {
        const GedResult r = beam_ged(q, d, costs, width);
        CHECK(alignment_expense(q, d, r.mapping, costs) == r.expense);
        CHECK(r.expense >= exact - 1e-12);
        CHECK(r.expense <= prev + 1e-12);
        prev = r.expense;
      }
    }
  }
}

TEST_CASE("widening the beam keeps every retained prefix") {
  Rng rng(64);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph q = random_graph(rng, 6, 2);
    const Graph d = random_graph(rng, 6, 2);
    BeamTrace narrow, wide;
    beam_ged(q, d, CostSetting::setting1(), 3, &narrow);
    beam_ged(q, d, CostSetting::setting1(), 7, &wide);
    REQUIRE(narrow.levels.size() == wide.levels.size());
    for (std::size_t level = 0; level < narrow.levels.size(); ++level) {
      for (const auto& prefix : narrow.levels[level]) {
        const auto& pool = wide.levels[level];
        CHECK(std::find(pool.begin(), pool.end(), prefix) != pool.end());
      }
    }
  }
}

TEST_CASE("a wide enough beam is exhaustive on tiny graphs") {
  Rng rng(65);
  for (int trial = 0; trial < 25; ++trial) {
    const Graph q = random_graph(rng, 4, 2);
    const Graph d = random_graph(rng, 4, 2);
    const GedResult beam = beam_ged(q, d, CostSetting::setting2(), 100000);
    const GedResult slow = brute_force_ged(q, d, CostSetting::setting2());
    CHECK(beam.expense == doctest::Approx(slow.expense).epsilon(1e-12));
  }
}

TEST_CASE("beam rejects bad widths") {
  const Graph g = generate_synthetic(GraphModel::erdos_renyi, 3, 0.5, 1);
  CHECK_THROWS_AS(beam_ged(g, g, CostSetting::uniform(), 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(beam_ged(g, g, CostSetting::uniform(), -2),
                  std::invalid_argument);
}
