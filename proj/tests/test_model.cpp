#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "ged/gen_config.hpp"
#include "ged/gen_model.hpp"
#include "ged/generate.hpp"
#include "ged/graph.hpp"
#include "ged/rng.hpp"
#include "ged/tape.hpp"

using namespace ged;

namespace {

GenConfig small_config() {
  GenConfig c;
  c.gnn_layers = 2;
  c.gnn_hidden = 8;
  c.embed_dim = 4;
  c.alphabet = 2;
  return c;
}

GraphPair make_pair(Rng& rng, int nq, int nd, int alphabet) {
  GraphPair pair;
  pair.query = generate_synthetic(GraphModel::erdos_renyi, nq, 0.5,
                                  rng.fork_seed(), alphabet);
  pair.data = generate_synthetic(GraphModel::erdos_renyi, nd, 0.4,
                                 rng.fork_seed(), alphabet);
  pair.costs = CostSetting::setting1();
  return pair;
}

Graph permuted(const Graph& g, const std::vector<int>& new_index) {
  Graph out;
  out.num_nodes = g.num_nodes;
  out.labels.resize(g.labels.size());
  for (int v = 0; v < g.num_nodes; ++v)
    out.labels[static_cast<std::size_t>(new_index[static_cast<std::size_t>(v)])] =
        g.labels[static_cast<std::size_t>(v)];
  for (const auto& [u, v] : g.edges)
    out.edges.emplace_back(new_index[static_cast<std::size_t>(u)],
                           new_index[static_cast<std::size_t>(v)]);
  normalize_edges(out);
  return out;
}

}  // namespace

TEST_CASE("config validation flags unusable values") {
  CHECK(validate(GenConfig{}).empty());
  GenConfig c;
  c.gnn_layers = 0;
  CHECK(!validate(c).empty());
  c = GenConfig{};
  c.alphabet = 0;
  CHECK(!validate(c).empty());
  c = GenConfig{};
  c.learning_rate = -1;
  CHECK(!validate(c).empty());
  c = GenConfig{};
  c.batch_size = 0;
  CHECK(!validate(c).empty());
  c = GenConfig{};
  c.huber_delta = 0;
  CHECK(!validate(c).empty());
}

TEST_CASE("config json round trip keeps every field") {
  GenConfig c;
  c.gnn_layers = 3;
  c.gnn_hidden = 16;
  c.embed_dim = 8;
  c.alphabet = 4;
  c.huber_delta = 2.5;
  c.learning_rate = 5e-4;
  c.batch_size = 32;
  c.patience = 7;
  c.max_epochs = 42;
  c.wo_global = true;
  c.wo_cost = true;
  CHECK(config_from_json(config_to_json(c)) == c);

  // unknown keys are not silently invented; absent keys keep defaults
  const GenConfig defaults = config_from_json("{}");
  CHECK(defaults == GenConfig{});
}

TEST_CASE("parameter inventory follows the config") {
  const GenParams p = GenParams::init(GenConfig{}, 1);
  CHECK(p.tensors.size() == 42);  // 5 gin + proj + est + prop + res + wgt, 2 out
  CHECK(p.get("gin0.w1").rows == 1);
  CHECK(p.get("gin0.w1").cols == 64);
  CHECK(p.get("gin4.w1").rows == 64);
  CHECK(p.get("proj.w2").cols == 32);
  CHECK(p.get("est.w1").rows == 5 + 1 + 32);
  CHECK(p.get("prop.w1").rows == 32);
  CHECK(p.get("res.w1").rows == 32 + 1 + 32);
  CHECK(p.get("wgt.w1").rows == 64);
  CHECK(p.get("out.w").rows == 32);
  CHECK(p.get("out.w").cols == 1);
  CHECK_THROWS_AS(p.get("nonexistent"), std::out_of_range);

  GenConfig lean = small_config();
  lean.wo_dependencies = true;
  const GenParams q = GenParams::init(lean, 1);
  CHECK(q.tensors.size() == (2 + 1 + 1 + 1) * 4 + 2);
  CHECK_THROWS_AS(q.get("prop.w1"), std::out_of_range);
  CHECK(q.get("wgt.w1").rows == lean.embed_dim);
}

TEST_CASE("initialisation is seeded and biases start at zero") {
  const GenParams a = GenParams::init(small_config(), 9);
  const GenParams b = GenParams::init(small_config(), 9);
  const GenParams c = GenParams::init(small_config(), 10);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.tensors.size(); ++i) {
    const auto& ta = a.tensors[i].value.data;
    const auto& tb = b.tensors[i].value.data;
    REQUIRE(ta.size() == tb.size());
    CHECK(std::memcmp(ta.data(), tb.data(), ta.size() * sizeof(double)) == 0);
    if (ta != c.tensors[i].value.data) any_diff = true;
  }
  CHECK(any_diff);
  for (const NamedTensor& t : a.tensors) {
    if (t.name.find(".b") == std::string::npos) continue;
    for (double v : t.value.data) CHECK(v == 0);
  }
  // weight magnitudes respect the fan-based limit
  const Tensor& w = a.get("gin0.w2");
  const double limit = std::sqrt(6.0 / (w.rows + w.cols));
  for (double v : w.data) CHECK(std::abs(v) <= limit);
}

TEST_CASE("forward activations have the documented shapes") {
  Rng rng(21);
  const GenParams params = GenParams::init(small_config(), rng.fork_seed());
  const GraphPair pair = make_pair(rng, 3, 5, 2);
  Tape tape;
  const GenForward fwd = gen_forward(tape, params, pair);
  const int n = 5;
  CHECK(fwd.padded == n);
  CHECK(tape.value(fwd.embed_q).rows == n);
  CHECK(tape.value(fwd.embed_q).cols == 2 + 4);
  CHECK(tape.value(fwd.expense).rows == n * n);
  CHECK(tape.value(fwd.expense).cols == 4);
  CHECK(tape.value(fwd.guidance).rows == n * n);
  CHECK(tape.value(fwd.guide_q).rows == n);
  CHECK(tape.value(fwd.weights).rows == n * n);
  CHECK(tape.value(fwd.prediction).rows == 1);
  CHECK(tape.value(fwd.prediction).cols == 1);
  // padded embedding rows are exactly zero
  for (int r = 3; r < n; ++r)
    for (int c = 0; c < 6; ++c) CHECK(tape.value(fwd.embed_q).at(r, c) == 0);
}

TEST_CASE("guidance columns are probability distributions") {
  Rng rng(22);
  const GenParams params = GenParams::init(small_config(), rng.fork_seed());
  const GraphPair pair = make_pair(rng, 4, 6, 2);
  Tape tape;
  const GenForward fwd = gen_forward(tape, params, pair);
  const Tensor& g = tape.value(fwd.guidance);
  for (int c = 0; c < g.cols; ++c) {
    double sum = 0;
    for (int r = 0; r < g.rows; ++r) sum += g.at(r, c);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("disabling the global view passes raw expenses through") {
  Rng rng(23);
  GenConfig c = small_config();
  c.wo_global = true;
  const GenParams params = GenParams::init(c, rng.fork_seed());
  const GraphPair pair = make_pair(rng, 3, 3, 2);
  Tape tape;
  const GenForward fwd = gen_forward(tape, params, pair);
  CHECK(fwd.guidance == fwd.expense);
}

TEST_CASE("prediction ignores node numbering") {
  Rng rng(24);
  const GenParams params = GenParams::init(small_config(), rng.fork_seed());
  for (int trial = 0; trial < 5; ++trial) {
    const GraphPair pair = make_pair(rng, 5, 6, 2);
    const double base = gen_predict(params, pair);
    std::vector<int> perm(static_cast<std::size_t>(pair.data.num_nodes));
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    rng.shuffle(perm);
    GraphPair shuffled = pair;
    shuffled.data = permuted(pair.data, perm);
    CHECK(gen_predict(params, shuffled) == doctest::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("cost-blind variant ignores the cost setting") {
  Rng rng(25);
  GenConfig c = small_config();
  c.wo_cost = true;
  const GenParams params = GenParams::init(c, rng.fork_seed());
  GraphPair pair = make_pair(rng, 4, 4, 2);
  const double base = gen_predict(params, pair);
  pair.costs = CostSetting::setting2();
  CHECK(gen_predict(params, pair) == base);

  // the full model does react to costs
  const GenParams full = GenParams::init(small_config(), 77);
  GraphPair sensitive = make_pair(rng, 4, 4, 2);
  const double before = gen_predict(full, sensitive);
  sensitive.costs = CostSetting::setting2();
  CHECK(gen_predict(full, sensitive) != before);
}

TEST_CASE("prediction is bitwise reproducible") {
  Rng rng(26);
  const GenParams params = GenParams::init(small_config(), rng.fork_seed());
  const GraphPair pair = make_pair(rng, 6, 5, 2);
  const double a = gen_predict(params, pair);
  const double b = gen_predict(params, pair);
  CHECK(std::memcmp(&a, &b, sizeof a) == 0);
}

TEST_CASE("model files round trip through disk") {
  const std::string path = "model_test_roundtrip.bin";
  Rng rng(27);
  GenConfig c = small_config();
  c.wo_intra_graph = true;
  const GenParams params = GenParams::init(c, rng.fork_seed());
  save_model(path, params);
  const GenParams back = load_model(path);
  CHECK(back.config == params.config);
  REQUIRE(back.tensors.size() == params.tensors.size());
  for (std::size_t i = 0; i < params.tensors.size(); ++i) {
    CHECK(back.tensors[i].name == params.tensors[i].name);
    CHECK(back.tensors[i].value.data == params.tensors[i].value.data);
  }
  const GraphPair pair = make_pair(rng, 4, 4, 2);
  CHECK(gen_predict(back, pair) == gen_predict(params, pair));
  std::remove(path.c_str());
}

TEST_CASE("degenerate inputs are rejected") {
  Rng rng(28);
  const GenParams params = GenParams::init(small_config(), 1);
  GraphPair pair;  // both empty
  pair.costs = CostSetting::uniform();
  Tape tape;
  CHECK_THROWS_AS(gen_forward(tape, params, pair), std::invalid_argument);

  GraphPair bad = make_pair(rng, 3, 3, 2);
  bad.query.labels[0] = 7;  // outside alphabet 2
  CHECK_THROWS_AS(gen_predict(params, bad), std::invalid_argument);
}

TEST_CASE("one empty side still predicts") {
  Rng rng(29);
  const GenParams params = GenParams::init(small_config(), 2);
  GraphPair pair;
  pair.query = generate_synthetic(GraphModel::erdos_renyi, 4, 0.5, 5, 2);
  pair.costs = CostSetting::uniform();
  CHECK(std::isfinite(gen_predict(params, pair)));
}

TEST_CASE("ranking sorts by predicted expense with index ties") {
  Rng rng(30);
  const GenParams params = GenParams::init(small_config(), rng.fork_seed());
  const Graph query = generate_synthetic(GraphModel::erdos_renyi, 4, 0.5,
                                         rng.fork_seed(), 2);
  std::vector<Graph> corpus;
  for (int i = 0; i < 6; ++i)
    corpus.push_back(generate_synthetic(GraphModel::erdos_renyi, 4, 0.4,
                                        rng.fork_seed(), 2));
  corpus.push_back(corpus[2]);  // duplicate scores tie, index order decides

  const std::vector<int> order =
      rank_with_model(params, query, corpus, CostSetting::uniform());
  REQUIRE(order.size() == corpus.size());
  std::vector<double> scores;
  for (const Graph& g : corpus) {
    GraphPair pair;
    pair.query = query;
    pair.data = g;
    pair.costs = CostSetting::uniform();
    scores.push_back(gen_predict(params, pair));
  }
  for (std::size_t i = 1; i < order.size(); ++i) {
    const double prev = scores[static_cast<std::size_t>(order[i - 1])];
    const double cur = scores[static_cast<std::size_t>(order[i])];
    CHECK(prev <= cur);
    if (prev == cur) CHECK(order[i - 1] < order[i]);
  }
}
