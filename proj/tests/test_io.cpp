#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ged/generate.hpp"
#include "ged/graph.hpp"
#include "ged/io.hpp"

using namespace ged;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("io_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string what_of_load_graphs(const std::string& path) {
  try {
    load_graphs(path);
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("graph files round trip") {
  TempFile f("graphs.jsonl");
  std::vector<Graph> graphs;
  graphs.push_back(generate_synthetic(GraphModel::erdos_renyi, 6, 0.5, 1, 3));
  graphs.push_back(generate_synthetic(GraphModel::power_law, 8, 2, 2, 2));
  Graph empty;
  graphs.push_back(empty);
  save_graphs(f.path, graphs);

  const std::vector<Graph> back = load_graphs(f.path);
  REQUIRE(back.size() == graphs.size());
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    CHECK(back[i].num_nodes == graphs[i].num_nodes);
    CHECK(back[i].labels == graphs[i].labels);
    CHECK(back[i].edges == graphs[i].edges);
  }
}

TEST_CASE("pair files round trip including null targets") {
  TempFile f("pairs.jsonl");
  std::vector<PairRecord> pairs;
  pairs.push_back({0, 1, CostSetting::setting1(), 4.25});
  pairs.push_back({1, 0, CostSetting::uniform(), std::nullopt});
  save_pairs(f.path, pairs);

  const std::vector<PairRecord> back = load_pairs(f.path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].query == 0);
  CHECK(back[0].data == 1);
  CHECK(back[0].costs.node_del == 2);
  REQUIRE(back[0].target.has_value());
  CHECK(*back[0].target == 4.25);
  CHECK(!back[1].target.has_value());
}

TEST_CASE("loader reports the offending line") {
  TempFile f("bad.jsonl");
  write_text(f.path,
             "{\"n\": 1, \"labels\": [0], \"edges\": []}\n"
             "{\"n\": 2, \"labels\": [0], \"edges\": []}\n");
  const std::string msg = what_of_load_graphs(f.path);
  CHECK(msg.find(f.path) != std::string::npos);
  CHECK(msg.find(":2:") != std::string::npos);
}

TEST_CASE("malformed records are rejected") {
  TempFile f("malformed.jsonl");

  write_text(f.path, "not json\n");
  CHECK_THROWS_AS(load_graphs(f.path), std::runtime_error);

  write_text(f.path, "{\"n\": 2, \"labels\": [0,0], \"edges\": [[0,2]]}\n");
  CHECK_THROWS_AS(load_graphs(f.path), std::runtime_error);  // edge range

  write_text(f.path, "{\"n\": 2, \"labels\": [0,-1], \"edges\": []}\n");
  CHECK_THROWS_AS(load_graphs(f.path), std::runtime_error);  // negative label

  write_text(f.path, "{\"q\": 0, \"d\": 1, \"costs\": [1,1,1]}\n");
  CHECK_THROWS_AS(load_pairs(f.path), std::runtime_error);  // short cost list

  write_text(f.path, "{\"q\": 0, \"d\": 1, \"costs\": [1,1,1,1,-2]}\n");
  CHECK_THROWS_AS(load_pairs(f.path), std::runtime_error);  // negative cost

  write_text(f.path, "{\"q\": -1, \"d\": 0, \"costs\": [1,1,1,1,1]}\n");
  CHECK_THROWS_AS(load_pairs(f.path), std::runtime_error);
}

TEST_CASE("missing files are reported with their path") {
  try {
    load_graphs("definitely_missing.jsonl");
    FAIL("expected a throw");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("definitely_missing.jsonl") !=
          std::string::npos);
  }
}

TEST_CASE("blank lines are skipped") {
  TempFile f("blank.jsonl");
  write_text(f.path,
             "{\"n\": 1, \"labels\": [0], \"edges\": []}\n"
             "\n"
             "{\"n\": 1, \"labels\": [1], \"edges\": []}\n");
  CHECK(load_graphs(f.path).size() == 2);
}

TEST_CASE("assembling pairs validates graph indices") {
  std::vector<Graph> graphs;
  graphs.push_back(generate_synthetic(GraphModel::erdos_renyi, 3, 0.5, 1, 2));
  graphs.push_back(generate_synthetic(GraphModel::erdos_renyi, 4, 0.5, 2, 2));

  std::vector<PairRecord> records;
  records.push_back({1, 0, CostSetting::uniform(), 2.0});
  const std::vector<GraphPair> pairs = assemble_pairs(graphs, records);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].query.num_nodes == 4);
  CHECK(pairs[0].data.num_nodes == 3);
  REQUIRE(pairs[0].target.has_value());
  CHECK(*pairs[0].target == 2.0);

  records.push_back({0, 2, CostSetting::uniform(), std::nullopt});
  CHECK_THROWS_AS(assemble_pairs(graphs, records), std::runtime_error);
}
