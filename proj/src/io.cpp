#include "ged/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ged {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, std::size_t line,
                       const std::string& what) {
  std::ostringstream msg;
  msg << path << ":" << line << ": " << what;
  throw std::runtime_error(msg.str());
}

json parse_line(const std::string& path, std::size_t line,
                const std::string& text) {
  json obj = json::parse(text, nullptr, false);
  if (obj.is_discarded()) fail(path, line, "not valid JSON");
  if (!obj.is_object()) fail(path, line, "expected a JSON object");
  return obj;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace

std::vector<Graph> load_graphs(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<Graph> graphs;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty()) continue;
    json obj = parse_line(path, line, text);
    Graph g;
    try {
      g.num_nodes = obj.at("n").get<int>();
      g.labels = obj.at("labels").get<std::vector<int>>();
      for (const auto& e : obj.at("edges")) {
        if (!e.is_array() || e.size() != 2) fail(path, line, "edge is not a pair");
        g.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
      }
    } catch (const json::exception& err) {
      fail(path, line, err.what());
    }
    const std::vector<std::string> problems = validate(g);
    if (!problems.empty()) fail(path, line, problems.front());
    graphs.push_back(std::move(g));
  }
  return graphs;
}

void save_graphs(const std::string& path, const std::vector<Graph>& graphs) {
  std::ofstream out = open_out(path);
  for (const Graph& g : graphs) {
    json obj;
    obj["n"] = g.num_nodes;
    obj["labels"] = g.labels;
    json edges = json::array();
    for (const auto& [u, v] : g.edges) edges.push_back({u, v});
    obj["edges"] = std::move(edges);
    out << obj.dump() << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<PairRecord> load_pairs(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<PairRecord> pairs;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty()) continue;
    json obj = parse_line(path, line, text);
    PairRecord rec;
    try {
      rec.query = obj.at("q").get<int>();
      rec.data = obj.at("d").get<int>();
      const auto values = obj.at("costs").get<std::vector<double>>();
      if (values.size() != 5) fail(path, line, "costs needs 5 values");
      for (double v : values) {
        if (!std::isfinite(v) || v < 0) {
          fail(path, line, "costs must be finite and non-negative");
        }
      }
      rec.costs = {values[0], values[1], values[2], values[3], values[4]};
      if (obj.contains("target") && !obj["target"].is_null()) {
        rec.target = obj["target"].get<double>();
      }
    } catch (const json::exception& err) {
      fail(path, line, err.what());
    }
    if (rec.query < 0 || rec.data < 0) fail(path, line, "negative graph index");
    pairs.push_back(rec);
  }
  return pairs;
}

void save_pairs(const std::string& path, const std::vector<PairRecord>& pairs) {
  std::ofstream out = open_out(path);
  for (const PairRecord& rec : pairs) {
    json obj;
    obj["q"] = rec.query;
    obj["d"] = rec.data;
    obj["costs"] = rec.costs.as_array();
    if (rec.target) {
      obj["target"] = *rec.target;
    } else {
      obj["target"] = nullptr;
    }
    out << obj.dump() << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<GraphPair> assemble_pairs(const std::vector<Graph>& graphs,
                                      const std::vector<PairRecord>& records) {
  std::vector<GraphPair> result;
  result.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const PairRecord& rec = records[i];
    const int limit = static_cast<int>(graphs.size());
    if (rec.query >= limit || rec.data >= limit) {
      std::ostringstream msg;
      msg << "pair " << i << " references graph " << std::max(rec.query, rec.data)
          << " but only " << limit << " graphs are loaded";
      throw std::runtime_error(msg.str());
    }
    GraphPair pair;
    pair.query = graphs[static_cast<std::size_t>(rec.query)];
    pair.data = graphs[static_cast<std::size_t>(rec.data)];
    pair.costs = rec.costs;
    pair.target = rec.target;
    result.push_back(std::move(pair));
  }
  return result;
}

}  // namespace ged
