#include "ged/gen_config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ged {

using nlohmann::json;

std::vector<std::string> validate(const GenConfig& c) {
  std::vector<std::string> problems;
  if (c.gnn_layers < 1) problems.push_back("gnn_layers must be >= 1");
  if (c.gnn_hidden < 1) problems.push_back("gnn_hidden must be >= 1");
  if (c.embed_dim < 1) problems.push_back("embed_dim must be >= 1");
  if (c.alphabet < 1) problems.push_back("alphabet must be >= 1");
  if (!(c.huber_delta > 0)) problems.push_back("huber_delta must be > 0");
  if (!(c.learning_rate > 0)) problems.push_back("learning_rate must be > 0");
  if (c.batch_size < 1) problems.push_back("batch_size must be >= 1");
  if (c.patience < 1) problems.push_back("patience must be >= 1");
  if (c.max_epochs < 1) problems.push_back("max_epochs must be >= 1");
  return problems;
}

std::string config_to_json(const GenConfig& c) {
  json obj;
  obj["gnn_layers"] = c.gnn_layers;
  obj["gnn_hidden"] = c.gnn_hidden;
  obj["embed_dim"] = c.embed_dim;
  obj["alphabet"] = c.alphabet;
  obj["huber_delta"] = c.huber_delta;
  obj["learning_rate"] = c.learning_rate;
  obj["batch_size"] = c.batch_size;
  obj["patience"] = c.patience;
  obj["max_epochs"] = c.max_epochs;
  obj["wo_global"] = c.wo_global;
  obj["wo_dependencies"] = c.wo_dependencies;
  obj["wo_intra_graph"] = c.wo_intra_graph;
  obj["wo_cost"] = c.wo_cost;
  return obj.dump();
}

GenConfig config_from_json(const std::string& text) {
  json obj = json::parse(text, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) {
    throw std::runtime_error("config is not a JSON object");
  }
  GenConfig c;
  const auto read = [&](const char* key, auto& field) {
    if (obj.contains(key)) field = obj[key].get<std::decay_t<decltype(field)>>();
  };
  read("gnn_layers", c.gnn_layers);
  read("gnn_hidden", c.gnn_hidden);
  read("embed_dim", c.embed_dim);
  read("alphabet", c.alphabet);
  read("huber_delta", c.huber_delta);
  read("learning_rate", c.learning_rate);
  read("batch_size", c.batch_size);
  read("patience", c.patience);
  read("max_epochs", c.max_epochs);
  read("wo_global", c.wo_global);
  read("wo_dependencies", c.wo_dependencies);
  read("wo_intra_graph", c.wo_intra_graph);
  read("wo_cost", c.wo_cost);

  const std::vector<std::string> problems = validate(c);
  if (!problems.empty()) {
    std::ostringstream msg;
    msg << "bad config:";
    for (const std::string& p : problems) msg << " " << p << ";";
    throw std::runtime_error(msg.str());
  }
  return c;
}

GenConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return config_from_json(buffer.str());
  } catch (const std::exception& err) {
    throw std::runtime_error(path + ": " + err.what());
  }
}

}  // namespace ged
