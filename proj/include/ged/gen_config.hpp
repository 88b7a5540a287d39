#ifndef GED_GEN_CONFIG_HPP
#define GED_GEN_CONFIG_HPP

#include <string>
#include <vector>

namespace ged {

// Model and training hyperparameters. Estimator ablations are part of the
// config because they change which parameter tensors exist.
struct GenConfig {
  int gnn_layers = 5;
  int gnn_hidden = 64;
  int embed_dim = 32;
  int alphabet = 1;  // node label vocabulary size
  double huber_delta = 1.0;
  double learning_rate = 1e-3;
  int batch_size = 128;
  int patience = 50;
  int max_epochs = 300;

  bool wo_global = false;        // skip the column softmax, use raw expenses
  bool wo_dependencies = false;  // weights from single-pair guidance only
  bool wo_intra_graph = false;   // no neighborhood aggregation before weights
  bool wo_cost = false;          // zero out the expense five-vector input

  bool operator==(const GenConfig&) const = default;
};

std::vector<std::string> validate(const GenConfig& config);

std::string config_to_json(const GenConfig& config);
GenConfig config_from_json(const std::string& text);
GenConfig load_config(const std::string& path);

}  // namespace ged

#endif
