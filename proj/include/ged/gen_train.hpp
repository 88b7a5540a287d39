#ifndef GED_GEN_TRAIN_HPP
#define GED_GEN_TRAIN_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ged/gen_model.hpp"
#include "ged/graph.hpp"

namespace ged {

struct TrainHistory {
  std::vector<double> train_loss;  // mean Huber per epoch
  std::vector<double> val_loss;
  std::vector<std::size_t> val_indices;  // dataset rows held out
  int best_epoch = -1;
  double best_val = 0;
  int epochs_run = 0;
};

// Seeded shuffle, then the first tenth (rounded down) becomes the holdout.
// Fewer than ten rows leave the holdout empty; training then scores itself.
void split_holdout(std::size_t count, std::uint64_t seed,
                   std::vector<std::size_t>& train_rows,
                   std::vector<std::size_t>& holdout_rows);

// Minimises Huber loss with Adam over shuffled mini-batches. Keeps the
// parameters from the best holdout epoch and stops after config.patience
// epochs without improvement (or at config.max_epochs). Every pair needs a
// target. Reruns with the same inputs and seed reproduce the returned
// parameters and history exactly.
GenParams train_model(const std::vector<GraphPair>& dataset,
                      const GenConfig& config, std::uint64_t seed,
                      TrainHistory* history = nullptr,
                      std::ostream* log = nullptr);

struct GradCheckResult {
  double max_rel_error = 0;
  std::string worst_tensor;
  std::size_t worst_entry = 0;
  std::size_t entries = 0;
};

// Central-difference check of the loss gradient for every parameter entry.
// Relative error divides by max(|numeric|, |analytic|, 1e-3); the floor keeps
// finite-difference noise from blowing up entries whose true gradient is
// near zero. The pair must carry a target.
GradCheckResult grad_check(const GenParams& params, const GraphPair& pair,
                           double step = 1e-5);

}  // namespace ged

#endif
