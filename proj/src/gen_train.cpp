#include "ged/gen_train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ged/adam.hpp"
#include "ged/rng.hpp"
#include "ged/tape.hpp"

namespace ged {
namespace {

double pair_loss(const GenParams& params, const GraphPair& pair,
                 std::vector<Tensor>* grads_out) {
  Tape tape;
  const GenForward fwd = gen_forward(tape, params, pair);
  const NodeId target = tape.constant(Tensor::scalar(*pair.target));
  const NodeId loss =
      tape.huber(fwd.prediction, target, params.config.huber_delta);
  const double value = tape.value(loss).data[0];
  if (grads_out) {
    const std::vector<Tensor> all = tape.backward(loss);
    grads_out->clear();
    grads_out->reserve(fwd.params.size());
    for (NodeId id : fwd.params) {
      const Tensor& g = all[static_cast<std::size_t>(id)];
      if (g.data.empty()) {
        const Tensor& shape = tape.value(id);
        grads_out->emplace_back(shape.rows, shape.cols);
      } else {
        grads_out->push_back(g);
      }
    }
  }
  return value;
}

}  // namespace

void split_holdout(std::size_t count, std::uint64_t seed,
                   std::vector<std::size_t>& train_rows,
                   std::vector<std::size_t>& holdout_rows) {
  std::vector<std::size_t> rows(count);
  std::iota(rows.begin(), rows.end(), 0);
  Rng rng(seed);
  rng.shuffle(rows);
  const std::size_t holdout = count / 10;
  holdout_rows.assign(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(holdout));
  train_rows.assign(rows.begin() + static_cast<std::ptrdiff_t>(holdout), rows.end());
}

GenParams train_model(const std::vector<GraphPair>& dataset,
                      const GenConfig& config, std::uint64_t seed,
                      TrainHistory* history, std::ostream* log) {
  {
    const auto problems = validate(config);
    if (!problems.empty()) {
      throw std::invalid_argument("bad config: " + problems.front());
    }
  }
  if (dataset.empty()) throw std::invalid_argument("training set is empty");
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (!dataset[i].target) {
      throw std::invalid_argument("pair " + std::to_string(i) +
                                  " has no target expense");
    }
  }

  Rng rng(seed);
  GenParams params = GenParams::init(config, rng.fork_seed());

  std::vector<std::size_t> train_rows, holdout_rows;
  split_holdout(dataset.size(), rng.fork_seed(), train_rows, holdout_rows);

  std::vector<Tensor> values;
  for (const NamedTensor& t : params.tensors) values.push_back(t.value);
  AdamState adam = make_adam(values, config.learning_rate);

  TrainHistory hist;
  hist.val_indices = holdout_rows;
  hist.best_val = std::numeric_limits<double>::infinity();

  GenParams best = params;
  std::vector<Tensor> batch_grads, one_grads;

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    rng.shuffle(train_rows);

    double train_sum = 0;
    std::size_t cursor = 0;
    while (cursor < train_rows.size()) {
      const std::size_t batch_end =
          std::min(cursor + static_cast<std::size_t>(config.batch_size),
                   train_rows.size());
      const auto batch_count = static_cast<double>(batch_end - cursor);

      batch_grads.clear();
      for (const Tensor& v : values) batch_grads.emplace_back(v.rows, v.cols);
      for (std::size_t i = 0; i < values.size(); ++i) {
        params.tensors[i].value = values[i];
      }
      for (; cursor < batch_end; ++cursor) {
        const double loss =
            pair_loss(params, dataset[train_rows[cursor]], &one_grads);
        if (!std::isfinite(loss)) {
          std::ostringstream msg;
          msg << "non-finite loss at epoch " << epoch << ", row "
              << train_rows[cursor];
          throw std::runtime_error(msg.str());
        }
        train_sum += loss;
        for (std::size_t i = 0; i < batch_grads.size(); ++i) {
          for (std::size_t k = 0; k < batch_grads[i].data.size(); ++k) {
            batch_grads[i].data[k] += one_grads[i].data[k];
          }
        }
      }
      for (Tensor& g : batch_grads) {
        for (double& v : g.data) v /= batch_count;
      }
      adam_step(values, batch_grads, adam);
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
      params.tensors[i].value = values[i];
    }

    const double train_loss =
        train_rows.empty() ? 0 : train_sum / static_cast<double>(train_rows.size());

    double val_loss = train_loss;
    if (!holdout_rows.empty()) {
      double val_sum = 0;
      for (std::size_t row : holdout_rows) {
        val_sum += pair_loss(params, dataset[row], nullptr);
      }
      val_loss = val_sum / static_cast<double>(holdout_rows.size());
    }

    hist.train_loss.push_back(train_loss);
    hist.val_loss.push_back(val_loss);
    hist.epochs_run = epoch + 1;
    if (log) {
      *log << "epoch " << epoch << " train " << train_loss << " val "
           << val_loss << "\n";
    }

    if (val_loss < hist.best_val) {
      hist.best_val = val_loss;
      hist.best_epoch = epoch;
      best = params;
    } else if (epoch - hist.best_epoch >= config.patience) {
      break;
    }
  }

  if (history) *history = hist;
  return best;
}

GradCheckResult grad_check(const GenParams& params, const GraphPair& pair,
                           double step) {
  if (!pair.target) throw std::invalid_argument("grad_check needs a target");
  if (!(step > 0)) throw std::invalid_argument("step must be positive");

  GenParams work = params;
  std::vector<Tensor> analytic;
  pair_loss(work, pair, &analytic);

  GradCheckResult result;
  for (std::size_t t = 0; t < work.tensors.size(); ++t) {
    Tensor& tensor = work.tensors[t].value;
    for (std::size_t k = 0; k < tensor.data.size(); ++k) {
      const double saved = tensor.data[k];
      tensor.data[k] = saved + step;
      const double up = pair_loss(work, pair, nullptr);
      tensor.data[k] = saved - step;
      const double down = pair_loss(work, pair, nullptr);
      tensor.data[k] = saved;

      const double numeric = (up - down) / (2 * step);
      const double exact = analytic[t].data[k];
      const double denom =
          std::max({std::abs(numeric), std::abs(exact), 1e-3});
      const double rel = std::abs(numeric - exact) / denom;
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_tensor = work.tensors[t].name;
        result.worst_entry = k;
      }
      ++result.entries;
    }
  }
  return result;
}

}  // namespace ged
