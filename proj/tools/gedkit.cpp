#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ged/classical.hpp"
#include "ged/exact.hpp"
#include "ged/gen_config.hpp"
#include "ged/gen_model.hpp"
#include "ged/gen_train.hpp"
#include "ged/generate.hpp"
#include "ged/graph.hpp"
#include "ged/io.hpp"
#include "ged/metrics.hpp"
#include "ged/rng.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitBudget = 3;

struct GenDataArgs {
  std::string model = "er";
  double param = 0.3;
  int count = 100;
  int n_min = 8;
  int n_max = 16;
  double delta_min = 0.1;
  double delta_max = 0.3;
  int alphabet = 1;
  std::uint64_t seed = 1;
  std::string out;
};

int run_gen_data(const GenDataArgs& args) {
  if (args.n_min < 1 || args.n_max < args.n_min) {
    throw std::runtime_error("node range is empty");
  }
  if (args.delta_min < 0 || args.delta_max < args.delta_min) {
    throw std::runtime_error("perturbation range is empty");
  }
  const ged::GraphModel model = ged::parse_graph_model(args.model);
  ged::Rng rng(args.seed);

  std::vector<ged::Graph> graphs;
  std::vector<ged::PairRecord> pairs;
  int skipped = 0;
  for (int i = 0; i < args.count; ++i) {
    const int n = static_cast<int>(rng.range(args.n_min, args.n_max));
    const ged::Graph base =
        ged::generate_synthetic(model, n, args.param, rng.fork_seed(), args.alphabet);
    const double frac =
        args.delta_min + (args.delta_max - args.delta_min) * rng.real();
    const int delta = std::max(
        1, static_cast<int>(std::llround(frac * static_cast<double>(base.edges.size()))));
    const std::uint64_t perturb_seed = rng.fork_seed();
    if (delta > ged::perturb_capacity(base, args.alphabet)) {
      ++skipped;
      continue;
    }
    auto [edited, ops] = ged::perturb(base, delta, perturb_seed, args.alphabet);

    ged::PairRecord rec;
    rec.query = static_cast<int>(graphs.size());
    rec.data = rec.query + 1;
    rec.costs = ged::CostSetting::uniform();
    rec.target = ged::edit_vector_expense(ops, rec.costs);
    graphs.push_back(std::move(base));
    graphs.push_back(std::move(edited));
    pairs.push_back(rec);
  }

  ged::save_graphs(args.out + ".graphs.jsonl", graphs);
  ged::save_pairs(args.out + ".pairs.jsonl", pairs);
  std::cerr << "wrote " << pairs.size() << " pairs to " << args.out
            << ".{graphs,pairs}.jsonl";
  if (skipped > 0) std::cerr << " (" << skipped << " skipped as infeasible)";
  std::cerr << "\n";
  return kExitOk;
}

struct GedArgs {
  std::string graphs;
  std::string pairs;
  std::string out;
  std::string method = "exact";
  std::string costs;
  std::string preset;
  int width = 4;
  std::size_t budget = ged::kDefaultAstarBudget;
  int jobs = 1;
};

json mapping_to_json(const ged::Mapping& mapping) {
  json rows = json::array();
  for (const auto& [q, d] : mapping) {
    json entry = json::array();
    if (q == ged::kEpsilon) entry.push_back(nullptr); else entry.push_back(q);
    if (d == ged::kEpsilon) entry.push_back(nullptr); else entry.push_back(d);
    rows.push_back(std::move(entry));
  }
  return rows;
}

int run_ged(const GedArgs& args) {
  if (args.method != "exact" && args.method != "brute" && args.method != "vj" &&
      args.method != "beam") {
    throw std::runtime_error("unknown method: " + args.method);
  }
  std::optional<ged::CostSetting> override_costs;
  if (!args.costs.empty()) override_costs = ged::CostSetting::parse(args.costs);
  if (!args.preset.empty()) override_costs = ged::CostSetting::parse(args.preset);

  const std::vector<ged::Graph> graphs = ged::load_graphs(args.graphs);
  const std::vector<ged::PairRecord> records = ged::load_pairs(args.pairs);
  const std::vector<ged::GraphPair> work = ged::assemble_pairs(graphs, records);

  std::vector<json> lines(work.size());
  std::atomic<bool> budget_hit{false};
  const int jobs = std::max(1, args.jobs);

  const auto solve_range = [&](int shard) {
    for (std::size_t i = static_cast<std::size_t>(shard); i < work.size();
         i += static_cast<std::size_t>(jobs)) {
      const ged::GraphPair& pair = work[i];
      const ged::CostSetting costs = override_costs.value_or(pair.costs);
      ged::GedResult result;
      json line;
      if (args.method == "exact") {
        ged::AstarStats stats;
        result = ged::astar_ged(pair.query, pair.data, costs, args.budget, &stats);
        if (stats.budget_exhausted) budget_hit = true;
        line["expanded"] = stats.expanded;
      } else if (args.method == "brute") {
        result = ged::brute_force_ged(pair.query, pair.data, costs);
      } else if (args.method == "vj") {
        result = ged::vj_ged(pair.query, pair.data, costs);
      } else {
        result = ged::beam_ged(pair.query, pair.data, costs, args.width);
        line["width"] = args.width;
      }
      line["expense"] = result.expense;
      line["mapping"] = mapping_to_json(result.mapping);
      line["optimal"] = result.optimal;
      line["method"] = args.method;
      lines[i] = std::move(line);
    }
  };

  if (jobs == 1) {
    solve_range(0);
  } else {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) {
      workers.emplace_back([&, t] {
        try {
          solve_range(t);
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
    }
    for (std::thread& w : workers) w.join();
    for (const std::exception_ptr& err : errors) {
      if (err) std::rethrow_exception(err);
    }
  }

  std::ofstream out(args.out);
  if (!out) throw std::runtime_error("cannot write " + args.out);
  for (const json& line : lines) out << line.dump() << "\n";
  if (!out) throw std::runtime_error("write failed: " + args.out);

  if (budget_hit) {
    std::cerr << "search budget exhausted on at least one pair\n";
    return kExitBudget;
  }
  return kExitOk;
}

struct TrainArgs {
  std::string graphs;
  std::string pairs;
  std::string out;
  std::string config;
  std::uint64_t seed = 1;
  bool quiet = false;
  // config overrides; negative means "leave as configured"
  int epochs = -1;
  int batch = -1;
  int alphabet = -1;
  int patience = -1;
  double lr = -1;
  bool wo_global = false;
  bool wo_dependencies = false;
  bool wo_intra_graph = false;
  bool wo_cost = false;
};

int run_train(const TrainArgs& args) {
  ged::GenConfig config;
  if (!args.config.empty()) config = ged::load_config(args.config);
  if (args.epochs > 0) config.max_epochs = args.epochs;
  if (args.batch > 0) config.batch_size = args.batch;
  if (args.alphabet > 0) config.alphabet = args.alphabet;
  if (args.patience > 0) config.patience = args.patience;
  if (args.lr > 0) config.learning_rate = args.lr;
  config.wo_global |= args.wo_global;
  config.wo_dependencies |= args.wo_dependencies;
  config.wo_intra_graph |= args.wo_intra_graph;
  config.wo_cost |= args.wo_cost;

  const std::vector<ged::Graph> graphs = ged::load_graphs(args.graphs);
  const std::vector<ged::PairRecord> records = ged::load_pairs(args.pairs);
  const std::vector<ged::GraphPair> dataset = ged::assemble_pairs(graphs, records);

  ged::TrainHistory history;
  const ged::GenParams params = ged::train_model(
      dataset, config, args.seed, &history, args.quiet ? nullptr : &std::cerr);
  ged::save_model(args.out, params);

  json hist;
  hist["train_loss"] = history.train_loss;
  hist["val_loss"] = history.val_loss;
  hist["val_indices"] = history.val_indices;
  hist["best_epoch"] = history.best_epoch;
  hist["best_val"] = history.best_val;
  hist["epochs_run"] = history.epochs_run;
  std::ofstream hout(args.out + ".history.json");
  if (!hout) throw std::runtime_error("cannot write " + args.out + ".history.json");
  hout << hist.dump(2) << "\n";

  std::cerr << "best epoch " << history.best_epoch << " val " << history.best_val
            << ", saved " << args.out << "\n";
  return kExitOk;
}

struct EvalArgs {
  std::string graphs;
  std::string pairs;
  std::vector<std::string> checkpoints;
  std::string out;
  std::string csv;
};

json report_to_json(const ged::EvalReport& report) {
  json obj;
  obj["rmse"] = report.rmse;
  obj["mae"] = report.mae;
  obj["rho"] = report.rho;
  obj["tau"] = report.tau;
  json pk = json::object();
  for (const auto& [k, v] : report.p_at_k) pk[std::to_string(k)] = v;
  obj["p_at_k"] = std::move(pk);
  obj["pairs"] = report.pairs;
  obj["groups"] = report.groups;
  return obj;
}

int run_eval(const EvalArgs& args) {
  const std::vector<ged::Graph> graphs = ged::load_graphs(args.graphs);
  const std::vector<ged::PairRecord> records = ged::load_pairs(args.pairs);
  const std::vector<ged::GraphPair> dataset = ged::assemble_pairs(graphs, records);

  std::vector<double> truth;
  std::vector<int> group_of;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (!dataset[i].target) {
      throw std::runtime_error("pair " + std::to_string(i) + " has no target");
    }
    truth.push_back(*dataset[i].target);
    group_of.push_back(records[i].query);
  }

  std::vector<ged::EvalReport> reports;
  for (const std::string& path : args.checkpoints) {
    const ged::GenParams params = ged::load_model(path);
    std::vector<double> pred;
    pred.reserve(dataset.size());
    for (const ged::GraphPair& pair : dataset) {
      pred.push_back(ged::gen_predict(params, pair));
    }
    reports.push_back(ged::evaluate(pred, truth, group_of));
  }

  json out_doc;
  if (reports.size() == 1) {
    out_doc = report_to_json(reports[0]);
  } else {
    const auto collect = [&](auto getter) {
      std::vector<double> xs;
      for (const auto& r : reports) xs.push_back(getter(r));
      double mean = 0;
      for (double x : xs) mean += x;
      mean /= static_cast<double>(xs.size());
      double var = 0;
      for (double x : xs) var += (x - mean) * (x - mean);
      var /= static_cast<double>(xs.size());
      return std::pair<double, double>(mean, std::sqrt(var));
    };
    json mean, stdev;
    const auto put = [&](const char* key, auto getter) {
      const auto [m, s] = collect(getter);
      mean[key] = m;
      stdev[key] = s;
    };
    put("rmse", [](const ged::EvalReport& r) { return r.rmse; });
    put("mae", [](const ged::EvalReport& r) { return r.mae; });
    put("rho", [](const ged::EvalReport& r) { return r.rho; });
    put("tau", [](const ged::EvalReport& r) { return r.tau; });
    out_doc["checkpoints"] = reports.size();
    out_doc["mean"] = std::move(mean);
    out_doc["std"] = std::move(stdev);
    json per = json::array();
    for (const auto& r : reports) per.push_back(report_to_json(r));
    out_doc["per_checkpoint"] = std::move(per);
  }

  std::ofstream out(args.out);
  if (!out) throw std::runtime_error("cannot write " + args.out);
  out << out_doc.dump(2) << "\n";

  if (!args.csv.empty()) {
    std::ofstream csv(args.csv);
    if (!csv) throw std::runtime_error("cannot write " + args.csv);
    csv << "checkpoint,rmse,mae,rho,tau,p@1,p@5,p@10\n";
    const auto cell = [](const ged::EvalReport& r, int k) {
      auto it = r.p_at_k.find(k);
      return it == r.p_at_k.end() ? std::string()
                                  : std::to_string(it->second);
    };
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const ged::EvalReport& r = reports[i];
      csv << args.checkpoints[i] << "," << r.rmse << "," << r.mae << ","
          << r.rho << "," << r.tau << "," << cell(r, 1) << "," << cell(r, 5)
          << "," << cell(r, 10) << "\n";
    }
  }
  return kExitOk;
}

struct RankArgs {
  std::string graphs;
  std::string queries;
  std::string checkpoint;
  std::string costs;
  std::string preset;
  std::string out;
};

int run_rank(const RankArgs& args) {
  ged::CostSetting costs = ged::CostSetting::uniform();
  if (!args.costs.empty()) costs = ged::CostSetting::parse(args.costs);
  if (!args.preset.empty()) costs = ged::CostSetting::parse(args.preset);

  const std::vector<ged::Graph> corpus = ged::load_graphs(args.graphs);
  const std::vector<ged::Graph> queries = ged::load_graphs(args.queries);
  const ged::GenParams params = ged::load_model(args.checkpoint);

  std::ofstream out(args.out);
  if (!out) throw std::runtime_error("cannot write " + args.out);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const std::vector<int> order =
        ged::rank_with_model(params, queries[i], corpus, costs);
    json line;
    line["query"] = i;
    line["ranking"] = order;
    out << line.dump() << "\n";
  }
  return kExitOk;
}

struct GradCheckArgs {
  std::string config;
  std::uint64_t seed = 1;
  int nodes = 4;
  double step = 1e-5;
  double threshold = 1e-4;
};

int run_grad_check(const GradCheckArgs& args) {
  ged::GenConfig config;
  if (!args.config.empty()) config = ged::load_config(args.config);

  ged::Rng rng(args.seed);
  ged::GraphPair pair;
  pair.query = ged::generate_synthetic(ged::GraphModel::erdos_renyi, args.nodes,
                                       0.5, rng.fork_seed(), config.alphabet);
  const int delta = std::max<int>(
      1, static_cast<int>(ged::perturb_capacity(pair.query, config.alphabet) / 4));
  auto [edited, ops] = ged::perturb(pair.query, delta, rng.fork_seed(), config.alphabet);
  pair.data = std::move(edited);
  pair.costs = ged::CostSetting::uniform();
  pair.target = ged::edit_vector_expense(ops, pair.costs);

  const ged::GenParams params = ged::GenParams::init(config, rng.fork_seed());
  const ged::GradCheckResult result = ged::grad_check(params, pair, args.step);
  std::cout << "max relative error " << result.max_rel_error << " over "
            << result.entries << " entries (worst: " << result.worst_tensor
            << "[" << result.worst_entry << "])\n";
  return result.max_rel_error <= args.threshold ? kExitOk : kExitData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph edit distance toolkit"};
  app.require_subcommand(1);

  GenDataArgs gen_args;
  CLI::App* gen = app.add_subcommand(
      "gen-data", "synthesize a perturbation-labelled pair dataset");
  gen->add_option("--model", gen_args.model, "er | power_law | small_world");
  gen->add_option("--param", gen_args.param,
                  "edge probability / attachments / ring neighbors");
  gen->add_option("--count", gen_args.count, "number of pairs");
  gen->add_option("--n-min", gen_args.n_min, "smallest graph size");
  gen->add_option("--n-max", gen_args.n_max, "largest graph size");
  gen->add_option("--delta-min", gen_args.delta_min,
                  "lower edit fraction of |E|");
  gen->add_option("--delta-max", gen_args.delta_max,
                  "upper edit fraction of |E|");
  gen->add_option("--alphabet", gen_args.alphabet, "label vocabulary size");
  gen->add_option("--seed", gen_args.seed, "random seed");
  gen->add_option("--out", gen_args.out, "output path prefix")->required();

  GedArgs ged_args;
  CLI::App* ged_cmd =
      app.add_subcommand("ged", "score graph pairs with a search method");
  ged_cmd->add_option("--graphs", ged_args.graphs, "graphs jsonl")->required();
  ged_cmd->add_option("--pairs", ged_args.pairs, "pairs jsonl")->required();
  ged_cmd->add_option("--out", ged_args.out, "results jsonl")->required();
  ged_cmd->add_option("--method", ged_args.method, "exact | brute | vj | beam");
  auto* costs_opt =
      ged_cmd->add_option("--costs", ged_args.costs, "five comma-separated expenses");
  ged_cmd->add_option("--costs-preset", ged_args.preset,
                      "uniform | setting1 | setting2")
      ->excludes(costs_opt);
  ged_cmd->add_option("--width", ged_args.width, "beam width");
  ged_cmd->add_option("--budget", ged_args.budget, "expansion budget for exact");
  ged_cmd->add_option("--jobs", ged_args.jobs, "worker threads");

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "fit a model and save it");
  train->add_option("--graphs", train_args.graphs, "graphs jsonl")->required();
  train->add_option("--pairs", train_args.pairs, "pairs jsonl")->required();
  train->add_option("--out", train_args.out, "checkpoint path")->required();
  train->add_option("--config", train_args.config, "config json path");
  train->add_option("--seed", train_args.seed, "random seed");
  train->add_option("--epochs", train_args.epochs, "override max epochs");
  train->add_option("--batch", train_args.batch, "override batch size");
  train->add_option("--alphabet", train_args.alphabet, "override alphabet");
  train->add_option("--patience", train_args.patience, "override patience");
  train->add_option("--lr", train_args.lr, "override learning rate");
  train->add_flag("--wo-global", train_args.wo_global, "skip the column softmax");
  train->add_flag("--wo-dependencies", train_args.wo_dependencies,
                  "weights from single-pair guidance");
  train->add_flag("--wo-intra-graph", train_args.wo_intra_graph,
                  "no neighborhood aggregation");
  train->add_flag("--wo-cost", train_args.wo_cost, "zero the expense vector");
  train->add_flag("--quiet", train_args.quiet, "suppress epoch log");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "score checkpoints on a dataset");
  eval->add_option("--graphs", eval_args.graphs, "graphs jsonl")->required();
  eval->add_option("--pairs", eval_args.pairs, "pairs jsonl")->required();
  eval->add_option("--checkpoint", eval_args.checkpoints, "checkpoint path(s)")
      ->required();
  eval->add_option("--out", eval_args.out, "report json")->required();
  eval->add_option("--csv", eval_args.csv, "also write a csv table");

  RankArgs rank_args;
  CLI::App* rank = app.add_subcommand("rank", "order a corpus for each query");
  rank->add_option("--graphs", rank_args.graphs, "corpus jsonl")->required();
  rank->add_option("--queries", rank_args.queries, "query graphs jsonl")->required();
  rank->add_option("--checkpoint", rank_args.checkpoint, "model checkpoint")
      ->required();
  auto* rank_costs = rank->add_option("--costs", rank_args.costs,
                                      "five comma-separated expenses");
  rank->add_option("--costs-preset", rank_args.preset,
                   "uniform | setting1 | setting2")
      ->excludes(rank_costs);
  rank->add_option("--out", rank_args.out, "rankings jsonl")->required();

  GradCheckArgs grad_args;
  CLI::App* grad = app.add_subcommand(
      "grad-check", "compare tape gradients against central differences");
  grad->add_option("--config", grad_args.config, "config json path");
  grad->add_option("--seed", grad_args.seed, "random seed");
  grad->add_option("--nodes", grad_args.nodes, "probe graph size");
  grad->add_option("--step", grad_args.step, "finite difference step");
  grad->add_option("--threshold", grad_args.threshold, "pass/fail bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return run_gen_data(gen_args);
    if (ged_cmd->parsed()) return run_ged(ged_args);
    if (train->parsed()) return run_train(train_args);
    if (eval->parsed()) return run_eval(eval_args);
    if (rank->parsed()) return run_rank(rank_args);
    if (grad->parsed()) return run_grad_check(grad_args);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
