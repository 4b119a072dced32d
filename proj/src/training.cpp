#include "nasgnn/training.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "nasgnn/io_util.hpp"
#include "nasgnn/rng.hpp"

namespace nasgnn {

// ---- Adam ----

AdamState::AdamState(const ParamRegistry& reg, AdamConfig config)
    : config_(config) {
  for (const auto& [name, p] : reg) {
    Moments m;
    m.m = ad::Matrix::Zero(p.value.rows(), p.value.cols());
    m.v = ad::Matrix::Zero(p.value.rows(), p.value.cols());
    moments_.emplace(name, std::move(m));
  }
}

void AdamState::step(ParamRegistry& reg) {
  ++step_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
  for (auto& [name, p] : reg) {
    if (!p.grad.allFinite()) {
      throw NonFiniteError("adam_step: non-finite gradient in " + name);
    }
    Moments& mom = moments_.at(name);
    mom.m = config_.beta1 * mom.m + (1.0 - config_.beta1) * p.grad;
    mom.v.array() = config_.beta2 * mom.v.array() +
                    (1.0 - config_.beta2) * p.grad.array().square();
    p.value.array() -= config_.lr * (mom.m.array() / bc1) /
                       ((mom.v.array() / bc2).sqrt() + config_.eps);
    p.grad.setZero();
  }
}

// ---- Splits ----

namespace {

std::vector<CellGraph> take(const std::vector<CellGraph>& pool,
                            const std::vector<std::size_t>& order,
                            std::size_t begin, std::size_t end) {
  std::vector<CellGraph> out;
  out.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) out.push_back(pool[order[i]]);
  return out;
}

}  // namespace

SplitResult split(const Dataset& dataset, const SplitSpec& spec) {
  if (dataset.graphs.empty()) {
    throw EmptyPartitionError("split: empty dataset");
  }

  SplitResult result;
  if (const auto* random = std::get_if<RandomSplit>(&spec)) {
    const double total =
        random->train_frac + random->test_frac + random->val_frac;
    if (std::fabs(total - 1.0) > 1e-9) {
      throw BadConfigError("split fractions must sum to 1");
    }
    const std::size_t n = dataset.graphs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(random->seed);
    rng.shuffle(order);

    const auto n_train = static_cast<std::size_t>(
        std::floor(random->train_frac * static_cast<double>(n)));
    const auto n_test = static_cast<std::size_t>(
        std::floor(random->test_frac * static_cast<double>(n)));
    result.train = take(dataset.graphs, order, 0, n_train);
    result.test = take(dataset.graphs, order, n_train, n_train + n_test);
    result.val = take(dataset.graphs, order, n_train + n_test, n);
  } else {
    const auto& zs = std::get<ZeroShotSplit>(spec);
    if (zs.train_sizes.count(zs.test_size) != 0) {
      throw BadConfigError("zero-shot test size " +
                           std::to_string(zs.test_size) +
                           " must not be a training size");
    }
    std::vector<CellGraph> pool;
    for (const CellGraph& g : dataset.graphs) {
      if (g.num_nodes() == zs.test_size) {
        result.test.push_back(g);
      } else if (zs.train_sizes.count(g.num_nodes()) != 0) {
        pool.push_back(g);
      }
    }
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(zs.seed);
    rng.shuffle(order);
    const auto n_train = static_cast<std::size_t>(
        std::floor(0.9 * static_cast<double>(pool.size())));
    result.train = take(pool, order, 0, n_train);
    result.val = take(pool, order, n_train, pool.size());
  }

  if (result.train.empty() || result.test.empty() || result.val.empty()) {
    throw EmptyPartitionError(
        "split: sizes train=" + std::to_string(result.train.size()) +
        " test=" + std::to_string(result.test.size()) +
        " val=" + std::to_string(result.val.size()));
  }
  return result;
}

// ---- Evaluation ----

namespace {

std::vector<double> predict_all(const Regressor& model,
                                const std::vector<CellGraph>& dataset,
                                int jobs) {
  std::vector<double> preds(dataset.size());
  const auto worker = [&](std::size_t begin, std::size_t end) {
    ad::Tape tape;
    for (std::size_t i = begin; i < end; ++i) {
      tape.reset();
      preds[i] = model.forward(tape, dataset[i]).value()(0, 0);
    }
  };
  if (jobs <= 1 || dataset.size() < 2) {
    worker(0, dataset.size());
  } else {
    const std::size_t workers =
        std::min<std::size_t>(jobs, dataset.size());
    std::vector<std::thread> threads;
    threads.reserve(workers);
    const std::size_t chunk = (dataset.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(dataset.size(), begin + chunk);
      if (begin >= end) break;
      threads.emplace_back(worker, begin, end);
    }
    for (auto& t : threads) t.join();
  }
  return preds;
}

double rmse_of(const Regressor& model, const std::vector<CellGraph>& set) {
  if (set.empty()) return 0.0;
  ad::Tape tape;
  double sum_sq = 0.0;
  for (const CellGraph& g : set) {
    if (!g.label()) {
      throw MissingLabelError("rmse: graph without validation accuracy");
    }
    tape.reset();
    const double err =
        model.forward(tape, g).value()(0, 0) - g.label()->val_acc;
    sum_sq += err * err;
  }
  return std::sqrt(sum_sq / static_cast<double>(set.size()));
}

}  // namespace

EvalReport evaluate(const Regressor& model,
                    const std::vector<CellGraph>& dataset, int jobs) {
  for (const CellGraph& g : dataset) {
    if (!g.label()) {
      throw MissingLabelError("evaluate: graph without validation accuracy");
    }
  }
  const std::vector<double> preds = predict_all(model, dataset, jobs);

  EvalReport report;
  report.n_examples = dataset.size();
  for (int k = 0; k < 9; ++k) {
    report.bins[k].lo = k / 9.0;
    report.bins[k].hi = (k + 1) / 9.0;
  }

  // Reduced in dataset order regardless of evaluation fan-out.
  std::array<std::vector<double>, 9> bin_sq;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const double label = dataset[i].label()->val_acc;
    const double sq = (preds[i] - label) * (preds[i] - label);
    sum_sq += sq;
    bin_sq[accuracy_bin(label)].push_back(sq);
  }
  if (!dataset.empty()) {
    report.mse = sum_sq / static_cast<double>(dataset.size());
    report.rmse = std::sqrt(report.mse);
  }
  for (int k = 0; k < 9; ++k) {
    const auto& v = bin_sq[k];
    report.bins[k].count = v.size();
    if (v.empty()) continue;
    const double mean =
        std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double var = 0.0;
    for (double sq : v) var += (sq - mean) * (sq - mean);
    var /= static_cast<double>(v.size());
    report.bins[k].mse_mean = mean;
    report.bins[k].mse_var = var;
  }
  return report;
}

std::string eval_report_to_json(const EvalReport& r) {
  std::ostringstream out;
  out << "{\"rmse\":" << format_double(r.rmse)
      << ",\"mse\":" << format_double(r.mse)
      << ",\"n_examples\":" << r.n_examples << ",\"bins\":[";
  for (int k = 0; k < 9; ++k) {
    const BinStats& b = r.bins[k];
    if (k) out << ',';
    out << "{\"lo\":" << format_double(b.lo)
        << ",\"hi\":" << format_double(b.hi) << ",\"count\":" << b.count
        << ",\"mse_mean\":"
        << (b.mse_mean ? format_double(*b.mse_mean) : "null")
        << ",\"mse_var\":" << (b.mse_var ? format_double(*b.mse_var) : "null")
        << "}";
  }
  out << "]}";
  return out.str();
}

std::string eval_bins_to_csv(const EvalReport& r) {
  std::ostringstream out;
  out << "bin_lo,bin_hi,count,mse_mean,mse_var\n";
  for (const BinStats& b : r.bins) {
    out << format_double(b.lo) << ',' << format_double(b.hi) << ','
        << b.count << ',';
    if (b.mse_mean) out << format_double(*b.mse_mean);
    out << ',';
    if (b.mse_var) out << format_double(*b.mse_var);
    out << '\n';
  }
  return out.str();
}

EvalReport eval_report_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  EvalReport r;
  r.rmse = j.at("rmse").get<double>();
  r.mse = j.at("mse").get<double>();
  r.n_examples = j.at("n_examples").get<std::size_t>();
  const auto& bins = j.at("bins");
  if (!bins.is_array() || bins.size() != 9) {
    throw std::invalid_argument("eval report: expected 9 bins");
  }
  for (int k = 0; k < 9; ++k) {
    const auto& b = bins.at(k);
    r.bins[k].lo = b.at("lo").get<double>();
    r.bins[k].hi = b.at("hi").get<double>();
    r.bins[k].count = b.at("count").get<std::size_t>();
    if (!b.at("mse_mean").is_null()) {
      r.bins[k].mse_mean = b.at("mse_mean").get<double>();
    }
    if (!b.at("mse_var").is_null()) {
      r.bins[k].mse_var = b.at("mse_var").get<double>();
    }
  }
  return r;
}

// ---- Training loop ----

TrainResult train(Regressor& model, const std::vector<CellGraph>& train_set,
                  const std::vector<CellGraph>& val_set,
                  const TrainOptions& options) {
  for (const CellGraph& g : train_set) {
    if (!g.label()) {
      throw MissingLabelError("train: unlabeled training graph");
    }
  }

  AdamConfig adam_config;
  adam_config.lr = options.lr;
  AdamState adam(model.params(), adam_config);

  if (options.batch_size < 1) {
    throw BadConfigError("train: batch size must be at least 1");
  }

  TrainResult result;
  std::vector<CellGraph> epoch_set;

  ad::Tape tape;
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    // Each epoch's order depends only on (seed, epoch).
    epoch_set = train_set;
    Rng rng(mix_seed(options.seed, static_cast<std::uint64_t>(epoch)));
    rng.shuffle(epoch_set);

    double epoch_sq_sum = 0.0;
    const auto batch_size = static_cast<std::size_t>(options.batch_size);
    for (std::size_t start = 0; start < epoch_set.size();
         start += batch_size) {
      const std::size_t end =
          std::min(epoch_set.size(), start + batch_size);
      const std::span<const CellGraph> batch(epoch_set.data() + start,
                                             end - start);

      tape.reset();
      const ad::Var loss = loss_mse(tape, model, batch);
      const double loss_value = loss.value()(0, 0);
      if (!std::isfinite(loss_value)) {
        throw NonFiniteError("train: non-finite loss at epoch " +
                             std::to_string(epoch));
      }
      epoch_sq_sum += loss_value * static_cast<double>(batch.size());
      tape.backward(loss);
      adam.step(model.params());
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_rmse =
        std::sqrt(epoch_sq_sum / static_cast<double>(train_set.size()));
    stats.val_rmse = rmse_of(model, val_set);
    result.log.epochs.push_back(stats);

    if (result.log.best_epoch == 0 ||
        stats.val_rmse < result.log.best_val_rmse) {
      result.log.best_epoch = epoch;
      result.log.best_val_rmse = stats.val_rmse;
      result.best_params = snapshot(model.params());
    }
  }

  if (result.log.best_epoch == 0) {
    // Zero-epoch run: the "best" checkpoint is the initialization.
    result.best_params = snapshot(model.params());
  }
  return result;
}

std::string train_log_to_csv(const TrainLog& log) {
  std::ostringstream out;
  out << "epoch,train_rmse,val_rmse\n";
  for (const EpochStats& e : log.epochs) {
    out << e.epoch << ',' << format_double(e.train_rmse) << ','
        << format_double(e.val_rmse) << '\n';
  }
  return out.str();
}

// ---- Baseline ----

BaselineMlp BaselineMlp::create(FeatureKind kind, std::uint64_t seed) {
  BaselineMlp b;
  b.kind_ = kind;
  b.input_dim_ =
      kind == FeatureKind::OneHot ? kOneHotFeatureDim : kDepthWidthFeatureDim;
  b.mlp_ = make_mlp(b.registry_, "mlp", b.input_dim_);
  init_params(b.registry_, seed);
  return b;
}

ad::Var BaselineMlp::forward(ad::Tape& tape, const CellGraph& g) const {
  const FeatureVector f = kind_ == FeatureKind::OneHot
                              ? one_hot_encode(g)
                              : depth_width_features(g);
  return mlp_forward(tape, mlp_, tape.constant(f));
}

BaselineResult train_baseline_mlp(FeatureKind kind,
                                  const std::vector<CellGraph>& train_set,
                                  const std::vector<CellGraph>& val_set,
                                  const std::vector<CellGraph>& test_set,
                                  const TrainOptions& options) {
  BaselineResult result{BaselineMlp::create(kind, options.seed), {}, {}};
  result.training = train(result.model, train_set, val_set, options);
  result.test_report = evaluate(result.model, test_set);
  return result;
}

}  // namespace nasgnn
