#pragma once

#include <array>
#include <optional>
#include <set>
#include <variant>

#include "nasgnn/data.hpp"
#include "nasgnn/predictor.hpp"

namespace nasgnn {

// ---- Optimizer ----

struct AdamConfig {
  double lr = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction. Moment tensors mirror the registry.
class AdamState {
 public:
  AdamState(const ParamRegistry& reg, AdamConfig config);

  /// One update from the accumulated gradients, which are zeroed
  /// afterwards. Throws NonFiniteError naming the first parameter with a
  /// NaN/Inf gradient.
  void step(ParamRegistry& reg);

  std::int64_t step_count() const { return step_; }
  const AdamConfig& config() const { return config_; }

 private:
  struct Moments {
    ad::Matrix m;
    ad::Matrix v;
  };
  AdamConfig config_;
  std::int64_t step_ = 0;
  std::map<std::string, Moments> moments_;
};

// ---- Splits ----

struct RandomSplit {
  double train_frac = 0.7;
  double test_frac = 0.2;
  double val_frac = 0.1;
  std::uint64_t seed = 0;
};

/// Train on every graph whose node count is in train_sizes, test on all
/// graphs of test_size; validation is carved from the training sizes.
struct ZeroShotSplit {
  std::set<int> train_sizes;
  int test_size = 0;
  std::uint64_t seed = 0;
};

using SplitSpec = std::variant<RandomSplit, ZeroShotSplit>;

struct SplitResult {
  std::vector<CellGraph> train;
  std::vector<CellGraph> test;
  std::vector<CellGraph> val;
};

/// Random mode: seeded shuffle, then contiguous slices of floor(0.7 n),
/// floor(0.2 n) and the remainder. ZeroShot mode: test takes every graph
/// of test_size, the training sizes are shuffled and split 90/10 into
/// train/val, all other sizes are excluded. Throws EmptyPartitionError if
/// any part ends up empty.
SplitResult split(const Dataset& dataset, const SplitSpec& spec);

// ---- Training ----

struct TrainOptions {
  int epochs = 100;
  int batch_size = 32;
  double lr = 1e-5;
  std::uint64_t seed = 0;
};

struct EpochStats {
  int epoch = 0;  // 1-based
  double train_rmse = 0.0;
  double val_rmse = 0.0;
};

struct TrainLog {
  std::vector<EpochStats> epochs;
  int best_epoch = 0;  // 0 when no epoch ran
  double best_val_rmse = 0.0;
};

struct TrainResult {
  TrainLog log;
  /// Parameter values at the epoch with the lowest validation RMSE.
  ParamSnapshot best_params;
};

/// Jointly optimizes all model parameters with Adam on minibatch MSE.
/// Each epoch reshuffles the training set with a seed derived from
/// (seed, epoch), so runs are reproducible bit for bit. The model is left
/// at its final parameters; the best-validation snapshot is returned.
/// Throws NonFiniteError if a batch loss is NaN/Inf.
TrainResult train(Regressor& model, const std::vector<CellGraph>& train_set,
                  const std::vector<CellGraph>& val_set,
                  const TrainOptions& options);

// ---- Evaluation ----

struct BinStats {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  /// Mean and population variance of squared error; unset when count == 0.
  std::optional<double> mse_mean;
  std::optional<double> mse_var;
};

struct EvalReport {
  double mse = 0.0;
  double rmse = 0.0;
  std::size_t n_examples = 0;
  std::array<BinStats, 9> bins{};
};

/// MSE/RMSE over the whole set plus squared-error statistics in 9
/// equal-width bins over ground-truth accuracy. With jobs > 1 the forward
/// passes fan out over threads against the read-only parameters; results
/// are reduced in dataset order either way.
EvalReport evaluate(const Regressor& model,
                    const std::vector<CellGraph>& dataset, int jobs = 1);

std::string eval_report_to_json(const EvalReport& r);
std::string eval_bins_to_csv(const EvalReport& r);
EvalReport eval_report_from_json(const std::string& text);

// ---- Fixed-feature baseline ----

enum class FeatureKind { OneHot, DepthWidth };

/// The same MLP head as the surrogate, fed a fixed structural feature
/// vector instead of a learned graph embedding.
class BaselineMlp final : public Regressor {
 public:
  static BaselineMlp create(FeatureKind kind, std::uint64_t seed);

  BaselineMlp(BaselineMlp&&) = default;
  BaselineMlp& operator=(BaselineMlp&&) = default;

  ad::Var forward(ad::Tape& tape, const CellGraph& g) const override;
  ParamRegistry& params() override { return registry_; }
  const ParamRegistry& params() const override { return registry_; }

  FeatureKind kind() const { return kind_; }
  int input_dim() const { return input_dim_; }

 private:
  BaselineMlp() = default;

  FeatureKind kind_ = FeatureKind::OneHot;
  int input_dim_ = 0;
  ParamRegistry registry_;
  MlpParams mlp_;
};

struct BaselineResult {
  BaselineMlp model;
  TrainResult training;
  EvalReport test_report;
};

/// Trains the baseline under the identical loop/optimizer protocol and
/// evaluates it on the test set.
BaselineResult train_baseline_mlp(FeatureKind kind,
                                  const std::vector<CellGraph>& train_set,
                                  const std::vector<CellGraph>& val_set,
                                  const std::vector<CellGraph>& test_set,
                                  const TrainOptions& options);

std::string train_log_to_csv(const TrainLog& log);

}  // namespace nasgnn
