#pragma once

#include <span>

#include "nasgnn/encoder.hpp"

namespace nasgnn {

/// Anything that maps a cell to a differentiable scalar prediction over a
/// parameter registry. Shared by the graph surrogate and the fixed-feature
/// baselines so training and evaluation run the same loop.
class Regressor {
 public:
  virtual ~Regressor() = default;
  virtual ad::Var forward(ad::Tape& tape, const CellGraph& g) const = 0;
  virtual ParamRegistry& params() = 0;
  virtual const ParamRegistry& params() const = 0;
};

/// Graph encoder plus MLP regressor head, trained jointly end-to-end.
/// Movable but not copyable (layers hold pointers into the registry).
class SurrogateModel final : public Regressor {
 public:
  static SurrogateModel create(const EncoderConfig& config,
                               std::uint64_t seed);

  SurrogateModel(SurrogateModel&&) = default;
  SurrogateModel& operator=(SurrogateModel&&) = default;

  ad::Var forward(ad::Tape& tape, const CellGraph& g) const override;
  ParamRegistry& params() override { return registry_; }
  const ParamRegistry& params() const override { return registry_; }

  const EncoderConfig& config() const { return config_; }
  const EncoderParams& encoder() const { return encoder_; }
  const MlpParams& mlp() const { return mlp_; }

 private:
  SurrogateModel() = default;

  EncoderConfig config_;
  ParamRegistry registry_;
  EncoderParams encoder_;
  MlpParams mlp_;
};

/// Raw linear-head prediction; deliberately not clamped to [0, 1].
double predict(const Regressor& model, const CellGraph& g);

/// Mean over the batch of (prediction - val_acc)^2 as a tape node.
/// Throws MissingLabelError on any unlabeled graph.
ad::Var loss_mse(ad::Tape& tape, const Regressor& model,
                 std::span<const CellGraph> batch);

double loss_mse_value(const Regressor& model, std::span<const CellGraph> batch);

}  // namespace nasgnn
