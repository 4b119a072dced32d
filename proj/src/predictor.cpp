#include "nasgnn/predictor.hpp"

namespace nasgnn {

SurrogateModel SurrogateModel::create(const EncoderConfig& config,
                                      std::uint64_t seed) {
  SurrogateModel m;
  m.config_ = config;
  m.encoder_ = make_encoder_params(m.registry_, config);
  m.mlp_ = make_mlp(m.registry_, "mlp", config.d_g);
  init_params(m.registry_, seed);
  return m;
}

ad::Var SurrogateModel::forward(ad::Tape& tape, const CellGraph& g) const {
  return mlp_forward(tape, mlp_, encode(tape, encoder_, config_, g));
}

double predict(const Regressor& model, const CellGraph& g) {
  ad::Tape tape;
  return model.forward(tape, g).value()(0, 0);
}

ad::Var loss_mse(ad::Tape& tape, const Regressor& model,
                 std::span<const CellGraph> batch) {
  ad::Var acc;
  for (const CellGraph& g : batch) {
    if (!g.label()) {
      throw MissingLabelError("loss_mse: graph without validation accuracy");
    }
    const ad::Var err =
        ad::add_scalar(model.forward(tape, g), -g.label()->val_acc);
    const ad::Var sq = ad::mul(err, err);
    acc = acc.valid() ? ad::add(acc, sq) : sq;
  }
  if (!acc.valid()) {
    throw MissingLabelError("loss_mse: empty batch");
  }
  return ad::scale(acc, 1.0 / static_cast<double>(batch.size()));
}

double loss_mse_value(const Regressor& model,
                      std::span<const CellGraph> batch) {
  ad::Tape tape;
  return loss_mse(tape, model, batch).value()(0, 0);
}

}  // namespace nasgnn
