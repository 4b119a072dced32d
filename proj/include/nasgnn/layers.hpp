#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nasgnn/autodiff.hpp"

namespace nasgnn {

/// How a parameter is filled by init_params.
enum class InitKind {
  GlorotWeight,   // Uniform(-a, a), a = sqrt(6 / (fan_in + fan_out))
  ZeroBias,
  ScaledNormal,   // N(0, 1) / sqrt(cols); the embedding table
};

/// Owns every learnable parameter of a model, keyed by a unique path such
/// as "round0.msg_fwd.weight". Iteration order is sorted by name, which
/// fixes the order of seeded initialization and of checkpoint layout.
/// Parameter addresses are stable for the registry's lifetime.
class ParamRegistry {
 public:
  ad::Parameter& add(const std::string& name, Eigen::Index rows,
                     Eigen::Index cols, InitKind kind);

  ad::Parameter& at(const std::string& name);
  const ad::Parameter& at(const std::string& name) const;
  bool contains(const std::string& name) const {
    return params_.count(name) != 0;
  }

  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;

  void zero_grads();

  InitKind kind_of(const std::string& name) const { return kinds_.at(name); }

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::map<std::string, ad::Parameter> params_;
  std::map<std::string, InitKind> kinds_;
};

/// Fills every parameter from the seed, walking the registry in sorted name
/// order and each tensor in row-major order. Same seed, same bits.
void init_params(ParamRegistry& registry, std::uint64_t seed);

/// y = weight * x + bias, weight [out x in], bias [out].
struct LinearLayer {
  ad::Parameter* weight = nullptr;
  ad::Parameter* bias = nullptr;

  Eigen::Index out_dim() const { return weight->value.rows(); }
  Eigen::Index in_dim() const { return weight->value.cols(); }
};

LinearLayer make_linear(ParamRegistry& reg, const std::string& prefix,
                        Eigen::Index out, Eigen::Index in);

ad::Var linear(ad::Tape& tape, const LinearLayer& l, const ad::Var& x);

/// Gated recurrent unit cell with input size 2*d and hidden size d:
///   r  = sigmoid(W_ir x + b_ir + W_hr h + b_hr)
///   z  = sigmoid(W_iz x + b_iz + W_hz h + b_hz)
///   n  = tanh(W_in x + b_in + r .* (W_hn h + b_hn))
///   h' = (1 - z) .* n + z .* h
struct GruCellParams {
  ad::Parameter* w_ir = nullptr;
  ad::Parameter* w_iz = nullptr;
  ad::Parameter* w_in = nullptr;
  ad::Parameter* w_hr = nullptr;
  ad::Parameter* w_hz = nullptr;
  ad::Parameter* w_hn = nullptr;
  ad::Parameter* b_ir = nullptr;
  ad::Parameter* b_iz = nullptr;
  ad::Parameter* b_in = nullptr;
  ad::Parameter* b_hr = nullptr;
  ad::Parameter* b_hz = nullptr;
  ad::Parameter* b_hn = nullptr;

  Eigen::Index hidden_dim() const { return w_hr->value.rows(); }
};

GruCellParams make_gru_cell(ParamRegistry& reg, const std::string& prefix,
                            Eigen::Index hidden);

ad::Var gru_cell(ad::Tape& tape, const GruCellParams& p, const ad::Var& x,
                 const ad::Var& h);

/// Regressor head: input -> 28 -> 14 -> 7 -> 1 with ReLU on the hidden
/// layers and a linear scalar output.
struct MlpParams {
  std::vector<LinearLayer> layers;

  Eigen::Index in_dim() const { return layers.front().in_dim(); }
};

inline constexpr int kMlpHidden[3] = {28, 14, 7};

MlpParams make_mlp(ParamRegistry& reg, const std::string& prefix,
                   Eigen::Index input_dim);

ad::Var mlp_forward(ad::Tape& tape, const MlpParams& p, const ad::Var& x);

/// Named value snapshot, used for best-checkpoint retention and restores.
using ParamSnapshot = std::map<std::string, ad::Matrix>;

ParamSnapshot snapshot(const ParamRegistry& reg);
void restore(ParamRegistry& reg, const ParamSnapshot& snap);

}  // namespace nasgnn
