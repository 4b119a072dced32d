#include "nasgnn/layers.hpp"

#include <cmath>

#include "nasgnn/rng.hpp"

namespace nasgnn {

ad::Parameter& ParamRegistry::add(const std::string& name, Eigen::Index rows,
                                  Eigen::Index cols, InitKind kind) {
  if (rows <= 0 || cols <= 0) {
    throw BadConfigError("parameter " + name + ": nonpositive shape " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
  auto [it, inserted] = params_.try_emplace(name, name, rows, cols);
  if (!inserted) {
    throw BadConfigError("duplicate parameter name " + name);
  }
  kinds_.emplace(name, kind);
  return it->second;
}

ad::Parameter& ParamRegistry::at(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) {
    throw BadConfigError("unknown parameter " + name);
  }
  return it->second;
}

const ad::Parameter& ParamRegistry::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) {
    throw BadConfigError("unknown parameter " + name);
  }
  return it->second;
}

std::size_t ParamRegistry::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [name, p] : params_) {
    n += static_cast<std::size_t>(p.value.size());
  }
  return n;
}

void ParamRegistry::zero_grads() {
  for (auto& [name, p] : params_) p.zero_grad();
}

void init_params(ParamRegistry& registry, std::uint64_t seed) {
  Rng rng(seed);
  for (auto& [name, p] : registry) {
    const auto rows = p.value.rows();
    const auto cols = p.value.cols();
    switch (registry.kind_of(name)) {
      case InitKind::GlorotWeight: {
        const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
        for (Eigen::Index r = 0; r < rows; ++r) {
          for (Eigen::Index c = 0; c < cols; ++c) {
            p.value(r, c) = rng.uniform(-a, a);
          }
        }
        break;
      }
      case InitKind::ZeroBias:
        p.value.setZero();
        break;
      case InitKind::ScaledNormal: {
        const double s = 1.0 / std::sqrt(static_cast<double>(cols));
        for (Eigen::Index r = 0; r < rows; ++r) {
          for (Eigen::Index c = 0; c < cols; ++c) {
            p.value(r, c) = rng.normal() * s;
          }
        }
        break;
      }
    }
    p.zero_grad();
  }
}

LinearLayer make_linear(ParamRegistry& reg, const std::string& prefix,
                        Eigen::Index out, Eigen::Index in) {
  LinearLayer l;
  l.weight = &reg.add(prefix + ".weight", out, in, InitKind::GlorotWeight);
  l.bias = &reg.add(prefix + ".bias", out, 1, InitKind::ZeroBias);
  return l;
}

ad::Var linear(ad::Tape& tape, const LinearLayer& l, const ad::Var& x) {
  return ad::add(ad::matmul(tape.leaf(*l.weight), x), tape.leaf(*l.bias));
}

GruCellParams make_gru_cell(ParamRegistry& reg, const std::string& prefix,
                            Eigen::Index hidden) {
  const Eigen::Index input = 2 * hidden;
  GruCellParams p;
  p.w_ir = &reg.add(prefix + ".w_ir", hidden, input, InitKind::GlorotWeight);
  p.w_iz = &reg.add(prefix + ".w_iz", hidden, input, InitKind::GlorotWeight);
  p.w_in = &reg.add(prefix + ".w_in", hidden, input, InitKind::GlorotWeight);
  p.w_hr = &reg.add(prefix + ".w_hr", hidden, hidden, InitKind::GlorotWeight);
  p.w_hz = &reg.add(prefix + ".w_hz", hidden, hidden, InitKind::GlorotWeight);
  p.w_hn = &reg.add(prefix + ".w_hn", hidden, hidden, InitKind::GlorotWeight);
  p.b_ir = &reg.add(prefix + ".b_ir", hidden, 1, InitKind::ZeroBias);
  p.b_iz = &reg.add(prefix + ".b_iz", hidden, 1, InitKind::ZeroBias);
  p.b_in = &reg.add(prefix + ".b_in", hidden, 1, InitKind::ZeroBias);
  p.b_hr = &reg.add(prefix + ".b_hr", hidden, 1, InitKind::ZeroBias);
  p.b_hz = &reg.add(prefix + ".b_hz", hidden, 1, InitKind::ZeroBias);
  p.b_hn = &reg.add(prefix + ".b_hn", hidden, 1, InitKind::ZeroBias);
  return p;
}

ad::Var gru_cell(ad::Tape& tape, const GruCellParams& p, const ad::Var& x,
                 const ad::Var& h) {
  if (x.rows() != 2 * p.hidden_dim() || h.rows() != p.hidden_dim()) {
    throw ShapeError("gru_cell: input " + std::to_string(x.rows()) +
                     ", hidden " + std::to_string(h.rows()) +
                     " for hidden size " + std::to_string(p.hidden_dim()));
  }
  const auto affine = [&](ad::Parameter* w, const ad::Var& v,
                          ad::Parameter* b) {
    return ad::add(ad::matmul(tape.leaf(*w), v), tape.leaf(*b));
  };
  const ad::Var r = ad::sigmoid(
      ad::add(affine(p.w_ir, x, p.b_ir), affine(p.w_hr, h, p.b_hr)));
  const ad::Var z = ad::sigmoid(
      ad::add(affine(p.w_iz, x, p.b_iz), affine(p.w_hz, h, p.b_hz)));
  const ad::Var n = ad::tanh(ad::add(
      affine(p.w_in, x, p.b_in), ad::mul(r, affine(p.w_hn, h, p.b_hn))));
  const ad::Var one_minus_z = ad::add_scalar(ad::scale(z, -1.0), 1.0);
  return ad::add(ad::mul(one_minus_z, n), ad::mul(z, h));
}

MlpParams make_mlp(ParamRegistry& reg, const std::string& prefix,
                   Eigen::Index input_dim) {
  MlpParams p;
  Eigen::Index in = input_dim;
  const Eigen::Index sizes[4] = {kMlpHidden[0], kMlpHidden[1], kMlpHidden[2],
                                 1};
  for (int i = 0; i < 4; ++i) {
    p.layers.push_back(
        make_linear(reg, prefix + ".fc" + std::to_string(i), sizes[i], in));
    in = sizes[i];
  }
  return p;
}

ad::Var mlp_forward(ad::Tape& tape, const MlpParams& p, const ad::Var& x) {
  ad::Var h = x;
  for (std::size_t i = 0; i < p.layers.size(); ++i) {
    h = linear(tape, p.layers[i], h);
    if (i + 1 < p.layers.size()) h = ad::relu(h);
  }
  return h;
}

ParamSnapshot snapshot(const ParamRegistry& reg) {
  ParamSnapshot snap;
  for (const auto& [name, p] : reg) snap.emplace(name, p.value);
  return snap;
}

void restore(ParamRegistry& reg, const ParamSnapshot& snap) {
  for (const auto& [name, value] : snap) {
    ad::Parameter& p = reg.at(name);
    if (p.value.rows() != value.rows() || p.value.cols() != value.cols()) {
      throw DimensionMismatchError(
          "restore: parameter " + name + " is " +
          std::to_string(p.value.rows()) + "x" +
          std::to_string(p.value.cols()) + ", snapshot has " +
          std::to_string(value.rows()) + "x" + std::to_string(value.cols()));
    }
    p.value = value;
  }
}

}  // namespace nasgnn
