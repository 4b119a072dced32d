#include "nasgnn/encoder.hpp"

namespace nasgnn {

EncoderParams make_encoder_params(ParamRegistry& reg,
                                  const EncoderConfig& config) {
  if (config.d_n <= 0 || config.d_g <= 0 || config.rounds <= 0) {
    throw BadConfigError("encoder config must have positive d_n, d_g, rounds");
  }
  EncoderParams p;
  p.embedding = &reg.add("embedding.table", kNumNodeTypes, config.d_n,
                         InitKind::ScaledNormal);
  for (int t = 0; t < config.rounds; ++t) {
    const std::string prefix = "round" + std::to_string(t);
    RoundParams rp;
    rp.msg_fwd =
        make_linear(reg, prefix + ".msg_fwd", 2 * config.d_n, 2 * config.d_n);
    rp.msg_rev =
        make_linear(reg, prefix + ".msg_rev", 2 * config.d_n, 2 * config.d_n);
    rp.update = make_gru_cell(reg, prefix + ".gru", config.d_n);
    p.rounds.push_back(rp);
  }
  p.transform = make_linear(reg, "aggregate.transform", config.d_g, config.d_n);
  p.gate = make_linear(reg, "aggregate.gate", 1, config.d_n);
  return p;
}

std::vector<ad::Var> propagate_round(ad::Tape& tape, const RoundParams& p,
                                     const Neighborhoods& nb,
                                     const std::vector<ad::Var>& h) {
  const auto n = h.size();
  const Eigen::Index msg_dim = 2 * h.front().rows();

  // Sum of per-edge linear messages; neighbor order is ascending index so
  // the floating-point summation order is reproducible.
  const auto message_sum = [&](const LinearLayer& layer, int v,
                               const std::vector<int>& neighbors) -> ad::Var {
    ad::Var acc;
    for (int u : neighbors) {
      const ad::Var m = linear(tape, layer, ad::concat(h[v], h[u]));
      acc = acc.valid() ? ad::add(acc, m) : m;
    }
    return acc.valid() ? acc : tape.zeros(msg_dim, 1);
  };

  std::vector<ad::Var> next;
  next.reserve(n);
  for (std::size_t v = 0; v < n; ++v) {
    const int vi = static_cast<int>(v);
    const ad::Var m_fwd = message_sum(p.msg_fwd, vi, nb.incoming[v]);
    const ad::Var m_rev = message_sum(p.msg_rev, vi, nb.outgoing[v]);
    next.push_back(gru_cell(tape, p.update, ad::add(m_fwd, m_rev), h[v]));
  }
  return next;
}

ad::Var aggregate(ad::Tape& tape, const EncoderParams& p,
                  const std::vector<ad::Var>& h) {
  ad::Var acc;
  for (const ad::Var& hv : h) {
    const ad::Var gated = ad::scalar_mul(ad::sigmoid(linear(tape, p.gate, hv)),
                                         linear(tape, p.transform, hv));
    acc = acc.valid() ? ad::add(acc, gated) : gated;
  }
  return acc;
}

ad::Var encode(ad::Tape& tape, const EncoderParams& p,
               const EncoderConfig& config, const CellGraph& g) {
  const Neighborhoods nb = neighborhoods(g);
  const ad::Var table = tape.leaf(*p.embedding);

  std::vector<ad::Var> h;
  h.reserve(g.num_nodes());
  for (NodeType t : g.nodes()) {
    h.push_back(ad::row(table, type_id(t)));
  }
  for (int t = 0; t < config.rounds; ++t) {
    h = propagate_round(tape, p.rounds[t], nb, h);
  }
  return aggregate(tape, p, h);
}

Eigen::VectorXd encode_values(const EncoderParams& p,
                              const EncoderConfig& config,
                              const CellGraph& g) {
  ad::Tape tape;
  return encode(tape, p, config, g).value().col(0);
}

}  // namespace nasgnn
