#pragma once

#include <vector>

#include "nasgnn/graph.hpp"
#include "nasgnn/layers.hpp"

namespace nasgnn {

/// Dimensions of the graph encoder. Defaults: 250-dim node embeddings,
/// 56-dim graph embedding, two propagation rounds.
struct EncoderConfig {
  int d_n = 250;
  int d_g = 56;
  int rounds = 2;
};

/// One propagation round. Forward and reverse message transforms are
/// distinct parameter sets, as is each round.
struct RoundParams {
  LinearLayer msg_fwd;   // [2*d_n x 2*d_n]
  LinearLayer msg_rev;   // [2*d_n x 2*d_n]
  GruCellParams update;  // input 2*d_n, hidden d_n
};

struct EncoderParams {
  ad::Parameter* embedding = nullptr;  // [5 x d_n] node-type lookup table
  std::vector<RoundParams> rounds;
  LinearLayer transform;  // [d_g x d_n], per-node contribution
  LinearLayer gate;       // [1 x d_n], sigmoid-gated node weight
};

/// Registers all encoder parameters under "embedding.*", "roundT.*" and
/// "aggregate.*". Values are left for init_params to fill.
EncoderParams make_encoder_params(ParamRegistry& reg,
                                  const EncoderConfig& config);

/// One synchronous round of bidirectional message passing. For node v the
/// incoming messages are sum_{u in N(v)} msg_fwd([h_v; h_u]) and the
/// reverse messages sum_{u in N_out(v)} msg_rev([h_v; h_u]); empty sums are
/// zero vectors. Both sums feed the GRU as its input with h_v the hidden
/// state. Every new embedding reads only round-input embeddings.
std::vector<ad::Var> propagate_round(ad::Tape& tape, const RoundParams& p,
                                     const Neighborhoods& nb,
                                     const std::vector<ad::Var>& h);

/// Gated aggregation over final node embeddings:
///   h_G = sum_v sigmoid(gate(h_v)) * transform(h_v)
ad::Var aggregate(ad::Tape& tape, const EncoderParams& p,
                  const std::vector<ad::Var>& h);

/// Full encoder: type-embedding lookup, `rounds` propagation rounds with
/// per-round parameters, then aggregation to a d_g vector.
ad::Var encode(ad::Tape& tape, const EncoderParams& p,
               const EncoderConfig& config, const CellGraph& g);

/// Value-only convenience over a throwaway tape.
Eigen::VectorXd encode_values(const EncoderParams& p,
                              const EncoderConfig& config, const CellGraph& g);

}  // namespace nasgnn
