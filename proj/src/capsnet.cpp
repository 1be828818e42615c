#include "capsf/capsnet.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace capsf {

CapsuleLayerParams CapsuleLayerParams::init(int n_in, int n_out, int d_in, int d_out,
                                            int routing_iters, Rng& rng) {
  if (routing_iters < 1) throw std::invalid_argument("capsule layer: routing iterations must be >= 1");
  CapsuleLayerParams p;
  p.n_in = n_in;
  p.n_out = n_out;
  p.d_in = d_in;
  p.d_out = d_out;
  p.routing_iters = routing_iters;
  p.w = Tensor({n_in, n_out, d_out, d_in});
  const double bound = 1.0 / std::sqrt(static_cast<double>(d_in));
  for (int i = 0; i < p.w.size(); ++i) p.w[i] = rng.uniform(-bound, bound);
  return p;
}

CapsuleLayerParams CapsuleLayerParams::attach(Tape& tape) const {
  CapsuleLayerParams p = *this;
  p.w = tape.leaf(w);
  return p;
}

Tensor squash(const Tensor& s) { return squash_rows(s); }

Tensor predict_vectors(const Tensor& u, const CapsuleLayerParams& params) {
  return caps_predict(params.w, u);
}

RoutingState route(const Tensor& u_hat, int iterations) {
  if (iterations < 1) throw std::invalid_argument("route: iteration count must be >= 1");
  if (u_hat.rank() != 3) {
    throw std::invalid_argument("route: predictions must be rank-3, got " + u_hat.shape_str());
  }
  RoutingState state;
  state.logits = Tensor::zeros({u_hat.dim(0), u_hat.dim(1)});
  for (int it = 0; it < iterations; ++it) {
    state.coupling = softmax_rows(state.logits);
    state.output = squash_rows(caps_weighted_sum(state.coupling, u_hat));
    if (it + 1 < iterations) {
      state.logits = add(state.logits, caps_agreement(u_hat, state.output));
    }
  }
  return state;
}

Tensor capsule_layer_forward(const Tensor& h, const CapsuleLayerParams& params) {
  const int total = h.size();
  if (params.n_in * params.d_in != total) {
    throw std::invalid_argument(
        "capsule_layer_forward: encoder output " + h.shape_str() + " does not divide into " +
        std::to_string(params.n_in) + " capsules of dimension " + std::to_string(params.d_in));
  }
  Tensor u = reshape(h, {params.n_in, params.d_in});
  return route(predict_vectors(u, params), params.routing_iters).output;
}

}  // namespace capsf
