#pragma once

#include "capsf/rng.hpp"
#include "capsf/tensor.hpp"

namespace capsf {

/// Capsule layer geometry and its transformation matrices.
struct CapsuleLayerParams {
  int n_in = 0;
  int n_out = 0;
  int d_in = 0;
  int d_out = 0;
  int routing_iters = 3;
  Tensor w;  // n_in x n_out x d_out x d_in

  static CapsuleLayerParams init(int n_in, int n_out, int d_in, int d_out,
                                 int routing_iters, Rng& rng);
  CapsuleLayerParams attach(Tape& tape) const;
};

/// Final state of the routing loop.
struct RoutingState {
  Tensor logits;    // b: n_in x n_out
  Tensor coupling;  // c: n_in x n_out, each row a probability vector
  Tensor output;    // v: n_out x d_out, every row norm in [0, 1)
};

/// Vector squash: direction kept, norm mapped to ||s||^2 / (1 + ||s||^2).
/// Rank-1 input squashes the whole vector; rank-2 squashes each row.
Tensor squash(const Tensor& s);

/// u_hat[i][j] = W[i][j] * u[i] for every (input, output) capsule pair.
Tensor predict_vectors(const Tensor& u, const CapsuleLayerParams& params);

/// Dynamic routing by agreement over prediction vectors u_hat
/// (n_in x n_out x d_out). Coupling logits start at zero; each iteration
/// softmaxes them row-wise, forms the weighted sum per output capsule,
/// squashes it, and (except after the final iteration) reinforces the
/// logits with the prediction/output dot products.
RoutingState route(const Tensor& u_hat, int iterations);

/// Reshape encoder states into input capsules, predict, and route.
/// Returns the output capsules (n_out x d_out).
Tensor capsule_layer_forward(const Tensor& h, const CapsuleLayerParams& params);

}  // namespace capsf
