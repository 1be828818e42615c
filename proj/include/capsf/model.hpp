#pragma once

#include <functional>
#include <string>
#include <vector>

#include "capsf/capsnet.hpp"
#include "capsf/encoder.hpp"
#include "capsf/fusion.hpp"
#include "capsf/rng.hpp"
#include "capsf/tensor.hpp"

namespace capsf {

/// Model dimensions. Capsule geometry defaults to one input capsule per
/// timestep (n capsules of dimension 2H); override caps_in/caps_in_dim to
/// repartition, as long as the product stays n * 2H.
struct ModelConfig {
  int seq_len = 64;        // n
  int embed_dim = 64;      // k
  int hidden_dim = 64;     // H
  int caps_in = 0;         // 0 = seq_len
  int caps_in_dim = 0;     // 0 = 2 * hidden_dim
  int caps_out = 2;
  int caps_out_dim = 8;
  int feature_hidden = 16;  // H_f
  int routing_iters = 3;

  int resolved_caps_in() const { return caps_in > 0 ? caps_in : seq_len; }
  int resolved_caps_in_dim() const { return caps_in_dim > 0 ? caps_in_dim : 2 * hidden_dim; }
  int text_latent_dim() const { return caps_out * caps_out_dim; }
  void validate() const;
};

/// Every learnable array of the classifier.
struct CapsFusionParams {
  ModelConfig config;
  EncoderParams encoder;
  CapsuleLayerParams capsule;
  FusionParams fusion;

  static CapsFusionParams init(const ModelConfig& config, int vocab, Rng& rng);
  CapsFusionParams attach(Tape& tape) const;

  /// Visits every parameter tensor in a fixed order with a stable name.
  void for_each(const std::function<void(const std::string&, Tensor&)>& fn);
  void for_each(const std::function<void(const std::string&, const Tensor&)>& fn) const;
};

/// Re-zero the frozen PAD embedding row and clamp the recurrent vectors to
/// |u| <= u_max. Call after every optimizer step.
void apply_constraints(CapsFusionParams& params, double u_max = 2.0);

struct ForwardOptions {
  double dropout = 0.0;  // drop probability on both latents; 0 disables
  Rng* rng = nullptr;    // required when dropout > 0
};

/// Full forward pass for one example; returns the positive-class probability
/// as a shape-[1] tensor (recorded when the params are attached to a tape).
Tensor predict_probability(const CapsFusionParams& params, const std::vector<int>& token_ids,
                           const Tensor& features, const ForwardOptions& opt = {});

}  // namespace capsf
