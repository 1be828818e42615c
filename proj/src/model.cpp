#include "capsf/model.hpp"

#include <stdexcept>
#include <string>

namespace capsf {

void ModelConfig::validate() const {
  if (seq_len < 1 || embed_dim < 1 || hidden_dim < 1 || caps_out < 1 || caps_out_dim < 1 ||
      feature_hidden < 1) {
    throw std::invalid_argument("model config: dimensions must be positive");
  }
  if (routing_iters < 1) throw std::invalid_argument("model config: routing_iters must be >= 1");
  if (resolved_caps_in() * resolved_caps_in_dim() != seq_len * 2 * hidden_dim) {
    throw std::invalid_argument(
        "model config: capsule geometry " + std::to_string(resolved_caps_in()) + "x" +
        std::to_string(resolved_caps_in_dim()) + " does not partition the encoder output (" +
        std::to_string(seq_len) + "x" + std::to_string(2 * hidden_dim) + ")");
  }
}

CapsFusionParams CapsFusionParams::init(const ModelConfig& config, int vocab, Rng& rng) {
  config.validate();
  CapsFusionParams p;
  p.config = config;
  p.encoder = EncoderParams::init(vocab, config.embed_dim, config.hidden_dim, rng);
  p.capsule = CapsuleLayerParams::init(config.resolved_caps_in(), config.caps_out,
                                       config.resolved_caps_in_dim(), config.caps_out_dim,
                                       config.routing_iters, rng);
  p.fusion = FusionParams::init(config.text_latent_dim(), config.feature_hidden, rng);
  return p;
}

CapsFusionParams CapsFusionParams::attach(Tape& tape) const {
  CapsFusionParams p;
  p.config = config;
  p.encoder = encoder.attach(tape);
  p.capsule = capsule.attach(tape);
  p.fusion = fusion.attach(tape);
  return p;
}

void CapsFusionParams::for_each(const std::function<void(const std::string&, Tensor&)>& fn) {
  fn("embedding", encoder.embedding);
  fn("enc.fwd.w", encoder.fwd.w);
  fn("enc.fwd.u", encoder.fwd.u);
  fn("enc.fwd.b", encoder.fwd.b);
  fn("enc.bwd.w", encoder.bwd.w);
  fn("enc.bwd.u", encoder.bwd.u);
  fn("enc.bwd.b", encoder.bwd.b);
  fn("caps.w", capsule.w);
  fn("fusion.w_feature", fusion.w_feature);
  fn("fusion.b_feature", fusion.b_feature);
  fn("fusion.w_text", fusion.w_text);
  fn("fusion.w_feat", fusion.w_feat);
  fn("fusion.bias", fusion.bias);
}

void CapsFusionParams::for_each(
    const std::function<void(const std::string&, const Tensor&)>& fn) const {
  const_cast<CapsFusionParams*>(this)->for_each(
      [&](const std::string& name, Tensor& t) { fn(name, t); });
}

void apply_constraints(CapsFusionParams& params, double u_max) {
  params.encoder.embedding.data().head(params.encoder.embed_dim()).setZero();
  for (Tensor* u : {&params.encoder.fwd.u, &params.encoder.bwd.u}) {
    u->data() = u->data().cwiseMax(-u_max).cwiseMin(u_max);
  }
}

namespace {

// Inverted dropout: kept entries scale by 1/(1-rate) so the expected
// activation matches the evaluation pass.
Tensor dropout_mask(int size, double rate, Rng& rng) {
  Tensor mask({size});
  const double keep_scale = 1.0 / (1.0 - rate);
  for (int i = 0; i < size; ++i) mask[i] = rng.uniform01() < rate ? 0.0 : keep_scale;
  return mask;
}

}  // namespace

Tensor predict_probability(const CapsFusionParams& params, const std::vector<int>& token_ids,
                           const Tensor& features, const ForwardOptions& opt) {
  if (static_cast<int>(token_ids.size()) != params.config.seq_len) {
    throw std::invalid_argument("predict_probability: expected " +
                                std::to_string(params.config.seq_len) + " token ids, got " +
                                std::to_string(token_ids.size()));
  }
  const bool drop = opt.dropout > 0.0;
  if (drop && opt.rng == nullptr) {
    throw std::invalid_argument("predict_probability: dropout requires an rng");
  }

  Tensor states = bi_indrnn(embed(token_ids, params.encoder), params.encoder);
  Tensor capsules = capsule_layer_forward(states, params.capsule);
  Tensor text_latent = reshape(capsules, {params.config.text_latent_dim()});
  Tensor feat_latent = encode_features(features, params.fusion);
  if (drop) {
    text_latent = hadamard(text_latent, dropout_mask(text_latent.size(), opt.dropout, *opt.rng));
    feat_latent = hadamard(feat_latent, dropout_mask(feat_latent.size(), opt.dropout, *opt.rng));
  }
  return sigmoid(fuse_logit(text_latent, feat_latent, params.fusion));
}

}  // namespace capsf
