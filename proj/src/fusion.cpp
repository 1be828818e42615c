#include "capsf/fusion.hpp"

#include <cmath>
#include <stdexcept>

namespace capsf {

void FeatureVector::validate() const {
  if (sentiment < -1 || sentiment > 1) {
    throw std::invalid_argument("feature vector: sentiment must be -1, 0 or 1");
  }
  if (polarity < -1.0 || polarity > 1.0) {
    throw std::invalid_argument("feature vector: polarity must be in [-1, 1]");
  }
  if (subjectivity < 0.0 || subjectivity > 1.0) {
    throw std::invalid_argument("feature vector: subjectivity must be in [0, 1]");
  }
  if (followers < 0 || likes < 0 || replies < 0 || retweets < 0) {
    throw std::invalid_argument("feature vector: counts must be non-negative");
  }
}

FusionParams FusionParams::init(int text_dim, int feature_hidden, Rng& rng) {
  const auto uniform_tensor = [&](std::vector<int> shape, double bound) {
    Tensor t(std::move(shape));
    for (int i = 0; i < t.size(); ++i) t[i] = rng.uniform(-bound, bound);
    return t;
  };
  FusionParams p;
  p.w_feature = uniform_tensor({feature_hidden, 7}, 1.0 / std::sqrt(7.0));
  p.b_feature = Tensor::full({feature_hidden}, 0.1);
  p.w_text = uniform_tensor({1, text_dim}, 1.0 / std::sqrt(static_cast<double>(text_dim)));
  p.w_feat = uniform_tensor({1, feature_hidden},
                            1.0 / std::sqrt(static_cast<double>(feature_hidden)));
  p.bias = Tensor::zeros({1});
  return p;
}

FusionParams FusionParams::attach(Tape& tape) const {
  FusionParams p;
  p.w_feature = tape.leaf(w_feature);
  p.b_feature = tape.leaf(b_feature);
  p.w_text = tape.leaf(w_text);
  p.w_feat = tape.leaf(w_feat);
  p.bias = tape.leaf(bias);
  return p;
}

Tensor encode_features(const Tensor& features, const FusionParams& params) {
  if (features.size() != 7) {
    throw std::invalid_argument("encode_features: expected 7 inputs, got " +
                                features.shape_str());
  }
  return relu(add(matmul(params.w_feature, features), params.b_feature));
}

Tensor fuse_logit(const Tensor& text_latent, const Tensor& feat_latent,
                  const FusionParams& params) {
  Tensor t = matmul(params.w_text, text_latent);
  Tensor f = matmul(params.w_feat, feat_latent);
  return add(add(t, f), params.bias);
}

Classification classify(double logit) {
  const double p = 1.0 / (1.0 + std::exp(-logit));
  return {p, p >= 0.5 ? 1 : 0};
}

Tensor bce_loss(const Tensor& probability, int y) {
  if (y != 0 && y != 1) throw std::invalid_argument("bce_loss: label must be 0 or 1");
  return bce(probability, static_cast<double>(y));
}

}  // namespace capsf
