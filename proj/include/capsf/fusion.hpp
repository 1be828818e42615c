#pragma once

#include <cstdint>

#include "capsf/rng.hpp"
#include "capsf/tensor.hpp"

namespace capsf {

/// Raw per-tweet metadata features before normalization.
struct FeatureVector {
  int sentiment = 0;          // -1 negative, 0 neutral, 1 positive
  double polarity = 0.0;      // [-1, 1]
  double subjectivity = 0.0;  // [0, 1]
  int64_t followers = 0;
  int64_t likes = 0;
  int64_t replies = 0;
  int64_t retweets = 0;

  /// Throws std::invalid_argument if any field is outside its range.
  void validate() const;
};

/// Metadata branch and classification head. The feature branch is a single
/// recurrent step from a zero state, which reduces to relu(W f + b).
struct FusionParams {
  Tensor w_feature;  // H_f x 7
  Tensor b_feature;  // H_f
  Tensor w_text;     // 1 x text latent dim
  Tensor w_feat;     // 1 x H_f
  Tensor bias;       // [1]

  int feature_hidden() const { return b_feature.size(); }
  int text_dim() const { return w_text.dim(1); }

  static FusionParams init(int text_dim, int feature_hidden, Rng& rng);
  FusionParams attach(Tape& tape) const;
};

/// Feature latent from the normalized 7-dim vector.
Tensor encode_features(const Tensor& features, const FusionParams& params);

/// logit = W_text * text_latent + W_feat * feat_latent + bias, shape [1].
Tensor fuse_logit(const Tensor& text_latent, const Tensor& feat_latent,
                  const FusionParams& params);

struct Classification {
  double probability;
  int label;  // 1 = positive, 0 = negative
};

/// Sigmoid probability with the tie P = 0.5 classed positive.
Classification classify(double logit);

/// Binary cross-entropy against label y in {0, 1}; the probability is
/// clamped away from 0 and 1 before the logs.
Tensor bce_loss(const Tensor& probability, int y);

}  // namespace capsf
