#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "capsf/fusion.hpp"
#include "capsf/model.hpp"
#include "capsf/tensor.hpp"

using namespace capsf;

namespace {

Tensor random_tensor(std::vector<int> shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  for (int i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

ModelConfig tiny_config() {
  ModelConfig cfg;
  cfg.seq_len = 3;
  cfg.embed_dim = 2;
  cfg.hidden_dim = 2;
  cfg.caps_out = 2;
  cfg.caps_out_dim = 2;
  cfg.feature_hidden = 3;
  cfg.routing_iters = 2;
  return cfg;
}

}  // namespace

TEST_CASE("feature vector range validation") {
  FeatureVector f;
  CHECK_NOTHROW(f.validate());
  f.sentiment = 2;
  CHECK_THROWS_AS(f.validate(), std::invalid_argument);
  f.sentiment = -1;
  f.polarity = -1.5;
  CHECK_THROWS_AS(f.validate(), std::invalid_argument);
  f.polarity = 0.0;
  f.subjectivity = 1.2;
  CHECK_THROWS_AS(f.validate(), std::invalid_argument);
  f.subjectivity = 1.0;
  f.likes = -3;
  CHECK_THROWS_AS(f.validate(), std::invalid_argument);
}

TEST_CASE("encode_features degenerate and scalar cases") {
  Rng rng(131);
  FusionParams p = FusionParams::init(4, 3, rng);

  FusionParams zero_w = p;
  zero_w.w_feature = Tensor::zeros({3, 7});
  zero_w.b_feature = Tensor::zeros({3});
  const Tensor latent = encode_features(random_tensor({7}, rng), zero_w);
  for (int i = 0; i < 3; ++i) CHECK(latent[i] == 0.0);

  FusionParams zero_b = p;
  zero_b.b_feature = Tensor::zeros({3});
  const Tensor zlat = encode_features(Tensor::zeros({7}), zero_b);
  for (int i = 0; i < 3; ++i) CHECK(zlat[i] == 0.0);

  // H_f = 1 scalar case: relu(sum w_i f_i + b).
  FusionParams scalar = FusionParams::init(4, 1, rng);
  scalar.w_feature = Tensor({1, 7}, {1, 0.5, -1, 0, 0, 0, 2});
  scalar.b_feature = Tensor::vector({0.25});
  const Tensor f = Tensor({7}, {1, 1, 1, 0, 0, 0, 0.5});
  CHECK(encode_features(f, scalar)[0] == doctest::Approx(1.75).epsilon(1e-15));

  CHECK_THROWS_AS(encode_features(Tensor::zeros({6}), p), std::invalid_argument);
}

TEST_CASE("fuse_logit cases") {
  Rng rng(137);
  FusionParams p = FusionParams::init(4, 3, rng);
  p.bias = Tensor::zeros({1});
  CHECK(fuse_logit(Tensor::zeros({4}), Tensor::zeros({3}), p)[0] == 0.0);

  // Frozen-at-zero feature weights reduce to the text-only model.
  FusionParams ablated = p;
  ablated.w_feat = Tensor::zeros({1, 3});
  Rng rng2(139);
  const Tensor text = random_tensor({4}, rng2);
  const double base = fuse_logit(text, random_tensor({3}, rng2), ablated)[0];
  for (int trial = 0; trial < 10; ++trial) {
    CHECK(fuse_logit(text, random_tensor({3}, rng2), ablated)[0] == base);
  }

  // 2-dim hand instance.
  FusionParams hand = FusionParams::init(2, 2, rng);
  hand.w_text = Tensor({1, 2}, {2, -1});
  hand.w_feat = Tensor({1, 2}, {0.5, 0.5});
  hand.bias = Tensor::vector({0.25});
  const double logit =
      fuse_logit(Tensor::vector({1, 2}), Tensor::vector({4, 6}), hand)[0];
  CHECK(logit == doctest::Approx(2.0 - 2.0 + 5.0 + 0.25).epsilon(1e-15));
}

TEST_CASE("classify thresholds") {
  const Classification tie = classify(0.0);
  CHECK(tie.probability == 0.5);
  CHECK(tie.label == 1);  // P = 0.5 ties positive

  const Classification pos = classify(std::log(3.0));
  CHECK(pos.probability == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(pos.label == 1);

  const Classification neg = classify(-std::log(3.0));
  CHECK(neg.probability == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(neg.label == 0);
}

TEST_CASE("classify(-logit) flips the label whenever |logit| > 0") {
  Rng rng(149);
  for (int trial = 0; trial < 200; ++trial) {
    double logit = rng.uniform(-8.0, 8.0);
    if (logit == 0.0) logit = 0.125;
    CHECK(classify(logit).label + classify(-logit).label == 1);
  }
}

TEST_CASE("bce_loss values and gradient signs") {
  CHECK(bce_loss(Tensor::scalar(0.5), 1)[0] == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(bce_loss(Tensor::scalar(0.25), 0)[0] ==
        doctest::Approx(-std::log(0.75)).epsilon(1e-12));
  CHECK_THROWS_AS(bce_loss(Tensor::scalar(0.5), 2), std::invalid_argument);

  // The loss is minimized at P = y: gradient pushes P toward the label.
  for (double p_value : {0.1, 0.3, 0.7, 0.9}) {
    for (int y : {0, 1}) {
      Tape tape;
      Tensor p = tape.leaf(Tensor::scalar(p_value));
      tape.backward(bce_loss(p, y));
      const double g = tape.grad(p)[0];
      if (y == 1) CHECK(g < 0.0);
      if (y == 0) CHECK(g > 0.0);
    }
  }
}

TEST_CASE("model: zero feature weights isolate the text branch exactly") {
  Rng rng(151);
  CapsFusionParams params = CapsFusionParams::init(tiny_config(), 6, rng);
  params.fusion.w_feat = Tensor::zeros({1, 3});
  const std::vector<int> ids = {2, 3, 0};
  const double base = predict_probability(params, ids, random_tensor({7}, rng))(0);
  for (int trial = 0; trial < 10; ++trial) {
    CHECK(predict_probability(params, ids, random_tensor({7}, rng))(0) == base);
  }
}

TEST_CASE("model: dropout 0 matches the evaluation forward bitwise") {
  Rng rng(157);
  CapsFusionParams params = CapsFusionParams::init(tiny_config(), 6, rng);
  const std::vector<int> ids = {4, 2, 5};
  const Tensor features = random_tensor({7}, rng);

  Tape tape;
  CapsFusionParams attached = params.attach(tape);
  Rng drop_rng(1);
  const Tensor trained = predict_probability(attached, ids, features, {0.0, &drop_rng});
  const Tensor evaluated = predict_probability(params, ids, features);
  CHECK(trained(0) == evaluated(0));
}

TEST_CASE("model: constraints re-zero the PAD row and clamp recurrence") {
  Rng rng(163);
  CapsFusionParams params = CapsFusionParams::init(tiny_config(), 6, rng);
  params.encoder.embedding.ref(0, 0) = 3.0;
  params.encoder.fwd.u.ref(0) = 9.0;
  params.encoder.bwd.u.ref(1) = -7.0;
  apply_constraints(params);
  CHECK(params.encoder.embedding(0, 0) == 0.0);
  CHECK(params.encoder.embedding(0, 1) == 0.0);
  CHECK(params.encoder.fwd.u[0] == 2.0);
  CHECK(params.encoder.bwd.u[1] == -2.0);
}

TEST_CASE("model config validation") {
  ModelConfig bad = tiny_config();
  bad.caps_in = 5;  // 5 * (2H=4) != n * 2H = 12
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = tiny_config();
  bad.routing_iters = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("end-to-end gradient of the full fused model passes grad_check") {
  Rng rng(167);
  CapsFusionParams skeleton = CapsFusionParams::init(tiny_config(), 6, rng);
  std::vector<Tensor> values;
  skeleton.for_each([&](const std::string&, Tensor& t) { values.push_back(t.detached()); });

  const std::vector<int> ids0 = {2, 3, 0};
  const std::vector<int> ids1 = {4, 5, 2};
  const Tensor f0 = random_tensor({7}, rng);
  const Tensor f1 = random_tensor({7}, rng);

  auto f = [&](Tape&, const std::vector<Tensor>& p) {
    CapsFusionParams m = skeleton;
    size_t idx = 0;
    m.for_each([&](const std::string&, Tensor& t) { t = p[idx++]; });
    Tensor l0 = bce_loss(predict_probability(m, ids0, f0), 1);
    Tensor l1 = bce_loss(predict_probability(m, ids1, f1), 0);
    return scale(add(l0, l1), 0.5);
  };
  const GradCheckReport report = grad_check(f, values, 1e-5, 1e-4);
  CHECK(report.max_rel_error < 1e-4);
}
