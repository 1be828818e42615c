#include "capsf/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace capsf {

using nlohmann::json;

// ---- TrainConfig -----------------------------------------------------------

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("config: epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("config: batch_size must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw std::invalid_argument("config: dropout must be in [0, 1)");
  }
  if (!(learning_rate > 0.0)) throw std::invalid_argument("config: learning_rate must be > 0");
  model.validate();
}

TrainConfig TrainConfig::from_json_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw std::invalid_argument("config: not a JSON object");
  }
  TrainConfig c;
  const std::map<std::string, std::function<void(const json&)>> fields = {
      {"epochs", [&](const json& v) { c.epochs = v.get<int>(); }},
      {"batch_size", [&](const json& v) { c.batch_size = v.get<int>(); }},
      {"dropout", [&](const json& v) { c.dropout = v.get<double>(); }},
      {"learning_rate", [&](const json& v) { c.learning_rate = v.get<double>(); }},
      {"seed", [&](const json& v) { c.seed = v.get<uint64_t>(); }},
      {"seq_len", [&](const json& v) { c.model.seq_len = v.get<int>(); }},
      {"embed_dim", [&](const json& v) { c.model.embed_dim = v.get<int>(); }},
      {"hidden_dim", [&](const json& v) { c.model.hidden_dim = v.get<int>(); }},
      {"caps_in", [&](const json& v) { c.model.caps_in = v.get<int>(); }},
      {"caps_in_dim", [&](const json& v) { c.model.caps_in_dim = v.get<int>(); }},
      {"caps_out", [&](const json& v) { c.model.caps_out = v.get<int>(); }},
      {"caps_out_dim", [&](const json& v) { c.model.caps_out_dim = v.get<int>(); }},
      {"feature_hidden", [&](const json& v) { c.model.feature_hidden = v.get<int>(); }},
      {"routing_iters", [&](const json& v) { c.model.routing_iters = v.get<int>(); }},
  };
  for (const auto& [key, value] : j.items()) {
    auto it = fields.find(key);
    if (it == fields.end()) throw std::invalid_argument("config: unknown key '" + key + "'");
    try {
      it->second(value);
    } catch (const json::exception&) {
      throw std::invalid_argument("config: bad value for '" + key + "'");
    }
  }
  c.validate();
  return c;
}

TrainConfig TrainConfig::from_json_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read config file: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return from_json_text(ss.str());
}

std::string TrainConfig::to_json_text() const {
  json j{{"epochs", epochs},
         {"batch_size", batch_size},
         {"dropout", dropout},
         {"learning_rate", learning_rate},
         {"seed", seed},
         {"seq_len", model.seq_len},
         {"embed_dim", model.embed_dim},
         {"hidden_dim", model.hidden_dim},
         {"caps_in", model.caps_in},
         {"caps_in_dim", model.caps_in_dim},
         {"caps_out", model.caps_out},
         {"caps_out_dim", model.caps_out_dim},
         {"feature_hidden", model.feature_hidden},
         {"routing_iters", model.routing_iters}};
  return j.dump();
}

// ---- Optimizer -------------------------------------------------------------

void adam_step(std::vector<Tensor*>& params, const std::vector<Tensor>& grads,
               AdamState& state, double learning_rate) {
  if (params.size() != grads.size()) {
    throw std::invalid_argument("adam_step: parameter/gradient count mismatch");
  }
  if (state.m.empty()) {
    for (const Tensor* p : params) {
      state.m.push_back(Tensor::zeros(p->shape()));
      state.v.push_back(Tensor::zeros(p->shape()));
    }
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->same_shape(grads[i])) {
      throw std::invalid_argument("adam_step: gradient shape " + grads[i].shape_str() +
                                  " does not match parameter " + params[i]->shape_str());
    }
    auto& m = state.m[i].data();
    auto& v = state.v[i].data();
    const auto& g = grads[i].data();
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = (state.beta2 * v.array() + (1.0 - state.beta2) * g.array().square()).matrix();
    params[i]->data().array() -=
        learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + state.eps);
  }
}

// ---- Metrics ---------------------------------------------------------------

namespace {

ClassScores scores_from(int64_t tp, int64_t fp, int64_t fn) {
  ClassScores s;
  s.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  s.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  s.f1 = s.precision + s.recall > 0.0
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  return s;
}

}  // namespace

MetricsReport MetricsReport::from_counts(int64_t tp, int64_t fp, int64_t tn, int64_t fn) {
  MetricsReport r;
  r.tp = tp;
  r.fp = fp;
  r.tn = tn;
  r.fn = fn;
  const int64_t total = tp + fp + tn + fn;
  r.accuracy = total > 0 ? static_cast<double>(tp + tn) / static_cast<double>(total) : 0.0;
  r.positive = scores_from(tp, fp, fn);
  // Scoring the negative class as positive swaps the confusion roles.
  r.negative = scores_from(tn, fn, fp);
  return r;
}

void write_metrics_csv(std::ostream& os, const std::string& model_name,
                       const MetricsReport& report, bool header) {
  char buf[160];
  if (header) os << "model,class,precision,recall,f1,accuracy\n";
  std::snprintf(buf, sizeof buf, "%s,positive,%.6f,%.6f,%.6f,%.6f\n", model_name.c_str(),
                report.positive.precision, report.positive.recall, report.positive.f1,
                report.accuracy);
  os << buf;
  std::snprintf(buf, sizeof buf, "%s,negative,%.6f,%.6f,%.6f,%.6f\n", model_name.c_str(),
                report.negative.precision, report.negative.recall, report.negative.f1,
                report.accuracy);
  os << buf;
}

// ---- Training --------------------------------------------------------------

TrainResult train(const std::vector<AnnotatedExample>& train_set, const TrainConfig& config,
                  int vocab_size) {
  config.validate();
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");
  for (const AnnotatedExample& e : train_set) {
    if (static_cast<int>(e.token_ids.size()) != config.model.seq_len) {
      throw std::invalid_argument("train: example length does not match seq_len");
    }
  }

  Rng rng(config.seed);
  TrainResult result;
  result.params = CapsFusionParams::init(config.model, vocab_size, rng);
  AdamState adam;

  std::vector<Tensor*> param_ptrs;
  result.params.for_each([&](const std::string&, Tensor& t) { param_ptrs.push_back(&t); });

  std::vector<size_t> order(train_set.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  const size_t n = train_set.size();
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (size_t start = 0; start < n; start += static_cast<size_t>(config.batch_size)) {
      const size_t end = std::min(n, start + static_cast<size_t>(config.batch_size));
      Tape tape;
      CapsFusionParams attached = result.params.attach(tape);
      Tensor batch_loss;
      for (size_t k = start; k < end; ++k) {
        const AnnotatedExample& ex = train_set[order[k]];
        Tensor p = predict_probability(attached, ex.token_ids, ex.features,
                                       {config.dropout, &rng});
        Tensor loss = bce_loss(p, ex.label);
        batch_loss = k == start ? loss : add(batch_loss, loss);
      }
      const double count = static_cast<double>(end - start);
      batch_loss = scale(batch_loss, 1.0 / count);
      const double loss_value = batch_loss(0);
      if (!std::isfinite(loss_value)) {
        throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch + 1) +
                                 ", batch starting at example " + std::to_string(start));
      }
      epoch_loss += loss_value * count;

      tape.backward(batch_loss);
      std::vector<Tensor> grads;
      attached.for_each(
          [&](const std::string&, Tensor& t) { grads.push_back(tape.grad(t)); });
      adam_step(param_ptrs, grads, adam, config.learning_rate);
      apply_constraints(result.params);
    }
    result.loss_curve.push_back(epoch_loss / static_cast<double>(n));
  }
  return result;
}

MetricsReport evaluate(const CapsFusionParams& params,
                       const std::vector<AnnotatedExample>& test_set) {
  if (test_set.empty()) throw std::invalid_argument("evaluate: empty test set");
  int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (const AnnotatedExample& ex : test_set) {
    const double p = predict_probability(params, ex.token_ids, ex.features)(0);
    const int predicted = p >= 0.5 ? 1 : 0;
    if (predicted == 1) {
      (ex.label == 1 ? tp : fp) += 1;
    } else {
      (ex.label == 0 ? tn : fn) += 1;
    }
  }
  return MetricsReport::from_counts(tp, fp, tn, fn);
}

// ---- Sweeps ----------------------------------------------------------------

std::vector<TrainConfig> dropout_grid(const TrainConfig& base) {
  std::vector<TrainConfig> grid;
  for (double d : {0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
    TrainConfig c = base;
    c.dropout = d;
    grid.push_back(c);
  }
  return grid;
}

std::vector<TrainConfig> batch_grid(const TrainConfig& base) {
  std::vector<TrainConfig> grid;
  for (int b : {2, 4, 6, 8, 16, 32, 64, 128, 512, 1024}) {
    TrainConfig c = base;
    c.batch_size = b;
    grid.push_back(c);
  }
  return grid;
}

std::vector<SweepPoint> sweep(const std::vector<TrainConfig>& grid,
                              const std::vector<AnnotatedExample>& examples, double split_ratio,
                              uint64_t seed, int vocab_size) {
  if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
  const auto [train_set, test_set] = split(examples, split_ratio, seed);
  std::vector<SweepPoint> points;
  for (const TrainConfig& config : grid) {
    SweepPoint point;
    point.dropout = config.dropout;
    point.batch_size = config.batch_size;
    try {
      TrainResult r = train(train_set, config, vocab_size);
      point.metrics = evaluate(r.params, test_set);
    } catch (const std::exception&) {
      point.failed = true;
    }
    points.push_back(point);
  }
  return points;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points) {
  os << "dropout,batch_size,accuracy,precision,recall,f1\n";
  char buf[160];
  for (const SweepPoint& p : points) {
    if (p.failed) {
      std::snprintf(buf, sizeof buf, "%.2f,%d,nan,nan,nan,nan\n", p.dropout, p.batch_size);
    } else {
      std::snprintf(buf, sizeof buf, "%.2f,%d,%.6f,%.6f,%.6f,%.6f\n", p.dropout, p.batch_size,
                    p.metrics.accuracy, p.metrics.positive.precision, p.metrics.positive.recall,
                    p.metrics.positive.f1);
    }
    os << buf;
  }
}

// ---- Baseline --------------------------------------------------------------

MetricsReport bow_baseline(const std::vector<AnnotatedExample>& train_set,
                           const std::vector<AnnotatedExample>& test_set) {
  if (train_set.empty() || test_set.empty()) {
    throw std::invalid_argument("bow_baseline: empty dataset");
  }
  // Term index over the train vocabulary; PAD is not a term.
  std::map<int, int> term_index;
  for (const AnnotatedExample& e : train_set) {
    for (int id : e.token_ids) {
      if (id != Vocabulary::kPad) term_index.emplace(id, 0);
    }
  }
  if (term_index.empty()) throw std::invalid_argument("bow_baseline: empty vocabulary");
  int next = 0;
  for (auto& [id, idx] : term_index) idx = next++;
  const int vocab = next;

  const auto vectorize = [&](const AnnotatedExample& e) {
    Vec x = Vec::Zero(vocab);
    for (int id : e.token_ids) {
      auto it = term_index.find(id);
      if (it != term_index.end()) x[it->second] += 1.0;
    }
    return x;
  };

  const int n = static_cast<int>(train_set.size());
  RowMat x(n, vocab);
  Vec y(n);
  for (int i = 0; i < n; ++i) {
    x.row(i) = vectorize(train_set[static_cast<size_t>(i)]).transpose();
    y[i] = train_set[static_cast<size_t>(i)].label;
  }

  // Full-batch logistic regression, zero init.
  Vec w = Vec::Zero(vocab);
  double b = 0.0;
  const double lr = 0.5;
  const int iterations = 400;
  for (int it = 0; it < iterations; ++it) {
    Vec z = x * w;
    z.array() += b;
    Vec p = (1.0 / (1.0 + (-z.array()).exp())).matrix();
    Vec err = p - y;
    w -= (lr / n) * (x.transpose() * err);
    b -= (lr / n) * err.sum();
  }

  int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (const AnnotatedExample& e : test_set) {
    const double z = vectorize(e).dot(w) + b;
    const int predicted = z >= 0.0 ? 1 : 0;
    if (predicted == 1) {
      (e.label == 1 ? tp : fp) += 1;
    } else {
      (e.label == 0 ? tn : fn) += 1;
    }
  }
  return MetricsReport::from_counts(tp, fp, tn, fn);
}

}  // namespace capsf
