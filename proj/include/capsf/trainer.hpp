#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "capsf/model.hpp"
#include "capsf/pipeline.hpp"

namespace capsf {

/// Training hyperparameters plus the model dimensions, as read from the
/// JSON config file. Unknown keys in the file are rejected.
struct TrainConfig {
  int epochs = 20;
  int batch_size = 16;
  double dropout = 0.4;
  double learning_rate = 1e-3;
  uint64_t seed = 42;
  ModelConfig model;

  void validate() const;
  static TrainConfig from_json_text(const std::string& text);
  static TrainConfig from_json_file(const std::string& path);
  std::string to_json_text() const;
};

// ---- Optimizer -------------------------------------------------------------

/// First/second-moment state for Adam, aligned with the parameter order of
/// CapsFusionParams::for_each.
struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One bias-corrected Adam update; moments are allocated on first use.
void adam_step(std::vector<Tensor*>& params, const std::vector<Tensor>& grads,
               AdamState& state, double learning_rate);

// ---- Metrics ---------------------------------------------------------------

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Confusion counts with per-class scores; each class is scored as the
/// positive class of its own binary confusion matrix.
struct MetricsReport {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t tn = 0;
  int64_t fn = 0;
  double accuracy = 0.0;
  ClassScores positive;
  ClassScores negative;

  static MetricsReport from_counts(int64_t tp, int64_t fp, int64_t tn, int64_t fn);
};

/// `model,class,precision,recall,f1,accuracy` rows for one model.
void write_metrics_csv(std::ostream& os, const std::string& model_name,
                       const MetricsReport& report, bool header = true);

// ---- Training and evaluation -----------------------------------------------

struct TrainResult {
  CapsFusionParams params;
  std::vector<double> loss_curve;  // mean loss per epoch
};

/// Seeded mini-batch training with dropout; the final partial batch is kept.
/// Aborts with a diagnostic if the loss turns non-finite.
TrainResult train(const std::vector<AnnotatedExample>& train_set, const TrainConfig& config,
                  int vocab_size);

/// Dropout-free forward over the test set, scored with the 0.5 threshold.
MetricsReport evaluate(const CapsFusionParams& params,
                       const std::vector<AnnotatedExample>& test_set);

// ---- Sweeps ----------------------------------------------------------------

struct SweepPoint {
  double dropout = 0.0;
  int batch_size = 0;
  bool failed = false;  // train aborted; metrics reported as NaN
  MetricsReport metrics;
};

/// Dropout grid from the paper's sweep: 0.2 .. 0.9 in steps of 0.1.
std::vector<TrainConfig> dropout_grid(const TrainConfig& base);
/// Batch-size grid: 2, 4, 6, 8, 16, 32, 64, 128, 512, 1024.
std::vector<TrainConfig> batch_grid(const TrainConfig& base);

/// Train + evaluate once per grid point over a shared split. A failing
/// point records a NaN row and the sweep continues.
std::vector<SweepPoint> sweep(const std::vector<TrainConfig>& grid,
                              const std::vector<AnnotatedExample>& examples, double split_ratio,
                              uint64_t seed, int vocab_size);

void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points);

// ---- Baseline --------------------------------------------------------------

/// Term-frequency bag-of-words over the train vocabulary with a logistic
/// regression head fit by full-batch gradient descent.
MetricsReport bow_baseline(const std::vector<AnnotatedExample>& train_set,
                           const std::vector<AnnotatedExample>& test_set);

}  // namespace capsf
