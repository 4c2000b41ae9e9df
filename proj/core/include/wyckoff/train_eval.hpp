#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "wyckoff/neural_core.hpp"
#include "wyckoff/pattern_synth.hpp"

namespace wyckoff::train {

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  double split_test_fraction = 0.2;
  std::uint64_t shuffle_seed = 0;
  std::size_t hidden = 64;
  /// false: whole pattern as one time step; true: one value per step.
  bool sequential = false;
  /// Evaluation worker threads; results do not depend on this.
  std::size_t eval_threads = 1;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double test_loss = 0.0;
  double test_accuracy = 0.0;
};

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct RocPoint {
  double threshold = 0.0;  // +inf for the (0,0) origin
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

struct EvalReport {
  double loss = 0.0;
  double accuracy = 0.0;
  Confusion confusion;
  RocCurve roc;
  std::vector<double> scores;
};

struct Split {
  Dataset train;
  Dataset test;
};

struct TrainResult {
  nn::LstmModel model;
  std::vector<EpochRecord> history;
};

/// Fisher-Yates shuffle by cfg.shuffle_seed, then the last
/// ceil(N * split_test_fraction) samples become the test set.
/// Throws std::invalid_argument for an empty dataset.
Split split(const Dataset& d, const TrainConfig& cfg);

/// Model geometry for a dataset under `cfg` (whole-pattern or sequential).
nn::LstmModel initial_model(const Dataset& d, const TrainConfig& cfg, std::uint64_t init_seed);

/// Splits `d`, then runs mini-batch Adam for cfg.epochs over the shuffled
/// training part. Each epoch ends with a full evaluation of both parts.
/// Throws NumericError if the loss stops being finite.
TrainResult train(const Dataset& d, const TrainConfig& cfg, std::uint64_t init_seed);

/// Same loop on an existing split.
TrainResult train_on_split(const Split& s, const TrainConfig& cfg, std::uint64_t init_seed);

/// Scores every sample. p >= threshold counts as class 1.
/// Throws FeatureMismatch when the model's pattern width differs from the data.
EvalReport evaluate(const nn::LstmModel& m, const Dataset& d, double threshold = 0.5,
                    std::size_t threads = 1);

/// Threshold sweep over distinct scores in descending order with (0,0)
/// prepended; tied scores form a single step. AUC by the trapezoidal rule.
/// Throws std::invalid_argument on length mismatch or single-class labels.
RocCurve roc(std::span<const double> scores, std::span<const int> labels);

/// `epoch,train_loss,train_acc,test_loss,test_acc`
std::string format_history(const std::vector<EpochRecord>& history);
/// `threshold,fpr,tpr` rows, then `# auc=<value>`.
std::string format_roc(const RocCurve& curve);

void write_history(const std::vector<EpochRecord>& history, const std::filesystem::path& path);
void write_roc(const RocCurve& curve, const std::filesystem::path& path);

}  // namespace wyckoff::train
