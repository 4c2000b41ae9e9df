#include "wyckoff/train_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "wyckoff/errors.hpp"
#include "wyckoff/random.hpp"
#include "wyckoff/text_io.hpp"

namespace wyckoff::train {

namespace {

// Per-epoch ordering uses its own stream so the split stays a function of
// the seed alone.
constexpr std::uint64_t kOrderStreamSalt = 0x9E3779B97F4A7C15ULL;

void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(idx[i - 1], idx[j]);
  }
}

Dataset subset(const Dataset& d, std::span<const std::size_t> idx) {
  Dataset out;
  out.phase = d.phase;
  out.n_features = d.n_features;
  out.seed = d.seed;
  out.samples.reserve(idx.size());
  for (std::size_t i : idx) out.samples.push_back(d.samples[i]);
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning_rate must be positive");
  }
  if (!(split_test_fraction > 0.0 && split_test_fraction < 1.0)) {
    throw std::invalid_argument("split_test_fraction must lie in (0, 1)");
  }
  if (hidden < 1) throw std::invalid_argument("hidden must be >= 1");
}

Split split(const Dataset& d, const TrainConfig& cfg) {
  if (d.samples.empty()) throw std::invalid_argument("split: dataset is empty");
  if (!(cfg.split_test_fraction > 0.0 && cfg.split_test_fraction < 1.0)) {
    throw std::invalid_argument("split_test_fraction must lie in (0, 1)");
  }
  const std::size_t n = d.samples.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(cfg.shuffle_seed);
  shuffle_indices(idx, rng);

  // The small slack keeps products like 40000 * 0.2 from rounding up a sample.
  const double raw = static_cast<double>(n) * cfg.split_test_fraction;
  const auto n_test = std::min(n, static_cast<std::size_t>(std::ceil(raw - 1e-9)));
  const std::size_t n_train = n - n_test;

  Split s;
  s.train = subset(d, std::span(idx).first(n_train));
  s.test = subset(d, std::span(idx).subspan(n_train));
  return s;
}

nn::LstmModel initial_model(const Dataset& d, const TrainConfig& cfg, std::uint64_t init_seed) {
  if (cfg.sequential) return nn::init_params(1, cfg.hidden, init_seed, d.n_features);
  return nn::init_params(d.n_features, cfg.hidden, init_seed, 1);
}

TrainResult train_on_split(const Split& s, const TrainConfig& cfg, std::uint64_t init_seed) {
  cfg.validate();
  if (s.train.samples.empty()) throw std::invalid_argument("train: training split is empty");

  TrainResult result;
  result.model = initial_model(s.train, cfg, init_seed);
  nn::LstmModel& model = result.model;
  nn::AdamState adam = nn::AdamState::for_model(model);
  const nn::AdamConfig adam_cfg{.learning_rate = cfg.learning_rate};

  const auto& samples = s.train.samples;
  std::vector<std::vector<double>> inputs;
  inputs.reserve(samples.size());
  for (const auto& smp : samples) {
    if (smp.values.size() != model.pattern_width()) {
      throw FeatureMismatch(model.pattern_width(), smp.values.size());
    }
    inputs.push_back(nn::model_input(smp.values));
  }

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng order_rng(cfg.shuffle_seed ^ kOrderStreamSalt);
  nn::LstmModel grads = nn::LstmModel::zeros(model.n_features, model.hidden, model.time_steps);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_indices(order, order_rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const double scale = 1.0 / static_cast<double>(end - start);
      for (auto& t : nn::tensors(grads)) std::fill(t.data.begin(), t.data.end(), 0.0);
      for (std::size_t b = start; b < end; ++b) {
        const std::size_t i = order[b];
        const auto cache = nn::forward(model, inputs[i]);
        nn::accumulate_gradients(model, cache, samples[i].label, scale, grads);
      }
      nn::adam_step(model, grads, adam, adam_cfg);
    }

    const EvalReport tr = evaluate(model, s.train, 0.5, cfg.eval_threads);
    const EvalReport te = s.test.samples.empty() ? EvalReport{}
                                                 : evaluate(model, s.test, 0.5, cfg.eval_threads);
    if (!std::isfinite(tr.loss) || !std::isfinite(te.loss) || !nn::all_finite(model)) {
      throw NumericError("training diverged at epoch " + std::to_string(epoch) +
                         ": non-finite loss or parameters");
    }
    result.history.push_back({epoch, tr.loss, tr.accuracy, te.loss, te.accuracy});
  }
  return result;
}

TrainResult train(const Dataset& d, const TrainConfig& cfg, std::uint64_t init_seed) {
  cfg.validate();
  return train_on_split(split(d, cfg), cfg, init_seed);
}

EvalReport evaluate(const nn::LstmModel& m, const Dataset& d, double threshold,
                    std::size_t threads) {
  const std::size_t n = d.samples.size();
  for (const auto& s : d.samples) {
    if (s.values.size() != m.pattern_width()) throw FeatureMismatch(m.pattern_width(), s.values.size());
  }
  if (n > 0 && d.n_features != m.pattern_width()) throw FeatureMismatch(m.pattern_width(), d.n_features);

  EvalReport rep;
  rep.scores.resize(n);
  std::vector<double> losses(n);

  const auto score_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const auto& s = d.samples[i];
      const double p = nn::predict(m, nn::model_input(s.values));
      rep.scores[i] = p;
      losses[i] = nn::bce_loss(p, s.label);
    }
  };

  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, n / 256));
  if (threads == 1) {
    score_range(0, n);
  } else {
    std::vector<std::jthread> workers;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t lo = 0; lo < n; lo += chunk) {
      workers.emplace_back(score_range, lo, std::min(n, lo + chunk));
    }
  }

  // Summation runs in sample order, independent of the worker split.
  double loss_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    loss_sum += losses[i];
    const bool predicted = rep.scores[i] >= threshold;
    const bool actual = d.samples[i].label != 0;
    if (predicted && actual) ++rep.confusion.tp;
    else if (predicted && !actual) ++rep.confusion.fp;
    else if (!predicted && !actual) ++rep.confusion.tn;
    else ++rep.confusion.fn;
  }
  if (n > 0) {
    rep.loss = loss_sum / static_cast<double>(n);
    rep.accuracy = 1.0 - static_cast<double>(rep.confusion.fp + rep.confusion.fn) /
                             static_cast<double>(n);
  }

  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = d.samples[i].label;
  const bool has_pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
  const bool has_neg = std::find(labels.begin(), labels.end(), 0) != labels.end();
  if (has_pos && has_neg) rep.roc = roc(rep.scores, labels);
  return rep;
}

RocCurve roc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("roc: length mismatch");
  std::size_t positives = 0;
  for (int y : labels) positives += y != 0 ? 1 : 0;
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw std::invalid_argument("roc: need at least one positive and one negative label");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) throw std::invalid_argument("roc: non-finite score");
  }

  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  const double p = static_cast<double>(positives);
  const double q = static_cast<double>(negatives);
  std::size_t tp = 0, fp = 0;
  for (std::size_t k = 0; k < idx.size();) {
    const double thr = scores[idx[k]];
    while (k < idx.size() && scores[idx[k]] == thr) {
      if (labels[idx[k]] != 0) ++tp;
      else ++fp;
      ++k;
    }
    const RocPoint pt{thr, static_cast<double>(fp) / q, static_cast<double>(tp) / p};
    const RocPoint& prev = curve.points.back();
    curve.auc += (pt.fpr - prev.fpr) * (pt.tpr + prev.tpr) * 0.5;
    curve.points.push_back(pt);
  }
  return curve;
}

std::string format_history(const std::vector<EpochRecord>& history) {
  std::string out = "epoch,train_loss,train_acc,test_loss,test_acc\n";
  for (const auto& r : history) {
    out += std::to_string(r.epoch);
    for (double v : {r.train_loss, r.train_accuracy, r.test_loss, r.test_accuracy}) {
      out += ',';
      out += text::format_real(v);
    }
    out += '\n';
  }
  return out;
}

std::string format_roc(const RocCurve& curve) {
  std::string out = "threshold,fpr,tpr\n";
  for (const auto& pt : curve.points) {
    out += text::format_real(pt.threshold);
    out += ',';
    out += text::format_real(pt.fpr);
    out += ',';
    out += text::format_real(pt.tpr);
    out += '\n';
  }
  out += "# auc=" + text::format_real(curve.auc) + "\n";
  return out;
}

void write_history(const std::vector<EpochRecord>& history, const std::filesystem::path& path) {
  text::write_file(path, format_history(history));
}

void write_roc(const RocCurve& curve, const std::filesystem::path& path) {
  text::write_file(path, format_roc(curve));
}

}  // namespace wyckoff::train
