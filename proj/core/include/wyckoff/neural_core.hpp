#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "wyckoff/pattern_synth.hpp"

namespace wyckoff::nn {

/// Raw pattern values are divided by this before they reach the model.
inline constexpr double kInputScale = 100.0;

/// Probabilities are clamped to [kProbClamp, 1 - kProbClamp] inside the loss.
inline constexpr double kProbClamp = 1e-12;

enum class Gate : std::size_t { Input = 0, Forget = 1, Candidate = 2, Output = 3 };
inline constexpr std::size_t kGateCount = 4;
inline constexpr std::array<Gate, kGateCount> kGates{Gate::Input, Gate::Forget, Gate::Candidate,
                                                     Gate::Output};
std::string_view gate_name(Gate g);

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

struct GateParams {
  Matrix input_weights;      // hidden x n_features
  Matrix recurrent_weights;  // hidden x hidden
  std::vector<double> bias;  // hidden

  friend bool operator==(const GateParams&, const GateParams&) = default;
};

/// Single-layer LSTM over `time_steps` steps of `n_features` inputs each,
/// followed by a dense sigmoid head on the last hidden state. The same type
/// carries gradients and Adam moments.
struct LstmModel {
  std::size_t n_features = 0;
  std::size_t hidden = 0;
  std::size_t time_steps = 1;
  std::array<GateParams, kGateCount> gates;
  std::vector<double> dense_w;  // 1 x hidden
  double dense_b = 0.0;

  /// Zero-filled model with consistent shapes.
  static LstmModel zeros(std::size_t n_features, std::size_t hidden, std::size_t time_steps = 1);

  GateParams& gate(Gate g) { return gates[static_cast<std::size_t>(g)]; }
  const GateParams& gate(Gate g) const { return gates[static_cast<std::size_t>(g)]; }

  /// Raw pattern length consumed per sample.
  std::size_t pattern_width() const { return n_features * time_steps; }

  friend bool operator==(const LstmModel&, const LstmModel&) = default;
};

/// Named view of one parameter tensor. Names: W_<gate>, U_<gate>, b_<gate>
/// for gate in {input, forget, candidate, output}, then dense_w, dense_b.
template <typename T>
struct TensorRef {
  std::string_view name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::span<T> data;
};

std::vector<TensorRef<double>> tensors(LstmModel& m);
std::vector<TensorRef<const double>> tensors(const LstmModel& m);

/// Throws ShapeError when any tensor disagrees with (n_features, hidden).
void validate_shapes(const LstmModel& m);
bool all_finite(const LstmModel& m);
std::size_t parameter_count(const LstmModel& m);

/// Numerically stable logistic function.
double sigmoid(double x);

struct StepCache {
  std::vector<double> x;
  std::vector<double> input_gate;
  std::vector<double> forget_gate;
  std::vector<double> candidate;
  std::vector<double> output_gate;
  std::vector<double> cell;
  std::vector<double> hidden;
};

struct ForwardCache {
  std::vector<StepCache> steps;
  double logit = 0.0;
  double probability = 0.5;
};

/// Runs the recurrence from h0 = c0 = 0 over `inputs` (time_steps *
/// n_features values, step-major). Throws ShapeError on a length mismatch.
ForwardCache forward(const LstmModel& m, std::span<const double> inputs);

/// forward() without keeping the cache.
double predict(const LstmModel& m, std::span<const double> inputs);

/// Binary cross-entropy with the probability clamped to [eps, 1 - eps].
double bce_loss(double p, int y);

/// Exact BCE gradient for one sample by backpropagation through time.
LstmModel backward(const LstmModel& m, const ForwardCache& cache, int y);

/// Adds `scale` times the gradient of one sample into `grads`.
void accumulate_gradients(const LstmModel& m, const ForwardCache& cache, int y, double scale,
                          LstmModel& grads);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  LstmModel first_moment;
  LstmModel second_moment;
  std::uint64_t step = 0;

  static AdamState for_model(const LstmModel& m);
};

/// One bias-corrected Adam update of every parameter; increments state.step.
void adam_step(LstmModel& m, const LstmModel& grads, AdamState& state, const AdamConfig& cfg = {});

/// W and U entries ~ U(-s, s) with s = 1/sqrt(hidden); biases 0 except the
/// forget-gate bias, which starts at 1. Deterministic in `seed`.
LstmModel init_params(std::size_t n_features, std::size_t hidden, std::uint64_t seed,
                      std::size_t time_steps = 1);

/// Raw pattern values scaled into model inputs.
std::vector<double> model_input(std::span<const double> raw);

/// Max over all parameters of |analytic - numeric| / max(|analytic|,
/// |numeric|, 1e-8), with central differences of half-step `delta` on the
/// BCE loss of `sample`. The numeric side is evaluated in long double by a
/// separate forward pass, independent of backward().
double grad_check(const LstmModel& m, const PatternSample& sample, double delta);

}  // namespace wyckoff::nn
