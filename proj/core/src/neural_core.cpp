#include "wyckoff/neural_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wyckoff/errors.hpp"
#include "wyckoff/random.hpp"

namespace wyckoff::nn {

std::string_view gate_name(Gate g) {
  switch (g) {
    case Gate::Input: return "input";
    case Gate::Forget: return "forget";
    case Gate::Candidate: return "candidate";
    case Gate::Output: return "output";
  }
  return "?";
}

LstmModel LstmModel::zeros(std::size_t n_features, std::size_t hidden, std::size_t time_steps) {
  if (n_features == 0 || hidden == 0 || time_steps == 0) {
    throw std::invalid_argument("LstmModel: dimensions must be positive");
  }
  LstmModel m;
  m.n_features = n_features;
  m.hidden = hidden;
  m.time_steps = time_steps;
  for (auto& g : m.gates) {
    g.input_weights = Matrix(hidden, n_features);
    g.recurrent_weights = Matrix(hidden, hidden);
    g.bias.assign(hidden, 0.0);
  }
  m.dense_w.assign(hidden, 0.0);
  m.dense_b = 0.0;
  return m;
}

namespace {

constexpr std::array<std::string_view, kGateCount> kWNames{"W_input", "W_forget", "W_candidate",
                                                           "W_output"};
constexpr std::array<std::string_view, kGateCount> kUNames{"U_input", "U_forget", "U_candidate",
                                                           "U_output"};
constexpr std::array<std::string_view, kGateCount> kBNames{"b_input", "b_forget", "b_candidate",
                                                           "b_output"};

template <typename T, typename Model>
std::vector<TensorRef<T>> collect(Model& m) {
  std::vector<TensorRef<T>> out;
  out.reserve(3 * kGateCount + 2);
  for (std::size_t g = 0; g < kGateCount; ++g) {
    auto& gp = m.gates[g];
    out.push_back({kWNames[g], gp.input_weights.rows, gp.input_weights.cols,
                   std::span<T>(gp.input_weights.data)});
    out.push_back({kUNames[g], gp.recurrent_weights.rows, gp.recurrent_weights.cols,
                   std::span<T>(gp.recurrent_weights.data)});
    out.push_back({kBNames[g], gp.bias.size(), 1, std::span<T>(gp.bias)});
  }
  out.push_back({"dense_w", 1, m.dense_w.size(), std::span<T>(m.dense_w)});
  out.push_back({"dense_b", 1, 1, std::span<T>(&m.dense_b, 1)});
  return out;
}

void require_same_shape(const LstmModel& a, const LstmModel& b, const char* who) {
  if (a.n_features != b.n_features || a.hidden != b.hidden) {
    throw ShapeError(std::string(who) + ": shape mismatch (" + std::to_string(a.n_features) +
                     "x" + std::to_string(a.hidden) + " vs " + std::to_string(b.n_features) +
                     "x" + std::to_string(b.hidden) + ")");
  }
}

// out = W x (+ U h) + b for one gate.
void pre_activation(const GateParams& gp, std::span<const double> x, const double* h_prev,
                    std::vector<double>& out) {
  const std::size_t hidden = gp.bias.size();
  const std::size_t nf = gp.input_weights.cols;
  out.resize(hidden);
  for (std::size_t r = 0; r < hidden; ++r) {
    double acc = gp.bias[r];
    const double* w = &gp.input_weights.data[r * nf];
    for (std::size_t c = 0; c < nf; ++c) acc += w[c] * x[c];
    if (h_prev != nullptr) {
      const double* u = &gp.recurrent_weights.data[r * hidden];
      for (std::size_t c = 0; c < hidden; ++c) acc += u[c] * h_prev[c];
    }
    out[r] = acc;
  }
}

}  // namespace

std::vector<TensorRef<double>> tensors(LstmModel& m) { return collect<double>(m); }
std::vector<TensorRef<const double>> tensors(const LstmModel& m) {
  return collect<const double>(m);
}

void validate_shapes(const LstmModel& m) {
  if (m.n_features == 0 || m.hidden == 0 || m.time_steps == 0) {
    throw ShapeError("model dimensions must be positive");
  }
  const auto expect = [](std::string_view name, std::size_t got, std::size_t want) {
    if (got != want) {
      throw ShapeError("tensor " + std::string(name) + ": expected " + std::to_string(want) +
                       " entries, got " + std::to_string(got));
    }
  };
  for (std::size_t g = 0; g < kGateCount; ++g) {
    const auto& gp = m.gates[g];
    expect(kWNames[g], gp.input_weights.data.size(), m.hidden * m.n_features);
    if (gp.input_weights.rows != m.hidden || gp.input_weights.cols != m.n_features) {
      throw ShapeError("tensor " + std::string(kWNames[g]) + ": wrong dimensions");
    }
    expect(kUNames[g], gp.recurrent_weights.data.size(), m.hidden * m.hidden);
    if (gp.recurrent_weights.rows != m.hidden || gp.recurrent_weights.cols != m.hidden) {
      throw ShapeError("tensor " + std::string(kUNames[g]) + ": wrong dimensions");
    }
    expect(kBNames[g], gp.bias.size(), m.hidden);
  }
  expect("dense_w", m.dense_w.size(), m.hidden);
}

bool all_finite(const LstmModel& m) {
  for (const auto& t : tensors(m)) {
    for (double v : t.data) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

std::size_t parameter_count(const LstmModel& m) {
  std::size_t n = 0;
  for (const auto& t : tensors(m)) n += t.data.size();
  return n;
}

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

ForwardCache forward(const LstmModel& m, std::span<const double> inputs) {
  if (inputs.size() != m.pattern_width()) {
    throw ShapeError("forward: expected " + std::to_string(m.pattern_width()) +
                     " input values, got " + std::to_string(inputs.size()));
  }
  const std::size_t hidden = m.hidden;
  ForwardCache cache;
  cache.steps.resize(m.time_steps);

  std::vector<double> pre;
  for (std::size_t t = 0; t < m.time_steps; ++t) {
    StepCache& s = cache.steps[t];
    const auto x = inputs.subspan(t * m.n_features, m.n_features);
    s.x.assign(x.begin(), x.end());
    // h0 = 0, so the recurrent term vanishes on the first step.
    const double* h_prev = t == 0 ? nullptr : cache.steps[t - 1].hidden.data();
    const double* c_prev = t == 0 ? nullptr : cache.steps[t - 1].cell.data();

    pre_activation(m.gate(Gate::Input), x, h_prev, pre);
    s.input_gate.resize(hidden);
    for (std::size_t r = 0; r < hidden; ++r) s.input_gate[r] = sigmoid(pre[r]);

    pre_activation(m.gate(Gate::Forget), x, h_prev, pre);
    s.forget_gate.resize(hidden);
    for (std::size_t r = 0; r < hidden; ++r) s.forget_gate[r] = sigmoid(pre[r]);

    pre_activation(m.gate(Gate::Candidate), x, h_prev, pre);
    s.candidate.resize(hidden);
    for (std::size_t r = 0; r < hidden; ++r) s.candidate[r] = std::tanh(pre[r]);

    pre_activation(m.gate(Gate::Output), x, h_prev, pre);
    s.output_gate.resize(hidden);
    for (std::size_t r = 0; r < hidden; ++r) s.output_gate[r] = sigmoid(pre[r]);

    s.cell.resize(hidden);
    s.hidden.resize(hidden);
    for (std::size_t r = 0; r < hidden; ++r) {
      const double carried = c_prev == nullptr ? 0.0 : s.forget_gate[r] * c_prev[r];
      s.cell[r] = carried + s.input_gate[r] * s.candidate[r];
      s.hidden[r] = s.output_gate[r] * std::tanh(s.cell[r]);
    }
  }

  const auto& h_last = cache.steps.back().hidden;
  double z = m.dense_b;
  for (std::size_t r = 0; r < hidden; ++r) z += m.dense_w[r] * h_last[r];
  cache.logit = z;
  cache.probability = sigmoid(z);
  return cache;
}

double predict(const LstmModel& m, std::span<const double> inputs) {
  return forward(m, inputs).probability;
}

double bce_loss(double p, int y) {
  const double q = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
  return y != 0 ? -std::log(q) : -std::log1p(-q);
}

void accumulate_gradients(const LstmModel& m, const ForwardCache& cache, int y, double scale,
                          LstmModel& grads) {
  require_same_shape(m, grads, "accumulate_gradients");
  if (cache.steps.size() != m.time_steps || cache.steps.empty() ||
      cache.steps.front().hidden.size() != m.hidden ||
      cache.steps.front().x.size() != m.n_features) {
    throw ShapeError("backward: cache does not match model");
  }
  const std::size_t hidden = m.hidden;
  const std::size_t nf = m.n_features;

  // d loss / d logit for sigmoid + BCE.
  const double dz = scale * (cache.probability - (y != 0 ? 1.0 : 0.0));
  const auto& h_last = cache.steps.back().hidden;
  for (std::size_t r = 0; r < hidden; ++r) grads.dense_w[r] += dz * h_last[r];
  grads.dense_b += dz;

  std::vector<double> dh(hidden), dc(hidden, 0.0), dh_prev(hidden);
  for (std::size_t r = 0; r < hidden; ++r) dh[r] = dz * m.dense_w[r];

  std::array<std::vector<double>, kGateCount> da;
  for (auto& v : da) v.resize(hidden);

  for (std::size_t t = m.time_steps; t-- > 0;) {
    const StepCache& s = cache.steps[t];
    const double* c_prev = t == 0 ? nullptr : cache.steps[t - 1].cell.data();
    const double* h_prev = t == 0 ? nullptr : cache.steps[t - 1].hidden.data();

    for (std::size_t r = 0; r < hidden; ++r) {
      const double tc = std::tanh(s.cell[r]);
      const double d_out = dh[r] * tc;
      const double d_cell = dc[r] + dh[r] * s.output_gate[r] * (1.0 - tc * tc);
      const double d_in = d_cell * s.candidate[r];
      const double d_cand = d_cell * s.input_gate[r];
      const double d_forget = c_prev == nullptr ? 0.0 : d_cell * c_prev[r];

      da[0][r] = d_in * s.input_gate[r] * (1.0 - s.input_gate[r]);
      da[1][r] = d_forget * s.forget_gate[r] * (1.0 - s.forget_gate[r]);
      da[2][r] = d_cand * (1.0 - s.candidate[r] * s.candidate[r]);
      da[3][r] = d_out * s.output_gate[r] * (1.0 - s.output_gate[r]);

      dc[r] = d_cell * s.forget_gate[r];
    }

    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    for (std::size_t g = 0; g < kGateCount; ++g) {
      GateParams& gg = grads.gates[g];
      const GateParams& gp = m.gates[g];
      for (std::size_t r = 0; r < hidden; ++r) {
        const double a = da[g][r];
        if (a == 0.0) continue;
        gg.bias[r] += a;
        double* w = &gg.input_weights.data[r * nf];
        for (std::size_t c = 0; c < nf; ++c) w[c] += a * s.x[c];
        if (h_prev != nullptr) {
          double* u = &gg.recurrent_weights.data[r * hidden];
          const double* up = &gp.recurrent_weights.data[r * hidden];
          for (std::size_t c = 0; c < hidden; ++c) {
            u[c] += a * h_prev[c];
            dh_prev[c] += up[c] * a;
          }
        }
      }
    }
    dh.swap(dh_prev);
  }
}

LstmModel backward(const LstmModel& m, const ForwardCache& cache, int y) {
  LstmModel grads = LstmModel::zeros(m.n_features, m.hidden, m.time_steps);
  accumulate_gradients(m, cache, y, 1.0, grads);
  return grads;
}

AdamState AdamState::for_model(const LstmModel& m) {
  AdamState s;
  s.first_moment = LstmModel::zeros(m.n_features, m.hidden, m.time_steps);
  s.second_moment = LstmModel::zeros(m.n_features, m.hidden, m.time_steps);
  s.step = 0;
  return s;
}

void adam_step(LstmModel& m, const LstmModel& grads, AdamState& state, const AdamConfig& cfg) {
  require_same_shape(m, grads, "adam_step");
  require_same_shape(m, state.first_moment, "adam_step");
  require_same_shape(m, state.second_moment, "adam_step");

  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(cfg.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg.beta2, t);

  auto params = tensors(m);
  const auto g = tensors(grads);
  auto m1 = tensors(state.first_moment);
  auto m2 = tensors(state.second_moment);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto p = params[k].data;
    const auto gk = g[k].data;
    auto mk = m1[k].data;
    auto vk = m2[k].data;
    for (std::size_t j = 0; j < p.size(); ++j) {
      mk[j] = cfg.beta1 * mk[j] + (1.0 - cfg.beta1) * gk[j];
      vk[j] = cfg.beta2 * vk[j] + (1.0 - cfg.beta2) * gk[j] * gk[j];
      const double m_hat = mk[j] / correction1;
      const double v_hat = vk[j] / correction2;
      p[j] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
  }
}

LstmModel init_params(std::size_t n_features, std::size_t hidden, std::uint64_t seed,
                      std::size_t time_steps) {
  LstmModel m = LstmModel::zeros(n_features, hidden, time_steps);
  const double s = 1.0 / std::sqrt(static_cast<double>(hidden));
  Rng rng(seed);
  for (auto& gp : m.gates) {
    for (double& w : gp.input_weights.data) w = rng.uniform(-s, s);
    for (double& u : gp.recurrent_weights.data) u = rng.uniform(-s, s);
  }
  for (double& w : m.dense_w) w = rng.uniform(-s, s);
  std::fill(m.gate(Gate::Forget).bias.begin(), m.gate(Gate::Forget).bias.end(), 1.0);
  return m;
}

std::vector<double> model_input(std::span<const double> raw) {
  std::vector<double> x(raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) x[j] = raw[j] / kInputScale;
  return x;
}

namespace {

// Loss evaluation in extended precision for the finite-difference side of
// grad_check. Parameters live in one flat array in tensors() order.
using Ext = long double;

struct ExtLayout {
  std::size_t n_features, hidden, time_steps;
  std::array<std::size_t, kGateCount> w, u, b;
  std::size_t dense_w, dense_b;
};

ExtLayout ext_layout(const LstmModel& m) {
  ExtLayout l{m.n_features, m.hidden, m.time_steps, {}, {}, {}, 0, 0};
  std::size_t off = 0;
  for (std::size_t g = 0; g < kGateCount; ++g) {
    l.w[g] = off;
    off += m.hidden * m.n_features;
    l.u[g] = off;
    off += m.hidden * m.hidden;
    l.b[g] = off;
    off += m.hidden;
  }
  l.dense_w = off;
  off += m.hidden;
  l.dense_b = off;
  return l;
}

Ext ext_sigmoid(Ext x) {
  if (x >= 0) return 1 / (1 + std::exp(-x));
  const Ext e = std::exp(x);
  return e / (1 + e);
}

Ext ext_loss(const ExtLayout& l, const std::vector<Ext>& p, std::span<const double> x, int y) {
  const std::size_t H = l.hidden;
  std::vector<Ext> h(H, 0), c(H, 0), h_next(H);
  std::array<std::vector<Ext>, kGateCount> act;
  for (auto& a : act) a.resize(H);
  for (std::size_t t = 0; t < l.time_steps; ++t) {
    const auto xt = x.subspan(t * l.n_features, l.n_features);
    for (std::size_t g = 0; g < kGateCount; ++g) {
      for (std::size_t r = 0; r < H; ++r) {
        Ext acc = p[l.b[g] + r];
        for (std::size_t k = 0; k < l.n_features; ++k) {
          acc += p[l.w[g] + r * l.n_features + k] * static_cast<Ext>(xt[k]);
        }
        for (std::size_t k = 0; k < H; ++k) acc += p[l.u[g] + r * H + k] * h[k];
        act[g][r] = g == static_cast<std::size_t>(Gate::Candidate) ? std::tanh(acc)
                                                                   : ext_sigmoid(acc);
      }
    }
    for (std::size_t r = 0; r < H; ++r) {
      c[r] = act[1][r] * c[r] + act[0][r] * act[2][r];
      h_next[r] = act[3][r] * std::tanh(c[r]);
    }
    h.swap(h_next);
  }
  Ext z = p[l.dense_b];
  for (std::size_t r = 0; r < H; ++r) z += p[l.dense_w + r] * h[r];
  const Ext eps = static_cast<Ext>(kProbClamp);
  const Ext q = std::clamp(ext_sigmoid(z), eps, 1 - eps);
  return y != 0 ? -std::log(q) : -std::log1p(-q);
}

}  // namespace

double grad_check(const LstmModel& m, const PatternSample& sample, double delta) {
  if (!(delta >= 1e-7 && delta <= 1e-3)) {
    throw std::invalid_argument("grad_check: delta must lie in [1e-7, 1e-3]");
  }
  const auto x = model_input(sample.values);
  if (x.size() != m.pattern_width()) {
    throw ShapeError("grad_check: sample width does not match model");
  }
  const LstmModel analytic = backward(m, forward(m, x), sample.label);

  const ExtLayout layout = ext_layout(m);
  std::vector<Ext> flat;
  std::vector<double> flat_analytic;
  flat.reserve(parameter_count(m));
  for (const auto& t : tensors(m)) flat.insert(flat.end(), t.data.begin(), t.data.end());
  for (const auto& t : tensors(analytic)) {
    flat_analytic.insert(flat_analytic.end(), t.data.begin(), t.data.end());
  }

  const Ext step = static_cast<Ext>(delta);
  double worst = 0.0;
  for (std::size_t j = 0; j < flat.size(); ++j) {
    const Ext saved = flat[j];
    flat[j] = saved + step;
    const Ext up = ext_loss(layout, flat, x, sample.label);
    flat[j] = saved - step;
    const Ext down = ext_loss(layout, flat, x, sample.label);
    flat[j] = saved;

    const double numeric = static_cast<double>((up - down) / (2 * step));
    const double a = flat_analytic[j];
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(a - numeric) / denom);
  }
  return worst;
}

}  // namespace wyckoff::nn
