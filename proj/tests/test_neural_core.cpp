#include "doctest.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "wyckoff/errors.hpp"
#include "wyckoff/neural_core.hpp"
#include "wyckoff/pattern_synth.hpp"

using namespace wyckoff;
using namespace wyckoff::nn;

namespace {

LstmModel perturbed_model(std::size_t nf, std::size_t hidden, std::size_t steps, std::uint64_t seed,
                          double spread) {
  LstmModel m = init_params(nf, hidden, seed, steps);
  Rng rng(seed ^ 0xABCDEF);
  for (auto& t : tensors(m)) {
    for (double& v : t.data) v += rng.uniform(-spread, spread);
  }
  return m;
}

std::vector<double> random_input(Rng& rng, std::size_t n) {
  std::vector<double> x(n);
  for (double& v : x) v = rng.uniform01();
  return x;
}

}  // namespace

TEST_SUITE("sigmoid") {
  TEST_CASE("symmetry point and saturation") {
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(sigmoid(500.0) == 1.0);
    CHECK(sigmoid(-1000.0) >= 0.0);
    CHECK(std::isfinite(sigmoid(-1000.0)));
    CHECK(std::isfinite(sigmoid(1000.0)));
    CHECK(sigmoid(-745.0) > 0.0);
  }

  TEST_CASE("sigmoid(x) + sigmoid(-x) = 1") {
    for (double x = -30.0; x <= 30.0; x += 0.37) {
      CHECK(std::abs(sigmoid(x) + sigmoid(-x) - 1.0) <= 1e-15);
    }
  }

  TEST_CASE("matches the closed form in the safe range") {
    for (double x = -20.0; x <= 20.0; x += 0.5) {
      CHECK(sigmoid(x) == doctest::Approx(1.0 / (1.0 + std::exp(-x))).epsilon(1e-14));
    }
  }
}

TEST_SUITE("bce_loss") {
  TEST_CASE("reference values") {
    CHECK(bce_loss(1.0 - kProbClamp, 1) < 1e-11);
    CHECK(bce_loss(0.5, 1) == doctest::Approx(std::log(2.0)));
    CHECK(bce_loss(0.5, 0) == doctest::Approx(0.6931471805599453));
    CHECK(bce_loss(kProbClamp, 1) == doctest::Approx(-std::log(1e-12)));
    CHECK(bce_loss(kProbClamp, 1) == doctest::Approx(27.631021115928547));
    CHECK(std::isfinite(bce_loss(0.0, 1)));
    CHECK(std::isfinite(bce_loss(1.0, 0)));
  }

  TEST_CASE("non-negative everywhere") {
    for (double p = 0.0; p <= 1.0; p += 0.01) {
      CHECK(bce_loss(p, 0) >= 0.0);
      CHECK(bce_loss(p, 1) >= 0.0);
    }
  }
}

TEST_SUITE("forward") {
  TEST_CASE("all-zero parameters give probability 0.5") {
    const auto m = LstmModel::zeros(4, 8);
    const auto cache = forward(m, std::vector<double>{0.3, 0.1, 0.9, 0.5});
    CHECK(cache.probability == 0.5);
    for (double h : cache.steps.back().hidden) CHECK(h == 0.0);
  }

  TEST_CASE("hand-computed single-step model") {
    auto m = LstmModel::zeros(2, 1);
    m.gate(Gate::Input).input_weights.data = {0.5, -0.25};
    m.gate(Gate::Input).bias = {0.1};
    m.gate(Gate::Forget).input_weights.data = {3.0, -7.0};
    m.gate(Gate::Candidate).input_weights.data = {1.0, 0.5};
    m.gate(Gate::Candidate).bias = {-0.2};
    m.gate(Gate::Output).input_weights.data = {-0.3, 0.8};
    m.gate(Gate::Output).bias = {0.05};
    m.dense_w = {2.0};
    m.dense_b = -0.5;
    // i = s(0.15), g = tanh(0.5), o = s(0.41), c = i g, h = o tanh(c), p = s(2h - 0.5)
    CHECK(predict(m, std::vector<double>{0.4, 0.6}) ==
          doctest::Approx(0.44832917761610835).epsilon(1e-14));
  }

  TEST_CASE("hand-computed two-step recurrence") {
    auto m = LstmModel::zeros(1, 1, 2);
    const auto set = [&](Gate g, double w, double u, double b) {
      m.gate(g).input_weights.data = {w};
      m.gate(g).recurrent_weights.data = {u};
      m.gate(g).bias = {b};
    };
    set(Gate::Input, 0.5, -0.4, 0.1);
    set(Gate::Forget, 0.3, 0.2, 1.0);
    set(Gate::Candidate, 1.0, 0.7, -0.2);
    set(Gate::Output, -0.3, 0.6, 0.05);
    m.dense_w = {2.0};
    m.dense_b = -0.5;
    CHECK(predict(m, std::vector<double>{0.4, 0.6}) ==
          doctest::Approx(0.45123577863118686).epsilon(1e-14));
  }

  TEST_CASE("single step: the forget gate has no effect") {
    auto m = init_params(4, 16, 3);
    const std::vector<double> x{0.8, 0.2, 0.6, 0.4};
    const double base = predict(m, x);
    for (double& w : m.gate(Gate::Forget).input_weights.data) w += 0.77;
    for (double& b : m.gate(Gate::Forget).bias) b -= 3.0;
    CHECK(predict(m, x) == base);
  }

  TEST_CASE("activation ranges and first-step cell bound") {
    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
      const auto m = perturbed_model(10, 8, 1, 100 + trial, 2.0);
      const auto cache = forward(m, random_input(rng, 10));
      const auto& s = cache.steps[0];
      for (std::size_t r = 0; r < 8; ++r) {
        REQUIRE((s.input_gate[r] > 0.0 && s.input_gate[r] < 1.0));
        REQUIRE((s.forget_gate[r] > 0.0 && s.forget_gate[r] < 1.0));
        REQUIRE((s.output_gate[r] > 0.0 && s.output_gate[r] < 1.0));
        REQUIRE((s.candidate[r] > -1.0 && s.candidate[r] < 1.0));
        REQUIRE(std::abs(s.cell[r]) <= 1.0);
      }
      REQUIRE((cache.probability > 0.0 && cache.probability < 1.0));
    }
  }

  TEST_CASE("cell state grows at most one per step") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      const auto m = perturbed_model(1, 6, 10, 200 + trial, 3.0);
      const auto cache = forward(m, random_input(rng, 10));
      for (std::size_t t = 0; t < 10; ++t) {
        for (double c : cache.steps[t].cell) REQUIRE(std::abs(c) <= static_cast<double>(t + 1));
      }
    }
  }

  TEST_CASE("pure: repeated calls are bitwise identical") {
    const auto m = init_params(4, 64, 9);
    const std::vector<double> x{0.9, 0.1, 0.5, 0.3};
    const auto a = forward(m, x);
    const auto b = forward(m, x);
    CHECK(a.probability == b.probability);
    CHECK(a.logit == b.logit);
    CHECK(a.steps[0].hidden == b.steps[0].hidden);
  }

  TEST_CASE("input length mismatch") {
    const auto m = init_params(4, 4, 1);
    CHECK_THROWS_AS(forward(m, std::vector<double>{1, 2, 3}), ShapeError);
    const auto seq = init_params(1, 4, 1, 4);
    CHECK_NOTHROW(forward(seq, std::vector<double>{1, 2, 3, 4}));
  }

  TEST_CASE("positive rescaling of the head preserves the 0.5 decision") {
    Rng rng(6);
    for (int trial = 0; trial < 50; ++trial) {
      auto m = perturbed_model(4, 8, 1, 300 + trial, 1.0);
      const auto x = random_input(rng, 4);
      const bool before = predict(m, x) >= 0.5;
      const double scale = 0.01 + rng.uniform(0.0, 20.0);
      for (double& w : m.dense_w) w *= scale;
      m.dense_b *= scale;
      CHECK((predict(m, x) >= 0.5) == before);
    }
  }
}

TEST_SUITE("backward") {
  TEST_CASE("dense bias gradient is p - y") {
    const auto m = init_params(4, 8, 11);
    const std::vector<double> x{0.2, 0.4, 0.6, 0.8};
    const auto cache = forward(m, x);
    CHECK(backward(m, cache, 1).dense_b == doctest::Approx(cache.probability - 1.0));
    CHECK(backward(m, cache, 0).dense_b == doctest::Approx(cache.probability));
  }

  TEST_CASE("single step: forget-gate and recurrent gradients are exactly zero") {
    const auto m = perturbed_model(4, 8, 1, 12, 1.0);
    const auto g = backward(m, forward(m, std::vector<double>{0.2, 0.4, 0.6, 0.8}), 1);
    const auto& fg = g.gate(Gate::Forget);
    for (double v : fg.input_weights.data) CHECK(v == 0.0);
    for (double v : fg.recurrent_weights.data) CHECK(v == 0.0);
    for (double v : fg.bias) CHECK(v == 0.0);
    for (const auto& gp : g.gates) {
      for (double v : gp.recurrent_weights.data) CHECK(v == 0.0);
    }
  }

  TEST_CASE("accumulate_gradients sums scaled per-sample gradients") {
    const auto m = perturbed_model(1, 3, 4, 13, 0.5);
    const std::vector<double> x1{0.1, 0.2, 0.3, 0.4}, x2{0.9, 0.7, 0.5, 0.3};
    auto acc = LstmModel::zeros(1, 3, 4);
    accumulate_gradients(m, forward(m, x1), 1, 0.5, acc);
    accumulate_gradients(m, forward(m, x2), 0, 0.5, acc);
    const auto g1 = backward(m, forward(m, x1), 1);
    const auto g2 = backward(m, forward(m, x2), 0);
    const auto a = tensors(acc);
    const auto t1 = tensors(g1);
    const auto t2 = tensors(g2);
    for (std::size_t k = 0; k < a.size(); ++k) {
      for (std::size_t j = 0; j < a[k].data.size(); ++j) {
        CHECK(a[k].data[j] == doctest::Approx(0.5 * (t1[k].data[j] + t2[k].data[j])));
      }
    }
  }

  TEST_CASE("cache/model mismatch is rejected") {
    const auto m = init_params(4, 8, 1);
    const auto other = init_params(4, 6, 1);
    const auto cache = forward(other, std::vector<double>{0.1, 0.2, 0.3, 0.4});
    CHECK_THROWS_AS(backward(m, cache, 1), ShapeError);
  }
}

TEST_SUITE("grad_check") {
  TEST_CASE("randomized small models, whole-pattern and sequential") {
    Rng rng(21);
    int trials = 0;
    for (std::size_t hidden : {2u, 4u, 8u}) {
      for (Phase phase : {Phase::TR, Phase::ST}) {
        for (bool sequential : {false, true}) {
          for (int rep = 0; rep < 2; ++rep) {
            const PatternSample s = phase == Phase::TR ? synth::gen_tr_sample(rng, rep == 0)
                                                       : synth::gen_st_sample(rng);
            const std::size_t width = s.values.size();
            const auto m = sequential ? perturbed_model(1, hidden, width, rng.next(), 0.5)
                                      : perturbed_model(width, hidden, 1, rng.next(), 0.5);
            const double err = grad_check(m, s, 1e-5);
            CHECK(err < 1e-5);
            ++trials;
          }
        }
      }
    }
    CHECK(trials >= 20);
  }

  TEST_CASE("step-size robustness") {
    Rng rng(22);
    for (int trial = 0; trial < 6; ++trial) {
      const auto s = synth::gen_st_sample(rng);
      const auto m = perturbed_model(10, 4, 1, 500 + trial, 0.5);
      CHECK((grad_check(m, s, 1e-5) < 1e-5) == (grad_check(m, s, 1e-6) < 1e-5));
    }
  }

  TEST_CASE("structurally zero gradients contribute zero error") {
    // With every weight zero only dense_b has a gradient; all other entries
    // are exactly zero on both sides of the comparison.
    const auto m = LstmModel::zeros(4, 4);
    const PatternSample s{1, {80, 20, 60, 40}, {}};
    CHECK(grad_check(m, s, 1e-5) < 1e-9);
  }

  TEST_CASE("delta outside [1e-7, 1e-3] is rejected") {
    const auto m = init_params(4, 4, 3);
    const PatternSample s{1, {80, 20, 60, 40}, {}};
    CHECK_THROWS_AS(grad_check(m, s, 1e-2), std::invalid_argument);
    CHECK_THROWS_AS(grad_check(m, s, 1e-8), std::invalid_argument);
  }
}

TEST_SUITE("adam_step") {
  TEST_CASE("first step moves each parameter by about lr in the gradient's opposite sign") {
    auto m = init_params(4, 4, 1);
    const auto before = m;
    auto g = LstmModel::zeros(4, 4);
    Rng rng(31);
    for (auto& t : tensors(g)) {
      for (double& v : t.data) v = rng.uniform(-1.0, 1.0);
    }
    auto state = AdamState::for_model(m);
    adam_step(m, g, state, {.learning_rate = 1e-3});
    CHECK(state.step == 1);
    const auto after = tensors(m);
    const auto prev = tensors(before);
    const auto grads = tensors(g);
    for (std::size_t k = 0; k < after.size(); ++k) {
      for (std::size_t j = 0; j < after[k].data.size(); ++j) {
        const double gj = grads[k].data[j];
        const double expect = -1e-3 * (gj > 0 ? 1.0 : -1.0);
        CHECK(after[k].data[j] - prev[k].data[j] == doctest::Approx(expect).epsilon(1e-4));
      }
    }
  }

  TEST_CASE("zero gradient is a fixed point and moments decay") {
    auto m = init_params(4, 4, 2);
    const auto before = m;
    const auto zero = LstmModel::zeros(4, 4);
    auto state = AdamState::for_model(m);
    adam_step(m, zero, state);
    CHECK(m == before);

    state.first_moment.dense_b = 0.5;
    state.second_moment.dense_b = 0.25;
    adam_step(m, zero, state);
    CHECK(state.first_moment.dense_b == doctest::Approx(0.45));
    CHECK(state.second_moment.dense_b == doctest::Approx(0.24975));
    CHECK(state.second_moment.dense_b >= 0.0);
  }

  TEST_CASE("two steps match the hand-unrolled recurrence") {
    auto m = LstmModel::zeros(1, 1);
    m.dense_b = 0.3;
    auto state = AdamState::for_model(m);
    const AdamConfig cfg{.learning_rate = 0.01, .beta1 = 0.9, .beta2 = 0.999, .epsilon = 1e-8};
    auto g = LstmModel::zeros(1, 1);

    const double g1 = 0.7, g2 = -0.2;
    g.dense_b = g1;
    adam_step(m, g, state, cfg);
    g.dense_b = g2;
    adam_step(m, g, state, cfg);

    const double m1 = 0.1 * g1;
    const double v1 = 0.001 * g1 * g1;
    const double theta1 = 0.3 - 0.01 * (m1 / 0.1) / (std::sqrt(v1 / 0.001) + 1e-8);
    const double m2 = 0.9 * m1 + 0.1 * g2;
    const double v2 = 0.999 * v1 + 0.001 * g2 * g2;
    const double c1 = 1 - 0.9 * 0.9;
    const double c2 = 1 - 0.999 * 0.999;
    const double theta2 = theta1 - 0.01 * (m2 / c1) / (std::sqrt(v2 / c2) + 1e-8);
    CHECK(std::abs(m.dense_b - theta2) <= 1e-12);
    CHECK(std::abs(state.first_moment.dense_b - m2) <= 1e-12);
    CHECK(std::abs(state.second_moment.dense_b - v2) <= 1e-12);
    CHECK(state.step == 2);
  }

  TEST_CASE("shape mismatch") {
    auto m = init_params(4, 4, 1);
    auto state = AdamState::for_model(m);
    CHECK_THROWS_AS(adam_step(m, LstmModel::zeros(4, 5), state), ShapeError);
  }
}

TEST_SUITE("init_params") {
  TEST_CASE("deterministic, bounded, forget bias one") {
    const auto a = init_params(10, 64, 77);
    const auto b = init_params(10, 64, 77);
    const auto c = init_params(10, 64, 78);
    CHECK(a == b);
    CHECK_FALSE(a == c);
    const double s = 1.0 / std::sqrt(64.0);
    for (const auto& gp : a.gates) {
      for (double w : gp.input_weights.data) CHECK(std::abs(w) <= s);
      for (double u : gp.recurrent_weights.data) CHECK(std::abs(u) <= s);
    }
    for (double b : a.gate(Gate::Forget).bias) CHECK(b == 1.0);
    for (Gate g : {Gate::Input, Gate::Candidate, Gate::Output}) {
      for (double b : a.gate(g).bias) CHECK(b == 0.0);
    }
    CHECK(a.dense_b == 0.0);
    validate_shapes(a);
    CHECK(parameter_count(a) == 4 * (64 * 10 + 64 * 64 + 64) + 64 + 1);
  }

  TEST_CASE("tensor names") {
    const auto m = init_params(4, 2, 1);
    std::vector<std::string> names;
    for (const auto& t : tensors(m)) names.emplace_back(t.name);
    CHECK(names == std::vector<std::string>{"W_input", "U_input", "b_input", "W_forget",
                                            "U_forget", "b_forget", "W_candidate", "U_candidate",
                                            "b_candidate", "W_output", "U_output", "b_output",
                                            "dense_w", "dense_b"});
  }
}
