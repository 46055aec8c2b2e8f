#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "covidrhythm/model.hpp"
#include "doctest.h"

using namespace covidrhythm;

namespace {

NetworkConfig toy_config() {
  NetworkConfig cfg;
  cfg.gru_hidden = 8;
  cfg.heads = 2;
  cfg.rhythm_fc = 6;
  cfg.joint_fc = 5;
  cfg.dropout = 0.25;
  cfg.seq_len = 5;
  cfg.sensor_dim = 4;
  cfg.rhythm_dim = 4;
  return cfg;
}

std::vector<Sample> toy_samples(const NetworkConfig& cfg, int n,
                                std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<Sample> out(n);
  for (int i = 0; i < n; ++i) {
    out[i].sensor.resize(cfg.seq_len, cfg.sensor_dim);
    out[i].rhythm.resize(cfg.rhythm_dim);
    for (int t = 0; t < cfg.seq_len; ++t)
      for (int j = 0; j < cfg.sensor_dim; ++j) out[i].sensor(t, j) = dist(rng);
    for (int j = 0; j < cfg.rhythm_dim; ++j) out[i].rhythm(j) = dist(rng);
    out[i].label = i % 2;
  }
  return out;
}

std::vector<const Sample*> ptrs(const std::vector<Sample>& s) {
  std::vector<const Sample*> p;
  for (const auto& x : s) p.push_back(&x);
  return p;
}

// Biases initialize to zero, which parks relu pre-activations exactly on
// the kink for dead rows; nudge them so finite differences are taken at a
// generic point.
void jitter_biases(ModelParams& params, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> dist(-0.2, 0.2);
  for (auto& [name, v] : params.vectors())
    for (Eigen::Index i = 0; i < v->size(); ++i) (*v)(i) = dist(rng);
}

}  // namespace

TEST_CASE("zero weights give probability one half") {
  const auto cfg = toy_config();
  const auto params = ModelParams::zeros(cfg);
  const auto samples = toy_samples(cfg, 3, 1);
  const auto probs = infer(params, ptrs(samples));
  REQUIRE(probs.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(probs(i) == doctest::Approx(0.5));
}

TEST_CASE("inference is deterministic and batch-order independent") {
  const auto cfg = toy_config();
  Rng rng(7);
  const auto params = ModelParams::init(cfg, rng);
  const auto samples = toy_samples(cfg, 4, 2);
  const auto probs = infer(params, ptrs(samples));
  for (int i = 0; i < 4; ++i)
    CHECK(predict_one(params, samples[i]) == doctest::Approx(probs(i)));
  // reversed batch gives the same per-sample outputs
  std::vector<const Sample*> rev = ptrs(samples);
  std::reverse(rev.begin(), rev.end());
  const auto probs_rev = infer(params, rev);
  for (int i = 0; i < 4; ++i)
    CHECK(probs_rev(3 - i) == doctest::Approx(probs(i)).epsilon(1e-15));
}

TEST_CASE("rmsprop single step moves a weight by lr/sqrt(1-rho)") {
  // For the very first step with gradient g: a = (1-rho) g^2,
  // delta = lr * g / (sqrt(a) + eps). g=1, rho=0.9, lr=0.001
  // gives delta ~= 0.001 / sqrt(0.1) = 0.0031623.
  const double g = 1.0, rho = 0.9, lr = 1e-3, eps = 1e-8;
  const double a = (1 - rho) * g * g;
  const double delta = lr * g / (std::sqrt(a) + eps);
  CHECK(delta == doctest::Approx(0.0031623).epsilon(1e-4));
}

TEST_CASE("analytic gradients match central finite differences") {
  auto cfg = toy_config();
  for (bool mean_pool : {true, false}) {
    cfg.mean_pool = mean_pool;
    Rng init_rng(42);
    auto params = ModelParams::init(cfg, init_rng);
    jitter_biases(params, 61);
    const auto samples = toy_samples(cfg, 3, 9);
    const auto batch = ptrs(samples);

    ModelParams grads = ModelParams::zeros(cfg);
    Rng drop(123);
    forward_backward(params, batch, drop, grads);

    const double h = 1e-6;
    auto mats = params.matrices();
    auto gmats = grads.matrices();
    int checked = 0, step = 7;
    for (size_t m = 0; m < mats.size(); ++m) {
      Eigen::MatrixXd& W = *mats[m].second;
      const Eigen::MatrixXd& G = *gmats[m].second;
      for (int i = 0; i < W.size(); i += step) {
        const double orig = W.data()[i];
        W.data()[i] = orig + h;
        Rng r1(123);
        const double lp = forward_loss(params, batch, r1);
        W.data()[i] = orig - h;
        Rng r2(123);
        const double lm = forward_loss(params, batch, r2);
        W.data()[i] = orig;
        const double fd = (lp - lm) / (2 * h);
        const double an = G.data()[i];
        const double denom = std::max(std::abs(an) + std::abs(fd), 1e-4);
        CHECK(std::abs(an - fd) / denom <= 1e-5);
        ++checked;
      }
    }
    auto vecs = params.vectors();
    auto gvecs = grads.vectors();
    for (size_t m = 0; m < vecs.size(); ++m) {
      Eigen::RowVectorXd& b = *vecs[m].second;
      const Eigen::RowVectorXd& G = *gvecs[m].second;
      for (int i = 0; i < b.size(); i += 3) {
        const double orig = b(i);
        b(i) = orig + h;
        Rng r1(123);
        const double lp = forward_loss(params, batch, r1);
        b(i) = orig - h;
        Rng r2(123);
        const double lm = forward_loss(params, batch, r2);
        b(i) = orig;
        const double fd = (lp - lm) / (2 * h);
        const double an = G(i);
        const double denom = std::max(std::abs(an) + std::abs(fd), 1e-4);
        CHECK(std::abs(an - fd) / denom <= 1e-5);
        ++checked;
      }
    }
    CHECK(checked > 50);
  }
}

TEST_CASE("gradients also check out with attention off and single branch") {
  for (int variant = 0; variant < 3; ++variant) {
    auto cfg = toy_config();
    if (variant == 0) cfg.heads = 0;
    if (variant == 1) cfg.rhythm_dim = 0;
    if (variant == 2) cfg.sensor_dim = 0;
    Rng init_rng(4);
    auto params = ModelParams::init(cfg, init_rng);
    jitter_biases(params, 62);
    auto samples = toy_samples(toy_config(), 2, 11);
    if (variant == 1)
      for (auto& s : samples) s.rhythm.resize(0);
    if (variant == 2)
      for (auto& s : samples) s.sensor.resize(0, 0);
    const auto batch = ptrs(samples);

    ModelParams grads = ModelParams::zeros(cfg);
    Rng drop(55);
    forward_backward(params, batch, drop, grads);

    const double h = 1e-6;
    auto mats = params.matrices();
    auto gmats = grads.matrices();
    for (size_t m = 0; m < mats.size(); ++m) {
      Eigen::MatrixXd& W = *mats[m].second;
      const Eigen::MatrixXd& G = *gmats[m].second;
      for (int i = 0; i < W.size(); i += 11) {
        const double orig = W.data()[i];
        W.data()[i] = orig + h;
        Rng r1(55);
        const double lp = forward_loss(params, batch, r1);
        W.data()[i] = orig - h;
        Rng r2(55);
        const double lm = forward_loss(params, batch, r2);
        W.data()[i] = orig;
        const double fd = (lp - lm) / (2 * h);
        const double an = G.data()[i];
        const double denom = std::max(std::abs(an) + std::abs(fd), 1e-4);
        CHECK(std::abs(an - fd) / denom <= 1e-5);
      }
    }
  }
}

TEST_CASE("dropout 0 makes training forward equal inference") {
  auto cfg = toy_config();
  cfg.dropout = 0.0;
  Rng init_rng(3);
  const auto params = ModelParams::init(cfg, init_rng);
  const auto samples = toy_samples(cfg, 4, 5);
  const auto batch = ptrs(samples);
  Rng drop(1);
  const double train_loss = forward_loss(params, batch, drop);
  std::vector<int> labels;
  for (const auto& s : samples) labels.push_back(s.label);
  const double infer_loss = bce_loss(infer(params, batch), labels);
  CHECK(train_loss == doctest::Approx(infer_loss).epsilon(1e-14));
}

TEST_CASE("bce loss hand values") {
  Eigen::VectorXd p(2);
  p << 0.9, 0.2;
  const double expected = -(std::log(0.9) + std::log(0.8)) / 2.0;
  CHECK(bce_loss(p, {1, 0}) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("training drives loss down on a separable toy problem") {
  auto cfg = toy_config();
  cfg.dropout = 0.0;
  cfg.gru_hidden = 12;
  // label is encoded directly in the rhythm vector
  Rng rng(21);
  std::uniform_real_distribution<double> dist(-0.2, 0.2);
  std::vector<Sample> train_set, val_set;
  for (int i = 0; i < 60; ++i) {
    Sample s;
    s.sensor = Eigen::MatrixXd::Zero(cfg.seq_len, cfg.sensor_dim);
    s.rhythm.resize(cfg.rhythm_dim);
    s.label = i % 2;
    for (int j = 0; j < cfg.rhythm_dim; ++j)
      s.rhythm(j) = (s.label ? 1.0 : -1.0) + dist(rng);
    for (int t = 0; t < cfg.seq_len; ++t)
      for (int j = 0; j < cfg.sensor_dim; ++j) s.sensor(t, j) = dist(rng);
    (i < 44 ? train_set : val_set).push_back(s);
  }
  TrainConfig tc;
  tc.lr0 = 0.02;
  tc.lr_decay = 0.97;
  tc.max_epochs = 80;
  tc.rng_seed = 77;
  const auto result = train(train_set, val_set, cfg, tc);
  CHECK(result.best_val_loss < 0.1);
  CHECK(!result.log.empty());
  // same seed reproduces the run exactly
  const auto again = train(train_set, val_set, cfg, tc);
  CHECK(again.best_val_loss == result.best_val_loss);
  CHECK(again.best_epoch == result.best_epoch);
  CHECK((again.params.Wout - result.params.Wout).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("training rejects a single-class set") {
  const auto cfg = toy_config();
  auto samples = toy_samples(cfg, 6, 8);
  for (auto& s : samples) s.label = 1;
  TrainConfig tc;
  CHECK_THROWS_AS(
      train(samples, {samples[0], samples[1]}, cfg, tc), DataError);
}

TEST_CASE("serialization round-trips bit-exactly") {
  const auto cfg = toy_config();
  Rng rng(99);
  const auto params = ModelParams::init(cfg, rng);
  const auto restored = ModelParams::from_json(params.to_json(42));
  CHECK(restored.config.gru_hidden == cfg.gru_hidden);
  CHECK(restored.config.heads == cfg.heads);
  auto a = const_cast<ModelParams&>(params).matrices();
  auto b = restored.config.gru_hidden >= 0
               ? const_cast<ModelParams&>(restored).matrices()
               : decltype(a){};
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].second->size() == b[i].second->size());
    for (int j = 0; j < a[i].second->size(); ++j)
      CHECK(a[i].second->data()[j] == b[i].second->data()[j]);
  }
  const auto samples = toy_samples(cfg, 2, 3);
  const auto p1 = infer(params, ptrs(samples));
  const auto p2 = infer(restored, ptrs(samples));
  CHECK((p1 - p2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("config validation") {
  auto cfg = toy_config();
  cfg.heads = 3;  // must divide hidden (8)
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = toy_config();
  cfg.dropout = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = toy_config();
  cfg.sensor_dim = 0;
  cfg.rhythm_dim = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
