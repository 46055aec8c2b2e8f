#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "covidrhythm/errors.hpp"
#include "covidrhythm/rng.hpp"

namespace covidrhythm {

struct NetworkConfig {
  int gru_hidden = 256;
  int heads = 2;  // 0 bypasses the attention block entirely
  int rhythm_fc = 256;
  int joint_fc = 128;
  double dropout = 0.25;
  int seq_len = 47;
  int sensor_dim = 10;  // 0 disables the sensor (GRU+MHSA) branch
  int rhythm_dim = 10;  // 0 disables the rhythm branch
  bool mean_pool = true;     // else take the last timestep
  bool rhythm_relu = true;   // else the rhythm dense layer is linear

  void validate() const;
  int joint_input_dim() const;
};

// All trainable tensors. Matrices use the row-vector convention
// (activations are rows, layers multiply on the right).
struct ModelParams {
  NetworkConfig config;

  // GRU gates: update (z), reset (r), candidate (c).
  Eigen::MatrixXd Wz, Wr, Wc;  // sensor_dim x hidden
  Eigen::MatrixXd Uz, Ur, Uc;  // hidden x hidden
  Eigen::RowVectorXd bz, br, bc;

  // Attention projections, heads packed into column blocks.
  Eigen::MatrixXd Wq, Wk, Wv, Wo;  // hidden x hidden

  Eigen::MatrixXd Wrh;  // rhythm_dim x rhythm_fc
  Eigen::RowVectorXd brh;

  Eigen::MatrixXd W1, W2;  // joint layers
  Eigen::RowVectorXd b1, b2;
  Eigen::MatrixXd Wout;  // joint_fc x 1
  Eigen::RowVectorXd bout;

  static ModelParams zeros(const NetworkConfig& cfg);
  static ModelParams init(const NetworkConfig& cfg, Rng& rng);

  // Named views over every trainable tensor, in a stable order.
  std::vector<std::pair<std::string, Eigen::MatrixXd*>> matrices();
  std::vector<std::pair<std::string, Eigen::RowVectorXd*>> vectors();

  std::string to_json(std::uint64_t seed = 0) const;
  static ModelParams from_json(const std::string& text);
  void save(const std::string& path, std::uint64_t seed = 0) const;
  static ModelParams load(const std::string& path);
};

struct Sample {
  Eigen::MatrixXd sensor;      // seq_len x sensor_dim
  Eigen::RowVectorXd rhythm;   // 1 x rhythm_dim
  int label = 0;               // 1 = infected
};

// Forward pass over a batch. In train mode dropout masks are drawn from the
// provided RNG (inverted dropout, so inference applies no scaling).
struct ForwardCache;  // opaque, defined in the .cpp

Eigen::VectorXd infer(const ModelParams& params,
                      const std::vector<const Sample*>& batch);
double predict_one(const ModelParams& params, const Sample& sample);

// Train-mode forward + backward; returns mean BCE loss over the batch and
// fills `grads` (same shapes as params) with d(mean loss)/d(param).
double forward_backward(const ModelParams& params,
                        const std::vector<const Sample*>& batch,
                        Rng& dropout_rng, ModelParams& grads);

// Train-mode forward only (identical dropout stream); used by the
// finite-difference gradient check.
double forward_loss(const ModelParams& params,
                    const std::vector<const Sample*>& batch,
                    Rng& dropout_rng);

double bce_loss(const Eigen::VectorXd& probs, const std::vector<int>& labels);

struct TrainConfig {
  int batch_size = 8;
  double lr0 = 0.001;
  double lr_decay = 0.9;  // per-epoch exponential
  double rho = 0.9;
  double eps = 1e-8;
  int max_epochs = 100;
  int patience = 10;
  std::uint64_t rng_seed = 0;
};

struct EpochLog {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  ModelParams params;  // best-validation weights
  std::vector<EpochLog> log;
  int best_epoch = 0;
  double best_val_loss = 0.0;
};

// Mini-batch RMSProp on BCE with per-epoch exponential LR decay and
// patience-based early stopping on validation loss (best weights restored).
TrainResult train(const std::vector<Sample>& train_set,
                  const std::vector<Sample>& val_set,
                  const NetworkConfig& net, const TrainConfig& tc);

}  // namespace covidrhythm
