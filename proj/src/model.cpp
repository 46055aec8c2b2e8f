#include "covidrhythm/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace covidrhythm {

namespace {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

inline MatrixXd sigmoid(const MatrixXd& x) {
  return 1.0 / (1.0 + (-x.array()).exp());
}

inline MatrixXd relu(const MatrixXd& x) { return x.array().max(0.0); }

inline MatrixXd relu_grad(const MatrixXd& pre) {
  return (pre.array() > 0.0).cast<double>();
}

}  // namespace

void NetworkConfig::validate() const {
  if (sensor_dim < 0 || rhythm_dim < 0)
    throw ConfigError("negative input dimension");
  if (sensor_dim == 0 && rhythm_dim == 0)
    throw ConfigError("at least one input branch required");
  if (sensor_dim > 0) {
    if (gru_hidden <= 0) throw ConfigError("gru_hidden must be positive");
    if (seq_len <= 0) throw ConfigError("seq_len must be positive");
    if (heads < 0) throw ConfigError("heads must be >= 0");
    if (heads > 0 && gru_hidden % heads != 0)
      throw ConfigError("gru_hidden must be divisible by heads");
  }
  if (rhythm_dim > 0 && rhythm_fc <= 0)
    throw ConfigError("rhythm_fc must be positive");
  if (joint_fc <= 0) throw ConfigError("joint_fc must be positive");
  if (dropout < 0.0 || dropout >= 1.0)
    throw ConfigError("dropout must be in [0,1)");
}

int NetworkConfig::joint_input_dim() const {
  return (sensor_dim > 0 ? gru_hidden : 0) +
         (rhythm_dim > 0 ? rhythm_fc : 0);
}

ModelParams ModelParams::zeros(const NetworkConfig& cfg) {
  cfg.validate();
  ModelParams p;
  p.config = cfg;
  const int I = cfg.sensor_dim, H = cfg.sensor_dim > 0 ? cfg.gru_hidden : 0;
  p.Wz = MatrixXd::Zero(I, H);
  p.Wr = MatrixXd::Zero(I, H);
  p.Wc = MatrixXd::Zero(I, H);
  p.Uz = MatrixXd::Zero(H, H);
  p.Ur = MatrixXd::Zero(H, H);
  p.Uc = MatrixXd::Zero(H, H);
  p.bz = RowVectorXd::Zero(H);
  p.br = RowVectorXd::Zero(H);
  p.bc = RowVectorXd::Zero(H);
  const int A = cfg.heads > 0 ? H : 0;
  p.Wq = MatrixXd::Zero(A, A);
  p.Wk = MatrixXd::Zero(A, A);
  p.Wv = MatrixXd::Zero(A, A);
  p.Wo = MatrixXd::Zero(A, A);
  const int R = cfg.rhythm_dim, F = cfg.rhythm_dim > 0 ? cfg.rhythm_fc : 0;
  p.Wrh = MatrixXd::Zero(R, F);
  p.brh = RowVectorXd::Zero(F);
  const int J0 = cfg.joint_input_dim();
  p.W1 = MatrixXd::Zero(J0, cfg.joint_fc);
  p.b1 = RowVectorXd::Zero(cfg.joint_fc);
  p.W2 = MatrixXd::Zero(cfg.joint_fc, cfg.joint_fc);
  p.b2 = RowVectorXd::Zero(cfg.joint_fc);
  p.Wout = MatrixXd::Zero(cfg.joint_fc, 1);
  p.bout = RowVectorXd::Zero(1);
  return p;
}

ModelParams ModelParams::init(const NetworkConfig& cfg, Rng& rng) {
  ModelParams p = zeros(cfg);
  for (auto& [name, m] : p.matrices()) {
    if (m->rows() == 0 || m->cols() == 0) continue;
    const double bound = 1.0 / std::sqrt(static_cast<double>(m->rows()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index i = 0; i < m->rows(); ++i)
      for (Eigen::Index j = 0; j < m->cols(); ++j) (*m)(i, j) = dist(rng);
  }
  return p;
}

std::vector<std::pair<std::string, MatrixXd*>> ModelParams::matrices() {
  return {{"Wz", &Wz},   {"Wr", &Wr}, {"Wc", &Wc}, {"Uz", &Uz},
          {"Ur", &Ur},   {"Uc", &Uc}, {"Wq", &Wq}, {"Wk", &Wk},
          {"Wv", &Wv},   {"Wo", &Wo}, {"Wrh", &Wrh}, {"W1", &W1},
          {"W2", &W2},   {"Wout", &Wout}};
}

std::vector<std::pair<std::string, RowVectorXd*>> ModelParams::vectors() {
  return {{"bz", &bz}, {"br", &br}, {"bc", &bc}, {"brh", &brh},
          {"b1", &b1}, {"b2", &b2}, {"bout", &bout}};
}

namespace {

// Per-sample attention cache.
struct AttnCache {
  MatrixXd hseq;              // S x H (GRU outputs)
  MatrixXd qf, kf, vf, out;   // S x H
  std::vector<MatrixXd> attn;  // per head, S x S rows summing to 1
};

struct BatchCache {
  int B = 0, S = 0;
  std::vector<MatrixXd> x;             // per t: B x I
  std::vector<MatrixXd> z, r, c, hr;   // per t: B x H
  std::vector<MatrixXd> h;             // S+1 entries, h[0] = 0
  std::vector<AttnCache> attn;         // per sample
  MatrixXd pooled;                     // B x H
  MatrixXd rhythm_in;                  // B x R
  MatrixXd rhythm_pre, rhythm_act;     // B x F
  MatrixXd u0;                         // B x J0
  MatrixXd a1, u1d, a2, u2d;           // joint layers
  MatrixXd mask1, mask2;               // dropout masks (already scaled)
  VectorXd probs;
};

// Runs the forward pass; masks are drawn from `rng` when non-null (train
// mode). Keeps everything backward needs.
BatchCache run_forward(const ModelParams& p,
                       const std::vector<const Sample*>& batch, Rng* rng) {
  const NetworkConfig& cfg = p.config;
  cfg.validate();
  const int B = static_cast<int>(batch.size());
  if (B == 0) throw ShapeError("empty batch");
  BatchCache cache;
  cache.B = B;
  cache.S = cfg.seq_len;
  const int H = cfg.gru_hidden;

  if (cfg.sensor_dim > 0) {
    for (const Sample* s : batch)
      if (s->sensor.rows() != cfg.seq_len || s->sensor.cols() != cfg.sensor_dim)
        throw ShapeError("sensor sequence shape mismatch");
    // --- GRU over the batch, one timestep at a time.
    cache.x.resize(cache.S);
    cache.z.resize(cache.S);
    cache.r.resize(cache.S);
    cache.c.resize(cache.S);
    cache.hr.resize(cache.S);
    cache.h.resize(cache.S + 1);
    cache.h[0] = MatrixXd::Zero(B, H);
    for (int t = 0; t < cache.S; ++t) {
      MatrixXd xt(B, cfg.sensor_dim);
      for (int b = 0; b < B; ++b) xt.row(b) = batch[b]->sensor.row(t);
      cache.x[t] = xt;
      const MatrixXd& hprev = cache.h[t];
      MatrixXd z = sigmoid(((xt * p.Wz + hprev * p.Uz).rowwise() + p.bz));
      MatrixXd r = sigmoid(((xt * p.Wr + hprev * p.Ur).rowwise() + p.br));
      MatrixXd hr = r.array() * hprev.array();
      MatrixXd c = ((xt * p.Wc + hr * p.Uc).rowwise() + p.bc).array().tanh();
      cache.h[t + 1] =
          (1.0 - z.array()) * hprev.array() + z.array() * c.array();
      cache.z[t] = std::move(z);
      cache.r[t] = std::move(r);
      cache.c[t] = std::move(c);
      cache.hr[t] = std::move(hr);
    }

    // --- Attention per sample.
    cache.attn.resize(B);
    cache.pooled = MatrixXd(B, H);
    const int nh = cfg.heads;
    const int dh = nh > 0 ? H / nh : 0;
    const double scale = nh > 0 ? 1.0 / std::sqrt(static_cast<double>(dh)) : 1.0;
    for (int b = 0; b < B; ++b) {
      AttnCache& ac = cache.attn[b];
      ac.hseq = MatrixXd(cache.S, H);
      for (int t = 0; t < cache.S; ++t) ac.hseq.row(t) = cache.h[t + 1].row(b);
      MatrixXd y;
      if (nh == 0) {
        y = ac.hseq;
      } else {
        ac.qf = ac.hseq * p.Wq;
        ac.kf = ac.hseq * p.Wk;
        ac.vf = ac.hseq * p.Wv;
        MatrixXd concat(cache.S, H);
        ac.attn.resize(nh);
        for (int hd = 0; hd < nh; ++hd) {
          const auto q = ac.qf.middleCols(hd * dh, dh);
          const auto k = ac.kf.middleCols(hd * dh, dh);
          const auto v = ac.vf.middleCols(hd * dh, dh);
          MatrixXd scores = q * k.transpose() * scale;
          // row-wise softmax, max-shifted
          MatrixXd a(cache.S, cache.S);
          for (int i = 0; i < cache.S; ++i) {
            const double mx = scores.row(i).maxCoeff();
            Eigen::RowVectorXd e = (scores.row(i).array() - mx).exp();
            a.row(i) = e / e.sum();
          }
          concat.middleCols(hd * dh, dh) = a * v;
          ac.attn[hd] = std::move(a);
        }
        ac.out = concat;
        y = concat * p.Wo;
      }
      if (cfg.mean_pool)
        cache.pooled.row(b) = y.colwise().mean();
      else
        cache.pooled.row(b) = y.row(cache.S - 1);
    }
  }

  if (cfg.rhythm_dim > 0) {
    cache.rhythm_in = MatrixXd(B, cfg.rhythm_dim);
    for (int b = 0; b < B; ++b) {
      if (batch[b]->rhythm.size() != cfg.rhythm_dim)
        throw ShapeError("rhythm vector shape mismatch");
      cache.rhythm_in.row(b) = batch[b]->rhythm;
    }
    cache.rhythm_pre = (cache.rhythm_in * p.Wrh).rowwise() + p.brh;
    cache.rhythm_act =
        cfg.rhythm_relu ? relu(cache.rhythm_pre) : cache.rhythm_pre;
  }

  // --- Joint head.
  const int J0 = cfg.joint_input_dim();
  cache.u0 = MatrixXd(B, J0);
  int col = 0;
  if (cfg.sensor_dim > 0) {
    cache.u0.middleCols(col, cfg.gru_hidden) = cache.pooled;
    col += cfg.gru_hidden;
  }
  if (cfg.rhythm_dim > 0)
    cache.u0.middleCols(col, cfg.rhythm_fc) = cache.rhythm_act;

  auto draw_mask = [&](int cols) {
    MatrixXd m = MatrixXd::Ones(B, cols);
    if (rng != nullptr && cfg.dropout > 0.0) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const double keep = 1.0 - cfg.dropout;
      for (int i = 0; i < B; ++i)
        for (int j = 0; j < cols; ++j)
          m(i, j) = u(*rng) < keep ? 1.0 / keep : 0.0;
    }
    return m;
  };

  cache.a1 = (cache.u0 * p.W1).rowwise() + p.b1;
  cache.mask1 = draw_mask(cfg.joint_fc);
  cache.u1d = relu(cache.a1).array() * cache.mask1.array();
  cache.a2 = (cache.u1d * p.W2).rowwise() + p.b2;
  cache.mask2 = draw_mask(cfg.joint_fc);
  cache.u2d = relu(cache.a2).array() * cache.mask2.array();
  const MatrixXd logits = (cache.u2d * p.Wout).rowwise() + p.bout;
  cache.probs = sigmoid(logits).col(0);
  for (int b = 0; b < B; ++b)
    if (!std::isfinite(cache.probs(b)))
      throw DataError("non-finite activation in forward pass");
  return cache;
}

void run_backward(const ModelParams& p, const std::vector<const Sample*>& batch,
                  const BatchCache& cache, ModelParams& g) {
  const NetworkConfig& cfg = p.config;
  const int B = cache.B;
  const int H = cfg.gru_hidden;

  // d(mean BCE)/d(logit) = (prob - label) / B
  MatrixXd dlogit(B, 1);
  for (int b = 0; b < B; ++b)
    dlogit(b, 0) = (cache.probs(b) - batch[b]->label) / static_cast<double>(B);

  g.Wout += cache.u2d.transpose() * dlogit;
  g.bout += dlogit.colwise().sum();
  MatrixXd du2d = dlogit * p.Wout.transpose();
  MatrixXd da2 =
      (du2d.array() * cache.mask2.array()) * relu_grad(cache.a2).array();
  g.W2 += cache.u1d.transpose() * da2;
  g.b2 += da2.colwise().sum();
  MatrixXd du1d = da2 * p.W2.transpose();
  MatrixXd da1 =
      (du1d.array() * cache.mask1.array()) * relu_grad(cache.a1).array();
  g.W1 += cache.u0.transpose() * da1;
  g.b1 += da1.colwise().sum();
  MatrixXd du0 = da1 * p.W1.transpose();

  int col = 0;
  MatrixXd dpooled, drhythm_act;
  if (cfg.sensor_dim > 0) {
    dpooled = du0.middleCols(col, H);
    col += H;
  }
  if (cfg.rhythm_dim > 0) {
    drhythm_act = du0.middleCols(col, cfg.rhythm_fc);
    MatrixXd dpre = cfg.rhythm_relu
                        ? MatrixXd(drhythm_act.array() *
                                   relu_grad(cache.rhythm_pre).array())
                        : drhythm_act;
    g.Wrh += cache.rhythm_in.transpose() * dpre;
    g.brh += dpre.colwise().sum();
  }

  if (cfg.sensor_dim == 0) return;

  const int S = cache.S;
  const int nh = cfg.heads;
  const int dh = nh > 0 ? H / nh : 0;
  const double scale = nh > 0 ? 1.0 / std::sqrt(static_cast<double>(dh)) : 1.0;

  // Per-timestep gradient flowing into the GRU outputs.
  std::vector<MatrixXd> dh_top(S, MatrixXd::Zero(B, H));
  for (int b = 0; b < B; ++b) {
    const AttnCache& ac = cache.attn[b];
    MatrixXd dy = MatrixXd::Zero(S, H);
    if (cfg.mean_pool)
      dy = (MatrixXd::Ones(S, 1) / static_cast<double>(S)) * dpooled.row(b);
    else
      dy.row(S - 1) = dpooled.row(b);

    MatrixXd dhseq;
    if (nh == 0) {
      dhseq = dy;
    } else {
      g.Wo += ac.out.transpose() * dy;
      MatrixXd dconcat = dy * p.Wo.transpose();
      MatrixXd dqf = MatrixXd::Zero(S, H);
      MatrixXd dkf = MatrixXd::Zero(S, H);
      MatrixXd dvf = MatrixXd::Zero(S, H);
      for (int hd = 0; hd < nh; ++hd) {
        const auto q = ac.qf.middleCols(hd * dh, dh);
        const auto k = ac.kf.middleCols(hd * dh, dh);
        const auto v = ac.vf.middleCols(hd * dh, dh);
        const MatrixXd& a = ac.attn[hd];
        const auto dout = dconcat.middleCols(hd * dh, dh);
        MatrixXd da = dout * v.transpose();
        dvf.middleCols(hd * dh, dh) = a.transpose() * dout;
        // softmax backward, row-wise
        MatrixXd ds(S, S);
        for (int i = 0; i < S; ++i) {
          const double dot = (da.row(i).array() * a.row(i).array()).sum();
          ds.row(i) = a.row(i).array() * (da.row(i).array() - dot);
        }
        dqf.middleCols(hd * dh, dh) = ds * k * scale;
        dkf.middleCols(hd * dh, dh) = ds.transpose() * q * scale;
      }
      g.Wq += ac.hseq.transpose() * dqf;
      g.Wk += ac.hseq.transpose() * dkf;
      g.Wv += ac.hseq.transpose() * dvf;
      dhseq = dqf * p.Wq.transpose() + dkf * p.Wk.transpose() +
              dvf * p.Wv.transpose();
    }
    for (int t = 0; t < S; ++t) dh_top[t].row(b) += dhseq.row(t);
  }

  // BPTT through the GRU.
  MatrixXd dh_next = MatrixXd::Zero(B, H);
  for (int t = S - 1; t >= 0; --t) {
    const MatrixXd dh = dh_top[t] + dh_next;
    const MatrixXd& z = cache.z[t];
    const MatrixXd& r = cache.r[t];
    const MatrixXd& c = cache.c[t];
    const MatrixXd& hprev = cache.h[t];
    const MatrixXd& xt = cache.x[t];

    MatrixXd dz = dh.array() * (c.array() - hprev.array());
    MatrixXd dc = dh.array() * z.array();
    MatrixXd dhprev = dh.array() * (1.0 - z.array());

    MatrixXd dac = dc.array() * (1.0 - c.array().square());
    g.Wc += xt.transpose() * dac;
    g.Uc += cache.hr[t].transpose() * dac;
    g.bc += dac.colwise().sum();
    MatrixXd dhr = dac * p.Uc.transpose();
    MatrixXd dr = dhr.array() * hprev.array();
    dhprev.array() += dhr.array() * r.array();

    MatrixXd daz = dz.array() * z.array() * (1.0 - z.array());
    g.Wz += xt.transpose() * daz;
    g.Uz += hprev.transpose() * daz;
    g.bz += daz.colwise().sum();
    dhprev += daz * p.Uz.transpose();

    MatrixXd dar = dr.array() * r.array() * (1.0 - r.array());
    g.Wr += xt.transpose() * dar;
    g.Ur += hprev.transpose() * dar;
    g.br += dar.colwise().sum();
    dhprev += dar * p.Ur.transpose();

    dh_next = std::move(dhprev);
  }
}

}  // namespace

double bce_loss(const VectorXd& probs, const std::vector<int>& labels) {
  if (static_cast<std::size_t>(probs.size()) != labels.size())
    throw ShapeError("probs/labels length mismatch");
  constexpr double kClamp = 1e-12;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(probs(i), kClamp, 1.0 - kClamp);
    loss -= labels[i] ? std::log(p) : std::log(1.0 - p);
  }
  return loss / static_cast<double>(probs.size());
}

Eigen::VectorXd infer(const ModelParams& params,
                      const std::vector<const Sample*>& batch) {
  return run_forward(params, batch, nullptr).probs;
}

double predict_one(const ModelParams& params, const Sample& sample) {
  return infer(params, {&sample})(0);
}

double forward_backward(const ModelParams& params,
                        const std::vector<const Sample*>& batch,
                        Rng& dropout_rng, ModelParams& grads) {
  const BatchCache cache = run_forward(params, batch, &dropout_rng);
  run_backward(params, batch, cache, grads);
  std::vector<int> labels;
  for (const Sample* s : batch) labels.push_back(s->label);
  return bce_loss(cache.probs, labels);
}

double forward_loss(const ModelParams& params,
                    const std::vector<const Sample*>& batch,
                    Rng& dropout_rng) {
  const BatchCache cache = run_forward(params, batch, &dropout_rng);
  std::vector<int> labels;
  for (const Sample* s : batch) labels.push_back(s->label);
  return bce_loss(cache.probs, labels);
}

namespace {

double dataset_loss(const ModelParams& p, const std::vector<Sample>& set) {
  std::vector<const Sample*> ptrs;
  std::vector<int> labels;
  for (const Sample& s : set) {
    ptrs.push_back(&s);
    labels.push_back(s.label);
  }
  return bce_loss(infer(p, ptrs), labels);
}

}  // namespace

TrainResult train(const std::vector<Sample>& train_set,
                  const std::vector<Sample>& val_set, const NetworkConfig& net,
                  const TrainConfig& tc) {
  net.validate();
  bool has0 = false, has1 = false;
  for (const Sample& s : train_set) (s.label ? has1 : has0) = true;
  if (!has0 || !has1)
    throw DataError("training set must contain both classes");

  Rng rng(tc.rng_seed);
  ModelParams params = ModelParams::init(net, rng);
  ModelParams acc = ModelParams::zeros(net);  // RMSProp accumulators

  TrainResult result;
  result.params = params;
  result.best_val_loss = std::numeric_limits<double>::infinity();
  int since_best = 0;

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < tc.max_epochs; ++epoch) {
    const double lr = tc.lr0 * std::pow(tc.lr_decay, epoch);
    std::shuffle(order.begin(), order.end(), rng);

    double epoch_loss = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += tc.batch_size) {
      std::vector<const Sample*> batch;
      for (std::size_t i = start;
           i < std::min(order.size(), start + tc.batch_size); ++i)
        batch.push_back(&train_set[order[i]]);

      ModelParams grads = ModelParams::zeros(net);
      const double loss = forward_backward(params, batch, rng, grads);
      if (!std::isfinite(loss)) throw DataError("training loss diverged");
      epoch_loss += loss;
      ++batches;

      auto pm = params.matrices();
      auto gm = grads.matrices();
      auto am = acc.matrices();
      for (std::size_t i = 0; i < pm.size(); ++i) {
        auto& w = *pm[i].second;
        auto& g = *gm[i].second;
        auto& a = *am[i].second;
        a = tc.rho * a.array() + (1.0 - tc.rho) * g.array().square();
        w.array() -= lr * g.array() / (a.array().sqrt() + tc.eps);
      }
      auto pv = params.vectors();
      auto gv = grads.vectors();
      auto av = acc.vectors();
      for (std::size_t i = 0; i < pv.size(); ++i) {
        auto& w = *pv[i].second;
        auto& g = *gv[i].second;
        auto& a = *av[i].second;
        a = tc.rho * a.array() + (1.0 - tc.rho) * g.array().square();
        w.array() -= lr * g.array() / (a.array().sqrt() + tc.eps);
      }
    }

    EpochLog log;
    log.epoch = epoch;
    log.lr = lr;
    log.train_loss = epoch_loss / std::max(1, batches);
    log.val_loss = val_set.empty() ? log.train_loss
                                   : dataset_loss(params, val_set);
    result.log.push_back(log);

    if (log.val_loss < result.best_val_loss) {
      result.best_val_loss = log.val_loss;
      result.best_epoch = epoch;
      result.params = params;
      since_best = 0;
    } else if (++since_best >= tc.patience) {
      break;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Serialization

std::string ModelParams::to_json(std::uint64_t seed) const {
  nlohmann::json j;
  j["format"] = "covidrhythm-model-v1";
  j["version"] = COVIDRHYTHM_VERSION;
  j["seed"] = seed;
  nlohmann::json& c = j["config"];
  c["gru_hidden"] = config.gru_hidden;
  c["heads"] = config.heads;
  c["rhythm_fc"] = config.rhythm_fc;
  c["joint_fc"] = config.joint_fc;
  c["dropout"] = config.dropout;
  c["seq_len"] = config.seq_len;
  c["sensor_dim"] = config.sensor_dim;
  c["rhythm_dim"] = config.rhythm_dim;
  c["mean_pool"] = config.mean_pool;
  c["rhythm_relu"] = config.rhythm_relu;

  nlohmann::json& params = j["params"];
  auto& self = const_cast<ModelParams&>(*this);
  for (auto& [name, m] : self.matrices()) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m->rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index col = 0; col < m->cols(); ++col)
        row.push_back((*m)(r, col));
      rows.push_back(std::move(row));
    }
    params[name] = std::move(rows);
  }
  for (auto& [name, v] : self.vectors()) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v->size(); ++i) arr.push_back((*v)(i));
    params[name] = std::move(arr);
  }
  return j.dump(2);
}

ModelParams ModelParams::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("malformed model json");
  if (j.value("format", "") != "covidrhythm-model-v1")
    throw ParseError("unrecognized model file format");
  const nlohmann::json& c = j.at("config");
  NetworkConfig cfg;
  cfg.gru_hidden = c.at("gru_hidden");
  cfg.heads = c.at("heads");
  cfg.rhythm_fc = c.at("rhythm_fc");
  cfg.joint_fc = c.at("joint_fc");
  cfg.dropout = c.at("dropout");
  cfg.seq_len = c.at("seq_len");
  cfg.sensor_dim = c.at("sensor_dim");
  cfg.rhythm_dim = c.at("rhythm_dim");
  cfg.mean_pool = c.at("mean_pool");
  cfg.rhythm_relu = c.at("rhythm_relu");

  ModelParams p = zeros(cfg);
  const nlohmann::json& params = j.at("params");
  for (auto& [name, m] : p.matrices()) {
    const nlohmann::json& rows = params.at(name);
    if (static_cast<Eigen::Index>(rows.size()) != m->rows())
      throw ParseError("matrix '" + name + "' row count mismatch");
    for (Eigen::Index r = 0; r < m->rows(); ++r) {
      const nlohmann::json& row = rows[r];
      if (static_cast<Eigen::Index>(row.size()) != m->cols())
        throw ParseError("matrix '" + name + "' column count mismatch");
      for (Eigen::Index col = 0; col < m->cols(); ++col)
        (*m)(r, col) = row[col];
    }
  }
  for (auto& [name, v] : p.vectors()) {
    const nlohmann::json& arr = params.at(name);
    if (static_cast<Eigen::Index>(arr.size()) != v->size())
      throw ParseError("vector '" + name + "' size mismatch");
    for (Eigen::Index i = 0; i < v->size(); ++i) (*v)(i) = arr[i];
  }
  return p;
}

void ModelParams::save(const std::string& path, std::uint64_t seed) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file: " + path);
  out << to_json(seed);
}

ModelParams ModelParams::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace covidrhythm
