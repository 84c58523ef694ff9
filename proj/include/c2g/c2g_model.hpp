#pragma once

// Cost-to-go regressor: a rectifier MLP over a normalized (start, goal) pair,
// with hand-written backpropagation and an Adam optimizer.

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "c2g/common.hpp"
#include "c2g/dataset.hpp"
#include "c2g/geometry.hpp"

namespace c2g {

static_assert(std::endian::native == std::endian::little, "model files assume a little-endian host");

inline constexpr int kInputWidth = 8;

template <typename Scalar>
class Mlp {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Mlp() = default;

  /// Layer widths including input and output, e.g. {8, 256, 256, 256, 1}.
  /// Weights are He-scaled normals, biases zero.
  Mlp(std::vector<int> widths, std::uint64_t seed) : widths_(std::move(widths)) {
    if (widths_.size() < 2) throw Error("Mlp: need at least input and output widths");
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
      const int in = widths_[l], out = widths_[l + 1];
      std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / in));
      Matrix w(out, in);
      for (int r = 0; r < out; ++r)
        for (int c = 0; c < in; ++c) w(r, c) = static_cast<Scalar>(dist(rng));
      weights_.push_back(std::move(w));
      biases_.push_back(Vector::Zero(out));
    }
  }

  const std::vector<int>& widths() const { return widths_; }
  std::size_t n_layers() const { return weights_.size(); }
  std::vector<Matrix>& weights() { return weights_; }
  std::vector<Vector>& biases() { return biases_; }
  const std::vector<Matrix>& weights() const { return weights_; }
  const std::vector<Vector>& biases() const { return biases_; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
    return n;
  }

  /// Visits every parameter in file order: for each layer, the weight matrix
  /// row-major (output row by output row), then the bias vector.
  template <typename F>
  void for_each_parameter(F&& f) {
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      for (int r = 0; r < weights_[l].rows(); ++r)
        for (int c = 0; c < weights_[l].cols(); ++c) f(weights_[l](r, c));
      for (int r = 0; r < biases_[l].size(); ++r) f(biases_[l](r));
    }
  }
  template <typename F>
  void for_each_parameter(F&& f) const {
    const_cast<Mlp*>(this)->for_each_parameter([&](Scalar& v) { f(static_cast<const Scalar&>(v)); });
  }

  /// Inputs are columns. Returns the raw linear output (1 x n).
  Matrix forward(const Matrix& x) const {
    Matrix a = x;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      Matrix z = weights_[l] * a;
      z.colwise() += biases_[l];
      if (l + 1 < weights_.size()) z = z.cwiseMax(Scalar(0));
      a = std::move(z);
    }
    return a;
  }

  struct Gradients {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
  };

  /// Mean squared error over the batch and its exact gradient.
  std::pair<double, Gradients> loss_and_gradients(const Matrix& x, const Matrix& y) const {
    const std::size_t nl = weights_.size();
    std::vector<Matrix> acts;  // post-activation, acts[0] = input
    acts.reserve(nl + 1);
    acts.push_back(x);
    for (std::size_t l = 0; l < nl; ++l) {
      Matrix z = weights_[l] * acts.back();
      z.colwise() += biases_[l];
      if (l + 1 < nl) z = z.cwiseMax(Scalar(0));
      acts.push_back(std::move(z));
    }
    const Scalar n = static_cast<Scalar>(x.cols());
    Matrix delta = acts.back() - y;
    const double mse = static_cast<double>(delta.squaredNorm()) / static_cast<double>(x.cols());
    delta *= Scalar(2) / n;

    Gradients g;
    g.weights.resize(nl);
    g.biases.resize(nl);
    for (std::size_t l = nl; l-- > 0;) {
      g.weights[l].noalias() = delta * acts[l].transpose();
      g.biases[l] = delta.rowwise().sum();
      if (l == 0) break;
      Matrix back = weights_[l].transpose() * delta;
      delta = back.cwiseProduct((acts[l].array() > Scalar(0)).template cast<Scalar>().matrix());
    }
    return {mse, std::move(g)};
  }

 private:
  std::vector<int> widths_;
  std::vector<Matrix> weights_;
  std::vector<Vector> biases_;
};

/// Adam with bias correction.
template <typename Scalar>
class Adam {
 public:
  using Net = Mlp<Scalar>;

  Adam(const Net& net, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {
    for (std::size_t l = 0; l < net.n_layers(); ++l) {
      mw_.push_back(Net::Matrix::Zero(net.weights()[l].rows(), net.weights()[l].cols()));
      vw_.push_back(mw_.back());
      mb_.push_back(Net::Vector::Zero(net.biases()[l].size()));
      vb_.push_back(mb_.back());
    }
  }

  void set_learning_rate(double lr) { lr_ = lr; }

  void step(Net& net, const typename Net::Gradients& g) {
    ++t_;
    const Scalar c1 = static_cast<Scalar>(1.0 - std::pow(b1_, t_));
    const Scalar c2 = static_cast<Scalar>(1.0 - std::pow(b2_, t_));
    const Scalar b1 = static_cast<Scalar>(b1_), b2 = static_cast<Scalar>(b2_);
    const Scalar lr = static_cast<Scalar>(lr_), eps = static_cast<Scalar>(eps_);
    auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
      m = b1 * m + (Scalar(1) - b1) * grad;
      v = b2 * v + (Scalar(1) - b2) * grad.cwiseProduct(grad);
      param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
    };
    for (std::size_t l = 0; l < net.n_layers(); ++l) {
      update(net.weights()[l], g.weights[l], mw_[l], vw_[l]);
      update(net.biases()[l], g.biases[l], mb_[l], vb_[l]);
    }
  }

 private:
  double lr_, b1_, b2_, eps_;
  long t_ = 0;
  std::vector<typename Net::Matrix> mw_, vw_;
  std::vector<typename Net::Vector> mb_, vb_;
};

inline const std::vector<int>& c2g_widths() {
  static const std::vector<int> w = {kInputWidth, 256, 256, 256, 1};
  return w;
}

/// Trained cost-to-go function for one workspace. Predictions are in workspace
/// length units; the network itself works in cost / extent.
struct C2GModel {
  Mlp<float> net;
  std::string workspace_id;
  double rho = 25.0;
  double extent = 500.0;
};

inline C2GModel init_model(std::uint64_t seed, std::string workspace_id = "", double rho = 25.0,
                           double extent = 500.0) {
  return {Mlp<float>(c2g_widths(), seed), std::move(workspace_id), rho, extent};
}

template <typename Scalar>
inline void write_features(const NormalizedConfig& s, const NormalizedConfig& t, Scalar* col) {
  const double v[kInputWidth] = {s.xn, s.yn, s.cos_t, s.sin_t, t.xn, t.yn, t.cos_t, t.sin_t};
  for (int i = 0; i < kInputWidth; ++i) {
    if (!std::isfinite(v[i])) throw Error("predict: non-finite input");
    col[i] = static_cast<Scalar>(v[i]);
  }
}

/// Predicted costs for pairs (s[i], t[i]), clamped below at zero.
inline std::vector<double> predict_batch(const C2GModel& m, std::span<const NormalizedConfig> s,
                                         std::span<const NormalizedConfig> t) {
  if (s.size() != t.size()) throw Error("predict_batch: size mismatch");
  Mlp<float>::Matrix x(kInputWidth, static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) write_features(s[i], t[i], x.col(static_cast<Eigen::Index>(i)).data());
  const auto out = m.net.forward(x);
  std::vector<double> costs(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    costs[i] = std::max(0.0, static_cast<double>(out(0, static_cast<Eigen::Index>(i))) * m.extent);
  return costs;
}

inline double predict(const C2GModel& m, const NormalizedConfig& s, const NormalizedConfig& t) {
  return predict_batch(m, std::span(&s, 1), std::span(&t, 1))[0];
}

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 256;
  int epochs = 200;
  double validation_fraction = 0.1;
  std::uint64_t seed = 1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Final learning rate as a fraction of the initial one (cosine schedule); 1 disables decay.
  double final_lr_fraction = 0.05;
  // An epoch whose training loss exceeds this multiple of the all-zero
  // predictor's loss counts as divergence.
  double divergence_factor = 1e3;

  void validate() const {
    if (!(learning_rate > 0.0)) throw Error("learning_rate must be positive");
    if (!(validation_fraction > 0.0 && validation_fraction < 0.5))
      throw Error("validation_fraction must lie in (0, 0.5)");
    if (batch_size < 1 || epochs < 1) throw Error("batch_size and epochs must be positive");
    if (!(divergence_factor > 0.0)) throw Error("divergence_factor must be positive");
  }
};

struct TrainReport {
  std::vector<double> train_mse;  // normalized units, per epoch
  std::vector<double> val_mse;
  int best_epoch = 0;
  double final_rmse = 0.0;  // cost units, best-validation parameters
};

class TrainingDiverged : public Error {
 public:
  TrainingDiverged(int epoch)
      : Error("training diverged at epoch " + std::to_string(epoch)), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

/// Column-per-sample features and normalized targets.
inline std::pair<Mlp<float>::Matrix, Mlp<float>::Matrix> make_training_matrices(
    const std::vector<Sample>& samples, double extent) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  Mlp<float>::Matrix x(kInputWidth, n), y(1, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& smp = samples[static_cast<std::size_t>(i)];
    write_features(normalize(smp.s, extent), normalize(smp.t, extent), x.col(i).data());
    y(0, i) = static_cast<float>(smp.cost / extent);
  }
  return {std::move(x), std::move(y)};
}

/// Mini-batch Adam on MSE of normalized cost. Returns the parameters with the
/// lowest validation loss. Deterministic for a fixed seed and dataset.
inline std::pair<C2GModel, TrainReport> train(const Dataset& data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.samples.size() < 1000) throw Error("train: dataset needs at least 1000 samples");
  const double extent = data.meta.extent;
  const auto [x_all, y_all] = make_training_matrices(data.samples, extent);

  Rng rng(mix64(cfg.seed));
  std::vector<Eigen::Index> idx(data.samples.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<Eigen::Index>(i);
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto n_val = static_cast<std::size_t>(std::ceil(cfg.validation_fraction * double(idx.size())));
  std::vector<Eigen::Index> val_idx(idx.end() - static_cast<std::ptrdiff_t>(n_val), idx.end());
  std::vector<Eigen::Index> train_idx(idx.begin(), idx.end() - static_cast<std::ptrdiff_t>(n_val));

  const double zero_loss = static_cast<double>(y_all.squaredNorm()) / double(y_all.cols());
  const Mlp<float>::Matrix x_val = x_all(Eigen::all, val_idx);
  const Mlp<float>::Matrix y_val = y_all(Eigen::all, val_idx);

  C2GModel model = init_model(mix64(cfg.seed ^ 0x5eedULL), data.meta.workspace_id, data.meta.rho, extent);
  Adam<float> opt(model.net, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon);
  TrainReport report;
  C2GModel best = model;
  double best_val = std::numeric_limits<double>::infinity();

  Mlp<float>::Matrix xb, yb;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const double progress = double(epoch - 1) / std::max(1, cfg.epochs - 1);
    const double f = cfg.final_lr_fraction + (1.0 - cfg.final_lr_fraction) * 0.5 * (1.0 + std::cos(kPi * progress));
    opt.set_learning_rate(cfg.learning_rate * f);

    std::shuffle(train_idx.begin(), train_idx.end(), rng);
    double sum = 0.0;
    for (std::size_t b = 0; b < train_idx.size(); b += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t e = std::min(train_idx.size(), b + static_cast<std::size_t>(cfg.batch_size));
      std::vector<Eigen::Index> batch(train_idx.begin() + static_cast<std::ptrdiff_t>(b),
                                      train_idx.begin() + static_cast<std::ptrdiff_t>(e));
      xb = x_all(Eigen::all, batch);
      yb = y_all(Eigen::all, batch);
      auto [mse, grads] = model.net.loss_and_gradients(xb, yb);
      if (!std::isfinite(mse)) throw TrainingDiverged(epoch);
      sum += mse * double(e - b);
      opt.step(model.net, grads);
    }
    const double train_mse = sum / double(train_idx.size());
    const Mlp<float>::Matrix pred = model.net.forward(x_val);
    const double val_mse = static_cast<double>((pred - y_val).squaredNorm()) / double(n_val);
    if (!std::isfinite(train_mse) || !std::isfinite(val_mse) || train_mse > cfg.divergence_factor * zero_loss)
      throw TrainingDiverged(epoch);
    report.train_mse.push_back(train_mse);
    report.val_mse.push_back(val_mse);
    if (val_mse < best_val) {
      best_val = val_mse;
      best = model;
      report.best_epoch = epoch;
    }
  }
  report.final_rmse = std::sqrt(best_val) * extent;
  return {std::move(best), std::move(report)};
}

// Model file layout:
//   bytes 0..3   magic "C2GM"
//   bytes 4..7   uint32 header length H (little-endian)
//   next H bytes JSON header {format_version, shapes, workspace_id, rho, extent}
//   remainder    float32 little-endian parameters in Mlp::for_each_parameter order
inline constexpr int kModelFormatVersion = 1;

inline void save_model(const C2GModel& m, const std::string& path) {
  nlohmann::json header = {{"format_version", kModelFormatVersion},
                           {"shapes", m.net.widths()},
                           {"workspace_id", m.workspace_id},
                           {"rho", m.rho},
                           {"extent", m.extent}};
  const std::string h = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open model file for writing: " + path);
  out.write("C2GM", 4);
  const auto len = static_cast<std::uint32_t>(h.size());
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  std::vector<float> block;
  block.reserve(m.net.parameter_count());
  m.net.for_each_parameter([&](const float& v) { block.push_back(v); });
  out.write(reinterpret_cast<const char*>(block.data()), static_cast<std::streamsize>(block.size() * sizeof(float)));
  if (!out) throw Error("failed writing model file: " + path);
}

inline C2GModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file: " + path);
  char magic[4];
  std::uint32_t len = 0;
  if (!in.read(magic, 4) || std::memcmp(magic, "C2GM", 4) != 0) throw FormatError("not a model file: " + path);
  if (!in.read(reinterpret_cast<char*>(&len), sizeof len) || len > (1u << 20))
    throw FormatError("corrupted model header: " + path);
  std::string h(len, '\0');
  if (!in.read(h.data(), len)) throw FormatError("truncated model header: " + path);

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(h);
  } catch (const nlohmann::json::exception&) {
    throw FormatError("corrupted model header: " + path);
  }
  if (header.value("format_version", -1) != kModelFormatVersion)
    throw FormatError("unsupported model format version in " + path);
  std::vector<int> shapes;
  try {
    shapes = header.at("shapes").get<std::vector<int>>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError("model header lacks layer shapes: " + path);
  }
  if (shapes != c2g_widths()) throw FormatError("model layer shapes do not match the network: " + path);

  C2GModel m{Mlp<float>(shapes, 0), header.value("workspace_id", std::string()),
             header.value("rho", 25.0), header.value("extent", 500.0)};
  std::vector<float> block(m.net.parameter_count());
  if (!in.read(reinterpret_cast<char*>(block.data()), static_cast<std::streamsize>(block.size() * sizeof(float))))
    throw FormatError("truncated model parameters: " + path);
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes in model file: " + path);
  std::size_t k = 0;
  m.net.for_each_parameter([&](float& v) { v = block[k++]; });
  return m;
}

}  // namespace c2g
