// Copyright henn contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Feed-forward regression network with one input node, one linear output
// node, and per-layer trainable polynomial activations shared by all
// neurons of the layer. Training is full reverse-mode over weights, biases
// and activation coefficients with adaptive-moment updates.
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "henn/detail/numio.hpp"
#include "henn/detail/rng.hpp"
#include "henn/errors.hpp"
#include "henn/funcspec.hpp"
#include "henn/poly.hpp"

namespace henn {

// Degree-2 activation initializer; coefficients stay trainable.
inline Polynomial default_quadratic_activation() {
  return Polynomial({1.1110537229, 0.5, 0.054235537});
}

struct NetworkConfig {
  long hidden_layers = 1;
  long width = 8;
  long activation_degree = 2;
  Polynomial activation_init = default_quadratic_activation();
  double learning_rate = 1e-3;
  long max_epochs = 1000;
  long batch_size = 64;
  double l2_lambda = 0.0;
  long patience = 50;
  std::uint64_t seed = 1;
  double input_scale = 1.0;
};

struct Network {
  struct Layer {
    Eigen::MatrixXd weights;  // n_out x n_in
    Eigen::VectorXd bias;     // n_out
  };

  std::vector<Layer> layers;                // hidden_layers + 1 entries
  std::vector<Eigen::VectorXd> activations; // per hidden layer, c_0..c_d
  NetworkConfig config;

  long hidden_layers() const { return static_cast<long>(activations.size()); }
  long activation_degree() const {
    return activations.empty() ? 0 : static_cast<long>(activations.front().size()) - 1;
  }
};

struct TrainReport {
  long epochs_run = 0;
  double final_train_mse = 0.0;
  double final_validation_mse = 0.0;
  long best_epoch = 0;
  std::vector<double> loss_history;  // per-epoch training MSE
};

// Glorot-uniform weights from a seeded PRNG, zero biases, first-layer
// weights pre-scaled by input_scale so large intervals enter the stacked
// activations as O(1) values.
inline Network init_network(const NetworkConfig& cfg) {
  if (cfg.hidden_layers < 0 || cfg.width < 1) throw DomainError("bad network shape");
  if (cfg.activation_degree < 2) throw DomainError("activation degree must be >= 2");
  if (cfg.activation_init.degree() > cfg.activation_degree) {
    throw ShapeMismatch("activation_init degree exceeds activation_degree");
  }
  if (cfg.input_scale <= 0.0) throw DomainError("input_scale must be positive");

  Network net;
  net.config = cfg;
  std::mt19937_64 rng(cfg.seed);

  const long L = cfg.hidden_layers;
  for (long l = 0; l <= L; ++l) {
    const long n_in = (l == 0) ? 1 : cfg.width;
    const long n_out = (l == L) ? 1 : cfg.width;
    Network::Layer layer;
    layer.weights.resize(n_out, n_in);
    const double limit = std::sqrt(6.0 / static_cast<double>(n_in + n_out));
    for (long r = 0; r < n_out; ++r) {
      for (long c = 0; c < n_in; ++c) {
        layer.weights(r, c) = detail::uniform_symmetric(rng, limit);
      }
    }
    if (l == 0) layer.weights *= cfg.input_scale;
    layer.bias = Eigen::VectorXd::Zero(n_out);
    net.layers.push_back(std::move(layer));
  }

  // Activation coefficient vectors always carry d+1 entries; inits of lower
  // degree are zero-padded (the padded coefficients are trainable like any
  // other).
  const auto& init = cfg.activation_init.coeffs();
  Eigen::VectorXd act = Eigen::VectorXd::Zero(cfg.activation_degree + 1);
  for (std::size_t i = 0; i < init.size(); ++i) act(static_cast<Eigen::Index>(i)) = init[i];
  net.activations.assign(static_cast<std::size_t>(L), act);
  return net;
}

namespace detail {

// Elementwise Horner over a matrix of pre-activations.
inline Eigen::MatrixXd apply_activation(const Eigen::VectorXd& coeffs,
                                        const Eigen::MatrixXd& z) {
  const Eigen::Index top = coeffs.size() - 1;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Constant(z.rows(), z.cols(), coeffs(top));
  for (Eigen::Index i = top; i-- > 0;) {
    acc = (acc.array() * z.array() + coeffs(i)).matrix();
  }
  return acc;
}

// Derivative sum i*c_i z^(i-1), also by Horner.
inline Eigen::MatrixXd apply_activation_derivative(const Eigen::VectorXd& coeffs,
                                                   const Eigen::MatrixXd& z) {
  const Eigen::Index top = coeffs.size() - 1;
  Eigen::MatrixXd acc =
      Eigen::MatrixXd::Constant(z.rows(), z.cols(), coeffs(top) * static_cast<double>(top));
  for (Eigen::Index i = top; i-- > 1;) {
    acc = (acc.array() * z.array() + coeffs(i) * static_cast<double>(i)).matrix();
  }
  if (top == 0) acc.setZero();
  return acc;
}

}  // namespace detail

inline double forward(const Network& net, double x) {
  Eigen::VectorXd h(1);
  h(0) = x;
  const std::size_t L = net.activations.size();
  for (std::size_t l = 0; l < L; ++l) {
    Eigen::VectorXd z = net.layers[l].weights * h + net.layers[l].bias;
    h = detail::apply_activation(net.activations[l], z);
  }
  const auto& out = net.layers.back();
  const double y = (out.weights * h + out.bias)(0);
  if (!std::isfinite(y)) throw NonFinite("forward pass overflowed");
  return y;
}

// Batched forward over a row of inputs; columns are samples.
inline Eigen::RowVectorXd forward_batch(const Network& net, const Eigen::RowVectorXd& xs) {
  Eigen::MatrixXd h = xs;
  const std::size_t L = net.activations.size();
  for (std::size_t l = 0; l < L; ++l) {
    Eigen::MatrixXd z =
        (net.layers[l].weights * h).colwise() + net.layers[l].bias;
    h = detail::apply_activation(net.activations[l], z);
  }
  const auto& out = net.layers.back();
  return ((out.weights * h).colwise() + out.bias).row(0);
}

inline double mse_on(const Network& net, const SampleSet& data) {
  if (data.size() == 0) return 0.0;
  Eigen::Map<const Eigen::RowVectorXd> xs(data.xs.data(), static_cast<Eigen::Index>(data.size()));
  Eigen::Map<const Eigen::RowVectorXd> ys(data.ys.data(), static_cast<Eigen::Index>(data.size()));
  Eigen::RowVectorXd pred = forward_batch(net, xs);
  return (pred - ys).squaredNorm() / static_cast<double>(data.size());
}

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  std::vector<Eigen::VectorXd> activations;
};

// Loss = mean squared error + l2_lambda * sum of squared weights. The L2
// penalty covers weight matrices only, so on a zero-residual batch the
// weight gradient is exactly 2*lambda*W.
inline double loss_only(const Network& net, const SampleSet& batch, double l2_lambda) {
  double loss = mse_on(net, batch);
  for (const auto& layer : net.layers) loss += l2_lambda * layer.weights.squaredNorm();
  return loss;
}

inline std::pair<double, Gradients> loss_and_gradients(const Network& net,
                                                       const SampleSet& batch,
                                                       double l2_lambda) {
  const std::size_t B = batch.size();
  if (B == 0) throw InsufficientData("empty batch");
  const std::size_t L = net.activations.size();

  Eigen::Map<const Eigen::RowVectorXd> xs(batch.xs.data(), static_cast<Eigen::Index>(B));
  Eigen::Map<const Eigen::RowVectorXd> ys(batch.ys.data(), static_cast<Eigen::Index>(B));

  // Forward, keeping pre-activations and layer inputs.
  std::vector<Eigen::MatrixXd> inputs;   // inputs[l] feeds layer l
  std::vector<Eigen::MatrixXd> preacts;  // z of hidden layer l
  inputs.reserve(L + 1);
  preacts.reserve(L);
  Eigen::MatrixXd h = xs;
  for (std::size_t l = 0; l < L; ++l) {
    inputs.push_back(h);
    Eigen::MatrixXd z = (net.layers[l].weights * h).colwise() + net.layers[l].bias;
    preacts.push_back(z);
    h = detail::apply_activation(net.activations[l], z);
  }
  inputs.push_back(h);
  const auto& out = net.layers.back();
  Eigen::RowVectorXd pred = ((out.weights * h).colwise() + out.bias).row(0);

  Eigen::RowVectorXd residual = pred - ys;
  double loss = residual.squaredNorm() / static_cast<double>(B);
  for (const auto& layer : net.layers) loss += l2_lambda * layer.weights.squaredNorm();
  if (!std::isfinite(loss)) throw NonFinite("loss is not finite");

  Gradients grads;
  grads.weights.resize(L + 1);
  grads.biases.resize(L + 1);
  grads.activations.resize(L);

  // Output layer.
  Eigen::RowVectorXd dpred = residual * (2.0 / static_cast<double>(B));
  grads.weights[L] = dpred * inputs[L].transpose();
  grads.biases[L] = Eigen::VectorXd::Constant(1, dpred.sum());
  Eigen::MatrixXd dh = out.weights.transpose() * dpred;

  for (std::size_t l = L; l-- > 0;) {
    const Eigen::MatrixXd& z = preacts[l];
    const Eigen::VectorXd& coeffs = net.activations[l];
    const Eigen::Index degree = coeffs.size() - 1;

    // d loss / d c_i = sum over neurons and samples of dh .* z^i.
    Eigen::VectorXd dact(degree + 1);
    Eigen::MatrixXd zpow = Eigen::MatrixXd::Ones(z.rows(), z.cols());
    for (Eigen::Index i = 0; i <= degree; ++i) {
      dact(i) = (dh.array() * zpow.array()).sum();
      if (i < degree) zpow = (zpow.array() * z.array()).matrix();
    }
    grads.activations[l] = dact;

    Eigen::MatrixXd dz =
        (dh.array() * detail::apply_activation_derivative(coeffs, z).array()).matrix();
    grads.weights[l] = dz * inputs[l].transpose();
    grads.biases[l] = dz.rowwise().sum();
    if (l > 0) dh = net.layers[l].weights.transpose() * dz;
  }

  for (std::size_t l = 0; l <= L; ++l) {
    grads.weights[l] += 2.0 * l2_lambda * net.layers[l].weights;
  }
  return {loss, grads};
}

// ---------------------------------------------------------------------------
// Training

namespace detail {

// Adaptive-moment state for one tensor.
struct AdamSlot {
  Eigen::MatrixXd m;
  Eigen::MatrixXd v;

  void init(Eigen::Index rows, Eigen::Index cols) {
    m = Eigen::MatrixXd::Zero(rows, cols);
    v = Eigen::MatrixXd::Zero(rows, cols);
  }

  template <typename Param, typename Grad>
  void step(Param& param, const Grad& grad, double lr, long t) {
    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double eps = 1e-8;
    m = beta1 * m + (1.0 - beta1) * grad;
    v = (beta2 * v.array() + (1.0 - beta2) * grad.array().square()).matrix();
    const double correction1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double correction2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    param.array() -=
        lr * (m.array() / correction1) / ((v.array() / correction2).sqrt() + eps);
  }
};

}  // namespace detail

// Minibatch training with seeded shuffling, validation-monitored early
// stopping and best-snapshot restore. With an empty validation set the
// training MSE is monitored instead.
inline std::pair<Network, TrainReport> train(const NetworkConfig& cfg,
                                             const SampleSet& train_set,
                                             const SampleSet& validation_set) {
  if (train_set.size() == 0) throw InsufficientData("empty training set");
  Network net = init_network(cfg);

  const std::size_t L = net.activations.size();
  std::vector<detail::AdamSlot> slot_w(L + 1), slot_b(L + 1), slot_a(L);
  for (std::size_t l = 0; l <= L; ++l) {
    slot_w[l].init(net.layers[l].weights.rows(), net.layers[l].weights.cols());
    slot_b[l].init(net.layers[l].bias.rows(), 1);
    if (l < L) slot_a[l].init(net.activations[l].rows(), 1);
  }

  std::mt19937_64 shuffle_rng(cfg.seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainReport report;
  Network best = net;
  double best_metric = std::numeric_limits<double>::infinity();
  double best_train_mse = std::numeric_limits<double>::infinity();
  long stale_epochs = 0;
  long adam_t = 0;

  const long batch_size = std::max<long>(1, cfg.batch_size);
  SampleSet batch;

  for (long epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    detail::shuffle_indices(order, shuffle_rng);
    for (std::size_t begin = 0; begin < order.size();
         begin += static_cast<std::size_t>(batch_size)) {
      const std::size_t end =
          std::min(order.size(), begin + static_cast<std::size_t>(batch_size));
      batch.xs.clear();
      batch.ys.clear();
      for (std::size_t i = begin; i < end; ++i) {
        batch.xs.push_back(train_set.xs[order[i]]);
        batch.ys.push_back(train_set.ys[order[i]]);
      }
      double batch_loss;
      Gradients grads;
      try {
        std::tie(batch_loss, grads) = loss_and_gradients(net, batch, cfg.l2_lambda);
      } catch (const NonFinite&) {
        throw Diverged("training loss became non-finite at epoch " + std::to_string(epoch));
      }
      ++adam_t;
      for (std::size_t l = 0; l <= L; ++l) {
        slot_w[l].step(net.layers[l].weights, grads.weights[l], cfg.learning_rate, adam_t);
        slot_b[l].step(net.layers[l].bias, grads.biases[l], cfg.learning_rate, adam_t);
        if (l < L) {
          slot_a[l].step(net.activations[l], grads.activations[l], cfg.learning_rate, adam_t);
        }
      }
    }

    const double train_mse = mse_on(net, train_set);
    if (!std::isfinite(train_mse)) {
      throw Diverged("training loss became non-finite at epoch " + std::to_string(epoch));
    }
    report.loss_history.push_back(train_mse);
    const double metric =
        validation_set.size() > 0 ? mse_on(net, validation_set) : train_mse;
    report.epochs_run = epoch;

    if (metric < best_metric) {
      best_metric = metric;
      best_train_mse = train_mse;
      best = net;
      report.best_epoch = epoch;
      stale_epochs = 0;
    } else {
      ++stale_epochs;
      if (stale_epochs >= cfg.patience) break;
    }
  }

  report.final_train_mse = best_train_mse;
  report.final_validation_mse = best_metric;
  return {best, report};
}

// ---------------------------------------------------------------------------
// Weights CSV
//
// Header `layer,kind,row,col,value` with kind in {weight,bias,act}; `act`
// rows store coefficient index in `row`. Values are written with 17
// significant digits, so save -> load -> save is byte-identical.

inline void save_weights_csv(const Network& net, std::ostream& out) {
  out << "layer,kind,row,col,value\n";
  const std::size_t L = net.activations.size();
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
        out << l << ",weight," << r << ',' << c << ','
            << detail::format_double(layer.weights(r, c)) << '\n';
      }
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) {
      out << l << ",bias," << r << ",0," << detail::format_double(layer.bias(r)) << '\n';
    }
    if (l < L) {
      for (Eigen::Index i = 0; i < net.activations[l].size(); ++i) {
        out << l << ",act," << i << ",0," << detail::format_double(net.activations[l](i))
            << '\n';
      }
    }
  }
}

inline void save_weights_csv(const Network& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  save_weights_csv(net, out);
}

inline Network load_weights_csv(std::istream& in) {
  struct Entry {
    long row;
    long col;
    double value;
  };
  std::map<long, std::vector<Entry>> weights, biases, acts;

  std::string line;
  std::size_t lineno = 0;
  long max_layer = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1) {
      if (line != "layer,kind,row,col,value") {
        throw MalformedRow("expected header 'layer,kind,row,col,value'", lineno);
      }
      continue;
    }
    if (line.empty()) continue;
    auto fields = detail::split_csv_row(line);
    if (fields.size() != 5) throw MalformedRow("expected five fields", lineno);
    const long layer = detail::parse_long(fields[0], lineno);
    if (layer < 0) throw MalformedRow("negative layer index", lineno);
    Entry e{detail::parse_long(fields[2], lineno), detail::parse_long(fields[3], lineno),
            detail::parse_double(fields[4], lineno)};
    if (e.row < 0 || e.col < 0) throw MalformedRow("negative tensor index", lineno);
    if (fields[1] == "weight") weights[layer].push_back(e);
    else if (fields[1] == "bias") biases[layer].push_back(e);
    else if (fields[1] == "act") acts[layer].push_back(e);
    else throw MalformedRow("unknown kind '" + std::string(fields[1]) + "'", lineno);
    max_layer = std::max(max_layer, layer);
  }
  if (max_layer < 0) throw ShapeMismatch("weights file holds no layers");

  Network net;
  const long L = max_layer;  // layers 0..L, the last one linear
  for (long l = 0; l <= L; ++l) {
    auto wit = weights.find(l);
    auto bit = biases.find(l);
    if (wit == weights.end() || bit == biases.end()) {
      throw ShapeMismatch("layer " + std::to_string(l) + " is missing weight or bias rows");
    }
    long rows = 0, cols = 0;
    for (const auto& e : wit->second) {
      rows = std::max(rows, e.row + 1);
      cols = std::max(cols, e.col + 1);
    }
    if (static_cast<long>(wit->second.size()) != rows * cols) {
      throw ShapeMismatch("layer " + std::to_string(l) + " weight rows are incomplete");
    }
    Network::Layer layer;
    layer.weights = Eigen::MatrixXd::Zero(rows, cols);
    for (const auto& e : wit->second) layer.weights(e.row, e.col) = e.value;
    long brows = 0;
    for (const auto& e : bit->second) brows = std::max(brows, e.row + 1);
    if (brows != rows || static_cast<long>(bit->second.size()) != rows) {
      throw ShapeMismatch("layer " + std::to_string(l) + " bias shape mismatch");
    }
    layer.bias = Eigen::VectorXd::Zero(rows);
    for (const auto& e : bit->second) layer.bias(e.row) = e.value;
    net.layers.push_back(std::move(layer));

    if (l < L) {
      auto ait = acts.find(l);
      if (ait == acts.end()) {
        throw ShapeMismatch("hidden layer " + std::to_string(l) + " has no activation rows");
      }
      long n = 0;
      for (const auto& e : ait->second) n = std::max(n, e.row + 1);
      if (static_cast<long>(ait->second.size()) != n) {
        throw ShapeMismatch("activation rows incomplete for layer " + std::to_string(l));
      }
      Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(n);
      for (const auto& e : ait->second) coeffs(e.row) = e.value;
      net.activations.push_back(std::move(coeffs));
    } else if (acts.count(l) != 0) {
      throw ShapeMismatch("output layer must not carry activation rows");
    }
  }

  // Shape sanity: 1-in, 1-out, consistent widths.
  if (net.layers.front().weights.cols() != 1) throw ShapeMismatch("input width must be 1");
  if (net.layers.back().weights.rows() != 1) throw ShapeMismatch("output width must be 1");
  for (std::size_t l = 0; l + 1 < net.layers.size(); ++l) {
    if (net.layers[l + 1].weights.cols() != net.layers[l].weights.rows()) {
      throw ShapeMismatch("layer " + std::to_string(l + 1) + " input width mismatch");
    }
  }

  net.config.hidden_layers = L;
  net.config.width = L > 0 ? net.layers.front().weights.rows() : 1;
  net.config.activation_degree =
      net.activations.empty() ? 2 : static_cast<long>(net.activations.front().size()) - 1;
  return net;
}

inline Network load_weights_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return load_weights_csv(in);
}

}  // namespace henn
