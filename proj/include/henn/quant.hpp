// Copyright henn contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Post-training uniform quantization of network weights and measurement of
// the accuracy it costs.
#pragma once

#include <cmath>
#include <utility>

#include "henn/errors.hpp"
#include "henn/netcore.hpp"
#include "henn/report.hpp"

namespace henn {

// Per-tensor symmetric quantization of the weight matrices. Biases and
// activation coefficients stay full precision.
inline Network quantize_uniform(const Network& net, int bits) {
  if (bits < 2 || bits > 16) throw DomainError("quantization bits must lie in 2..16");
  Network out = net;
  const double levels = static_cast<double>((1 << (bits - 1)) - 1);
  for (auto& layer : out.layers) {
    const double max_abs = layer.weights.cwiseAbs().maxCoeff();
    if (max_abs == 0.0) continue;  // all-zero tensor: nothing to snap to
    const double scale = max_abs / levels;
    layer.weights = (layer.weights / scale).array().round().matrix() * scale;
  }
  return out;
}

struct QuantizationReport {
  EvalReport original;
  EvalReport quantized;
  double max_error_ratio = 1.0;  // quantized max error / original max error
};

inline QuantizationReport quantization_report(const Network& net, const Network& net_q,
                                              const SampleSet& eval_set) {
  if (net.layers.size() != net_q.layers.size() ||
      net.activations.size() != net_q.activations.size()) {
    throw ShapeMismatch("networks differ in layer structure");
  }
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    if (net.layers[l].weights.rows() != net_q.layers[l].weights.rows() ||
        net.layers[l].weights.cols() != net_q.layers[l].weights.cols()) {
      throw ShapeMismatch("networks differ in tensor shapes");
    }
  }

  auto measure = [&](const Network& n) {
    EvalReport r;
    for (std::size_t i = 0; i < eval_set.size(); ++i) {
      const double err = std::fabs(forward(n, eval_set.xs[i]) - eval_set.ys[i]);
      r.max_abs_error = std::max(r.max_abs_error, err);
      r.mse += err * err;
    }
    if (eval_set.size() > 0) r.mse /= static_cast<double>(eval_set.size());
    return r;
  };

  QuantizationReport report;
  report.original = measure(net);
  report.quantized = measure(net_q);
  report.max_error_ratio = report.original.max_abs_error > 0.0
                               ? report.quantized.max_abs_error / report.original.max_abs_error
                               : 1.0;
  return report;
}

}  // namespace henn
