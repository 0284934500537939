// Copyright henn contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Symbolic extraction of the single univariate polynomial a
// polynomial-activation network computes, plus the planners that bound its
// degree and the multiplicative depth of the encrypted forward pass.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "henn/errors.hpp"
#include "henn/netcore.hpp"
#include "henn/poly.hpp"

namespace henn {

// d^L with overflow detection.
inline long degree_bound(const NetworkConfig& cfg) {
  const long d = cfg.activation_degree;
  const long L = cfg.hidden_layers;
  if (d < 0 || L < 0) throw DomainError("negative degree or layer count");
  long result = 1;
  for (long i = 0; i < L; ++i) {
    if (d != 0 && result > (1L << 62) / d) {
      throw Overflow("activation degree to the power of layer count overflows");
    }
    result *= d;
  }
  return result;
}

// Expands the network into the polynomial it computes by pushing Polynomial
// values through every layer; activations enter by composition. Only viable
// while d^L stays under the cap, which is the point: beyond that the
// explicit polynomial is not worth knowing.
inline Polynomial extract_polynomial(const Network& net, long degree_cap = kDefaultDegreeCap) {
  if (!net.activations.empty()) {
    long projected = 1;
    for (const auto& coeffs : net.activations) {
      const long d = static_cast<long>(coeffs.size()) - 1;
      if (d > 0 && projected > degree_cap / std::max<long>(d, 1)) {
        throw DegreeLimitExceeded("projected extraction degree exceeds cap");
      }
      projected *= std::max<long>(d, 1);
    }
    if (projected > degree_cap) {
      throw DegreeLimitExceeded("projected extraction degree exceeds cap");
    }
  }

  std::vector<Polynomial> h{Polynomial::identity()};
  const std::size_t L = net.activations.size();
  for (std::size_t l = 0; l < L; ++l) {
    const auto& layer = net.layers[l];
    std::vector<Polynomial> z;
    z.reserve(static_cast<std::size_t>(layer.weights.rows()));
    for (Eigen::Index j = 0; j < layer.weights.rows(); ++j) {
      Polynomial acc = Polynomial::constant(layer.bias(j));
      for (Eigen::Index i = 0; i < layer.weights.cols(); ++i) {
        acc = poly_add(acc, poly_scale(h[static_cast<std::size_t>(i)], layer.weights(j, i)));
      }
      z.push_back(std::move(acc));
    }
    const auto& coeffs = net.activations[l];
    Polynomial act(std::vector<double>(coeffs.data(), coeffs.data() + coeffs.size()));
    std::vector<Polynomial> activated;
    activated.reserve(z.size());
    for (const Polynomial& zj : z) {
      activated.push_back(poly_compose(act, zj, degree_cap));
    }
    h = std::move(activated);
  }

  const auto& out = net.layers.back();
  Polynomial result = Polynomial::constant(out.bias(0));
  for (Eigen::Index i = 0; i < out.weights.cols(); ++i) {
    result = poly_add(result, poly_scale(h[static_cast<std::size_t>(i)], out.weights(0, i)));
  }
  return result;
}

// Smallest layer count whose output degree d^l reaches the 2RP/d sample
// complexity: ceil(log_d(2RP/d)).
inline long required_layers(double radius, double precision, long activation_degree) {
  if (activation_degree < 2) throw DomainError("activation degree must be >= 2");
  const double target = 2.0 * radius * precision / static_cast<double>(activation_degree);
  if (!(target > 1.0)) throw DomainError("2RP must exceed the activation degree");
  long layers = 0;
  double power = 1.0;
  // Tolerance keeps exact powers (2RP/d == d^l) from rounding up one layer.
  while (power < target * (1.0 - 1e-12)) {
    power *= static_cast<double>(activation_degree);
    ++layers;
  }
  return layers;
}

// Levels the encrypted forward pass consumes, with the matching operation
// counts: per hidden layer one scalar level for the dense combine,
// ceil(log2 d) ct levels for the power ladder and one scalar level for the
// coefficient products; the linear output layer costs one more.
inline MultCount plan_depth(const NetworkConfig& cfg) {
  const long L = cfg.hidden_layers;
  const long n = cfg.width;
  const long d = cfg.activation_degree;
  MultCount count;
  count.depth = (L > 0 ? L * (2 + ceil_log2(d)) : 0) + 1;
  long n_in = 1;
  for (long l = 0; l < L; ++l) {
    count.scalar_mults += n * n_in;      // dense combine
    count.ct_mults += n * (d - 1);       // power ladder z^2..z^d
    count.scalar_mults += n * d;         // coefficient products c_1..c_d
    n_in = n;
  }
  count.scalar_mults += n_in;            // output layer
  return count;
}

}  // namespace henn
