// Copyright henn contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Leveled homomorphic-arithmetic simulator. Slots are plain complex doubles
// plus a remaining multiplicative level; no lattice cryptography is modeled.
// Cost rules mirror a leveled CKKS-style scheme:
//   * mul (ct*ct) and cmul (ct*constant) consume one level each and bump the
//     matching counter; cmul's level models the rescale after a constant
//     product.
//   * add, cadd, neg and imul are free; binary operations align operands to
//     the lower level at no cost (modulus-switch analogue).
//   * bootstrap resets the level to max_level and is counted.
// Every ciphertext also records the depth of the multiplication chain that
// produced it, so "levels consumed" stays well defined across bootstraps.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "henn/errors.hpp"
#include "henn/netcore.hpp"
#include "henn/poly.hpp"

namespace henn {

using Complex = std::complex<double>;

class Context;

struct Ciphertext {
  std::vector<Complex> slots;
  long level = 0;
  long depth = 0;  // multiplication-chain depth since fresh encryption
  Context* ctx = nullptr;
};

class Context {
 public:
  struct Params {
    long slot_count = 8192;
    long max_level = 40;
    double noise_sigma = 0.0;
    bool auto_bootstrap = false;
    double bootstrap_perturbation = 0.0;
    std::uint64_t noise_seed = 0x5eed;
  };

  explicit Context(Params params = {}) : params_(params), noise_rng_(params.noise_seed) {
    if (params_.slot_count < 1 || params_.max_level < 1) {
      throw DomainError("slot_count and max_level must be positive");
    }
  }

  Context(const Context&) = delete;
  Context& operator=(const Context&) = delete;

  long slot_count() const { return params_.slot_count; }
  long max_level() const { return params_.max_level; }
  double noise_sigma() const { return params_.noise_sigma; }
  bool auto_bootstrap() const { return params_.auto_bootstrap; }
  double bootstrap_perturbation() const { return params_.bootstrap_perturbation; }

  long ct_mults() const { return ct_mults_; }
  long scalar_mults() const { return scalar_mults_; }
  long bootstraps() const { return bootstraps_; }

  void count_ct_mult() { ++ct_mults_; }
  void count_scalar_mult() { ++scalar_mults_; }
  void count_bootstrap() { ++bootstraps_; }

  Complex sample_noise() {
    std::normal_distribution<double> gauss(0.0, params_.noise_sigma);
    return {gauss(noise_rng_), gauss(noise_rng_)};
  }

 private:
  Params params_;
  long ct_mults_ = 0;
  long scalar_mults_ = 0;
  long bootstraps_ = 0;
  std::mt19937_64 noise_rng_;
};

inline Ciphertext encrypt(Context& ctx, const std::vector<Complex>& values) {
  if (static_cast<long>(values.size()) > ctx.slot_count()) {
    throw DomainError("more values than slots");
  }
  Ciphertext ct;
  ct.slots = values;
  ct.slots.resize(static_cast<std::size_t>(ctx.slot_count()), Complex(0.0, 0.0));
  ct.level = ctx.max_level();
  ct.depth = 0;
  ct.ctx = &ctx;
  return ct;
}

inline Ciphertext encrypt_real(Context& ctx, const std::vector<double>& values) {
  std::vector<Complex> slots(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) slots[i] = Complex(values[i], 0.0);
  return encrypt(ctx, slots);
}

inline std::vector<Complex> decrypt(const Ciphertext& ct) { return ct.slots; }

namespace detail {

inline void require_same_context(const Ciphertext& a, const Ciphertext& b) {
  if (a.ctx == nullptr || a.ctx != b.ctx) {
    throw ContextMismatch("operands belong to different contexts");
  }
}

inline void bootstrap_in_place(Ciphertext& ct) {
  const double p = ct.ctx->bootstrap_perturbation();
  for (Complex& s : ct.slots) s += p;
  ct.level = ct.ctx->max_level();
  ct.ctx->count_bootstrap();
}

// Charges one level for a multiplication; bootstraps first when the budget
// is exhausted and the context allows it.
inline long consume_level(Ciphertext& ct) {
  if (ct.level < 1) {
    if (!ct.ctx->auto_bootstrap()) {
      throw LevelExhausted("multiplication at level 0");
    }
    bootstrap_in_place(ct);
  }
  return ct.level - 1;
}

}  // namespace detail

inline Ciphertext add(const Ciphertext& a, const Ciphertext& b) {
  detail::require_same_context(a, b);
  Ciphertext out = a;
  out.level = std::min(a.level, b.level);
  out.depth = std::max(a.depth, b.depth);
  for (std::size_t i = 0; i < out.slots.size(); ++i) out.slots[i] += b.slots[i];
  return out;
}

inline Ciphertext cadd(const Ciphertext& a, Complex c) {
  Ciphertext out = a;
  for (Complex& s : out.slots) s += c;
  return out;
}

inline Ciphertext neg(const Ciphertext& a) {
  Ciphertext out = a;
  for (Complex& s : out.slots) s = -s;
  return out;
}

inline Ciphertext imul(const Ciphertext& a) {
  Ciphertext out = a;
  for (Complex& s : out.slots) s = Complex(-s.imag(), s.real());
  return out;
}

inline Ciphertext mul(const Ciphertext& a, const Ciphertext& b) {
  detail::require_same_context(a, b);
  Ciphertext lhs = a;
  Ciphertext rhs = b;
  if (lhs.level < 1 || rhs.level < 1) {
    if (!lhs.ctx->auto_bootstrap()) throw LevelExhausted("multiplication at level 0");
    if (lhs.level < 1) detail::bootstrap_in_place(lhs);
    if (rhs.level < 1) detail::bootstrap_in_place(rhs);
  }
  Ciphertext out = lhs;
  out.level = std::min(lhs.level, rhs.level) - 1;
  out.depth = std::max(a.depth, b.depth) + 1;
  Context& ctx = *out.ctx;
  const bool noisy = ctx.noise_sigma() > 0.0;
  for (std::size_t i = 0; i < out.slots.size(); ++i) {
    out.slots[i] = lhs.slots[i] * rhs.slots[i];
    if (noisy) out.slots[i] += ctx.sample_noise();
  }
  ctx.count_ct_mult();
  return out;
}

inline Ciphertext cmul(const Ciphertext& a, Complex c) {
  if (a.ctx == nullptr) throw ContextMismatch("ciphertext has no context");
  Ciphertext out = a;
  out.level = detail::consume_level(out);
  out.depth = a.depth + 1;
  Context& ctx = *out.ctx;
  const bool noisy = ctx.noise_sigma() > 0.0;
  for (Complex& s : out.slots) {
    s *= c;
    if (noisy) s += ctx.sample_noise();
  }
  ctx.count_scalar_mult();
  return out;
}

inline Ciphertext bootstrap(const Ciphertext& a) {
  if (a.ctx == nullptr) throw ContextMismatch("ciphertext has no context");
  Ciphertext out = a;
  detail::bootstrap_in_place(out);
  return out;
}

// ---------------------------------------------------------------------------
// Sine via Euler's formula: both exponential branches are evaluated
// independently with a k-term Taylor series of exp at x/2^t, squared back up
// t times, and combined as -0.5i * (e^{ix} - e^{-ix}).

struct SineParams {
  long t = 10;  // rescale exponent: input divided by 2^t
  long k = 7;   // Taylor terms for exp

  void validate() const {
    if (t < 0 || t > 40) throw DomainError("sine rescale exponent out of range");
    if (k < 1 || k > 64) throw DomainError("sine Taylor term count out of range");
  }
};

namespace detail {

// 1 + sum_{i=1..k} w^i / i!, the Taylor prefix of exp(w).
inline Ciphertext taylor_exp(Context& ctx, const Ciphertext& w, long k) {
  Ciphertext acc = encrypt(ctx, std::vector<Complex>(w.slots.size(), Complex(1.0, 0.0)));
  Ciphertext wpow = encrypt(ctx, std::vector<Complex>(w.slots.size(), Complex(1.0, 0.0)));
  double factorial = 1.0;
  for (long i = 1; i <= k; ++i) {
    wpow = mul(wpow, w);
    factorial *= static_cast<double>(i);
    acc = add(acc, cmul(wpow, Complex(1.0 / factorial, 0.0)));
  }
  return acc;
}

}  // namespace detail

inline Ciphertext sine_compute(Context& ctx, const Ciphertext& ct_in, SineParams p) {
  p.validate();
  Ciphertext ct = cmul(ct_in, Complex(1.0 / std::pow(2.0, static_cast<double>(p.t)), 0.0));
  ct = imul(ct);
  Ciphertext nect = neg(ct);

  Ciphertext ct1 = detail::taylor_exp(ctx, ct, p.k);
  for (long i = 0; i < p.t; ++i) ct1 = mul(ct1, ct1);

  Ciphertext ct11 = detail::taylor_exp(ctx, nect, p.k);
  for (long i = 0; i < p.t; ++i) ct11 = mul(ct11, ct11);

  Ciphertext res = add(ct1, neg(ct11));
  res = cmul(res, Complex(-0.5, 0.0));
  res = imul(res);
  for (const Complex& s : res.slots) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
      throw NonFinite("sine evaluation overflowed");
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Encrypted network forward pass. The batch lives in the slots; the hidden
// state is one ciphertext per neuron. Per hidden layer: dense combine
// (1 scalar level), activation powers z^2..z^d by balanced splits
// (ceil(log2 d) ct levels), coefficient products (1 scalar level); the
// output layer adds one more scalar level.

inline Ciphertext forward_encrypted(Context& ctx, const Network& net, const Ciphertext& ct_x) {
  if (ct_x.ctx != &ctx) throw ContextMismatch("input encrypted under a different context");

  auto dense = [&](const Network::Layer& layer, const std::vector<Ciphertext>& h) {
    std::vector<Ciphertext> out;
    out.reserve(static_cast<std::size_t>(layer.weights.rows()));
    for (Eigen::Index j = 0; j < layer.weights.rows(); ++j) {
      Ciphertext acc = cmul(h[0], Complex(layer.weights(j, 0), 0.0));
      for (Eigen::Index i = 1; i < layer.weights.cols(); ++i) {
        acc = add(acc, cmul(h[static_cast<std::size_t>(i)], Complex(layer.weights(j, i), 0.0)));
      }
      out.push_back(cadd(acc, Complex(layer.bias(j), 0.0)));
    }
    return out;
  };

  std::vector<Ciphertext> h{ct_x};
  const std::size_t L = net.activations.size();
  for (std::size_t l = 0; l < L; ++l) {
    std::vector<Ciphertext> z = dense(net.layers[l], h);
    const Eigen::VectorXd& coeffs = net.activations[l];
    const long degree = static_cast<long>(coeffs.size()) - 1;
    std::vector<Ciphertext> activated;
    activated.reserve(z.size());
    for (const Ciphertext& zj : z) {
      // powers[i] = z^i, built as z^(i/2) * z^(i-i/2) to keep the chain at
      // ceil(log2 d).
      std::vector<Ciphertext> powers;
      powers.reserve(static_cast<std::size_t>(degree) + 1);
      powers.push_back(zj);  // placeholder for index 0, never used
      powers.push_back(zj);
      for (long i = 2; i <= degree; ++i) {
        powers.push_back(mul(powers[static_cast<std::size_t>(i / 2)],
                             powers[static_cast<std::size_t>(i - i / 2)]));
      }
      Ciphertext acc = cmul(powers[1], Complex(coeffs(1), 0.0));
      for (long i = 2; i <= degree; ++i) {
        acc = add(acc, cmul(powers[static_cast<std::size_t>(i)], Complex(coeffs(i), 0.0)));
      }
      activated.push_back(cadd(acc, Complex(coeffs(0), 0.0)));
    }
    h = std::move(activated);
  }

  std::vector<Ciphertext> out = dense(net.layers.back(), h);
  return out.front();
}

}  // namespace henn
