// Copyright henn contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Fourier sine series for odd-shifted targets: coefficients by composite
// Simpson quadrature, plain evaluation, and encrypted evaluation that builds
// e^{+-i theta} once with the Taylor-and-squaring core and walks the
// harmonics by successive products.
#pragma once

#include <cmath>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "henn/detail/numio.hpp"
#include "henn/errors.hpp"
#include "henn/henc.hpp"

namespace henn {

// Sine-coefficient series b_1..b_N of an odd function with period 2l.
struct FourierSeries {
  double period_half = 1.0;     // l
  std::vector<double> coeffs;   // coeffs[n-1] = b_n

  long harmonics() const { return static_cast<long>(coeffs.size()); }
};

// Composite Simpson with m (even) subintervals.
template <typename F>
double simpson_integrate(F&& f, double a, double b, long m) {
  if (m < 2 || m % 2 != 0) throw OddIntervals("Simpson needs an even subinterval count");
  const double h = (b - a) / static_cast<double>(m);
  double sum = f(a) + f(b);
  for (long i = 1; i < m; ++i) {
    const double x = a + static_cast<double>(i) * h;
    sum += f(x) * (i % 2 == 0 ? 2.0 : 4.0);
  }
  const double result = sum * h / 3.0;
  if (!std::isfinite(result)) throw NonFinite("integrand is not finite");
  return result;
}

// b_n = (2/l) * integral_0^l f(x) sin(n pi x / l) dx.
template <typename F>
FourierSeries fourier_sine_coeffs(F&& f, double period_half, long harmonics,
                                  long subintervals = 1L << 16) {
  if (period_half <= 0.0) throw DomainError("period half-length must be positive");
  if (harmonics < 1) throw DomainError("need at least one harmonic");
  FourierSeries s;
  s.period_half = period_half;
  s.coeffs.reserve(static_cast<std::size_t>(harmonics));
  for (long n = 1; n <= harmonics; ++n) {
    const double freq = static_cast<double>(n) * std::numbers::pi / period_half;
    const double integral = simpson_integrate(
        [&](double x) { return f(x) * std::sin(freq * x); }, 0.0, period_half, subintervals);
    s.coeffs.push_back(2.0 / period_half * integral);
  }
  return s;
}

inline double eval_series_plain(const FourierSeries& s, double x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
    const double freq = static_cast<double>(i + 1) * std::numbers::pi / s.period_half;
    acc += s.coeffs[i] * std::sin(freq * x);
  }
  return acc;
}

// Encrypted partial sum. theta = pi x / l is folded into the Taylor rescale
// so e^{+-i theta} costs (k + t + 2) levels; harmonic n is reached after
// n - 1 further products, and each sine extraction plus coefficient product
// adds 2 scalar levels. Total: (k + t + 2) + (N - 1) + 2.
inline Ciphertext eval_series_encrypted(Context& ctx, const FourierSeries& s,
                                        const Ciphertext& ct_x, SineParams p) {
  p.validate();
  if (ct_x.ctx != &ctx) throw ContextMismatch("input encrypted under a different context");
  if (s.harmonics() < 1) throw DomainError("series has no harmonics");
  const double scale =
      std::numbers::pi / (s.period_half * std::pow(2.0, static_cast<double>(p.t)));

  // i * theta / 2^t and its negation.
  Ciphertext w = imul(cmul(ct_x, Complex(scale, 0.0)));
  Ciphertext nw = neg(w);

  Ciphertext pos = detail::taylor_exp(ctx, w, p.k);
  Ciphertext negexp = detail::taylor_exp(ctx, nw, p.k);
  for (long i = 0; i < p.t; ++i) {
    pos = mul(pos, pos);
    negexp = mul(negexp, negexp);
  }

  Ciphertext acc;
  Ciphertext pos_pow = pos;
  Ciphertext neg_pow = negexp;
  for (long n = 1; n <= s.harmonics(); ++n) {
    if (n > 1) {
      pos_pow = mul(pos_pow, pos);
      neg_pow = mul(neg_pow, negexp);
    }
    // sin(n theta) = -0.5 i (e^{in theta} - e^{-in theta})
    Ciphertext sine = imul(cmul(add(pos_pow, neg(neg_pow)), Complex(-0.5, 0.0)));
    Ciphertext term = cmul(sine, Complex(s.coeffs[static_cast<std::size_t>(n - 1)], 0.0));
    acc = (n == 1) ? term : add(acc, term);
  }
  return acc;
}

// Text format: first line `l,N`, then one coefficient per line.
inline void write_series(const FourierSeries& s, std::ostream& out) {
  out << detail::format_double(s.period_half) << ',' << s.harmonics() << '\n';
  for (double b : s.coeffs) out << detail::format_double(b) << '\n';
}

inline void write_series(const FourierSeries& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_series(s, out);
}

inline FourierSeries read_series(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw MalformedRow("empty series file", 1);
  auto header = detail::split_csv_row(line);
  if (header.size() != 2) throw MalformedRow("expected header 'l,N'", 1);
  FourierSeries s;
  s.period_half = detail::parse_double(header[0], 1);
  const long n = detail::parse_long(header[1], 1);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    s.coeffs.push_back(detail::parse_double(line, lineno));
  }
  if (static_cast<long>(s.coeffs.size()) != n) {
    throw MalformedRow("coefficient count does not match header", lineno);
  }
  return s;
}

inline FourierSeries read_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_series(in);
}

}  // namespace henn
