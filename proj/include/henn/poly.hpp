// Copyright henn contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Dense univariate polynomial algebra with explicit multiplication-cost
// accounting. Costs are reported in the leveled-HE sense: a ct*ct product
// and a ct*constant product each extend the multiplication chain by one,
// additions are free.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "henn/errors.hpp"

namespace henn {

// Result degree cap for poly_mul / poly_compose. Composing through stacked
// layers grows degree exponentially, so blow-ups are cut off early.
inline constexpr long kDefaultDegreeCap = 4096;

// Dense real-coefficient univariate polynomial. coeffs()[i] holds the
// coefficient of x^i; trailing zeros are trimmed on construction, so the
// leading coefficient is nonzero unless the polynomial is the zero
// polynomial [0].
class Polynomial {
 public:
  Polynomial() : coeffs_{0.0} {}

  explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
    if (coeffs_.empty()) coeffs_.push_back(0.0);
  }

  static Polynomial zero() { return Polynomial(); }
  static Polynomial identity() { return Polynomial({0.0, 1.0}); }
  static Polynomial constant(double c) { return Polynomial({c}); }

  const std::vector<double>& coeffs() const { return coeffs_; }
  long degree() const { return static_cast<long>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }

  // Coefficient of x^i; zero beyond the stored degree.
  double operator[](std::size_t i) const {
    return i < coeffs_.size() ? coeffs_[i] : 0.0;
  }

  bool operator==(const Polynomial& other) const { return coeffs_ == other.coeffs_; }

 private:
  std::vector<double> coeffs_;
};

// Multiplication counters for one evaluation.
//   ct_mults     ciphertext * ciphertext products
//   scalar_mults ciphertext * constant products
//   depth        longest multiplication chain (each product of either kind
//                extends the chain; mirrors level consumption in henc)
struct MultCount {
  long ct_mults = 0;
  long scalar_mults = 0;
  long depth = 0;
};

inline long ceil_log2(long n) {
  long bits = 0;
  long v = 1;
  while (v < n) {
    v <<= 1;
    ++bits;
  }
  return bits;
}

// Horner's rule: degree(p) ct*ct multiplications, chain depth degree(p).
inline std::pair<double, MultCount> eval_horner(const Polynomial& p, double x) {
  const auto& c = p.coeffs();
  double acc = c.back();
  for (std::size_t i = c.size() - 1; i-- > 0;) {
    acc = acc * x + c[i];
  }
  MultCount count;
  count.ct_mults = p.degree();
  count.depth = p.degree();
  return {acc, count};
}

// Paterson-Stockmeyer: O(sqrt(d)) ct*ct multiplications.
//
// Baby powers x^2..x^k with k = ceil(sqrt(d+1)) are built by balanced
// splits (x^i = x^(i/2) * x^(i-i/2)), the polynomial is cut into chunks of
// length k, each chunk is combined from baby powers with scalar products,
// and the chunks are folded with a Horner recursion in y = x^k.
inline std::pair<double, MultCount> eval_paterson_stockmeyer(const Polynomial& p, double x) {
  const long d = p.degree();
  MultCount count;
  if (d == 0) return {p[0], count};

  const long k = static_cast<long>(std::ceil(std::sqrt(static_cast<double>(d + 1))));

  // powers[i] = x^i together with the depth of its multiplication chain.
  // x^k itself is only needed when there is more than one chunk, i.e. k <= d.
  std::vector<double> powers(static_cast<std::size_t>(k) + 1, 1.0);
  std::vector<long> power_depth(static_cast<std::size_t>(k) + 1, 0);
  powers[1] = x;
  for (long i = 2; i <= std::min(k, d); ++i) {
    const long lo = i / 2;
    const long hi = i - lo;
    powers[i] = powers[lo] * powers[hi];
    power_depth[i] = std::max(power_depth[lo], power_depth[hi]) + 1;
    ++count.ct_mults;
  }

  const long chunks = d / k + 1;
  // Chunk values and the depth each one carries after its scalar products.
  std::vector<double> chunk_val(chunks, 0.0);
  long chunk_depth = 0;
  for (long c = 0; c < chunks; ++c) {
    double acc = p[static_cast<std::size_t>(c * k)];
    for (long j = 1; j < k; ++j) {
      const std::size_t idx = static_cast<std::size_t>(c * k + j);
      if (idx > static_cast<std::size_t>(d)) break;
      const double coeff = p[idx];
      acc += coeff * powers[j];
      ++count.scalar_mults;
      chunk_depth = std::max(chunk_depth, power_depth[j] + 1);
    }
    chunk_val[c] = acc;
  }

  // Fold the chunks with y = x^k: (((q_m y + q_{m-1}) y + ...) y + q_0).
  double acc = chunk_val[chunks - 1];
  long acc_depth = chunk_depth;
  for (long c = chunks - 2; c >= 0; --c) {
    acc = acc * powers[k] + chunk_val[c];
    acc_depth = std::max(acc_depth, power_depth[k]) + 1;
    ++count.ct_mults;
  }
  count.depth = acc_depth;
  return {acc, count};
}

// Least squares fit of degree <= `degree` through (xs, ys), solved by
// Householder QR of the Vandermonde matrix. Normal equations are avoided;
// they square the condition number.
inline Polynomial fit_least_squares(const std::vector<double>& xs,
                                    const std::vector<double>& ys, long degree) {
  if (degree < 0) throw InsufficientData("degree must be nonnegative");
  const std::size_t n = xs.size();
  const std::size_t m = static_cast<std::size_t>(degree) + 1;
  if (ys.size() != n || n < m) {
    throw InsufficientData("need at least degree+1 samples");
  }
  {
    std::vector<double> sorted(xs);
    std::sort(sorted.begin(), sorted.end());
    std::size_t distinct = static_cast<std::size_t>(
        std::unique(sorted.begin(), sorted.end()) - sorted.begin());
    if (distinct < m) throw InsufficientData("need at least degree+1 distinct x values");
  }

  Eigen::MatrixXd vand(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    double pw = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
      vand(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = pw;
      pw *= xs[i];
    }
  }
  Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(n));

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(vand);
  Eigen::VectorXd sol = qr.solve(rhs);

  // A computed least-squares minimizer leaves no residual inside the column
  // space: Q1^T (ys - A c) = 0 up to roundoff. A large component there means
  // the triangular solve lost accuracy to conditioning.
  Eigen::VectorXd resid = rhs - vand * sol;
  Eigen::VectorXd qt_resid = qr.householderQ().transpose() * resid;
  const double in_span = qt_resid.head(static_cast<Eigen::Index>(m)).norm();
  if (in_span > 1e-6 * rhs.norm()) {
    throw IllConditioned("Vandermonde solve residual too large");
  }

  return Polynomial(std::vector<double>(sol.data(), sol.data() + m));
}

inline Polynomial poly_add(const Polynomial& p, const Polynomial& q) {
  std::vector<double> out(std::max(p.coeffs().size(), q.coeffs().size()), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = p[i] + q[i];
  return Polynomial(std::move(out));
}

inline Polynomial poly_scale(const Polynomial& p, double s) {
  std::vector<double> out(p.coeffs());
  for (double& c : out) c *= s;
  return Polynomial(std::move(out));
}

inline Polynomial poly_mul(const Polynomial& p, const Polynomial& q,
                           long degree_cap = kDefaultDegreeCap) {
  if (p.is_zero() || q.is_zero()) return Polynomial::zero();
  const long result_degree = p.degree() + q.degree();
  if (result_degree > degree_cap) {
    throw DegreeLimitExceeded("product degree " + std::to_string(result_degree) +
                              " exceeds cap " + std::to_string(degree_cap));
  }
  std::vector<double> out(static_cast<std::size_t>(result_degree) + 1, 0.0);
  for (std::size_t i = 0; i < p.coeffs().size(); ++i) {
    if (p[i] == 0.0) continue;
    for (std::size_t j = 0; j < q.coeffs().size(); ++j) {
      out[i + j] += p[i] * q[j];
    }
  }
  return Polynomial(std::move(out));
}

// p(q(x)) via Horner over polynomials.
inline Polynomial poly_compose(const Polynomial& p, const Polynomial& q,
                               long degree_cap = kDefaultDegreeCap) {
  if (!p.is_zero() && !q.is_zero()) {
    const long projected = p.degree() * q.degree();
    if (projected > degree_cap) {
      throw DegreeLimitExceeded("composition degree " + std::to_string(projected) +
                                " exceeds cap " + std::to_string(degree_cap));
    }
  }
  const auto& c = p.coeffs();
  Polynomial acc = Polynomial::constant(c.back());
  for (std::size_t i = c.size() - 1; i-- > 0;) {
    acc = poly_add(poly_mul(acc, q, degree_cap), Polynomial::constant(c[i]));
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Evaluation plans: explicit DAGs of add/mul nodes over one input leaf and
// constant leaves, used to count multiplications and chain depth of a
// concrete evaluation strategy before running it on ciphertexts.

class EvalPlan {
 public:
  enum class NodeKind { input, constant, add, mul };

  struct Node {
    NodeKind kind;
    int lhs = -1;
    int rhs = -1;
    double value = 0.0;  // constants only
  };

  int input() {
    nodes_.push_back({NodeKind::input});
    return last();
  }
  int constant(double v) {
    nodes_.push_back({NodeKind::constant, -1, -1, v});
    return last();
  }
  int add(int a, int b) {
    nodes_.push_back({NodeKind::add, a, b});
    return last();
  }
  int mul(int a, int b) {
    nodes_.push_back({NodeKind::mul, a, b});
    return last();
  }
  int square(int a) { return mul(a, a); }

  void set_root(int node) { root_ = node; }
  int root() const { return root_ >= 0 ? root_ : last(); }

  const std::vector<Node>& nodes() const { return nodes_; }

  // Escape hatch for hand-built node tables; such tables can contain cycles,
  // which mult_depth_of_plan detects.
  static EvalPlan from_nodes(std::vector<Node> nodes, int root) {
    EvalPlan plan;
    plan.nodes_ = std::move(nodes);
    plan.root_ = root;
    return plan;
  }

 private:
  int last() const { return static_cast<int>(nodes_.size()) - 1; }

  std::vector<Node> nodes_;
  int root_ = -1;
};

// Counts multiplications and the longest multiplication chain of a plan.
// A mul node with two input-dependent operands is a ct*ct product, with one
// input-dependent operand a scalar product; products of two constants fold
// away and cost nothing. Shared subexpressions are counted once.
inline MultCount mult_depth_of_plan(const EvalPlan& plan) {
  const auto& nodes = plan.nodes();
  const int root = plan.root();
  if (root < 0 || root >= static_cast<int>(nodes.size())) {
    throw DomainError("plan root out of range");
  }

  enum class Mark { unseen, active, done };
  std::vector<Mark> mark(nodes.size(), Mark::unseen);
  std::vector<long> depth(nodes.size(), 0);
  std::vector<bool> is_ct(nodes.size(), false);
  MultCount count;

  // Iterative DFS; an edge into an `active` node is a cycle.
  struct Frame {
    int node;
    bool expanded;
  };
  std::vector<Frame> stack{{root, false}};
  while (!stack.empty()) {
    auto [id, expanded] = stack.back();
    stack.pop_back();
    if (id < 0 || id >= static_cast<int>(nodes.size())) {
      throw DomainError("plan child out of range");
    }
    const Node& node = nodes[static_cast<std::size_t>(id)];
    if (!expanded) {
      if (mark[id] == Mark::done) continue;
      if (mark[id] == Mark::active) throw CyclicPlan("evaluation plan contains a cycle");
      mark[id] = Mark::active;
      stack.push_back({id, true});
      if (node.kind == EvalPlan::NodeKind::add || node.kind == EvalPlan::NodeKind::mul) {
        for (int child : {node.lhs, node.rhs}) {
          if (child < 0 || child >= static_cast<int>(nodes.size())) {
            throw DomainError("plan child out of range");
          }
          if (mark[child] == Mark::active) throw CyclicPlan("evaluation plan contains a cycle");
          if (mark[child] == Mark::unseen) stack.push_back({child, false});
        }
      }
      continue;
    }
    switch (node.kind) {
      case EvalPlan::NodeKind::input:
        is_ct[id] = true;
        depth[id] = 0;
        break;
      case EvalPlan::NodeKind::constant:
        is_ct[id] = false;
        depth[id] = 0;
        break;
      case EvalPlan::NodeKind::add:
        is_ct[id] = is_ct[node.lhs] || is_ct[node.rhs];
        depth[id] = std::max(depth[node.lhs], depth[node.rhs]);
        break;
      case EvalPlan::NodeKind::mul: {
        const bool lct = is_ct[node.lhs];
        const bool rct = is_ct[node.rhs];
        is_ct[id] = lct || rct;
        depth[id] = std::max(depth[node.lhs], depth[node.rhs]);
        if (lct && rct) {
          ++count.ct_mults;
          ++depth[id];
        } else if (lct || rct) {
          ++count.scalar_mults;
          ++depth[id];
        }
        break;
      }
    }
    mark[id] = Mark::done;
  }

  count.depth = depth[root];
  return count;
}

}  // namespace henn
