#pragma once

// Gaussian averages in finite-dimensional l^p spaces: G(X) norms, lower
// estimates of gamma-boundedness constants, gamma-summing norms of finite
// rank operators and the pointwise multiplier M_A.
//
// Every Monte-Carlo quantity is reported with a standard error from the delta
// method. Only p = 2 has exact values (Gaussian sums are orthogonal there),
// so for p != 2 this module makes lower-bound claims only.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "cbfactor/num_core.hpp"

namespace cbf {

struct BanachSpaceDesc {
  double p = 2.0;
  Eigen::Index d = 1;

  void validate() const {
    if (!(p >= 1.0)) throw Error(ErrorKind::InvalidInput, "exponent p must be >= 1 or infinity");
    if (d < 1) throw Error(ErrorKind::InvalidInput, "dimension must be >= 1");
  }
  bool hilbert() const { return p == 2.0; }
  double norm(const ComplexVector& x) const { return lp_norm(x, p); }
  double dual_norm(const ComplexVector& x) const { return lp_norm(x, dual_exponent(p)); }
};

struct OperatorFamily {
  BanachSpaceDesc space;
  std::vector<ComplexMatrix> ops;

  void validate() const {
    space.validate();
    for (const auto& v : ops)
      if (v.rows() != space.d || v.cols() != space.d)
        throw Error(ErrorKind::DimensionMismatch, "family operator is not d x d");
  }
  size_t size() const { return ops.size(); }
};

/// Largest operator norm in the family; equals gamma(family) when p = 2.
inline double sup_norm(const OperatorFamily& family) {
  double s = 0.0;
  for (const auto& v : family.ops) s = std::max(s, spectral_norm(v));
  return s;
}

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_err = 0.0;
};

namespace detail {

inline double sq_lp_norm(const ComplexVector& v, double p) {
  const double n = lp_norm(v, p);
  return n * n;
}

struct Moments {
  double mean1 = 0, mean2 = 0, var1 = 0, var2 = 0, cov = 0;
  Eigen::Index count = 0;
};

// Streaming first and second moments of the pair (y1, y2).
class PairAccumulator {
 public:
  void add(double y1, double y2) {
    ++n_;
    const double d1 = y1 - m1_, d2 = y2 - m2_;
    m1_ += d1 / static_cast<double>(n_);
    m2_ += d2 / static_cast<double>(n_);
    s11_ += d1 * (y1 - m1_);
    s22_ += d2 * (y2 - m2_);
    s12_ += d1 * (y2 - m2_);
  }
  Moments moments() const {
    Moments m;
    m.count = n_;
    m.mean1 = m1_;
    m.mean2 = m2_;
    if (n_ > 1) {
      const double k = static_cast<double>(n_ - 1);
      m.var1 = s11_ / k;
      m.var2 = s22_ / k;
      m.cov = s12_ / k;
    }
    return m;
  }

 private:
  Eigen::Index n_ = 0;
  double m1_ = 0, m2_ = 0, s11_ = 0, s22_ = 0, s12_ = 0;
};

// sqrt(E y1 / E y2) and its delta-method standard error.
inline MonteCarloEstimate ratio_from(const Moments& m) {
  MonteCarloEstimate out;
  if (m.mean2 <= 0.0) return out;
  const double r2 = m.mean1 / m.mean2;
  out.estimate = std::sqrt(std::max(r2, 0.0));
  const double n = static_cast<double>(m.count);
  const double var_r2 = (m.var1 / (m.mean2 * m.mean2) - 2.0 * m.mean1 * m.cov / std::pow(m.mean2, 3) +
                         m.mean1 * m.mean1 * m.var2 / std::pow(m.mean2, 4)) /
                        n;
  out.std_err = out.estimate > 0 ? std::sqrt(std::max(var_r2, 0.0)) / (2.0 * out.estimate) : 0.0;
  return out;
}

}  // namespace detail

/// Monte-Carlo estimate of ||sum_j g_j (x) x_j||_{G(X)} = (E||sum g_j x_j||^2)^{1/2}.
/// `xs` holds the vectors x_j as columns.
inline MonteCarloEstimate gx_norm(const ComplexMatrix& xs, const BanachSpaceDesc& space, int samples,
                                  GaussianStream& stream) {
  space.validate();
  if (xs.rows() != space.d) throw Error(ErrorKind::DimensionMismatch, "vectors are not in C^d");
  if (samples < 1000) throw Error(ErrorKind::InvalidInput, "gx_norm needs at least 1000 samples");
  double mean = 0.0, m2 = 0.0;
  for (int s = 0; s < samples; ++s) {
    const ComplexVector g = stream.draw(xs.cols());
    const double y = detail::sq_lp_norm(xs * g, space.p);
    const double delta = y - mean;
    mean += delta / (s + 1);
    m2 += delta * (y - mean);
  }
  MonteCarloEstimate out;
  out.estimate = std::sqrt(mean);
  const double var = m2 / (samples - 1);
  out.std_err = mean > 0 ? std::sqrt(var / samples) / (2.0 * out.estimate) : 0.0;
  return out;
}

/// Estimate of sqrt(E||sum g_j y_j||^2 / E||sum g_j x_j||^2) on common draws.
inline MonteCarloEstimate gx_ratio(const ComplexMatrix& ys, const ComplexMatrix& xs,
                                   const BanachSpaceDesc& space, int samples, GaussianStream& stream) {
  if (ys.cols() != xs.cols()) throw Error(ErrorKind::DimensionMismatch, "term counts differ");
  detail::PairAccumulator acc;
  for (int s = 0; s < samples; ++s) {
    const ComplexVector g = stream.draw(xs.cols());
    acc.add(detail::sq_lp_norm(ys * g, space.p), detail::sq_lp_norm(xs * g, space.p));
  }
  return detail::ratio_from(acc.moments());
}

struct GammaSearch {
  int n_terms = 8;
  int restarts = 32;
  int iters = 200;
  double scale = 0.3;
  double decay = 0.99;
  /// Common draws used while searching.
  int search_samples = 2000;
  /// Fresh draws used to re-estimate the winning configuration.
  int samples = 20000;
};

/// A configuration (V_{k_j}, x_j), j < n_terms.
struct GammaWitness {
  std::vector<size_t> assignment;
  ComplexMatrix vectors;  // d x n_terms
};

struct GammaEstimate {
  double lower = 0.0;
  std::optional<double> exact;
  GammaWitness witness;
  double std_err = 0.0;
  /// Best single-operator ratio ||Vx|| / ||x|| found (exact, no sampling).
  double single_operator = 0.0;
};

namespace detail {

// Numerator/denominator sums S_y = Y G^T, S_x = X G^T over fixed draws,
// updated one term at a time.
class RatioSearch {
 public:
  RatioSearch(const OperatorFamily& family, const ComplexMatrix& draws)
      : family_(family), draws_(draws) {}

  void reset(const std::vector<size_t>& assign, const ComplexMatrix& x) {
    assign_ = assign;
    x_ = x;
    y_.resize(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) y_.col(j) = family_.ops[assign[static_cast<size_t>(j)]] * x.col(j);
    sy_ = y_ * draws_.transpose();
    sx_ = x_ * draws_.transpose();
    value_ = evaluate(sy_, sx_);
  }

  double value() const { return value_; }
  const std::vector<size_t>& assignment() const { return assign_; }
  const ComplexMatrix& vectors() const { return x_; }

  // Tries replacing term j; keeps it if the ratio improves.
  bool propose(Eigen::Index j, size_t op, const ComplexVector& xj) {
    const ComplexVector yj = family_.ops[op] * xj;
    const Eigen::RowVectorXcd g = draws_.col(j).transpose();
    ComplexMatrix sy = sy_ + (yj - y_.col(j)) * g;
    ComplexMatrix sx = sx_ + (xj - x_.col(j)) * g;
    const double v = evaluate(sy, sx);
    if (!(v > value_)) return false;
    sy_ = std::move(sy);
    sx_ = std::move(sx);
    y_.col(j) = yj;
    x_.col(j) = xj;
    assign_[static_cast<size_t>(j)] = op;
    value_ = v;
    return true;
  }

 private:
  double evaluate(const ComplexMatrix& sy, const ComplexMatrix& sx) const {
    double num = 0.0, den = 0.0;
    for (Eigen::Index s = 0; s < sy.cols(); ++s) {
      num += sq_lp_norm(sy.col(s), family_.space.p);
      den += sq_lp_norm(sx.col(s), family_.space.p);
    }
    return den > 0 ? std::sqrt(num / den) : 0.0;
  }

  const OperatorFamily& family_;
  const ComplexMatrix& draws_;  // samples x n_terms
  std::vector<size_t> assign_;
  ComplexMatrix x_, y_, sy_, sx_;
  double value_ = 0.0;
};

// Best ||Vx||_p / ||x||_p by perturbation ascent from the top right singular
// vector and the basis vectors.
inline ComplexVector best_single_vector(const ComplexMatrix& v, double p, GaussianStream& stream) {
  const Eigen::Index d = v.cols();
  auto ratio = [&](const ComplexVector& x) {
    const double nx = lp_norm(x, p);
    return nx > 0 ? lp_norm(v * x, p) / nx : 0.0;
  };
  const auto eig = hermitian_eig(ComplexMatrix(v.adjoint() * v));
  ComplexVector best = eig.vectors.col(d - 1);
  double best_val = ratio(best);
  for (Eigen::Index i = 0; i < d; ++i) {
    const ComplexVector e = ComplexVector::Unit(d, i);
    if (ratio(e) > best_val) {
      best = e;
      best_val = ratio(e);
    }
  }
  if (p == 2.0) return best;
  double scale = 0.3;
  for (int it = 0; it < 400; ++it, scale *= 0.99) {
    const ComplexVector cand = best + scale * best.norm() / std::sqrt(static_cast<double>(d)) * stream.draw(d);
    const double val = ratio(cand);
    if (val > best_val) {
      best = cand;
      best_val = val;
    }
  }
  return best;
}

}  // namespace detail

/// Lower estimate of gamma(family) by random restarts and coordinate-wise
/// perturbation ascent over (assignment, vectors), followed by a fresh-sample
/// re-estimate of the winner. Operators may repeat across terms.
///
/// The first restarts start from single-operator witnesses (one nonzero term),
/// whose ratio ||Vx|| / ||x|| is exact, so the result never falls below the
/// best single-operator ratio by more than the sampling error.
inline GammaEstimate gamma_lower(const OperatorFamily& family, const GammaSearch& search,
                                 GaussianStream& stream) {
  family.validate();
  if (family.ops.empty()) throw Error(ErrorKind::InvalidInput, "family is empty");
  const Eigen::Index d = family.space.d;
  const Eigen::Index n = std::max(1, search.n_terms);
  GaussianStream search_stream = stream.substream("gamma-search");
  GaussianStream fresh_stream = stream.substream("gamma-fresh");
  const ComplexMatrix draws = search_stream.draw_matrix(search.search_samples, n);

  GammaEstimate out;
  std::vector<size_t> best_assign(static_cast<size_t>(n), 0);
  ComplexMatrix best_x = ComplexMatrix::Zero(d, n);
  double best_val = -1.0;
  double single_best = 0.0;
  std::vector<size_t> single_assign;
  ComplexMatrix single_x;

  detail::RatioSearch rs(family, draws);
  const int restarts = std::max(search.restarts, static_cast<int>(family.size()));
  for (int r = 0; r < restarts; ++r) {
    std::vector<size_t> assign(static_cast<size_t>(n));
    ComplexMatrix x;
    if (r < static_cast<int>(family.size())) {
      x = ComplexMatrix::Zero(d, n);
      std::fill(assign.begin(), assign.end(), static_cast<size_t>(r));
      x.col(0) = detail::best_single_vector(family.ops[static_cast<size_t>(r)], family.space.p, search_stream);
      const double nx = lp_norm(x.col(0), family.space.p);
      const double v = nx > 0 ? lp_norm(family.ops[static_cast<size_t>(r)] * x.col(0), family.space.p) / nx : 0.0;
      if (v > single_best) {
        single_best = v;
        single_assign = assign;
        single_x = x;
      }
    } else {
      for (auto& a : assign)
        a = static_cast<size_t>(search_stream.next_uniform() * static_cast<double>(family.size())) % family.size();
      x = search_stream.draw_matrix(d, n);
    }
    rs.reset(assign, x);
    double scale = search.scale;
    for (int it = 0; it < search.iters; ++it, scale *= search.decay) {
      const Eigen::Index j = it % n;
      const ComplexVector cur = rs.vectors().col(j);
      const double base = std::max(cur.norm(), 1e-3 * rs.vectors().norm() / std::sqrt(static_cast<double>(n)));
      const ComplexVector cand = cur + scale * base / std::sqrt(static_cast<double>(d)) * search_stream.draw(d);
      size_t op = rs.assignment()[static_cast<size_t>(j)];
      if (family.size() > 1 && search_stream.next_uniform() < 0.2)
        op = static_cast<size_t>(search_stream.next_uniform() * static_cast<double>(family.size())) % family.size();
      rs.propose(j, op, cand);
    }
    if (rs.value() > best_val) {
      best_val = rs.value();
      best_assign = rs.assignment();
      best_x = rs.vectors();
    }
  }

  ComplexMatrix ys(d, n);
  for (Eigen::Index j = 0; j < n; ++j) ys.col(j) = family.ops[best_assign[static_cast<size_t>(j)]] * best_x.col(j);
  const MonteCarloEstimate fresh = gx_ratio(ys, best_x, family.space, search.samples, fresh_stream);
  out.lower = fresh.estimate;
  out.std_err = fresh.std_err;
  out.witness = {best_assign, best_x};
  if (single_best > out.lower) {
    out.lower = single_best;
    out.std_err = 0.0;
    out.witness = {single_assign, single_x};
  }
  out.single_operator = single_best;
  if (family.space.hilbert()) out.exact = sup_norm(family);
  return out;
}

/// u : l^2_N -> X given by its columns u(e_j).
struct FiniteRankOperator {
  ComplexMatrix matrix;
  BanachSpaceDesc space;
};

/// ||u||_gamma, estimated as the G(X) norm of the images of the standard basis.
///
/// For finite-dimensional H the supremum over finite orthonormal systems is
/// attained on any full orthonormal basis: a Gaussian vector is rotation
/// invariant, so every full basis gives the same value, and a partial system
/// is a contraction of a full one (Gaussian contraction principle).
inline MonteCarloEstimate gamma_summing_norm(const FiniteRankOperator& u, int samples, GaussianStream& stream) {
  return gx_norm(u.matrix, u.space, samples, stream);
}

/// F in L^2(Omega; X) on a finite weighted Omega: column t is F(t).
struct VectorFunction {
  ComplexMatrix values;
  RealVector weights;

  void validate() const {
    if (weights.size() != values.cols())
      throw Error(ErrorKind::DimensionMismatch, "one weight per atom required");
    for (Eigen::Index i = 0; i < weights.size(); ++i)
      if (!(weights(i) > 0)) throw Error(ErrorKind::InvalidInput, "weights must be positive");
  }

  /// Images of an orthonormal basis under u_F: sqrt(w_t) F(t).
  FiniteRankOperator as_operator(const BanachSpaceDesc& space) const {
    validate();
    return {values * weights.cwiseSqrt().cast<cplx>().asDiagonal(), space};
  }
};

/// (M_A F)(t) = A(t) F(t).
inline VectorFunction multiplier_apply(const OperatorFamily& family, const VectorFunction& f) {
  f.validate();
  if (static_cast<Eigen::Index>(family.ops.size()) != f.values.cols())
    throw Error(ErrorKind::DimensionMismatch, "family and function live on different index sets");
  VectorFunction out{ComplexMatrix(f.values.rows(), f.values.cols()), f.weights};
  for (Eigen::Index t = 0; t < f.values.cols(); ++t) {
    const auto& a = family.ops[static_cast<size_t>(t)];
    if (a.cols() != f.values.rows()) throw Error(ErrorKind::DimensionMismatch, "operator and vector sizes differ");
    out.values.col(t) = a * f.values.col(t);
  }
  return out;
}

}  // namespace cbf
