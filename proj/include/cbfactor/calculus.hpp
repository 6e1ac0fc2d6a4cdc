#pragma once

// Hankel kernels m(k + l), truncated multiplier bounds, two-sided bounds for
// the A_0 norm of analytic polynomials, the polynomial calculus rho_T and
// Hille-Phillips quadrature for sampled semigroups.
//
// Convolution on the circle is normalized, (f * h)(s) = (1/2pi) int f(s-u) h(u) du,
// so coefficientwise (f * h)^(n) = f^(n) h^(n) and e_n * e_n = e_n.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "cbfactor/factor_theorem.hpp"
#include "cbfactor/schur.hpp"

namespace cbf {

struct HankelSequence {
  /// m(0), ..., m(2N-2) at least.
  ComplexVector values;
  Eigen::Index n = 1;
  /// Set by generators whose full (infinite) sequence is the moment sequence
  /// of a positive measure on [0, 1]; then the multiplier norm is m(0).
  bool completely_monotone = false;

  void validate() const {
    if (n < 1) throw Error(ErrorKind::InvalidInput, "truncation size must be >= 1");
    if (values.size() < 2 * n - 1) throw Error(ErrorKind::LengthMismatch, "Hankel sequence needs 2N-1 values");
    if (!all_finite(values)) throw Error(ErrorKind::InvalidInput, "sequence has non-finite values");
  }
};

inline HankelSequence geometric_sequence(double r, Eigen::Index n) {
  if (!(r > 0 && r <= 1)) throw Error(ErrorKind::InvalidInput, "ratio must lie in (0, 1]");
  HankelSequence m{ComplexVector(2 * n - 1), n, true};
  for (Eigen::Index k = 0; k < m.values.size(); ++k) m.values(k) = std::pow(r, static_cast<double>(k));
  return m;
}

/// m(k) = 1 / (k + 1) = int_0^1 u^k du.
inline HankelSequence harmonic_sequence(Eigen::Index n) {
  HankelSequence m{ComplexVector(2 * n - 1), n, true};
  for (Eigen::Index k = 0; k < m.values.size(); ++k) m.values(k) = 1.0 / static_cast<double>(k + 1);
  return m;
}

inline HankelSequence delta_sequence(Eigen::Index j, Eigen::Index n) {
  HankelSequence m{ComplexVector::Zero(std::max(2 * n - 1, j + 1)), n, false};
  m.values(j) = 1.0;
  return m;
}

/// phi[k][l] = m(k + l), N x N.
inline SchurKernel hankel_kernel(const HankelSequence& m) {
  m.validate();
  ComplexMatrix k(m.n, m.n);
  for (Eigen::Index i = 0; i < m.n; ++i)
    for (Eigen::Index j = 0; j < m.n; ++j) k(i, j) = m.values(i + j);
  return SchurKernel(std::move(k));
}

struct Ms1Bound {
  double value = 0.0;
  Nu2Certificate certificate;
};

/// nu_2 of the N x N Hankel truncation: a lower bound for the multiplier
/// norm, nondecreasing in N.
inline Ms1Bound ms1_lower(const HankelSequence& m, double eps) {
  Ms1Bound b;
  b.certificate = nu2(hankel_kernel(m), eps);
  b.value = b.certificate.value;
  return b;
}

/// m(n) = <T^n x, x*> for n < 2N - 1.
inline HankelSequence coeff_sequence(const ComplexMatrix& t, const ComplexVector& x, const ComplexVector& xstar,
                                     Eigen::Index n) {
  if (t.rows() != t.cols()) throw Error(ErrorKind::DimensionMismatch, "T must be square");
  if (x.size() != t.rows() || xstar.size() != t.rows())
    throw Error(ErrorKind::DimensionMismatch, "x and x* must match T");
  if (n < 1) throw Error(ErrorKind::InvalidInput, "N must be >= 1");
  HankelSequence m{ComplexVector(2 * n - 1), n, false};
  ComplexVector v = x;
  for (Eigen::Index k = 0; k < m.values.size(); ++k) {
    m.values(k) = pair(v, xstar);
    v = t * v;
  }
  return m;
}

struct PowerReport {
  double nu2 = 0.0;
  double bound = 0.0;
  bool pass = false;
  double gap = 0.0;
  Nu2Certificate certificate;
};

/// nu_2 of [<T^{k+l} x, x*>] against gamma_T^2 ||x|| ||x*||'.
inline PowerReport verify_power(const ComplexMatrix& t, const ComplexVector& x, const ComplexVector& xstar,
                                Eigen::Index n, double gamma_t, double eps, double p = 2.0) {
  const Ms1Bound b = ms1_lower(coeff_sequence(t, x, xstar, n), eps);
  PowerReport r;
  r.certificate = b.certificate;
  r.nu2 = b.value;
  r.gap = b.certificate.value - b.certificate.dual_lower;
  r.bound = gamma_t * gamma_t * lp_norm(x, p) * lp_norm(xstar, dual_exponent(p));
  r.pass = r.nu2 <= r.bound * (1 + kRelativeSlack) + eps;
  return r;
}

/// sup_{n < N} ||T^n||.
inline double power_bound(const ComplexMatrix& t, Eigen::Index n) { return sup_norm(orbit_family(t, n)); }

/// F(z) = sum_{n <= deg} F^(n) z^n.
struct AnalyticPolynomial {
  ComplexVector coeffs = ComplexVector::Zero(1);

  Eigen::Index degree() const { return coeffs.size() - 1; }
  cplx operator()(double theta) const {
    cplx acc = 0.0;
    const cplx z = std::polar(1.0, theta);
    for (Eigen::Index k = coeffs.size() - 1; k >= 0; --k) acc = acc * z + coeffs(k);
    return acc;
  }
  static AnalyticPolynomial monomial(Eigen::Index n) {
    AnalyticPolynomial f{ComplexVector::Zero(n + 1)};
    f.coeffs(n) = 1.0;
    return f;
  }
};

inline AnalyticPolynomial operator*(const AnalyticPolynomial& f, const AnalyticPolynomial& g) {
  AnalyticPolynomial h{ComplexVector::Zero(f.coeffs.size() + g.coeffs.size() - 1)};
  for (Eigen::Index i = 0; i < f.coeffs.size(); ++i)
    for (Eigen::Index j = 0; j < g.coeffs.size(); ++j) h.coeffs(i + j) += f.coeffs(i) * g.coeffs(j);
  return h;
}

/// rho_T(F) = sum_n F^(n) T^n, evaluated by Horner's rule.
inline ComplexMatrix rho_eval(const ComplexMatrix& t, const AnalyticPolynomial& f) {
  if (t.rows() != t.cols()) throw Error(ErrorKind::DimensionMismatch, "T must be square");
  const Eigen::Index d = t.rows();
  ComplexMatrix acc = ComplexMatrix::Zero(d, d);
  for (Eigen::Index k = f.coeffs.size() - 1; k >= 0; --k) {
    acc = acc * t;
    acc.diagonal().array() += f.coeffs(k);
  }
  return acc;
}

/// sum_k c_k e^{i (low + k) theta}, frequencies over Z.
struct TrigPolynomial {
  int low = 0;
  ComplexVector coeffs = ComplexVector::Zero(1);

  int high() const { return low + static_cast<int>(coeffs.size()) - 1; }
  cplx coefficient(int n) const { return n < low || n > high() ? cplx(0.0) : coeffs(n - low); }
  cplx operator()(double theta) const {
    cplx acc = 0.0;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) acc += coeffs(k) * std::polar(1.0, (low + static_cast<double>(k)) * theta);
    return acc;
  }
  static TrigPolynomial from(const AnalyticPolynomial& f) { return {0, f.coeffs}; }
};

struct A0Decomposition {
  std::vector<std::pair<TrigPolynomial, AnalyticPolynomial>> pairs;
  /// Evaluation grid size; 0 selects 1024 (deg + 1).
  Eigen::Index grid_size = 0;
};

namespace detail {

inline std::vector<cplx> sample(const auto& p, Eigen::Index grid) {
  std::vector<cplx> out(static_cast<size_t>(grid));
  for (Eigen::Index j = 0; j < grid; ++j)
    out[static_cast<size_t>(j)] = p(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(grid));
  return out;
}

inline double grid_max(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

inline double grid_mean_abs(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::abs(z);
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Half of (highest - lowest) nonzero frequency.
inline double half_spread(const ComplexVector& c) {
  Eigen::Index lo = -1, hi = -1;
  for (Eigen::Index k = 0; k < c.size(); ++k)
    if (c(k) != cplx(0.0)) {
      if (lo < 0) lo = k;
      hi = k;
    }
  return lo < 0 ? 0.0 : 0.5 * static_cast<double>(hi - lo);
}

// (f * h)^(n) = f^(n) h^(n) for n >= 0; h is analytic.
inline AnalyticPolynomial convolve(const TrigPolynomial& f, const AnalyticPolynomial& h) {
  AnalyticPolynomial out{ComplexVector::Zero(h.coeffs.size())};
  for (Eigen::Index n = 0; n < h.coeffs.size(); ++n) out.coeffs(n) = f.coefficient(static_cast<int>(n)) * h.coeffs(n);
  return out;
}

}  // namespace detail

/// Largest degree among F and the pieces of a decomposition.
inline Eigen::Index decomposition_degree(const AnalyticPolynomial& f, const A0Decomposition& dec) {
  Eigen::Index deg = f.degree();
  for (const auto& [fk, hk] : dec.pairs)
    deg = std::max({deg, hk.degree(), static_cast<Eigen::Index>(std::max(std::abs(fk.low), std::abs(fk.high())))});
  return deg;
}

/// sum_k ||f_k||_inf ||h_k||_1, an upper bound for the A_0 norm of F.
///
/// Grid quantities are inflated to rigorous bounds. If p has frequencies in
/// [c - D, c + D] then |p| = |p e_{-c}| and Bernstein gives |p'| <= D ||p||_inf,
/// so with spacing 2pi/M:
///   ||p||_inf <= gridmax |p| / (1 - pi D / M)
///   ||p||_1   <= mean |p| + D ||p||_inf pi / (2M).
inline double a0_upper(const AnalyticPolynomial& f, const A0Decomposition& dec) {
  const Eigen::Index deg = decomposition_degree(f, dec);
  const Eigen::Index grid = dec.grid_size > 0 ? dec.grid_size : 1024 * (deg + 1);
  if (grid < 8 * (deg + 1)) throw Error(ErrorKind::GridMismatch, "evaluation grid too coarse for the degree");

  AnalyticPolynomial sum{ComplexVector::Zero(f.coeffs.size())};
  for (const auto& [fk, hk] : dec.pairs) {
    const AnalyticPolynomial c = detail::convolve(fk, hk);
    if (c.coeffs.size() > sum.coeffs.size()) sum.coeffs.conservativeResizeLike(ComplexVector::Zero(c.coeffs.size()));
    sum.coeffs.head(c.coeffs.size()) += c.coeffs;
  }
  const auto target = detail::sample(f, grid);
  const auto recon = detail::sample(sum, grid);
  for (size_t j = 0; j < target.size(); ++j)
    if (std::abs(target[j] - recon[j]) > 1e-8)
      throw Error(ErrorKind::DecompositionMismatch, "decomposition does not reproduce F on the grid");

  const double m = static_cast<double>(grid);
  double total = 0.0;
  for (const auto& [fk, hk] : dec.pairs) {
    const double df = detail::half_spread(fk.coeffs);
    const double dh = detail::half_spread(hk.coeffs);
    const double f_sup = detail::grid_max(detail::sample(fk, grid)) / (1.0 - std::numbers::pi * df / m);
    const auto hs = detail::sample(hk, grid);
    const double h_sup = detail::grid_max(hs) / (1.0 - std::numbers::pi * dh / m);
    const double h_l1 = detail::grid_mean_abs(hs) + dh * h_sup * std::numbers::pi / (2.0 * m);
    total += f_sup * h_l1;
  }
  return total;
}

struct A0Lower {
  /// max(functional, sup_grid).
  double value = 0.0;
  /// |sum F^(n) m(n)| / ub(m).
  double functional = 0.0;
  /// Grid maximum of |F|; a lower-biased estimate of ||F||_inf <= ||F||_A0.
  double sup_grid = 0.0;
  double ub = 0.0;
};

/// Upper bound for the multiplier norm of a finitely supported m.
///
/// Each delta_n has an antidiagonal Hankel pattern with nu_2 = 1, so the norm
/// is at most sum |m(n)|. Completely monotone sequences also have norm m(0).
inline double multiplier_upper(const HankelSequence& m) {
  double ub = m.values.cwiseAbs().sum();
  if (m.completely_monotone) ub = std::min(ub, std::abs(m.values(0)));
  return ub;
}

inline A0Lower a0_lower(const AnalyticPolynomial& f, const HankelSequence& m) {
  A0Lower r;
  cplx s = 0.0;
  for (Eigen::Index n = 0; n < std::min(f.coeffs.size(), m.values.size()); ++n) s += f.coeffs(n) * m.values(n);
  r.ub = multiplier_upper(m);
  r.functional = r.ub > 0 ? std::abs(s) / r.ub : 0.0;
  r.sup_grid = detail::grid_max(detail::sample(f, 1024 * (f.degree() + 1)));
  r.value = std::max(r.functional, r.sup_grid);
  return r;
}

/// T_{j delta} = exp(-j delta G) for j < 2N - 1, enough for N x N kernels
/// m((j + k) delta).
struct SemigroupSample {
  ComplexMatrix generator;
  double delta = 0.0;
  Eigen::Index n = 1;
  std::vector<ComplexMatrix> samples;

  /// max ||T_{(j+k) delta} - T_{j delta} T_{k delta}|| over the grid.
  double semigroup_defect() const {
    double worst = 0.0;
    const size_t len = samples.size();
    for (size_t j = 0; j < len; ++j)
      for (size_t k = 0; j + k < len; ++k)
        worst = std::max(worst, max_abs(ComplexMatrix(samples[j + k] - samples[j] * samples[k])));
    return worst;
  }

  /// sup_{j < N} ||T_{j delta}||: gamma of the sampled family on l^2_d.
  double sup_norm() const {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) s = std::max(s, spectral_norm(samples[static_cast<size_t>(j)]));
    return s;
  }
};

inline SemigroupSample sample_semigroup(const ComplexMatrix& generator, double delta, Eigen::Index n) {
  if (generator.rows() != generator.cols()) throw Error(ErrorKind::DimensionMismatch, "generator must be square");
  if (!(delta > 0)) throw Error(ErrorKind::InvalidInput, "delta must be positive");
  if (n < 1) throw Error(ErrorKind::InvalidInput, "N must be >= 1");
  SemigroupSample sg{generator, delta, n, {}};
  sg.samples.reserve(static_cast<size_t>(2 * n - 1));
  for (Eigen::Index j = 0; j < 2 * n - 1; ++j)
    sg.samples.push_back(expm(ComplexMatrix(-static_cast<double>(j) * delta * generator)));
  return sg;
}

struct HillePhillips {
  ComplexMatrix value;
  double norm = 0.0;
  /// max_j ||T_{j delta}|| times the quadrature of |b|.
  double rough_bound = 0.0;
  bool rough_ok = false;
};

/// Trapezoidal sum_j w_j b(j delta) T_{j delta} over all stored samples.
inline HillePhillips hille_phillips(const SemigroupSample& sg, const ComplexVector& b) {
  if (b.size() != static_cast<Eigen::Index>(sg.samples.size()))
    throw Error(ErrorKind::GridMismatch, "b must be sampled on the semigroup grid");
  const Eigen::Index d = sg.generator.rows();
  HillePhillips r;
  r.value = ComplexMatrix::Zero(d, d);
  double b_l1 = 0.0, t_sup = 0.0;
  const Eigen::Index len = b.size();
  for (Eigen::Index j = 0; j < len; ++j) {
    const double w = len == 1 ? 0.0 : (j == 0 || j == len - 1 ? 0.5 : 1.0) * sg.delta;
    r.value += (w * b(j)) * sg.samples[static_cast<size_t>(j)];
    b_l1 += w * std::abs(b(j));
    t_sup = std::max(t_sup, spectral_norm(sg.samples[static_cast<size_t>(j)]));
  }
  r.norm = spectral_norm(r.value);
  r.rough_bound = t_sup * b_l1;
  r.rough_ok = r.norm <= r.rough_bound * (1 + 1e-12) + 1e-14;
  return r;
}

struct SemigroupReport {
  double nu2 = 0.0;
  double bound = 0.0;
  bool pass = false;
  double gap = 0.0;
  Nu2Certificate certificate;
};

/// nu_2 of the grid kernel m((j + k) delta), m(t) = <T_t x, x*>. On the grid
/// this is an exact instance of the Theta inequality with A = B = {T_{j delta}}.
inline SemigroupReport verify_semigroup(const SemigroupSample& sg, const ComplexVector& x,
                                        const ComplexVector& xstar, double gamma_t, double eps, double p = 2.0) {
  const Eigen::Index d = sg.generator.rows();
  if (x.size() != d || xstar.size() != d) throw Error(ErrorKind::DimensionMismatch, "x and x* must match the generator");
  if (static_cast<Eigen::Index>(sg.samples.size()) < 2 * sg.n - 1)
    throw Error(ErrorKind::GridMismatch, "semigroup sample is shorter than 2N-1");
  HankelSequence m{ComplexVector(2 * sg.n - 1), sg.n, false};
  for (Eigen::Index j = 0; j < m.values.size(); ++j) m.values(j) = pair(sg.samples[static_cast<size_t>(j)] * x, xstar);
  const Ms1Bound b = ms1_lower(m, eps);
  SemigroupReport r;
  r.certificate = b.certificate;
  r.nu2 = b.value;
  r.gap = b.certificate.value - b.certificate.dual_lower;
  r.bound = gamma_t * gamma_t * lp_norm(x, p) * lp_norm(xstar, dual_exponent(p));
  r.pass = r.nu2 <= r.bound * (1 + kRelativeSlack) + eps;
  return r;
}

}  // namespace cbf
