#pragma once

// Dense complex linear algebra and seeded Gaussian sampling shared by every
// other module. Matrices are Eigen column-major containers; all routines are
// pure functions of their arguments.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <numbers>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "cbfactor/error.hpp"

namespace cbf {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Eigenvalues ascending, eigenvectors as the matching columns of a unitary.
struct EigenDecomposition {
  std::vector<double> values;
  ComplexMatrix vectors;
};

namespace detail {

inline double off_diagonal_norm2(const ComplexMatrix& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) s += std::norm(a(i, j));
  return s;
}

}  // namespace detail

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Each rotation first removes the phase of a(p,q) with a diagonal unitary and
/// then applies the classical real Jacobi rotation, so a sweep costs O(n^3).
/// Sweeps stop once the off-diagonal mass is below round-off of the diagonal.
inline EigenDecomposition hermitian_eig(const ComplexMatrix& m, int max_sweeps = 100) {
  if (m.rows() != m.cols())
    throw Error(ErrorKind::DimensionMismatch, "hermitian_eig needs a square matrix");
  const Eigen::Index n = m.rows();
  const double scale = std::max(1.0, max_abs(m));
  if (n > 0 && max_abs(m - m.adjoint()) > 1e-12 * scale)
    throw Error(ErrorKind::NotHermitian, "asymmetry exceeds 1e-12 relative");

  ComplexMatrix a = 0.5 * (m + m.adjoint());
  ComplexMatrix v = ComplexMatrix::Identity(n, n);
  const double frob2 = a.squaredNorm();
  const double eps = std::numeric_limits<double>::epsilon();

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    if (detail::off_diagonal_norm2(a) <= eps * eps * frob2) break;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const cplx phase = apq / mag;
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // J = diag(1, conj(phase)) * [[c, s], [-s, c]]
        const cplx jpp = c, jpq = s, jqp = -s * std::conj(phase), jqq = c * std::conj(phase);
        for (Eigen::Index k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (Eigen::Index k = 0; k < n; ++k) {
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * jpp + vkq * jqp;
          v(k, q) = vkp * jpq + vkq * jqq;
        }
      }
    }
  }
  if (sweep == max_sweeps && detail::off_diagonal_norm2(a) > 1e6 * eps * eps * frob2)
    throw Error(ErrorKind::NoConvergence, "Jacobi sweep cap reached");

  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return a(x, x).real() < a(y, y).real(); });
  EigenDecomposition out;
  out.values.reserve(static_cast<size_t>(n));
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto src = order[static_cast<size_t>(i)];
    out.values.push_back(a(src, src).real());
    out.vectors.col(i) = v.col(src);
  }
  return out;
}

/// Largest singular value, from the smaller of M*M and MM*.
inline double spectral_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  const ComplexMatrix g = m.rows() >= m.cols() ? ComplexMatrix(m.adjoint() * m)
                                               : ComplexMatrix(m * m.adjoint());
  const auto eig = hermitian_eig(g);
  return std::sqrt(std::max(0.0, eig.values.back()));
}

/// Sum of singular values. Uses the Hermitian dilation [[0, M], [M*, 0]],
/// whose spectrum is {±sigma_i}, so small singular values keep absolute
/// accuracy instead of losing half their digits to a square root.
inline double trace_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  const Eigen::Index r = m.rows(), c = m.cols();
  ComplexMatrix h = ComplexMatrix::Zero(r + c, r + c);
  h.topRightCorner(r, c) = m;
  h.bottomLeftCorner(c, r) = m.adjoint();
  const auto eig = hermitian_eig(h);
  double s = 0.0;
  for (double v : eig.values) s += std::abs(v);
  return 0.5 * s;
}

/// Vectors g_i (rows of the returned r-column matrix) with
/// (g_i | g_j) = sum_k g_i[k] conj(g_j[k]) = G(i, j).
///
/// Eigenvalues below tol*||G|| are dropped (negative ones above -tol*||G||
/// are clamped to zero); anything more negative is NotPSD.
inline ComplexMatrix gram_vectors(const ComplexMatrix& g, double tol) {
  if (g.rows() != g.cols())
    throw Error(ErrorKind::DimensionMismatch, "gram_vectors needs a square matrix");
  const Eigen::Index n = g.rows();
  if (n == 0) return ComplexMatrix(0, 0);
  const auto eig = hermitian_eig(g);
  const double norm = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
  if (norm == 0.0) return ComplexMatrix::Zero(n, 0);
  if (eig.values.front() < -tol * norm)
    throw Error(ErrorKind::NotPSD, "smallest eigenvalue " + std::to_string(eig.values.front()) +
                                       " below -tol*||G||");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < n; ++k)
    if (eig.values[static_cast<size_t>(k)] > tol * norm) keep.push_back(k);
  ComplexMatrix out(n, static_cast<Eigen::Index>(keep.size()));
  for (size_t c = 0; c < keep.size(); ++c) {
    const double root = std::sqrt(eig.values[static_cast<size_t>(keep[c])]);
    out.col(static_cast<Eigen::Index>(c)) = eig.vectors.col(keep[c]) * root;
  }
  return out;
}

/// Matrix exponential (Pade scaling and squaring).
inline ComplexMatrix expm(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::DimensionMismatch, "expm needs a square matrix");
  if (!all_finite(m)) throw Error(ErrorKind::Overflow, "expm input is not finite");
  ComplexMatrix out = m.exp();
  if (!all_finite(out)) throw Error(ErrorKind::Overflow, "expm result overflowed");
  return out;
}

/// Bilinear pairing <y, x*> = sum_i y_i x*_i, the action of a functional on X.
inline cplx pair(const ComplexVector& y, const ComplexVector& xstar) {
  if (y.size() != xstar.size()) throw Error(ErrorKind::DimensionMismatch, "pairing sizes differ");
  cplx s = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) s += y(i) * xstar(i);
  return s;
}

/// l^p norm on C^d; p = +infinity is the max modulus.
inline double lp_norm(const ComplexVector& x, double p) {
  if (std::isinf(p)) return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
  if (p == 2.0) return x.norm();
  if (p == 1.0) return x.cwiseAbs().sum();
  double mx = x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
  if (mx == 0.0) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x(i)) / mx, p);
  return mx * std::pow(s, 1.0 / p);
}

/// Conjugate exponent p' with 1/p + 1/p' = 1.
inline double dual_exponent(double p) {
  if (std::isinf(p)) return 1.0;
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  return p / (p - 1.0);
}

// ---------------------------------------------------------------------------
// Gaussian sampling

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace detail

/// Counter-based stream of standard complex Gaussians (E|g|^2 = 1, real and
/// imaginary parts independent with variance 1/2).
///
/// Draw i is a pure function of (seed, i): two uniforms come from the
/// SplitMix64 finalizer applied to counters 2i and 2i+1, then Box-Muller.
/// Substreams re-key the seed by a label so shards never overlap.
class GaussianStream {
 public:
  static constexpr int kAlgorithmVersion = 1;

  explicit GaussianStream(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t index() const noexcept { return index_; }

  GaussianStream substream(std::string_view label) const {
    return GaussianStream(detail::mix64(seed_ ^ detail::mix64(detail::fnv1a(label))));
  }
  GaussianStream substream(std::uint64_t chunk) const {
    return GaussianStream(detail::mix64(seed_ + 0x9E3779B97F4A7C15ULL * (chunk + 1)) ^ 0x5851F42D4C957F2DULL);
  }

  cplx next() {
    const double u1 = uniform(2 * index_);
    const double u2 = uniform(2 * index_ + 1);
    ++index_;
    const double r = std::sqrt(-std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
  }

  ComplexVector draw(Eigen::Index count) {
    ComplexVector out(count);
    for (Eigen::Index i = 0; i < count; ++i) out(i) = next();
    return out;
  }

  ComplexMatrix draw_matrix(Eigen::Index rows, Eigen::Index cols) {
    ComplexMatrix out(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = next();
    return out;
  }

  /// Uniform in [0, 1) from the same counter space; consumes one draw slot.
  double next_uniform() {
    const double u = uniform(2 * index_) - 0x1.0p-54;
    ++index_;
    return u;
  }

 private:
  // Uniform in (0, 1], 53-bit resolution.
  double uniform(std::uint64_t counter) const {
    const std::uint64_t bits = detail::mix64(seed_ + 0x9E3779B97F4A7C15ULL * (counter + 1));
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
  }

  std::uint64_t seed_;
  std::uint64_t index_ = 0;
};

inline ComplexVector gaussian_draw(GaussianStream& stream, Eigen::Index count) {
  return stream.draw(count);
}

// ---------------------------------------------------------------------------
// Random test objects, used by suites and the CLI.

inline ComplexMatrix random_unitary(Eigen::Index d, GaussianStream& stream) {
  const ComplexMatrix g = stream.draw_matrix(d, d);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d, d);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < d; ++i) {
    const double mag = std::abs(r(i, i));
    if (mag > 0) q.col(i) *= r(i, i) / mag;
  }
  return q;
}

/// Random matrix rescaled to have operator norm exactly `norm`.
inline ComplexMatrix random_with_norm(Eigen::Index d, double norm, GaussianStream& stream) {
  ComplexMatrix g = stream.draw_matrix(d, d);
  const double s = spectral_norm(g);
  return s > 0 ? ComplexMatrix(g * (norm / s)) : g;
}

}  // namespace cbf
