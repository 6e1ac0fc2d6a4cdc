#pragma once

// nu_2 norms with explicit Hilbert-space factorizations, and the Schur
// multiplier T_phi acting on matrices.
//
// Inner products are linear in the first argument:
//     (u | v) = sum_k u[k] * conj(v[k]).
// A certificate stores vectors with (a2[t] | a1[s]) = phi(s, t).

#include <algorithm>
#include <cmath>
#include <vector>

#include "cbfactor/num_core.hpp"
#include "cbfactor/sdp.hpp"

namespace cbf {

/// A kernel phi(s, t) on finite index sets: rows s, columns t.
class SchurKernel {
 public:
  SchurKernel() = default;
  explicit SchurKernel(ComplexMatrix values) : values_(std::move(values)) {
    if (values_.rows() < 1 || values_.cols() < 1)
      throw Error(ErrorKind::DimensionMismatch, "kernel must be at least 1x1");
    if (!all_finite(values_)) throw Error(ErrorKind::InvalidInput, "kernel has non-finite entries");
  }

  const ComplexMatrix& values() const noexcept { return values_; }
  Eigen::Index rows() const noexcept { return values_.rows(); }
  Eigen::Index cols() const noexcept { return values_.cols(); }
  cplx operator()(Eigen::Index s, Eigen::Index t) const { return values_(s, t); }

 private:
  ComplexMatrix values_;
};

struct Nu2Certificate {
  double value = 0.0;
  /// K x m: column s is a1[s].
  ComplexMatrix a1;
  /// K x n: column t is a2[t].
  ComplexMatrix a2;
  Eigen::Index k = 0;
  double dual_lower = 0.0;
  double reconstruction_residual = 0.0;
  /// Tolerance the certificate was requested at.
  double eps = 0.0;
  /// Full Gram matrix (a2 block first), kept for callers that want it.
  ComplexMatrix gram;
};

inline double reconstruction_error(const ComplexMatrix& a1, const ComplexMatrix& a2,
                                   const ComplexMatrix& phi) {
  // (a2[t] | a1[s]) = sum_k a2[k,t] conj(a1[k,s])  ->  (a1^* a2)(s, t)
  if (a1.rows() == 0) return max_abs(phi);
  return max_abs(ComplexMatrix(a1.adjoint() * a2) - phi);
}

inline double max_column_norm(const ComplexMatrix& a) {
  return a.size() == 0 ? 0.0 : a.colwise().norm().maxCoeff();
}

/// nu_2(phi) with a factorization and a certified lower bound.
inline Nu2Certificate nu2(const SchurKernel& kernel, double eps) {
  if (!(eps >= 1e-10 && eps <= 1e-2)) throw Error(ErrorKind::InvalidInput, "eps must lie in [1e-10, 1e-2]");
  const ComplexMatrix& phi = kernel.values();
  const Eigen::Index m = phi.rows(), n = phi.cols();
  Nu2Certificate cert;
  cert.eps = eps;

  if (m == 1 && n == 1) {
    const double mag = std::abs(phi(0, 0));
    cert.value = cert.dual_lower = mag;
    if (mag > 0) {
      const double root = std::sqrt(mag);
      cert.k = 1;
      cert.a1 = ComplexMatrix::Constant(1, 1, root);
      cert.a2 = ComplexMatrix::Constant(1, 1, phi(0, 0) / root);
    } else {
      cert.a1 = ComplexMatrix::Zero(0, 1);
      cert.a2 = ComplexMatrix::Zero(0, 1);
    }
    cert.gram = ComplexMatrix(2, 2);
    cert.gram << mag, phi(0, 0), std::conj(phi(0, 0)), mag;
    cert.reconstruction_residual = reconstruction_error(cert.a1, cert.a2, phi);
    return cert;
  }

  const SdpSolution sol = solve_gram_completion({phi}, eps);
  cert.value = sol.t_star;
  cert.dual_lower = sol.dual_lower;
  cert.gram = sol.gram;
  if (sol.t_star == 0.0) {
    cert.a1 = ComplexMatrix::Zero(0, m);
    cert.a2 = ComplexMatrix::Zero(0, n);
    return cert;
  }
  const ComplexMatrix vecs = gram_vectors(sol.gram, 1e-13);
  cert.k = vecs.cols();
  cert.a2 = vecs.topRows(n).transpose();
  cert.a1 = vecs.bottomRows(m).transpose();
  cert.reconstruction_residual = reconstruction_error(cert.a1, cert.a2, phi);
  return cert;
}

struct CertificateCheck {
  bool norms_ok = false;
  bool reconstruction_ok = false;
  bool bounds_ok = false;
  bool ok() const { return norms_ok && reconstruction_ok && bounds_ok; }
};

/// Re-checks a certificate against its kernel without re-solving.
inline CertificateCheck check_certificate(const Nu2Certificate& cert, const SchurKernel& kernel,
                                          double gap) {
  CertificateCheck c;
  c.norms_ok = max_column_norm(cert.a1) * max_column_norm(cert.a2) <= cert.value * (1 + 1e-6);
  c.reconstruction_ok = reconstruction_error(cert.a1, cert.a2, kernel.values()) <=
                        1e-6 * std::max(1.0, cert.value);
  c.bounds_ok = cert.dual_lower <= cert.value && cert.value <= cert.dual_lower + gap;
  return c;
}

/// T_phi(C) = [phi(k, l) c_kl].
inline ComplexMatrix schur_apply(const SchurKernel& kernel, const ComplexMatrix& c) {
  if (c.rows() != kernel.rows() || c.cols() != kernel.cols())
    throw Error(ErrorKind::DimensionMismatch, "Schur multiplier and matrix sizes differ");
  return kernel.values().cwiseProduct(c);
}

/// max ||T_phi(C)|| / ||C|| over random Gaussian C: a lower bound for the
/// multiplier norm, hence for nu_2(phi).
inline double multiplier_norm_lower(const SchurKernel& kernel, int trials, GaussianStream& stream) {
  if (kernel.rows() != kernel.cols())
    throw Error(ErrorKind::DimensionMismatch, "multiplier_norm_lower needs a square kernel");
  double best = 0.0;
  for (int i = 0; i < trials; ++i) {
    const ComplexMatrix c = stream.draw_matrix(kernel.rows(), kernel.cols());
    const double nc = spectral_norm(c);
    if (nc == 0.0) continue;
    best = std::max(best, spectral_norm(schur_apply(kernel, c)) / nc);
  }
  return best;
}

}  // namespace cbf
