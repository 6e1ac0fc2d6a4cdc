#pragma once

// Kernels Theta(s, t) = <B(t) A(s) x, x*> built from two operator families,
// and the check nu_2(Theta) <= gamma(A) gamma(B) ||x|| ||x*||.

#include <cmath>

#include "cbfactor/gamma_mc.hpp"
#include "cbfactor/schur.hpp"

namespace cbf {

struct ThetaKernel {
  SchurKernel kernel;
  ComplexVector x;
  ComplexVector xstar;
  OperatorFamily a;
  OperatorFamily b;

  /// Fresh pairing computation of the stored kernel.
  ComplexMatrix recompute() const {
    ComplexMatrix out(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
    for (size_t s = 0; s < a.size(); ++s)
      for (size_t t = 0; t < b.size(); ++t)
        out(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) = pair(b.ops[t] * (a.ops[s] * x), xstar);
    return out;
  }
};

inline ThetaKernel theta_kernel(const OperatorFamily& a, const OperatorFamily& b, const ComplexVector& x,
                                const ComplexVector& xstar) {
  a.validate();
  b.validate();
  if (a.space.d != b.space.d || a.space.p != b.space.p)
    throw Error(ErrorKind::DimensionMismatch, "families act on different spaces");
  if (x.size() != a.space.d || xstar.size() != a.space.d)
    throw Error(ErrorKind::DimensionMismatch, "x and x* must have dimension d");
  if (a.ops.empty() || b.ops.empty()) throw Error(ErrorKind::InvalidInput, "families must be nonempty");
  ThetaKernel th{SchurKernel(), x, xstar, a, b};
  ComplexMatrix vals(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (size_t s = 0; s < a.size(); ++s) {
    const ComplexVector ax = a.ops[s] * x;
    for (size_t t = 0; t < b.size(); ++t)
      vals(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) = pair(b.ops[t] * ax, xstar);
  }
  th.kernel = SchurKernel(std::move(vals));
  return th;
}

/// [T^0, ..., T^{N-1}] acting on l^p_d.
inline OperatorFamily orbit_family(const ComplexMatrix& t, Eigen::Index n, double p = 2.0) {
  if (t.rows() != t.cols()) throw Error(ErrorKind::DimensionMismatch, "T must be square");
  if (n < 1) throw Error(ErrorKind::InvalidInput, "N must be >= 1");
  OperatorFamily f{{p, t.rows()}, {}};
  f.ops.reserve(static_cast<size_t>(n));
  ComplexMatrix power = ComplexMatrix::Identity(t.rows(), t.cols());
  for (Eigen::Index k = 0; k < n; ++k) {
    f.ops.push_back(power);
    power = power * t;
  }
  return f;
}

/// T_{j delta} = exp(-j delta G), j < N.
inline OperatorFamily semigroup_family(const ComplexMatrix& generator, double delta, Eigen::Index n,
                                       double p = 2.0) {
  if (generator.rows() != generator.cols()) throw Error(ErrorKind::DimensionMismatch, "generator must be square");
  if (!(delta > 0)) throw Error(ErrorKind::InvalidInput, "delta must be positive");
  if (n < 1) throw Error(ErrorKind::InvalidInput, "N must be >= 1");
  OperatorFamily f{{p, generator.rows()}, {}};
  f.ops.reserve(static_cast<size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) f.ops.push_back(expm(ComplexMatrix(-static_cast<double>(j) * delta * generator)));
  return f;
}

struct MainReport {
  double nu2 = 0.0;
  double bound = 0.0;
  bool pass = false;
  double gap = 0.0;
  /// Set when p != 2: the outcome depends on the caller's gamma bounds.
  bool conditional = false;
  Nu2Certificate certificate;
};

inline constexpr double kRelativeSlack = 1e-6;

/// nu_2(Theta) <= gammaA gammaB ||x||_p ||x*||_p' (1 + 1e-6) + eps.
inline MainReport verify_main(const OperatorFamily& a, const OperatorFamily& b, const ComplexVector& x,
                              const ComplexVector& xstar, double gamma_a, double gamma_b, double eps) {
  const ThetaKernel th = theta_kernel(a, b, x, xstar);
  MainReport r;
  r.certificate = nu2(th.kernel, eps);
  r.nu2 = r.certificate.value;
  r.gap = r.certificate.value - r.certificate.dual_lower;
  r.bound = gamma_a * gamma_b * a.space.norm(x) * a.space.dual_norm(xstar);
  r.pass = r.nu2 <= r.bound * (1 + kRelativeSlack) + eps;
  r.conditional = !a.space.hilbert();
  return r;
}

}  // namespace cbf
