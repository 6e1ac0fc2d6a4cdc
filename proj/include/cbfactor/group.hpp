#pragma once

// Finite groups, their representations and Fourier multipliers.
//
// Haar measure is counting measure, so sigma_pi(f) = sum_t f(t) pi(t) and the
// regular representation sends delta_s to lambda(s).

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "cbfactor/schur.hpp"

namespace cbf {

/// Multiplication table: table[a][b] is the index of a*b.
class FiniteGroup {
 public:
  FiniteGroup() = default;
  explicit FiniteGroup(std::vector<std::vector<int>> table) : table_(std::move(table)) { validate(); }

  int order() const noexcept { return static_cast<int>(table_.size()); }
  int identity() const noexcept { return identity_; }
  int mul(int a, int b) const { return table_[static_cast<size_t>(a)][static_cast<size_t>(b)]; }
  int inverse(int a) const { return inverse_[static_cast<size_t>(a)]; }
  const std::vector<std::vector<int>>& table() const noexcept { return table_; }

  bool abelian() const {
    for (int a = 0; a < order(); ++a)
      for (int b = 0; b < a; ++b)
        if (mul(a, b) != mul(b, a)) return false;
    return true;
  }

  bool operator==(const FiniteGroup& o) const { return table_ == o.table_; }

 private:
  [[noreturn]] static void fail(const std::string& axiom) {
    throw Error(ErrorKind::NotAGroup, "not a group: " + axiom);
  }

  void validate() {
    const int n = order();
    if (n < 1) fail("empty table");
    for (const auto& row : table_)
      if (static_cast<int>(row.size()) != n) fail("table is not square");
    for (int a = 0; a < n; ++a) {
      std::vector<char> row_seen(static_cast<size_t>(n), 0), col_seen(static_cast<size_t>(n), 0);
      for (int b = 0; b < n; ++b) {
        const int r = mul(a, b), c = mul(b, a);
        if (r < 0 || r >= n || c < 0 || c >= n) fail("entry out of range");
        if (row_seen[static_cast<size_t>(r)]++ || col_seen[static_cast<size_t>(c)]++) fail("table is not a Latin square");
      }
    }
    if (n <= 64)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c)
            if (mul(mul(a, b), c) != mul(a, mul(b, c))) fail("associativity");
    identity_ = -1;
    for (int e = 0; e < n && identity_ < 0; ++e) {
      bool ok = true;
      for (int a = 0; a < n && ok; ++a) ok = mul(e, a) == a && mul(a, e) == a;
      if (ok) identity_ = e;
    }
    if (identity_ < 0) fail("identity");
    inverse_.assign(static_cast<size_t>(n), -1);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (mul(a, b) == identity_ && mul(b, a) == identity_) inverse_[static_cast<size_t>(a)] = b;
    if (std::find(inverse_.begin(), inverse_.end(), -1) != inverse_.end()) fail("inverse");
  }

  std::vector<std::vector<int>> table_;
  std::vector<int> inverse_;
  int identity_ = 0;
};

namespace detail {

inline FiniteGroup from_permutations(const std::vector<std::vector<int>>& perms) {
  // perms[0] must be the identity; product (a*b)(i) = a(b(i)).
  const int n = static_cast<int>(perms.size());
  std::vector<std::vector<int>> table(static_cast<size_t>(n), std::vector<int>(static_cast<size_t>(n)));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      std::vector<int> prod(perms[0].size());
      for (size_t i = 0; i < prod.size(); ++i)
        prod[i] = perms[static_cast<size_t>(a)][static_cast<size_t>(perms[static_cast<size_t>(b)][i])];
      const auto it = std::find(perms.begin(), perms.end(), prod);
      table[static_cast<size_t>(a)][static_cast<size_t>(b)] = static_cast<int>(it - perms.begin());
    }
  return FiniteGroup(std::move(table));
}

}  // namespace detail

inline FiniteGroup cyclic_group(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "cyclic group needs n >= 1");
  std::vector<std::vector<int>> t(static_cast<size_t>(n), std::vector<int>(static_cast<size_t>(n)));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) t[static_cast<size_t>(a)][static_cast<size_t>(b)] = (a + b) % n;
  return FiniteGroup(std::move(t));
}

/// Symmetries of the regular n-gon, order 2n. Element r^k s^f has index k + n f.
inline FiniteGroup dihedral_group(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "dihedral group needs n >= 1");
  const int order = 2 * n;
  std::vector<std::vector<int>> t(static_cast<size_t>(order), std::vector<int>(static_cast<size_t>(order)));
  for (int a = 0; a < order; ++a)
    for (int b = 0; b < order; ++b) {
      const int ka = a % n, fa = a / n, kb = b % n, fb = b / n;
      // r^ka s^fa r^kb s^fb = r^(ka + (-1)^fa kb) s^(fa + fb)
      const int k = ((ka + (fa ? -kb : kb)) % n + n) % n;
      t[static_cast<size_t>(a)][static_cast<size_t>(b)] = k + n * ((fa + fb) % 2);
    }
  return FiniteGroup(std::move(t));
}

/// S_n for n <= 4, elements in lexicographic order of their permutations.
inline FiniteGroup symmetric_group(int n) {
  if (n < 1 || n > 4) throw Error(ErrorKind::InvalidInput, "symmetric group supported for 1 <= n <= 4");
  std::vector<int> p(static_cast<size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> perms;
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return detail::from_permutations(perms);
}

struct GroupDesc {
  std::string kind;  // cyclic | dihedral | symmetric | table
  int n = 0;
  std::vector<std::vector<int>> table;
};

inline FiniteGroup make_group(const GroupDesc& desc) {
  if (desc.kind == "cyclic") return cyclic_group(desc.n);
  if (desc.kind == "dihedral") return dihedral_group(desc.n);
  if (desc.kind == "symmetric") return symmetric_group(desc.n);
  if (desc.kind == "table") return FiniteGroup(desc.table);
  throw Error(ErrorKind::InvalidInput, "unknown group kind '" + desc.kind + "'");
}

struct GroupFunction {
  FiniteGroup group;
  ComplexVector values;

  GroupFunction() = default;
  GroupFunction(FiniteGroup g, ComplexVector v) : group(std::move(g)), values(std::move(v)) {
    if (values.size() != group.order()) throw Error(ErrorKind::LengthMismatch, "one value per group element");
    if (!all_finite(values)) throw Error(ErrorKind::InvalidInput, "group function has non-finite values");
  }

  static GroupFunction delta(const FiniteGroup& g, int s) {
    ComplexVector v = ComplexVector::Zero(g.order());
    v(s) = 1.0;
    return {g, v};
  }
};

struct Representation {
  FiniteGroup group;
  std::vector<ComplexMatrix> matrices;

  Eigen::Index dim() const { return matrices.empty() ? 0 : matrices.front().rows(); }

  /// Largest ||pi(ts) - pi(t) pi(s)||, plus ||pi(e) - I||.
  double homomorphism_defect() const {
    const int n = group.order();
    double worst = max_abs(ComplexMatrix(matrices[static_cast<size_t>(group.identity())] -
                                         ComplexMatrix::Identity(dim(), dim())));
    for (int t = 0; t < n; ++t)
      for (int s = 0; s < n; ++s)
        worst = std::max(worst, max_abs(ComplexMatrix(matrices[static_cast<size_t>(group.mul(t, s))] -
                                                      matrices[static_cast<size_t>(t)] * matrices[static_cast<size_t>(s)])));
    return worst;
  }

  void validate(double tol = 1e-10) const {
    if (static_cast<int>(matrices.size()) != group.order())
      throw Error(ErrorKind::LengthMismatch, "one matrix per group element");
    for (const auto& m : matrices)
      if (m.rows() != dim() || m.cols() != dim()) throw Error(ErrorKind::DimensionMismatch, "matrices differ in size");
    if (homomorphism_defect() > tol) throw Error(ErrorKind::InvalidInput, "not a homomorphism");
  }

  /// sup_s ||pi(s)||: the gamma constant of {pi(s)} on a Hilbert space.
  double sup_norm() const {
    double s = 0.0;
    for (const auto& m : matrices) s = std::max(s, spectral_norm(m));
    return s;
  }
};

/// [lambda(s) f](t) = f(s^{-1} t), i.e. lambda(s) e_t = e_{st}.
inline Representation left_regular(const FiniteGroup& g) {
  const int n = g.order();
  Representation r{g, {}};
  r.matrices.reserve(static_cast<size_t>(n));
  for (int s = 0; s < n; ++s) {
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    for (int t = 0; t < n; ++t) m(g.mul(s, t), t) = 1.0;
    r.matrices.push_back(std::move(m));
  }
  return r;
}

/// Permutation representation of S_n on C^n (n <= 4).
inline Representation permutation_representation(int n) {
  const FiniteGroup g = symmetric_group(n);
  std::vector<int> p(static_cast<size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  Representation r{g, {}};
  do {
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) m(p[static_cast<size_t>(i)], i) = 1.0;
    r.matrices.push_back(std::move(m));
  } while (std::next_permutation(p.begin(), p.end()));
  return r;
}

/// Restriction of the permutation representation of S_n to the sum-zero
/// subspace, dimension n - 1 (n = 2, 3, 4).
inline Representation standard_representation(int n) {
  if (n < 2) throw Error(ErrorKind::InvalidInput, "standard representation needs n >= 2");
  const Representation perm = permutation_representation(n);
  // Orthonormal basis of {sum x_i = 0}: normalized Helmert vectors.
  ComplexMatrix v = ComplexMatrix::Zero(n, n - 1);
  for (int k = 1; k < n; ++k) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(k * (k + 1)));
    for (int i = 0; i < k; ++i) v(i, k - 1) = scale;
    v(k, k - 1) = -k * scale;
  }
  Representation r{perm.group, {}};
  for (const auto& m : perm.matrices) r.matrices.push_back(v.adjoint() * m * v);
  return r;
}

/// Rotation/reflection representation of the dihedral group on C^2.
inline Representation dihedral_representation(int n) {
  Representation r{dihedral_group(n), {}};
  for (int a = 0; a < 2 * n; ++a) {
    const int k = a % n, f = a / n;
    const double th = 2.0 * std::numbers::pi * k / n;
    ComplexMatrix rot(2, 2), refl(2, 2);
    rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    refl << 1, 0, 0, -1;
    r.matrices.push_back(f ? ComplexMatrix(rot * refl) : rot);
  }
  return r;
}

/// Characters k -> exp(2 pi i j k / n) of Z_n on C^1.
inline Representation cyclic_character(int n, int j) {
  Representation r{cyclic_group(n), {}};
  for (int k = 0; k < n; ++k)
    r.matrices.push_back(ComplexMatrix::Constant(1, 1, std::polar(1.0, 2.0 * std::numbers::pi * j * k / n)));
  return r;
}

/// s -> D pi(s) D^{-1}.
inline Representation conjugate(const Representation& pi, const ComplexMatrix& d) {
  if (d.rows() != pi.dim() || d.cols() != pi.dim()) throw Error(ErrorKind::DimensionMismatch, "similarity has wrong size");
  Eigen::FullPivLU<ComplexMatrix> lu(d);
  if (!lu.isInvertible()) throw Error(ErrorKind::IllConditioned, "similarity is singular");
  const ComplexMatrix dinv = lu.inverse();
  Representation r{pi.group, {}};
  for (const auto& m : pi.matrices) r.matrices.push_back(d * m * dinv);
  return r;
}

/// sigma_pi(f) = sum_t f(t) pi(t).
inline ComplexMatrix sigma_hom(const Representation& pi, const GroupFunction& f) {
  if (!(pi.group == f.group)) throw Error(ErrorKind::DimensionMismatch, "representation and function on different groups");
  if (static_cast<int>(pi.matrices.size()) != pi.group.order())
    throw Error(ErrorKind::DimensionMismatch, "representation is incomplete");
  ComplexMatrix out = ComplexMatrix::Zero(pi.dim(), pi.dim());
  for (int t = 0; t < f.group.order(); ++t) out += f.values(t) * pi.matrices[static_cast<size_t>(t)];
  return out;
}

/// (f * g)(u) = sum_t f(t) g(t^{-1} u).
inline GroupFunction convolution(const GroupFunction& f, const GroupFunction& g) {
  if (!(f.group == g.group)) throw Error(ErrorKind::DimensionMismatch, "functions on different groups");
  const FiniteGroup& grp = f.group;
  ComplexVector out = ComplexVector::Zero(grp.order());
  for (int t = 0; t < grp.order(); ++t)
    for (int v = 0; v < grp.order(); ++v) out(grp.mul(t, v)) += f.values(t) * g.values(v);
  return {grp, out};
}

/// ||f||_Q = ||sigma_lambda(f)||.
inline double q_norm(const GroupFunction& f) { return spectral_norm(sigma_hom(left_regular(f.group), f)); }

/// Kernel phi(s, t) = psi(ts): row s, column t.
inline SchurKernel fourier_kernel(const GroupFunction& psi) {
  const FiniteGroup& g = psi.group;
  ComplexMatrix k(g.order(), g.order());
  for (int s = 0; s < g.order(); ++s)
    for (int t = 0; t < g.order(); ++t) k(s, t) = psi.values(g.mul(t, s));
  return SchurKernel(std::move(k));
}

/// Completely bounded norm of the Fourier multiplier M_psi, computed as
/// nu_2 of the kernel psi(ts) over the whole group.
inline Nu2Certificate fourier_cb_norm(const GroupFunction& psi, double eps) { return nu2(fourier_kernel(psi), eps); }

struct GroupReport {
  double sigma_norm = 0.0;
  double q_norm = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// ||sigma_pi(f)|| <= gamma(pi)^2 ||f||_Q (1 + 1e-6) + eps.
inline GroupReport verify_group(const Representation& pi, const GroupFunction& f, double gamma_pi, double eps) {
  GroupReport r;
  r.sigma_norm = spectral_norm(sigma_hom(pi, f));
  r.q_norm = q_norm(f);
  r.bound = gamma_pi * gamma_pi * r.q_norm;
  r.pass = r.sigma_norm <= r.bound * (1 + 1e-6) + eps;
  return r;
}

}  // namespace cbf
