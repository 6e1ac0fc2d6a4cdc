#pragma once

// Gram-completion semidefinite program behind the nu_2 norm.
//
// For an m x n kernel Phi the program is
//
//     minimize t  subject to  G = [[P1, Phi^T], [conj(Phi), P2]] >= 0,
//                             diag(P1) <= t,  diag(P2) <= t,
//
// where the first n rows of G carry the column vectors a2[t] and the last m
// rows the row vectors a1[s]. Any feasible G factors as a Gram matrix of
// vectors with (a2[t] | a1[s]) = phi(s, t) and squared norms at most t.
//
// Lower bounds are certified independently of the solver iterate: for unit
// vectors alpha in R^m, beta in R^n, ||D_alpha Phi D_beta||_1 <= nu_2(Phi)
// (pair D_alpha Phi D_beta against a contraction and apply Cauchy-Schwarz to
// the factorization). The dual iterate supplies alpha and beta.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "cbfactor/num_core.hpp"

namespace cbf {

namespace ipm {

/// One term of a symmetric constraint matrix: value * (E_rc + E_cr) when
/// row != col, value * E_rr on the diagonal. Always row <= col.
struct Entry {
  int row;
  int col;
  double value;
};

struct Constraint {
  std::vector<Entry> dense;
  std::vector<std::pair<int, double>> lp;
};

/// maximize b^T y  subject to  Z = C - sum_i y_i A_i >= 0, where every
/// matrix is block diagonal: one dense symmetric block plus a diagonal
/// (linear-programming) block. The paired primal is
/// minimize <C, X> subject to <A_i, X> = b_i, X >= 0.
struct Problem {
  int dense_dim = 0;
  int lp_dim = 0;
  RealMatrix c_dense;
  RealVector c_lp;
  std::vector<Constraint> a;
  RealVector b;
};

struct State {
  RealVector y;
  RealMatrix x_dense;
  RealVector x_lp;
  RealMatrix z_dense;
  RealVector z_lp;
  int iteration = 0;
  double mu = 0.0;
  double primal_infeasibility = 0.0;
};

struct Options {
  int max_iterations = 200;
  double step_fraction = 0.98;
};

enum class Status { Stopped, IterationCap, Stalled };

namespace detail {

struct Expanded {
  int r, c;
  double v;
};

inline std::vector<std::vector<Expanded>> expand(const Problem& p) {
  std::vector<std::vector<Expanded>> out(p.a.size());
  for (size_t i = 0; i < p.a.size(); ++i) {
    for (const auto& e : p.a[i].dense) {
      out[i].push_back({e.row, e.col, e.value});
      if (e.row != e.col) out[i].push_back({e.col, e.row, e.value});
    }
  }
  return out;
}

inline void slack(const Problem& p, const RealVector& y, RealMatrix& z, RealVector& zl) {
  z = p.c_dense;
  zl = p.c_lp;
  for (size_t i = 0; i < p.a.size(); ++i) {
    const double yi = y(static_cast<Eigen::Index>(i));
    if (yi == 0.0) continue;
    for (const auto& e : p.a[i].dense) {
      z(e.row, e.col) -= yi * e.value;
      if (e.row != e.col) z(e.col, e.row) -= yi * e.value;
    }
    for (const auto& [l, v] : p.a[i].lp) zl(l) -= yi * v;
  }
}

inline void adjoint_apply(const Problem& p, const RealVector& y, RealMatrix& g, RealVector& gl) {
  g.setZero(p.dense_dim, p.dense_dim);
  gl.setZero(p.lp_dim);
  for (size_t i = 0; i < p.a.size(); ++i) {
    const double yi = y(static_cast<Eigen::Index>(i));
    for (const auto& e : p.a[i].dense) {
      g(e.row, e.col) += yi * e.value;
      if (e.row != e.col) g(e.col, e.row) += yi * e.value;
    }
    for (const auto& [l, v] : p.a[i].lp) gl(l) += yi * v;
  }
}

// <A_i, G> for each i; G need not be symmetric.
inline RealVector apply(const Problem& p, const RealMatrix& g, const RealVector& gl) {
  RealVector out(static_cast<Eigen::Index>(p.a.size()));
  for (size_t i = 0; i < p.a.size(); ++i) {
    double s = 0.0;
    for (const auto& e : p.a[i].dense)
      s += e.row == e.col ? e.value * g(e.row, e.row) : e.value * (g(e.row, e.col) + g(e.col, e.row));
    for (const auto& [l, v] : p.a[i].lp) s += v * gl(l);
    out(static_cast<Eigen::Index>(i)) = s;
  }
  return out;
}

// Largest alpha with X + alpha*dX >= 0 (infinity if dX >= 0).
inline double max_step(const RealMatrix& x, const RealMatrix& dx) {
  Eigen::LLT<RealMatrix> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  RealMatrix w = llt.matrixL().solve(dx);
  w = llt.matrixL().solve(RealMatrix(w.transpose()));
  w = 0.5 * (w + w.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(w, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  return lmin >= 0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

inline double max_step_lp(const RealVector& x, const RealVector& dx) {
  double a = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (dx(i) < 0) a = std::min(a, -x(i) / dx(i));
  return a;
}

}  // namespace detail

/// Infeasible-primal, feasible-dual path following with the HKM direction and
/// a Mehrotra predictor-corrector. The slack Z is always recomputed from y, so
/// every iterate's y is exactly feasible whenever Z factors. `stop` is called
/// on each iterate and ends the run by returning true.
inline Status solve(const Problem& p, State& st, const Options& opt,
                    const std::function<bool(const State&)>& stop) {
  const auto full = detail::expand(p);
  std::vector<std::vector<std::pair<Eigen::Index, double>>> lp_users(static_cast<size_t>(p.lp_dim));
  for (size_t i = 0; i < p.a.size(); ++i)
    for (const auto& [l, v] : p.a[i].lp)
      lp_users[static_cast<size_t>(l)].push_back({static_cast<Eigen::Index>(i), v});
  const Eigen::Index k = static_cast<Eigen::Index>(p.a.size());
  const double n_total = static_cast<double>(p.dense_dim + p.lp_dim);

  for (st.iteration = 0;; ++st.iteration) {
    detail::slack(p, st.y, st.z_dense, st.z_lp);
    Eigen::LLT<RealMatrix> zchol(st.z_dense);
    if (zchol.info() != Eigen::Success || st.z_lp.minCoeff() <= 0) return Status::Stalled;
    st.mu = ((st.x_dense.cwiseProduct(st.z_dense)).sum() + st.x_lp.dot(st.z_lp)) / n_total;
    const RealVector rp = p.b - detail::apply(p, st.x_dense, st.x_lp);
    st.primal_infeasibility = rp.norm() / (1.0 + p.b.norm());
    if (stop(st)) return Status::Stopped;
    if (st.iteration >= opt.max_iterations) return Status::IterationCap;

    const RealMatrix w = zchol.solve(RealMatrix::Identity(p.dense_dim, p.dense_dim));
    const RealMatrix& x = st.x_dense;

    // Schur complement M_ij = <A_i, X A_j W> + sum_l a_il a_jl x_l / z_l.
    RealMatrix m(k, k);
    const RealVector ratio = st.x_lp.cwiseQuotient(st.z_lp);
    for (Eigen::Index i = 0; i < k; ++i) {
      const auto& ai = full[static_cast<size_t>(i)];
      for (Eigen::Index j = i; j < k; ++j) {
        const auto& aj = full[static_cast<size_t>(j)];
        double s = 0.0;
        for (const auto& e : ai)
          for (const auto& f : aj) s += e.v * f.v * x(e.c, f.r) * w(f.c, e.r);
        m(i, j) = s;
      }
    }
    for (int l = 0; l < p.lp_dim; ++l) {
      const auto& users = lp_users[static_cast<size_t>(l)];
      for (const auto& [i, v] : users)
        for (const auto& [j, v2] : users)
          if (j >= i) m(i, j) += v * v2 * ratio(l);
    }
    m = m.selfadjointView<Eigen::Upper>();

    Eigen::LLT<RealMatrix> mchol(m);
    if (mchol.info() != Eigen::Success) {
      const double reg = 1e-13 * m.diagonal().cwiseAbs().maxCoeff();
      m.diagonal().array() += reg;
      mchol.compute(m);
      if (mchol.info() != Eigen::Success) return Status::Stalled;
    }

    auto direction = [&](const RealMatrix& rc, const RealVector& rcl, RealVector& dy, RealMatrix& dx,
                         RealVector& dxl, RealMatrix& dz, RealVector& dzl) {
      const RealVector h = rp - detail::apply(p, rc, rcl);
      dy = mchol.solve(h);
      detail::adjoint_apply(p, dy, dz, dzl);
      dz = -dz;
      dzl = -dzl;
      const RealMatrix g = x * dz * w;
      dx = rc - 0.5 * (g + g.transpose());
      dxl = rcl - st.x_lp.cwiseProduct(dzl).cwiseQuotient(st.z_lp);
    };

    RealVector dy, dxl, dzl;
    RealMatrix dx, dz;
    direction(-x, -st.x_lp, dy, dx, dxl, dz, dzl);
    const double ap = std::min(1.0, std::min(detail::max_step(x, dx), detail::max_step_lp(st.x_lp, dxl)));
    const double ad = std::min(
        1.0, std::min(detail::max_step(st.z_dense, dz), detail::max_step_lp(st.z_lp, dzl)));
    const double mu_aff = (((x + ap * dx).cwiseProduct(st.z_dense + ad * dz)).sum() +
                           (st.x_lp + ap * dxl).dot(st.z_lp + ad * dzl)) /
                          n_total;
    const double expon = std::max(1.0, 3.0 * std::min(ap, ad) * std::min(ap, ad));
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / st.mu, expon), 0.0, 1.0);

    const RealMatrix corr = dx * dz * w;
    const RealMatrix rc = sigma * st.mu * w - x - 0.5 * (corr + corr.transpose());
    const RealVector rcl = (sigma * st.mu * st.z_lp.cwiseInverse()) - st.x_lp -
                           dxl.cwiseProduct(dzl).cwiseQuotient(st.z_lp);
    direction(rc, rcl, dy, dx, dxl, dz, dzl);

    const double step_p =
        std::min(1.0, opt.step_fraction *
                          std::min(detail::max_step(x, dx), detail::max_step_lp(st.x_lp, dxl)));
    const double step_d = std::min(
        1.0, opt.step_fraction *
                 std::min(detail::max_step(st.z_dense, dz), detail::max_step_lp(st.z_lp, dzl)));
    if (step_p <= 0 && step_d <= 0) return Status::Stalled;
    st.x_dense += step_p * dx;
    st.x_dense = 0.5 * (st.x_dense + st.x_dense.transpose()).eval();
    st.x_lp += step_p * dxl;
    st.y += step_d * dy;
  }
}

}  // namespace ipm

struct GramCompletionProblem {
  ComplexMatrix phi;
};

struct SdpSolution {
  double t_star = 0.0;
  /// (n+m)-square Hermitian: a2 block (n) first, then a1 block (m).
  ComplexMatrix gram;
  double dual_lower = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

/// Certified lower bound ||D_alpha Phi D_beta||_1 for nonnegative weights
/// (normalized internally). Rows of Phi pair with alpha, columns with beta.
inline double weighted_trace_bound(const ComplexMatrix& phi, const RealVector& alpha_sq,
                                   const RealVector& beta_sq) {
  RealVector a = alpha_sq.cwiseMax(0.0).cwiseSqrt();
  RealVector b = beta_sq.cwiseMax(0.0).cwiseSqrt();
  if (a.norm() == 0.0 || b.norm() == 0.0) return 0.0;
  a /= a.norm();
  b /= b.norm();
  const ComplexMatrix scaled = a.cast<cplx>().asDiagonal() * phi * b.cast<cplx>().asDiagonal();
  return trace_norm(scaled);
}

namespace detail {

struct GramLayout {
  Eigen::Index n;  // a2 block size (columns of phi)
  Eigen::Index m;  // a1 block size (rows of phi)
  Eigen::Index size() const { return n + m; }
};

// Index of the parameter vector: y(0) = t, followed by per-entry parameters.
struct GramParam {
  Eigen::Index a, b;  // Hermitian entry (a, b), a <= b, in the (n+m) layout
  bool imaginary;
};

inline bool is_real(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (m(i, j).imag() != 0.0) return false;
  return true;
}

}  // namespace detail

/// Solves the Gram-completion program to t_star - dual_lower <= eps*max(1, t_star).
///
/// Real kernels are solved as a real program (the complex optimum can be
/// averaged with its conjugate, so nothing is lost); complex kernels go
/// through the real embedding X -> [[Re X, -Im X], [Im X, Re X]].
inline SdpSolution solve_gram_completion(const GramCompletionProblem& problem, double eps) {
  const ComplexMatrix& phi = problem.phi;
  if (phi.rows() < 1 || phi.cols() < 1)
    throw Error(ErrorKind::DimensionMismatch, "kernel must be at least 1x1");
  if (!all_finite(phi)) throw Error(ErrorKind::InvalidInput, "kernel has non-finite entries");
  if (!(eps >= 1e-10 && eps <= 1e-2))
    throw Error(ErrorKind::InvalidInput, "eps must lie in [1e-10, 1e-2]");

  const detail::GramLayout lay{phi.cols(), phi.rows()};
  const Eigen::Index nn = lay.size();
  SdpSolution sol;
  const double scale = max_abs(phi);
  if (scale == 0.0) {
    sol.gram = ComplexMatrix::Zero(nn, nn);
    return sol;
  }
  const ComplexMatrix b = phi.transpose() / scale;  // upper-right block, n x m
  const bool real = detail::is_real(phi);
  const int emb = real ? 1 : 2;
  const int dim = static_cast<int>(nn) * emb;

  std::vector<detail::GramParam> params;
  auto block_of = [&](Eigen::Index i) { return i < lay.n ? 0 : 1; };
  for (Eigen::Index a = 0; a < nn; ++a)
    for (Eigen::Index c = a; c < nn; ++c) {
      if (block_of(a) != block_of(c)) continue;
      params.push_back({a, c, false});
      if (!real && a != c) params.push_back({a, c, true});
    }

  ipm::Problem p;
  p.dense_dim = dim;
  p.lp_dim = static_cast<int>(nn);
  p.c_dense = RealMatrix::Zero(dim, dim);
  p.c_lp = RealVector::Zero(nn);
  for (Eigen::Index i = 0; i < lay.n; ++i)
    for (Eigen::Index j = 0; j < lay.m; ++j) {
      const cplx v = b(i, j);
      const Eigen::Index r = i, c = lay.n + j;
      p.c_dense(r, c) = p.c_dense(c, r) = v.real();
      if (!real) {
        p.c_dense(nn + r, nn + c) = p.c_dense(nn + c, nn + r) = v.real();
        // Embedded entry (nn + r, c) holds Im, (r, nn + c) holds -Im.
        p.c_dense(nn + r, c) = p.c_dense(c, nn + r) = v.imag();
        p.c_dense(r, nn + c) = p.c_dense(nn + c, r) = -v.imag();
      }
    }
  ipm::Constraint tcon;
  for (int l = 0; l < static_cast<int>(nn); ++l) tcon.lp.push_back({l, -1.0});
  p.a.push_back(tcon);
  for (const auto& q : params) {
    ipm::Constraint con;
    const int a = static_cast<int>(q.a), c = static_cast<int>(q.b), off = static_cast<int>(nn);
    if (!q.imaginary) {
      con.dense.push_back({a, c, -1.0});
      if (!real) con.dense.push_back({off + a, off + c, -1.0});
      if (a == c) con.lp.push_back({a, 1.0});
    } else {
      // Im H_ac sits at (off + a, c) and (c, off + a) with +1, at (a, off + c) with -1.
      con.dense.push_back({c, off + a, -1.0});
      con.dense.push_back({a, off + c, 1.0});
    }
    p.a.push_back(con);
  }
  const Eigen::Index k = static_cast<Eigen::Index>(p.a.size());
  p.b = RealVector::Zero(k);
  p.b(0) = -1.0;

  // Strictly feasible start: P = alpha I with alpha above ||B||, t = alpha + 1.
  const double alpha = spectral_norm(b) + 1.0;
  ipm::State st;
  st.y = RealVector::Zero(k);
  st.y(0) = alpha + 1.0;
  for (size_t i = 0; i < params.size(); ++i)
    if (!params[i].imaginary && params[i].a == params[i].b) st.y(static_cast<Eigen::Index>(i) + 1) = alpha;
  // Primal start satisfying A(X) = b exactly: X = lambda I, X_lp = emb*lambda.
  const double lambda = 1.0 / (static_cast<double>(emb) * static_cast<double>(nn));
  st.x_dense = lambda * RealMatrix::Identity(dim, dim);
  st.x_lp = RealVector::Constant(nn, emb * lambda);

  auto gram_of = [&](const RealVector& y) {
    // Each parameter is the value of its Hermitian entry (real or imaginary part).
    ComplexMatrix g = ComplexMatrix::Zero(nn, nn);
    g.topRightCorner(lay.n, lay.m) = b;
    g.bottomLeftCorner(lay.m, lay.n) = b.adjoint();
    for (size_t i = 0; i < params.size(); ++i) {
      const double v = y(static_cast<Eigen::Index>(i) + 1);
      const auto& q = params[i];
      if (!q.imaginary) {
        g(q.a, q.b) += v;
        if (q.a != q.b) g(q.b, q.a) += v;
      } else {
        g(q.a, q.b) += cplx(0.0, v);
        g(q.b, q.a) += cplx(0.0, -v);
      }
    }
    return g;
  };

  double best_upper = std::numeric_limits<double>::infinity();
  double best_lower = 0.0;
  RealVector best_y = st.y;
  auto tol_of = [&](double t) { return eps * std::max(1.0, scale * t) / scale; };

  auto stop = [&](const ipm::State& s) {
    const double t = s.y(0);
    if (t < best_upper) {
      best_upper = t;
      best_y = s.y;
    }
    const double dual_obj = -(p.c_dense.cwiseProduct(s.x_dense)).sum();
    if (best_upper - dual_obj <= 1e-2 * std::max(1.0, best_upper) || s.iteration > 40) {
      RealVector w2(lay.n), w1(lay.m);
      for (Eigen::Index i = 0; i < nn; ++i) {
        double d = s.x_dense(i, i);
        if (!real) d += s.x_dense(nn + i, nn + i);
        if (i < lay.n)
          w2(i) = d;
        else
          w1(i - lay.n) = d;
      }
      best_lower = std::max(best_lower, weighted_trace_bound(b, w2, w1));
    }
    return best_upper - best_lower <= 0.5 * tol_of(best_upper);
  };

  ipm::Options opt;
  const ipm::Status status = ipm::solve(p, st, opt, stop);
  sol.iterations = st.iteration;
  // Always-valid fallbacks: sup |phi| (= 1 after scaling) and uniform weights.
  best_lower = std::max({best_lower, 1.0, trace_norm(b) / std::sqrt(static_cast<double>(lay.n * lay.m))});

  // Recover the primal Gram matrix and inflate it onto exact feasibility.
  ComplexMatrix g = gram_of(best_y);
  double t = best_y(0);
  const auto eig = hermitian_eig(g);
  if (eig.values.front() < 0.0) {
    const double shift = -eig.values.front() * (1.0 + 1e-12);
    g.diagonal().array() += shift;
    t += shift;
  }
  for (Eigen::Index i = 0; i < nn; ++i) t = std::max(t, g(i, i).real());

  sol.t_star = t * scale;
  sol.gram = g * scale;
  sol.dual_lower = std::min(best_lower, t) * scale;
  sol.gap = sol.t_star - sol.dual_lower;
  if (sol.gap > eps * std::max(1.0, sol.t_star)) {
    const ErrorKind kind =
        status == ipm::Status::Stalled ? ErrorKind::IllConditioned : ErrorKind::NoConvergence;
    throw SolverError(kind,
                      "gap " + std::to_string(sol.gap) + " above tolerance after " +
                          std::to_string(sol.iterations) + " iterations",
                      sol.dual_lower, sol.t_star);
  }
  return sol;
}

struct FeasibilityResult {
  bool feasible = false;
  double residual = 0.0;
};

/// Projection method (Douglas-Rachford, i.e. averaged alternating
/// reflections) between the PSD cone and the convex set
/// {off-diagonal block = Phi, diagonal <= t}. Independent of the interior
/// point solver; used as a cross-check.
///
/// Every 50 iterations the iterate is tested against two exact certificates:
/// filling the diagonal of the projected point up to t gives a PSD completion
/// (feasible, residual 0), or the diagonal of the reflection gap supplies
/// weights with ||D_a Phi D_b||_1 > t (infeasible). Otherwise the verdict is
/// residual < 1e-7 after `iters` steps.
inline FeasibilityResult feasibility_oracle(const ComplexMatrix& phi, double t, int iters) {
  if (!(t > 0)) throw Error(ErrorKind::InvalidInput, "feasibility_oracle needs t > 0");
  const Eigen::Index n = phi.cols(), m = phi.rows(), nn = n + m;
  const ComplexMatrix b = phi.transpose();
  auto with_phi = [&](ComplexMatrix g) {
    g.topRightCorner(n, m) = b;
    g.bottomLeftCorner(m, n) = b.adjoint();
    return g;
  };
  auto project_affine = [&](ComplexMatrix g) {
    g = with_phi(std::move(g));
    for (Eigen::Index i = 0; i < nn; ++i) g(i, i) = std::min(g(i, i).real(), t);
    return g;
  };
  auto project_psd = [&](const ComplexMatrix& g) {
    const auto eig = hermitian_eig(g);
    ComplexMatrix out = ComplexMatrix::Zero(nn, nn);
    for (Eigen::Index k = 0; k < nn; ++k) {
      const double v = eig.values[static_cast<size_t>(k)];
      if (v > 0) out += v * eig.vectors.col(k) * eig.vectors.col(k).adjoint();
    }
    return out;
  };

  ComplexMatrix x = project_affine(ComplexMatrix::Identity(nn, nn) * t);
  FeasibilityResult res;
  res.residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < std::max(1, iters); ++it) {
    const ComplexMatrix p = project_psd(x);
    const ComplexMatrix q = project_affine(ComplexMatrix(2.0 * p - x));
    res.residual = (p - q).norm();
    if (res.residual < 1e-7) break;
    if (it % 50 == 49) {
      ComplexMatrix filled = with_phi(p);
      for (Eigen::Index i = 0; i < nn; ++i) filled(i, i) = t;
      if (hermitian_eig(filled).values.front() >= 0.0) {
        res.residual = 0.0;
        break;
      }
      const ComplexMatrix gap = p - q;
      const RealVector beta_sq = gap.diagonal().head(n).real().cwiseAbs();
      const RealVector alpha_sq = gap.diagonal().tail(m).real().cwiseAbs();
      if (weighted_trace_bound(phi, alpha_sq, beta_sq) > t * (1 + 1e-12)) break;
    }
    x += q - p;
  }
  res.feasible = res.residual < 1e-7;
  return res;
}

}  // namespace cbf
