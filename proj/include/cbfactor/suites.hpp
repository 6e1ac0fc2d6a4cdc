#pragma once

// Seeded random-instance batches. Every suite takes a JSON config (missing
// keys take defaults) and a root seed, and returns a JSON report holding the
// resolved config, per-instance results and pass counts. Instance i draws
// from the substream (suite label, i), so a single seed reproduces a suite
// and results do not depend on evaluation order.

#include <cmath>
#include <functional>
#include <map>
#include <string>

#include <json.hpp>

#include "cbfactor/calculus.hpp"
#include "cbfactor/factor_theorem.hpp"
#include "cbfactor/gamma_mc.hpp"
#include "cbfactor/group.hpp"
#include "cbfactor/json_io.hpp"

namespace cbf::suites {

using nlohmann::json;

class Params {
 public:
  explicit Params(const json& cfg) : cfg_(cfg.is_object() ? cfg : json::object()) {}

  template <class T>
  T get(const std::string& key, T fallback) {
    T v = fallback;
    if (cfg_.contains(key)) {
      try {
        v = cfg_[key].get<T>();
      } catch (const nlohmann::json::exception&) {
        throw Error(ErrorKind::InvalidInput, "config key '" + key + "' has the wrong type");
      }
    }
    resolved_[key] = v;
    return v;
  }

  const json& resolved() const { return resolved_; }

 private:
  json cfg_;
  json resolved_ = json::object();
};

inline int uniform_int(GaussianStream& s, int lo, int hi) {
  return lo + static_cast<int>(s.next_uniform() * static_cast<double>(hi - lo + 1));
}

inline double uniform_real(GaussianStream& s, double lo, double hi) { return lo + (hi - lo) * s.next_uniform(); }

inline ComplexVector unit_vector(Eigen::Index d, GaussianStream& s) {
  ComplexVector v = s.draw(d);
  return v / v.norm();
}

inline GaussianStream instance_stream(std::uint64_t seed, const std::string& label, int index) {
  return GaussianStream(seed).substream(label).substream(static_cast<std::uint64_t>(index));
}

inline json finish(const std::string& name, const Params& params, json results, int passed, int total) {
  return {{"suite", name},
          {"config", params.resolved()},
          {"instances", total},
          {"passed", passed},
          {"failed", total - passed},
          {"pass", passed == total},
          {"results", std::move(results)}};
}

/// nu_2(Theta) <= gamma^2 ||x|| ||x*|| for orbit families of random T on l^2_d.
inline json main_suite(const json& cfg, std::uint64_t seed) {
  Params p(cfg);
  const int instances = p.get("instances", 100);
  const int d_max = p.get("d_max", 4);
  const int n_max = p.get("n_max", 16);
  const double eps = p.get("eps", 1e-8);
  json results = json::array();
  int passed = 0;
  for (int i = 0; i < instances; ++i) {
    GaussianStream s = instance_stream(seed, "main", i);
    const int d = uniform_int(s, 1, d_max);
    const int n = uniform_int(s, 2, n_max);
    ComplexMatrix t;
    std::string kind;
    switch (i % 3) {
      case 0: kind = "contraction"; t = random_with_norm(d, uniform_real(s, 0.2, 1.0), s); break;
      case 1: kind = "unitary"; t = random_unitary(d, s); break;
      default: kind = "general"; t = random_with_norm(d, uniform_real(s, 0.5, 1.3), s); break;
    }
    const ComplexVector x = unit_vector(d, s), xs = unit_vector(d, s);
    const OperatorFamily fam = orbit_family(t, n);
    const double gamma = sup_norm(fam);
    const MainReport r = verify_main(fam, fam, x, xs, gamma, gamma, eps);
    passed += r.pass;
    results.push_back({{"index", i}, {"kind", kind}, {"d", d}, {"N", n}, {"gamma", gamma},
                       {"nu2", r.nu2}, {"bound", r.bound}, {"gap", r.gap}, {"pass", r.pass}});
  }
  return finish("main", p, std::move(results), passed, instances);
}

/// Power-operator instances plus the e_n calibration pinch of the A_0 bounds.
inline json power_suite(const json& cfg, std::uint64_t seed) {
  Params p(cfg);
  const int instances = p.get("instances", 100);
  const int d = p.get("d", 3);
  const int n = p.get("N", 12);
  const double eps = p.get("eps", 1e-8);
  const int pinch_max = p.get("pinch_max_degree", 12);
  json results = json::array();
  int passed = 0;
  for (int i = 0; i < instances; ++i) {
    GaussianStream s = instance_stream(seed, "power", i);
    const ComplexMatrix t = random_with_norm(d, uniform_real(s, 0.05, 1.0), s);
    const ComplexVector x = s.draw(d), xs = s.draw(d);
    const double gamma = power_bound(t, n);
    const PowerReport r = verify_power(t, x, xs, n, gamma, eps);
    passed += r.pass;
    results.push_back({{"index", i}, {"gamma", gamma}, {"nu2", r.nu2}, {"bound", r.bound}, {"gap", r.gap},
                       {"pass", r.pass}});
  }
  json pinch = json::array();
  double pinch_err = 0.0;
  for (int k = 0; k <= pinch_max; ++k) {
    const AnalyticPolynomial e = AnalyticPolynomial::monomial(k);
    A0Decomposition dec;
    dec.pairs.emplace_back(TrigPolynomial::from(e), e);
    const double up = a0_upper(e, dec);
    const double lo = a0_lower(e, delta_sequence(k, 1)).value;
    pinch_err = std::max({pinch_err, std::abs(up - 1.0), std::abs(lo - 1.0)});
    pinch.push_back({{"n", k}, {"upper", up}, {"lower", lo}});
  }
  json rep = finish("power", p, std::move(results), passed, instances);
  rep["pinch"] = std::move(pinch);
  rep["pinch_error"] = pinch_err;
  return rep;
}

inline ComplexMatrix stable_generator(Eigen::Index d, bool normal, GaussianStream& s) {
  if (normal) {
    const ComplexMatrix u = random_unitary(d, s);
    ComplexVector lam(d);
    for (Eigen::Index k = 0; k < d; ++k) lam(k) = cplx(uniform_real(s, 0.0, 2.0), uniform_real(s, -3.0, 3.0));
    return u * lam.asDiagonal() * u.adjoint();
  }
  ComplexMatrix g = s.draw_matrix(d, d);
  const Eigen::ComplexEigenSolver<ComplexMatrix> es(g, false);
  const double shift = std::max(0.0, -es.eigenvalues().real().minCoeff()) + uniform_real(s, 0.1, 1.0);
  g.diagonal().array() += shift;
  return g;
}

/// Sampled semigroups exp(-tG), the grid Hankel check and the rough
/// Hille-Phillips bound, plus the scalar exp(-t) calibration integral.
inline json semigroup_suite(const json& cfg, std::uint64_t seed) {
  Params p(cfg);
  const int instances = p.get("instances", 50);
  const int d = p.get("d", 3);
  const int n = p.get("N", 12);
  const double delta = p.get("delta", 0.1);
  const double eps = p.get("eps", 1e-8);
  json results = json::array();
  int passed = 0;
  bool rough_all = true;
  for (int i = 0; i < instances; ++i) {
    GaussianStream s = instance_stream(seed, "semigroup", i);
    const bool normal = i % 2 == 0;
    const SemigroupSample sg = sample_semigroup(stable_generator(d, normal, s), delta, n);
    const ComplexVector x = s.draw(d), xs = s.draw(d);
    const double gamma = sg.sup_norm();
    const SemigroupReport r = verify_semigroup(sg, x, xs, gamma, eps);
    const HillePhillips hp = hille_phillips(sg, s.draw(static_cast<Eigen::Index>(sg.samples.size())));
    rough_all = rough_all && hp.rough_ok;
    const bool ok = r.pass && hp.rough_ok;
    passed += ok;
    results.push_back({{"index", i},         {"normal", normal},          {"gamma", gamma},
                       {"nu2", r.nu2},       {"bound", r.bound},          {"gap", r.gap},
                       {"hp_norm", hp.norm}, {"hp_rough", hp.rough_bound}, {"pass", ok}});
  }
  // int_0^1 e^{-t} dt on a 1e-3 grid: 1001 points, N = 501.
  const SemigroupSample scalar = sample_semigroup(ComplexMatrix::Identity(1, 1), 1e-3, 501);
  const HillePhillips hp = hille_phillips(scalar, ComplexVector::Ones(1001));
  const double exact = 1.0 - std::exp(-1.0);
  json rep = finish("semigroup", p, std::move(results), passed, instances);
  rep["rough_all"] = rough_all && hp.rough_ok;
  rep["scalar_integral"] = {{"value", hp.value(0, 0).real()}, {"exact", exact},
                            {"error", std::abs(hp.value(0, 0) - exact)}};
  return rep;
}

struct NamedGroup {
  std::string name;
  Representation natural;  // unitary, dimension 2
};

inline std::vector<NamedGroup> suite_groups() {
  Representation z8{cyclic_group(8), {}};
  for (int k = 0; k < 8; ++k) {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = std::polar(1.0, 2.0 * std::numbers::pi * k / 8.0);
    m(1, 1) = std::polar(1.0, 2.0 * std::numbers::pi * 3 * k / 8.0);
    z8.matrices.push_back(m);
  }
  return {{"S3", standard_representation(3)}, {"Z8", z8}, {"D4", dihedral_representation(4)}};
}

/// One-dimensional characters used as multiplier symbols: the trivial one,
/// det of the natural representation and, for cyclic groups, all of them.
inline std::vector<GroupFunction> suite_characters(const NamedGroup& g) {
  const FiniteGroup& grp = g.natural.group;
  std::vector<GroupFunction> out;
  out.push_back({grp, ComplexVector::Ones(grp.order())});
  ComplexVector det(grp.order());
  for (int s = 0; s < grp.order(); ++s) det(s) = g.natural.matrices[static_cast<size_t>(s)].determinant();
  out.push_back({grp, det});
  if (g.name == "Z8")
    for (int j = 1; j < 8; ++j) {
      ComplexVector v(8);
      for (int k = 0; k < 8; ++k) v(k) = std::polar(1.0, 2.0 * std::numbers::pi * j * k / 8.0);
      out.push_back({grp, v});
    }
  return out;
}

/// ||sigma_pi(f)|| against gamma(pi)^2 ||f||_Q for unitary and similarity
/// conjugated representations, and cb norms of characters and delta_e.
inline json group_suite(const json& cfg, std::uint64_t seed) {
  Params p(cfg);
  const int functions = p.get("functions", 100);
  const double unitary_tol = p.get("unitary_tol", 1e-8);
  const double eps = p.get("eps", 1e-9);
  json groups = json::array();
  int passed = 0, total = 0;
  double cb_err = 0.0;
  for (const NamedGroup& g : suite_groups()) {
    const FiniteGroup& grp = g.natural.group;
    GaussianStream rs = instance_stream(seed, "group-" + g.name + "-rep", 0);
    const Representation rotated = conjugate(g.natural, random_unitary(2, rs));
    ComplexMatrix dmat = ComplexMatrix::Zero(2, 2);
    dmat(0, 0) = 1.0;
    dmat(1, 1) = 2.0;
    const Representation similar = conjugate(g.natural, dmat);
    const double gamma_similar = spectral_norm(dmat) * spectral_norm(dmat.inverse());
    const Representation regular = left_regular(grp);
    int g_pass = 0;
    double worst_unitary = 0.0, worst_similar = 0.0;
    for (int i = 0; i < functions; ++i) {
      GaussianStream s = instance_stream(seed, "group-" + g.name, i);
      const GroupFunction f{grp, s.draw(grp.order())};
      const double q = q_norm(f);
      bool ok = true;
      for (const Representation* pi : {&g.natural, &rotated, &regular}) {
        const double sig = spectral_norm(sigma_hom(*pi, f));
        worst_unitary = std::max(worst_unitary, sig / q);
        ok = ok && sig <= q * (1 + unitary_tol);
      }
      const GroupReport sim = verify_group(similar, f, gamma_similar, eps);
      worst_similar = std::max(worst_similar, sim.sigma_norm / q);
      ok = ok && sim.pass;
      g_pass += ok;
    }
    json cb = json::array();
    std::vector<GroupFunction> symbols = suite_characters(g);
    symbols.push_back(GroupFunction::delta(grp, grp.identity()));
    for (const auto& psi : symbols) {
      const double v = fourier_cb_norm(psi, eps).value;
      cb_err = std::max(cb_err, std::abs(v - 1.0));
      cb.push_back(v);
    }
    passed += g_pass;
    total += functions;
    groups.push_back({{"group", g.name},
                      {"order", grp.order()},
                      {"passed", g_pass},
                      {"functions", functions},
                      {"max_unitary_ratio", worst_unitary},
                      {"max_similar_ratio", worst_similar},
                      {"similar_gamma_sq", gamma_similar * gamma_similar},
                      {"cb_norms", std::move(cb)}});
  }
  json rep = finish("group", p, std::move(groups), passed, total);
  rep["cb_error"] = cb_err;
  return rep;
}

/// Truncation monotonicity on random sequences and the completely monotone
/// family at every N up to cm_n_max.
inline json hankel_suite(const json& cfg, std::uint64_t seed) {
  Params p(cfg);
  const int random = p.get("random", 20);
  const int n_max = p.get("n_max", 8);
  const int cm_n_max = p.get("cm_n_max", 32);
  const double mono_tol = p.get("monotone_tol", 1e-7);
  const double eps = p.get("eps", 1e-9);
  json results = json::array();
  int passed = 0, total = 0;
  for (int i = 0; i < random; ++i) {
    GaussianStream s = instance_stream(seed, "hankel", i);
    const ComplexVector vals = s.draw(2 * n_max - 1);
    json seq = json::array();
    bool ok = true;
    double prev = 0.0;
    for (int n = 1; n <= n_max; ++n) {
      const double v = ms1_lower(HankelSequence{vals, n, false}, eps).value;
      ok = ok && v >= prev - mono_tol;
      prev = v;
      seq.push_back(v);
    }
    passed += ok;
    ++total;
    results.push_back({{"kind", "random"}, {"index", i}, {"values", std::move(seq)}, {"pass", ok}});
  }
  std::vector<std::pair<std::string, std::function<HankelSequence(int)>>> cm = {
      {"harmonic", [](int n) { return harmonic_sequence(n); }},
      {"geometric-0.5", [](int n) { return geometric_sequence(0.5, n); }},
      {"geometric-0.9", [](int n) { return geometric_sequence(0.9, n); }},
      {"geometric-1", [](int n) { return geometric_sequence(1.0, n); }}};
  double cm_err = 0.0;
  for (const auto& [name, make] : cm) {
    json seq = json::array();
    double err = 0.0;
    for (int n = 1; n <= cm_n_max; ++n) {
      const double v = ms1_lower(make(n), eps).value;
      err = std::max(err, std::abs(v - 1.0));
      seq.push_back(v);
    }
    const bool ok = err <= 1e-5;
    cm_err = std::max(cm_err, err);
    passed += ok;
    ++total;
    results.push_back({{"kind", name}, {"values", std::move(seq)}, {"max_error", err}, {"pass", ok}});
  }
  json rep = finish("hankel", p, std::move(results), passed, total);
  rep["cm_error"] = cm_err;
  return rep;
}

/// Monte-Carlo checks of Gaussian norms: the Hilbert identity, rank-one
/// gamma-summing norms, the ideal property under right composition and the
/// multiplier bound.
inline json gaussian_suite(const json& cfg, std::uint64_t seed) {
  Params p(cfg);
  const int instances = p.get("instances", 50);
  const int hilbert_samples = p.get("hilbert_samples", 100000);
  const int samples = p.get("samples", 20000);
  const int d_max = p.get("d_max", 8);
  const double k = p.get("sigmas", 3.0);
  const std::vector<double> exps = {1.0, 2.0, std::numeric_limits<double>::infinity()};

  json hilbert = json::array();
  int h_pass = 0;
  double worst_rel_err = 0.0;
  for (int i = 0; i < instances; ++i) {
    GaussianStream s = instance_stream(seed, "gx-hilbert", i);
    const int d = uniform_int(s, 1, d_max), n = uniform_int(s, 1, 8);
    const ComplexMatrix xs = s.draw_matrix(d, n);
    const MonteCarloEstimate e = gx_norm(xs, {2.0, d}, hilbert_samples, s);
    const double exact = xs.norm();
    const double rel = e.std_err / e.estimate;
    worst_rel_err = std::max(worst_rel_err, rel);
    const bool ok = std::abs(e.estimate - exact) <= k * e.std_err && rel <= 0.01;
    h_pass += ok;
    hilbert.push_back({{"d", d}, {"n", n}, {"estimate", e.estimate}, {"std_err", e.std_err}, {"exact", exact}, {"pass", ok}});
  }

  json rank_one = json::array(), tensor = json::array();
  int r_pass = 0, t_pass = 0, r_total = 0, t_total = 0;
  for (double pe : exps) {
    for (int i = 0; i < instances; ++i) {
      GaussianStream s = instance_stream(seed, "gx-rank1-" + std::to_string(static_cast<int>(std::isinf(pe) ? 0 : pe)), i);
      const int d = uniform_int(s, 1, d_max), n = uniform_int(s, 1, 8);
      const ComplexVector eta = s.draw(n), x = s.draw(d);
      const FiniteRankOperator u{x * eta.transpose(), {pe, d}};
      const MonteCarloEstimate e = gamma_summing_norm(u, samples, s);
      const double exact = eta.norm() * lp_norm(x, pe);
      const bool ok = std::abs(e.estimate - exact) <= k * e.std_err;
      r_pass += ok;
      ++r_total;
      rank_one.push_back({{"p", json_io::exponent_to(pe)}, {"estimate", e.estimate}, {"std_err", e.std_err},
                          {"exact", exact}, {"pass", ok}});
    }
    for (int i = 0; i < instances; ++i) {
      GaussianStream s = instance_stream(seed, "gx-tensor-" + std::to_string(static_cast<int>(std::isinf(pe) ? 0 : pe)), i);
      const int d = uniform_int(s, 1, d_max), n = uniform_int(s, 1, 8);
      const ComplexMatrix u = s.draw_matrix(d, n), sm = s.draw_matrix(n, n);
      const double snorm = spectral_norm(sm);
      const MonteCarloEstimate lhs = gamma_summing_norm({u * sm, {pe, d}}, samples, s);
      const MonteCarloEstimate rhs = gamma_summing_norm({u, {pe, d}}, samples, s);
      const double combined = std::hypot(lhs.std_err, snorm * rhs.std_err);
      const bool ok = lhs.estimate <= snorm * rhs.estimate + k * combined;
      t_pass += ok;
      ++t_total;
      tensor.push_back({{"p", json_io::exponent_to(pe)}, {"lhs", lhs.estimate}, {"rhs", snorm * rhs.estimate},
                        {"std_err", combined}, {"pass", ok}});
    }
  }

  json mult = json::array();
  int m_pass = 0;
  for (int i = 0; i < instances; ++i) {
    GaussianStream s = instance_stream(seed, "gx-mult", i);
    const int d = uniform_int(s, 1, 4), omega = uniform_int(s, 1, 6);
    OperatorFamily a{{2.0, d}, {}};
    for (int t = 0; t < omega; ++t) a.ops.push_back(s.draw_matrix(d, d));
    RealVector w(omega);
    for (int t = 0; t < omega; ++t) w(t) = uniform_real(s, 0.1, 2.0);
    const VectorFunction f{s.draw_matrix(d, omega), w};
    const double gamma = sup_norm(a);
    const MonteCarloEstimate lhs = gamma_summing_norm(multiplier_apply(a, f).as_operator(a.space), samples, s);
    const MonteCarloEstimate rhs = gamma_summing_norm(f.as_operator(a.space), samples, s);
    const double combined = std::hypot(lhs.std_err, gamma * rhs.std_err);
    const bool ok = lhs.estimate <= gamma * rhs.estimate + k * combined;
    m_pass += ok;
    mult.push_back({{"lhs", lhs.estimate}, {"rhs", gamma * rhs.estimate}, {"std_err", combined}, {"pass", ok}});
  }

  const int passed = h_pass + r_pass + t_pass + m_pass;
  const int total = instances + r_total + t_total + instances;
  json rep = finish("gaussian", p, json::object({{"hilbert", std::move(hilbert)},
                                                 {"rank_one", std::move(rank_one)},
                                                 {"tensor", std::move(tensor)},
                                                 {"multiplier", std::move(mult)}}),
                    passed, total);
  rep["hilbert_passed"] = h_pass;
  rep["rank_one_passed"] = r_pass;
  rep["tensor_passed"] = t_pass;
  rep["multiplier_passed"] = m_pass;
  rep["max_relative_std_err"] = worst_rel_err;
  return rep;
}

using SuiteFn = json (*)(const json&, std::uint64_t);

inline const std::map<std::string, SuiteFn>& registry() {
  static const std::map<std::string, SuiteFn> r = {{"main", &main_suite},   {"power", &power_suite},
                                                    {"semigroup", &semigroup_suite}, {"group", &group_suite},
                                                    {"hankel", &hankel_suite}, {"gaussian", &gaussian_suite}};
  return r;
}

inline json run_suite(const std::string& name, const json& cfg, std::uint64_t seed) {
  const auto& r = registry();
  const auto it = r.find(name);
  if (it == r.end()) throw Error(ErrorKind::InvalidInput, "unknown suite '" + name + "'");
  return it->second(cfg, seed);
}

}  // namespace cbf::suites
