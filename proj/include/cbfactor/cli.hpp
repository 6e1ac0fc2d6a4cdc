#pragma once

// Command-line front end. Every subcommand reads a JSON input, writes one
// JSON report (to --out or stdout) and returns
//   0  success / inequality holds
//   1  inequality violated (report still written)
//   2  numerical failure
//   3  invalid input or usage error
// Reports carry the tool version, the resolved config and the seed, and no
// timestamps, so identical inputs give byte-identical output.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cbfactor/calculus.hpp"
#include "cbfactor/factor_theorem.hpp"
#include "cbfactor/gamma_mc.hpp"
#include "cbfactor/group.hpp"
#include "cbfactor/json_io.hpp"
#include "cbfactor/schur.hpp"
#include "cbfactor/suites.hpp"
#include "cbfactor/version.hpp"

namespace cbf::cli {

using nlohmann::json;

enum ExitCode : int { kPass = 0, kViolated = 1, kNumerical = 2, kInvalid = 3 };

struct Options {
  std::string input;
  std::string out;
  std::string config;
  double eps = 1e-8;
  std::uint64_t seed = 0;
  int samples = 20000;
  bool factorize = false;
};

struct Outcome {
  json result;
  bool pass = true;
};

namespace detail {

inline json read_json_file(const std::string& path, const char* what) {
  if (path.empty()) throw Error(ErrorKind::InvalidInput, std::string("missing --") + what);
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidInput, "malformed JSON in '" + path + "': " + e.what());
  }
}

inline const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::InvalidInput, std::string("input needs '") + key + "'");
  return j[key];
}

inline double number(const json& j, const char* key) {
  const json& v = need(j, key);
  if (!v.is_number()) throw Error(ErrorKind::InvalidInput, std::string("'") + key + "' must be a number");
  return v.get<double>();
}

inline Eigen::Index count(const json& j, const char* key) {
  const json& v = need(j, key);
  if (!v.is_number_integer() || v.get<long long>() < 1)
    throw Error(ErrorKind::InvalidInput, std::string("'") + key + "' must be a positive integer");
  return v.get<long long>();
}

inline double exponent(const json& in) { return in.contains("p") ? json_io::exponent_from(in["p"]) : 2.0; }

inline OperatorFamily family_from(const json& ops, double p) {
  OperatorFamily f{{p, 0}, json_io::matrices_from(ops)};
  f.space.d = f.ops.front().rows();
  f.validate();
  return f;
}

inline json certificate_block(const Nu2Certificate& c, const Options& o) {
  return json_io::certificate_to(c, o.factorize);
}

// ---------------------------------------------------------------------------

inline Outcome cmd_nu2(const json& in, const Options& o) {
  const SchurKernel k(json_io::matrix_from(in));
  const Nu2Certificate c = nu2(k, o.eps);
  json r = certificate_block(c, o);
  r["gap"] = c.value - c.dual_lower;
  return {r, true};
}

inline Outcome cmd_gamma(const json& in, const Options& o) {
  const OperatorFamily fam = family_from(need(in, "ops"), exponent(in));
  GammaSearch search;
  search.samples = o.samples;
  if (in.contains("search")) {
    const json& s = in["search"];
    search.n_terms = s.value("n_terms", search.n_terms);
    search.restarts = s.value("restarts", search.restarts);
    search.iters = s.value("iters", search.iters);
    search.scale = s.value("scale", search.scale);
    search.decay = s.value("decay", search.decay);
    search.search_samples = s.value("search_samples", search.search_samples);
  }
  GaussianStream stream = GaussianStream(o.seed).substream("gamma");
  const GammaEstimate g = gamma_lower(fam, search, stream);
  json r = {{"p", json_io::exponent_to(fam.space.p)},
            {"d", fam.space.d},
            {"lower", g.lower},
            {"std_err", g.std_err},
            {"single_operator", g.single_operator},
            {"search",
             {{"n_terms", search.n_terms},
              {"restarts", search.restarts},
              {"iters", search.iters},
              {"scale", search.scale},
              {"decay", search.decay},
              {"search_samples", search.search_samples},
              {"samples", search.samples}}},
            {"witness", {{"assignment", g.witness.assignment}, {"vectors", json_io::matrix_to(g.witness.vectors)}}}};
  r["exact"] = g.exact ? json(*g.exact) : json(nullptr);
  return {r, true};
}

inline Outcome cmd_theta(const json& in, const Options& o) {
  const double p = exponent(in);
  const OperatorFamily a = family_from(need(in, "A"), p);
  const OperatorFamily b = in.contains("B") ? family_from(in["B"], p) : a;
  const ComplexVector x = json_io::vector_from(need(in, "x")), xs = json_io::vector_from(need(in, "xstar"));
  auto gamma_of = [&](const char* key, const OperatorFamily& f) {
    if (in.contains(key)) return number(in, key);
    if (!f.space.hilbert())
      throw Error(ErrorKind::InvalidInput, std::string("'") + key + "' must be supplied when p != 2");
    return sup_norm(f);
  };
  const double ga = gamma_of("gammaA", a), gb = gamma_of("gammaB", b);
  const MainReport m = verify_main(a, b, x, xs, ga, gb, o.eps);
  json r = {{"nu2", m.nu2},       {"bound", m.bound}, {"pass", m.pass},
            {"gap", m.gap},       {"gammaA", ga},     {"gammaB", gb},
            {"conditional", m.conditional}};
  if (o.factorize) r["certificate"] = certificate_block(m.certificate, o);
  return {r, m.pass};
}

inline Representation representation_from(const json& in, const FiniteGroup& g, const GroupDesc& desc) {
  const json rep = in.value("representation", json("regular"));
  if (rep.is_string()) {
    const auto name = rep.get<std::string>();
    if (name == "regular") return left_regular(g);
    if (name == "natural") {
      if (desc.kind == "cyclic") return cyclic_character(desc.n, 1);
      if (desc.kind == "dihedral") return dihedral_representation(desc.n);
      if (desc.kind == "symmetric" && desc.n >= 2) return standard_representation(desc.n);
    }
    throw Error(ErrorKind::InvalidInput, "no representation '" + name + "' for this group");
  }
  Representation r{g, json_io::matrices_from(need(rep, "matrices"))};
  r.validate();
  return r;
}

inline Outcome cmd_group(const json& in, const Options& o) {
  const GroupDesc desc = json_io::group_desc_from(need(in, "group"));
  const FiniteGroup g = make_group(desc);
  Representation pi = representation_from(in, g, desc);
  pi.validate();
  if (in.contains("similarity")) pi = conjugate(pi, json_io::matrix_from(in["similarity"]));
  const GroupFunction f{g, json_io::vector_from(need(in, "f"))};
  const double gamma = in.contains("gamma") ? number(in, "gamma") : pi.sup_norm();
  const GroupReport rep = verify_group(pi, f, gamma, o.eps);
  json r = {{"order", g.order()}, {"abelian", g.abelian()},  {"dim", pi.dim()},       {"gamma", gamma},
            {"sigma_norm", rep.sigma_norm}, {"q_norm", rep.q_norm}, {"bound", rep.bound}, {"pass", rep.pass}};
  bool pass = rep.pass;
  if (in.contains("psi")) {
    const GroupFunction psi{g, json_io::vector_from(in["psi"])};
    const Nu2Certificate c = fourier_cb_norm(psi, o.eps);
    const double pairing = std::abs((f.values.array() * psi.values.array()).sum());
    const bool dual_ok = pairing <= rep.q_norm * c.value * (1 + kRelativeSlack) + o.eps;
    pass = pass && dual_ok;
    r["multiplier"] = {{"cb_norm", c.value}, {"dual_lower", c.dual_lower}, {"pairing", pairing}, {"pairing_ok", dual_ok}};
    if (o.factorize) r["multiplier"]["certificate"] = certificate_block(c, o);
    r["pass"] = pass;
  }
  return {r, pass};
}

inline Outcome cmd_hankel(const json& in, const Options& o) {
  const HankelSequence m = json_io::sequence_from(in, count(in, "N"));
  const Ms1Bound b = ms1_lower(m, o.eps);
  json r = {{"N", m.n},
            {"ms1_lower", b.value},
            {"dual_lower", b.certificate.dual_lower},
            {"gap", b.certificate.value - b.certificate.dual_lower},
            {"completely_monotone", m.completely_monotone}};
  if (in.contains("F")) {
    const A0Lower lo = a0_lower(json_io::polynomial_from(in["F"]), m);
    r["a0_lower"] = {{"value", lo.value}, {"functional", lo.functional}, {"sup_grid", lo.sup_grid},
                     {"multiplier_upper", lo.ub}};
  }
  if (o.factorize) r["certificate"] = certificate_block(b.certificate, o);
  return {r, true};
}

inline Outcome cmd_semigroup(const json& in, const Options& o) {
  const SemigroupSample sg =
      sample_semigroup(json_io::matrix_from(need(in, "generator")), number(in, "delta"), count(in, "N"));
  const ComplexVector x = json_io::vector_from(need(in, "x")), xs = json_io::vector_from(need(in, "xstar"));
  const double gamma = in.contains("gamma") ? number(in, "gamma") : sg.sup_norm();
  const SemigroupReport rep = verify_semigroup(sg, x, xs, gamma, o.eps);
  json r = {{"nu2", rep.nu2},   {"bound", rep.bound}, {"pass", rep.pass},
            {"gap", rep.gap},   {"gamma", gamma},     {"semigroup_defect", sg.semigroup_defect()},
            {"grid", "counting measure on {j delta : j < N}; an exact finite instance, not a discretization"}};
  bool pass = rep.pass;
  if (in.contains("b")) {
    const HillePhillips hp = hille_phillips(sg, json_io::vector_from(in["b"]));
    r["hille_phillips"] = {{"value", json_io::matrix_to(hp.value)}, {"norm", hp.norm},
                           {"rough_bound", hp.rough_bound}, {"rough_ok", hp.rough_ok}};
    pass = pass && hp.rough_ok;
    r["pass"] = pass;
  }
  if (o.factorize) r["certificate"] = certificate_block(rep.certificate, o);
  return {r, pass};
}

inline Outcome cmd_power(const json& in, const Options& o) {
  const ComplexMatrix t = json_io::matrix_from(need(in, "T"));
  const ComplexVector x = json_io::vector_from(need(in, "x")), xs = json_io::vector_from(need(in, "xstar"));
  const Eigen::Index n = count(in, "N");
  Eigen::Index span = n;
  AnalyticPolynomial f;
  A0Decomposition dec;
  const bool has_f = in.contains("F"), has_dec = in.contains("decomposition");
  if (has_f) f = json_io::polynomial_from(in["F"]);
  if (has_dec) dec = json_io::decomposition_from(in["decomposition"]);
  if (has_f) span = std::max(span, decomposition_degree(f, dec) + 1);
  // gamma over the powers that the kernel and the decomposition touch.
  const double gamma = in.contains("gamma") ? number(in, "gamma") : power_bound(t, span);
  const PowerReport rep = verify_power(t, x, xs, n, gamma, o.eps);
  json r = {{"nu2", rep.nu2}, {"bound", rep.bound}, {"pass", rep.pass}, {"gap", rep.gap}, {"gamma", gamma}};
  bool pass = rep.pass;
  if (has_f) {
    const double rho = spectral_norm(rho_eval(t, f));
    json calc = {{"rho_norm", rho}, {"sup_grid_caveat", "grid maxima are lower-biased estimates of sup norms"}};
    if (has_dec) {
      const double up = a0_upper(f, dec);
      const bool ok = rho <= gamma * gamma * up * (1 + kRelativeSlack);
      calc["a0_upper"] = up;
      calc["calculus_bound"] = gamma * gamma * up;
      calc["calculus_ok"] = ok;
      pass = pass && ok;
    }
    r["calculus"] = std::move(calc);
    r["pass"] = pass;
  }
  if (o.factorize) r["certificate"] = certificate_block(rep.certificate, o);
  return {r, pass};
}

inline Outcome cmd_suite(const json& cfg, const Options& o, bool eps_given, bool samples_given) {
  json suites = json::object();
  if (cfg.contains("suite")) {
    if (!cfg["suite"].is_string()) throw Error(ErrorKind::InvalidInput, "'suite' must be a string");
    json body = cfg;
    body.erase("suite");
    suites[cfg["suite"].get<std::string>()] = body;
  } else if (cfg.contains("suites") && cfg["suites"].is_object()) {
    suites = cfg["suites"];
  } else {
    throw Error(ErrorKind::InvalidInput, "config needs 'suite' or a 'suites' object");
  }
  json reports = json::array();
  bool pass = true;
  for (auto it = suites.begin(); it != suites.end(); ++it) {
    json body = it.value().is_object() ? it.value() : json::object();
    if (eps_given && !body.contains("eps")) body["eps"] = o.eps;
    if (samples_given && !body.contains("samples")) body["samples"] = o.samples;
    json rep = suites::run_suite(it.key(), body, o.seed);
    pass = pass && rep["pass"].get<bool>();
    reports.push_back(std::move(rep));
  }
  return {{{"suites", std::move(reports)}, {"pass", pass}}, pass};
}

inline void emit(const json& report, const Options& o, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidInput, "cannot write '" + o.out + "'");
  f << text;
}

}  // namespace detail

/// Runs one subcommand; `args` excludes the program name.
inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Schur multiplier norms, gamma-bounds and factorization checks", kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);
  Options o;
  const std::vector<std::string> names = {"nu2", "gamma", "theta", "group", "hankel", "semigroup", "power", "verify-suite"};
  std::map<std::string, CLI::App*> subs;
  for (const auto& name : names) {
    CLI::App* s = app.add_subcommand(name);
    s->add_option("--out", o.out, "Report path (default stdout)");
    s->add_option("--eps", o.eps, "Solver tolerance")->check(CLI::Range(1e-10, 1e-2));
    s->add_option("--seed", o.seed, "Root seed");
    s->add_option("--samples", o.samples, "Monte-Carlo samples")->check(CLI::Range(1000, 100000000));
    s->add_flag("--factorize", o.factorize, "Include factorization vectors and Gram matrices");
    if (name == "verify-suite")
      s->add_option("--config", o.config, "Suite config JSON")->required();
    else
      s->add_option("--input", o.input, "Input JSON")->required();
    subs[name] = s;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForVersion&) {
    out << kToolName << " " << kVersion << "\n";
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kInvalid;
  }

  std::string command;
  for (const auto& [name, s] : subs)
    if (s->parsed()) command = name;
  const CLI::App* sub = subs[command];
  const bool eps_given = sub->count("--eps") > 0, samples_given = sub->count("--samples") > 0;

  json report = {{"tool", kToolName}, {"version", kVersion}, {"command", command}};
  report["config"] = {{"eps", o.eps}, {"seed", o.seed}, {"samples", o.samples}, {"factorize", o.factorize},
                      {"rng", {{"algorithm", "splitmix64-box-muller"}, {"version", GaussianStream::kAlgorithmVersion}}}};
  try {
    Outcome res;
    if (command == "verify-suite") {
      res = detail::cmd_suite(detail::read_json_file(o.config, "config"), o, eps_given, samples_given);
    } else {
      const json in = detail::read_json_file(o.input, "input");
      if (command == "nu2") res = detail::cmd_nu2(in, o);
      else if (command == "gamma") res = detail::cmd_gamma(in, o);
      else if (command == "theta") res = detail::cmd_theta(in, o);
      else if (command == "group") res = detail::cmd_group(in, o);
      else if (command == "hankel") res = detail::cmd_hankel(in, o);
      else if (command == "semigroup") res = detail::cmd_semigroup(in, o);
      else res = detail::cmd_power(in, o);
    }
    report["result"] = std::move(res.result);
    report["status"] = res.pass ? "pass" : "violated";
    detail::emit(report, o, out);
    return res.pass ? kPass : kViolated;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    report["status"] = e.is_numerical() ? "numerical-failure" : "invalid-input";
    report["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
    if (const auto* se = dynamic_cast<const SolverError*>(&e))
      report["error"]["bounds"] = {{"lower", se->lower()}, {"upper", se->upper()}};
    try {
      detail::emit(report, o, out);
    } catch (const Error&) {
    }
    return e.is_numerical() ? kNumerical : kInvalid;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  }
}

}  // namespace cbf::cli
