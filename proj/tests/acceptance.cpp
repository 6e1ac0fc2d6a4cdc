// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <string>

#include "cbfactor/cli.hpp"

using namespace cbf;
using nlohmann::json;

namespace {

constexpr std::uint64_t kSeed = 42;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

std::string fmt(const char* f, auto... xs) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, xs...);
  return buf;
}

// Runs one suite through the command-line front end and returns the raw bytes.
std::string suite_bytes(const std::string& name, const json& body = json::object()) {
  const std::string path = std::filesystem::temp_directory_path() / ("cbfactor_accept_" + name + ".json");
  json cfg = body;
  cfg["suite"] = name;
  std::ofstream(path) << cfg.dump();
  std::ostringstream out, err;
  const int code = cli::run({"verify-suite", "--config", path, "--seed", std::to_string(kSeed)}, out, err);
  std::filesystem::remove(path);
  if (code == cli::kInvalid || code == cli::kNumerical) std::fprintf(stderr, "%s: %s", name.c_str(), err.str().c_str());
  return out.str();
}

json suite_report(const std::string& bytes) {
  const json rep = json::parse(bytes);
  return rep["result"]["suites"][0];
}

void criterion1() {
  const auto t0 = Clock::now();
  GaussianStream s = GaussianStream(kSeed).substream("rank-one");
  double worst_rank1 = 0.0, worst_perm = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(s.next_uniform() * 10);
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(s.next_uniform() * 10);
    const ComplexVector u = s.draw(m), v = s.draw(n);
    const double expected = u.cwiseAbs().maxCoeff() * v.cwiseAbs().maxCoeff();
    const double got = nu2(SchurKernel(u * v.transpose()), 1e-8).value;
    worst_rank1 = std::max(worst_rank1, std::abs(got - expected) / std::max(1.0, expected));
  }
  GaussianStream p = GaussianStream(kSeed).substream("permutation");
  for (int i = 0; i < 100; ++i) {
    const int n = 2 + static_cast<int>(p.next_uniform() * 11);
    std::vector<int> perm(static_cast<size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    for (int k = n - 1; k > 0; --k)
      std::swap(perm[static_cast<size_t>(k)], perm[static_cast<size_t>(p.next_uniform() * (k + 1))]);
    ComplexMatrix a = ComplexMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k) a(k, perm[static_cast<size_t>(k)]) = 1.0;
    worst_perm = std::max(worst_perm, std::abs(nu2(SchurKernel(a), 1e-8).value - 1.0));
  }
  const double secs = seconds_since(t0);
  report(1, worst_rank1 <= 1e-6 && worst_perm <= 1e-6 && secs <= 60.0,
         fmt("rank-one max rel err %.2e, permutation max err %.2e, %.1f s", worst_rank1, worst_perm, secs));
}

void criterion2() {
  ComplexMatrix a(2, 2);
  a << 1, 0, 1, 1;
  const double exact = 2.0 / std::sqrt(3.0);
  const double v = nu2(SchurKernel(a), 1e-9).value;
  double lo = 1.0, hi = 1.5;
  while (hi - lo > 1e-5) {
    const double mid = 0.5 * (lo + hi);
    (feasibility_oracle(a, mid, 2000000).feasible ? hi : lo) = mid;
  }
  const bool ok = std::abs(v - exact) <= 1e-5 && lo - 1e-5 <= v && v <= hi + 1e-5 && lo <= exact && exact <= hi;
  report(2, ok, fmt("sdp %.9f, oracle bracket [%.7f, %.7f], 2/sqrt(3) = %.9f", v, lo, hi, exact));
}

void criterion3() {
  GaussianStream s = GaussianStream(kSeed).substream("certificates");
  int instances = 0, bad = 0;
  double worst_recon = 0.0, worst_cols = 0.0, worst_gap = 0.0, worst_time = 0.0;
  for (int n : {2, 3, 5, 8, 12, 16, 24, 32}) {
    for (bool real : {true, false}) {
      for (int rep = 0; rep < (n == 32 ? 2 : 3); ++rep) {
        const Eigen::Index m = std::max<Eigen::Index>(1, n - rep);
        ComplexMatrix phi = s.draw_matrix(m, n);
        if (real) phi = ComplexMatrix(phi.real().cast<cplx>());
        const SchurKernel k(phi);
        const auto t0 = Clock::now();
        const Nu2Certificate c = nu2(k, 1e-8);
        const double secs = seconds_since(t0);
        const double recon = reconstruction_error(c.a1, c.a2, phi);
        const double cols = max_column_norm(c.a1) * max_column_norm(c.a2) / c.value - 1.0;
        const double gap = (c.value - c.dual_lower) / std::max(1.0, c.value);
        worst_recon = std::max(worst_recon, recon);
        worst_cols = std::max(worst_cols, cols);
        worst_gap = std::max(worst_gap, gap);
        if (std::max(m, Eigen::Index{n}) == 32) worst_time = std::max(worst_time, secs);
        bad += !(recon <= 1e-6 && cols <= 1e-6 && gap <= 1e-6 && gap >= -1e-12 && (n < 32 || secs <= 10.0));
        ++instances;
      }
    }
  }
  report(3, bad == 0,
         fmt("%d instances up to 32x32, max recon %.2e, max colnorm excess %.2e, max rel gap %.2e, worst 32x32 %.1f s",
             instances, worst_recon, worst_cols, worst_gap, worst_time));
}

}  // namespace

int main() {
  const auto start = Clock::now();
  criterion1();
  criterion2();
  criterion3();

  const std::vector<std::string> names = {"gaussian", "main", "group", "hankel", "power", "semigroup"};
  std::map<std::string, std::string> first;
  for (const auto& n : names) first[n] = suite_bytes(n);
  std::map<std::string, json> rep;
  for (const auto& n : names) rep[n] = suite_report(first[n]);

  const json& g = rep["gaussian"];
  const int inst = g["config"]["instances"].get<int>();
  report(4, g["hilbert_passed"].get<int>() == inst && inst == 50,
         fmt("G(X) Hilbert identity %d/%d within 3 std_err, max relative std_err %.4f at %d samples",
             g["hilbert_passed"].get<int>(), inst, g["max_relative_std_err"].get<double>(),
             g["config"]["hilbert_samples"].get<int>()));
  report(5, g["rank_one_passed"].get<int>() == 3 * inst && g["tensor_passed"].get<int>() == 3 * inst,
         fmt("rank-one %d/%d, right ideal %d/%d over p in {1, 2, inf}", g["rank_one_passed"].get<int>(), 3 * inst,
             g["tensor_passed"].get<int>(), 3 * inst));

  const json& m = rep["main"];
  double worst_ratio = 0.0;
  for (const auto& r : m["results"]) worst_ratio = std::max(worst_ratio, r["nu2"].get<double>() / r["bound"].get<double>());
  report(6, m["pass"].get<bool>() && m["instances"] == 100,
         fmt("%d/%d orbit instances, max nu2/bound %.10f", m["passed"].get<int>(), m["instances"].get<int>(), worst_ratio));

  const json& gr = rep["group"];
  report(7, gr["pass"].get<bool>() && gr["cb_error"].get<double>() <= 1e-6,
         fmt("%d/%d checks, character and delta cb-norm max error %.2e", gr["passed"].get<int>(),
             gr["instances"].get<int>(), gr["cb_error"].get<double>()));

  const json& h = rep["hankel"];
  report(8, h["pass"].get<bool>() && h["cm_error"].get<double>() <= 1e-5,
         fmt("%d/%d sequences, completely monotone max error %.2e", h["passed"].get<int>(), h["instances"].get<int>(),
             h["cm_error"].get<double>()));

  const json& p = rep["power"];
  report(9, p["pass"].get<bool>() && p["instances"] == 100 && p["pinch_error"].get<double>() <= 1e-6,
         fmt("%d/%d contractions, e_n pinch error %.2e", p["passed"].get<int>(), p["instances"].get<int>(),
             p["pinch_error"].get<double>()));

  const json& sg = rep["semigroup"];
  const double scalar_err = sg["scalar_integral"]["error"].get<double>();
  report(10, sg["pass"].get<bool>() && sg["instances"] == 50 && sg["rough_all"].get<bool>() && scalar_err <= 1e-5,
         fmt("%d/%d generators, rough bound %s, scalar integral error %.2e", sg["passed"].get<int>(),
             sg["instances"].get<int>(), sg["rough_all"].get<bool>() ? "holds" : "fails", scalar_err));

  int identical = 0;
  for (const auto& n : names) identical += suite_bytes(n) == first[n];
  report(11, identical == static_cast<int>(names.size()),
         fmt("%d/%zu suites byte-identical on rerun with seed %llu", identical, names.size(),
             static_cast<unsigned long long>(kSeed)));

  std::printf("total %.1f s, %d failed\n", seconds_since(start), failures);
  return failures == 0 ? 0 : 1;
}
