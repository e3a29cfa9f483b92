// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <unistd.h>

#include "mjost/jost.hpp"
#include "mjost/martingale.hpp"
#include "mjost/multilinear.hpp"
#include "mjost/sweep.hpp"

using namespace mjost;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

nlohmann::json load_reference() {
  std::ifstream in(MJOST_REFERENCE);
  if (!in) throw std::runtime_error(std::string("cannot open reference file ") + MJOST_REFERENCE);
  return nlohmann::json::parse(in);
}

// Families shared by criteria 2 and 3.
struct NamedFamily {
  const char* name;
  PotentialFamily family;
};

std::vector<NamedFamily> conservation_families(double X) {
  return {{"comb n^-2", power_law_comb(1.0, 2.0, X)},
          {"oscillatory(-1,2)", Oscillatory{-1.0, 2.0}},
          {"plus_minus_one", PlusMinusOne{}}};
}

Outcome free_field() {
  const auto t0 = std::chrono::steady_clock::now();
  const double X = 200.0;
  const auto d = build_decomposition(ClassicalL1{IntervalFunction::zero(X)}, X);
  JostOptions o;
  for (double x = 0.0; x <= X; x += 10.0) o.sample_at.push_back(x);
  double resid = 0.0, wr = 0.0;
  for (double E : {0.25, 1.0, 4.0}) {
    const auto r = jost_direct(d, E, X, o);
    for (std::size_t i = 0; i < r.x.size(); ++i)
      resid = std::max({resid, r.wkb_residual[i], r.wkb_residual_quasi[i]});
    wr = std::max(wr, r.wronskian_error);
  }
  const double t = seconds_since(t0);
  return {resid <= 1e-10 && wr <= 1e-12 && t < 1.0,
          fmt("max residual %.3g (<= 1e-10), wronskian error %.3g (<= 1e-12), %.2f s (< 1 s)", resid, wr, t)};
}

struct ConservationRuns {
  std::vector<Decomposition> decomps;
  std::vector<JostResult> runs;  // 3 energies per family
  double seconds = 0.0;
};

ConservationRuns conservation_runs() {
  ConservationRuns out;
  const auto t0 = std::chrono::steady_clock::now();
  const double X = 200.0;
  for (const auto& f : conservation_families(X)) {
    out.decomps.push_back(build_decomposition(f.family, X));
    const auto profile = QProfile::build(out.decomps.back());
    JostOptions o;
    o.sample_at = {0.5 * X};
    for (double E : {0.5, 1.0, 2.0}) out.runs.push_back(jost_direct(WkbKernel(profile, E), X, o));
  }
  out.seconds = seconds_since(t0);
  return out;
}

Outcome wronskian(const ConservationRuns& c) {
  double worst = 0.0;
  std::string per;
  for (std::size_t f = 0; f < 3; ++f) {
    double w = 0.0;
    for (std::size_t e = 0; e < 3; ++e) w = std::max(w, c.runs[3 * f + e].wronskian_error);
    worst = std::max(worst, w);
    per += fmt("%s %.2g; ", conservation_families(200.0)[f].name, w);
  }
  return {worst <= 1e-6 && c.seconds < 30.0,
          per + fmt("max %.3g (<= 1e-6), %.1f s (< 30 s)", worst, c.seconds)};
}

Outcome substitution_chain(const ConservationRuns& c) {
  double worst = 0.0;
  for (std::size_t i = 0; i < c.runs.size(); ++i)
    worst = std::max(worst, forward_consistency(c.decomps[i / 3], c.runs[i], 0.5 * c.runs[i].X_max));
  return {worst <= 1e-6, fmt("max relative forward/backward difference on [X/2, X] %.3g (<= 1e-6)", worst)};
}

Outcome series_direct() {
  const double X = 200.0;
  const auto d = build_decomposition(power_law_comb(0.05, 2.0, X), X);
  const auto series = jost_series(d, 1.0, X, 8);
  JostOptions o;
  o.sample_at = series.x;
  const auto direct = jost_direct(d, 1.0, X, o);
  double diff = 0.0;
  std::size_t matched = 0;
  for (std::size_t j = 0; j < series.x.size(); ++j) {
    const auto it = std::find(direct.x.begin(), direct.x.end(), series.x[j]);
    if (it == direct.x.end()) continue;
    const auto i = static_cast<std::size_t>(it - direct.x.begin());
    diff = std::max(diff, std::abs(direct.u[i] - series.u[j]) / std::abs(direct.u[i]));
    ++matched;
  }
  // Ratio test against the B_1 size of the kernel: r_{n+1} sqrt(n+1) / r_n <= ||F||_{B_1}.
  const auto ms = shared_structure(d, 0.0, 2.0, 10);
  const double b1 = bs_seminorm(WkbKernel(d, 1.0), ms, 1.0).total;
  const auto& r = series.order_norms;
  double ratio = 0.0;
  for (std::size_t n = 1; n + 1 < r.size(); ++n) ratio = std::max(ratio, r[n + 1] * std::sqrt(n + 1.0) / r[n]);
  const bool ok = matched == series.x.size() && r.size() == 9 && diff <= 1e-4 && ratio <= b1;
  return {ok, fmt("max relative u difference %.3g (<= 1e-4) over %zu points; max ratio %.3g (<= ||F||_B1 = %.3g)",
                  diff, matched, ratio, b1)};
}

Outcome multilinear_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0), v(-1.0, 1.0);
  const double X = 6.0;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> bp{0.0};
    for (int i = 0; i < 9; ++i) bp.push_back(u(rng) * X);
    bp.push_back(X);
    std::sort(bp.begin(), bp.end());
    std::vector<Piece> pieces;
    for (int i = 0; i < 10; ++i) pieces.push_back(Constant{cplx(v(rng), v(rng))});
    const IntervalFunction f(bp, pieces, ValueKind::complex);
    for (int n : {2, 3}) {
      const auto pat = series_pattern(n);
      const cplx a = m_n(f, pat, 0.0, X);
      const cplx b = m_n_nested(f, pat, 0.0, X);
      worst = std::max(worst, std::abs(a - b) / std::abs(b));
    }
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-8 && t < 60.0, fmt("max relative error %.3g (<= 1e-8), %.2f s (< 60 s)", worst, t)};
}

Outcome adaptedness() {
  const double X = 200.0;
  double min_slack = INFINITY;
  std::size_t structures = 0, bad_counts = 0;
  for (const auto& f : conservation_families(X)) {
    const auto d = build_decomposition(f.family, X);
    for (double gamma : {0.0, 0.4})
      for (double p : {1.5, 2.0}) {
        const auto w = structure_weight(d, gamma);
        const auto ms = MartingaleStructure::adapted(w, p, 10);
        const auto rep = check_adaptedness(ms, w, p);
        if (rep.cells_checked != (std::size_t{1} << 11) - 2) ++bad_counts;
        min_slack = std::min(min_slack, rep.min_slack);
        ++structures;
      }
  }
  return {bad_counts == 0 && min_slack >= -1e-10,
          fmt("%zu structures x 2046 cells, min slack %.3g (>= -1e-10)", structures, min_slack)};
}

Outcome wkb_decay(const nlohmann::json& ref) {
  const auto& j = ref.at("wkb_residual");
  const auto xs = j.at("X_max").get<std::vector<double>>();
  const auto expected = j.at("residual_at_half").get<std::vector<double>>();
  std::vector<double> got;
  double dev = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double X = xs[i];
    const auto d = build_decomposition(power_law_comb(1.0, 2.0, X), X);
    JostOptions o;
    o.sample_at = {0.5 * X};
    got.push_back(residual_at(jost_direct(d, 1.0, X, o), 0.5 * X));
    dev = std::max(dev, std::abs(got.back() - expected[i]));
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < got.size(); ++i) decreasing = decreasing && got[i] < got[i - 1];
  const bool ok = got.size() == 3 && decreasing && got.back() < 0.05 && dev <= 1e-6;
  return {ok, fmt("residuals %.4g, %.4g, %.4g (strictly decreasing, last < 0.05), deviation from reference %.2g "
                  "(<= 1e-6)",
                  got[0], got[1], got[2], dev)};
}

Outcome tail_decay(const nlohmann::json& ref) {
  const auto& j = ref.at("tail_decay");
  SweepConfig cfg;
  cfg.family = power_law_comb(1.0, 2.0, cfg.X_max);
  const auto d = build_decomposition(cfg.family, cfg.X_max);
  const auto profile = QProfile::build(d);
  const auto ms = shared_structure(d, cfg.gamma, cfg.p, cfg.M_max);
  const std::vector<double> cuts{25.0, 150.0};
  const auto energies = energy_grid(cfg);
  const auto r25 = j.at("b1_tail_M25").get<std::vector<double>>();
  const auto r150 = j.at("b1_tail_M150").get<std::vector<double>>();
  if (r25.size() != energies.size() || r150.size() != energies.size())
    return {false, "reference grid size does not match the 256-energy grid"};
  std::size_t good = 0;
  double dev = 0.0;
  for (std::size_t i = 0; i < energies.size(); ++i) {
    const WkbKernel kernel(profile, energies[i]);
    auto integrate = [&](double a, double b) { return kernel.integrate_kernel(a, b); };
    const auto finest = finest_cell_integrals(ms, integrate);
    const auto t = bs_tails(ms, finest, 1.0, cuts, integrate);
    if (t[1] <= 0.25 * t[0]) ++good;
    dev = std::max({dev, std::abs(t[0] - r25[i]) / r25[i], std::abs(t[1] - r150[i]) / r150[i]});
  }
  const double frac = static_cast<double>(good) / static_cast<double>(energies.size());
  return {frac >= 0.9 && dev <= 1e-8,
          fmt("%zu/%zu energies with b1(150) <= 0.25 b1(25), fraction %.4f (>= 0.9), reference fraction %.4f, "
              "max relative deviation %.2g (<= 1e-8)",
              good, energies.size(), frac, j.at("fraction_decayed").get<double>(), dev)};
}

Outcome oscillatory_slope() {
  const auto d = build_decomposition(Oscillatory{0.25, 2.0}, 200.0);
  const auto norms = cell_norms(d.sigma, 2.0, 0.0, 200.0);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t j = 10; j <= 199; ++j) {
    const double lx = std::log(static_cast<double>(j)), ly = std::log(norms[j]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {std::abs(slope + 0.75) <= 0.1, fmt("slope %.4f (target -0.75 +/- 0.1) over cells 10..199", slope)};
}

// Exact sup of x |sigma(x)| over linear pieces intersected with [a, b].
Outcome plus_minus_one_decay() {
  const double a = 10.0, b = 200.0;
  const auto d = build_decomposition(PlusMinusOne{}, b);
  double sup = 0.0;
  bool linear = true;
  for (std::size_t i = 0; i < d.sigma.size(); ++i) {
    const double l = std::max(d.sigma.left(i), a), r = std::min(d.sigma.right(i), b);
    if (!(l < r)) continue;
    const auto* poly = std::get_if<Polynomial>(&d.sigma.piece(i));
    if (!poly || poly->coeffs.size() > 2) {
      linear = false;
      continue;
    }
    const double x0 = d.sigma.left(i);
    const double c0 = poly->coeffs[0].real(), c1 = poly->coeffs.size() > 1 ? poly->coeffs[1].real() : 0.0;
    // g(x) = x (c0 + c1 (x - x0)): candidates are the ends and the vertex.
    auto g = [&](double x) { return std::abs(x * (c0 + c1 * (x - x0))); };
    sup = std::max({sup, g(l), g(r)});
    if (c1 != 0.0) {
      const double v = 0.5 * (x0 - c0 / c1);
      if (v > l && v < r) sup = std::max(sup, g(v));
    }
  }
  return {linear && sup <= 2.0, fmt("sup over [10, 200] of x |sigma(x)| = %.6f (<= 2.0)", sup)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli_determinism() {
  const fs::path dir = fs::temp_directory_path() / ("mjost_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string pot = R"({"X_max": 40, "potential": {"family": "power_comb", "alpha": 2},)";
  const std::vector<std::pair<std::string, std::string>> cases{
      {"decompose", R"({"X_max": 40, "potential": {"family": "oscillatory", "a": -1, "b": 2}})"},
      {"jost", pot + R"("jost": {"E": 1.3, "output_spacing": 0.5}})"},
      {"jost", pot + R"("jost": {"E": 1.3, "method": "series", "n_max": 6}})"},
      {"sweep", pot + R"("sweep": {"n_energies": 6, "M_list": [5, 20], "checkpoints": [20, 40], "threads": 3}})"},
      {"martingale", pot + R"("martingale": {"M_max": 6, "p": 1.5, "gamma": 0.4}})"},
      {"series-check", pot + R"("series_check": {"n_max": 3, "oracle_x1": 3}})"}};
  std::size_t identical = 0;
  std::string failed;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const fs::path cfg = dir / ("cfg" + std::to_string(c) + ".json");
    std::ofstream(cfg) << cases[c].second;
    std::string out[2];
    int codes[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path o = dir / ("out" + std::to_string(c) + "_" + std::to_string(rep) + ".csv");
      const std::string cmd = std::string(MJOST_EXE) + " " + cases[c].first + " --config " + cfg.string() + " > " +
                              o.string() + " 2> /dev/null";
      codes[rep] = std::system(cmd.c_str());
      out[rep] = slurp(o);
    }
    if (codes[0] == 0 && codes[1] == 0 && !out[0].empty() && out[0] == out[1])
      ++identical;
    else
      failed += " " + cases[c].first;
  }
  fs::remove_all(dir);
  return {identical == cases.size(),
          fmt("%zu/%zu commands byte-identical on rerun%s", identical, cases.size(),
              failed.empty() ? "" : (" (differs:" + failed + ")").c_str())};
}

}  // namespace

int main() {
  nlohmann::json ref;
  try {
    ref = load_reference();
  } catch (const std::exception& e) {
    std::printf("cannot load reference data: %s\n", e.what());
    return 1;
  }
  const ConservationRuns runs = conservation_runs();
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"free-field exactness", free_field},
      {"wronskian conservation", [&] { return wronskian(runs); }},
      {"substitution-chain equivalence", [&] { return substitution_chain(runs); }},
      {"series-direct agreement", series_direct},
      {"multilinear oracle equivalence", multilinear_oracle},
      {"martingale adaptedness", adaptedness},
      {"short-range WKB decay", [&] { return wkb_decay(ref); }},
      {"tail-seminorm decay", [&] { return tail_decay(ref); }},
      {"oscillatory decay-rate regression", oscillatory_slope},
      {"plus-minus-one surrogate", plus_minus_one_decay},
      {"CLI determinism", cli_determinism}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
