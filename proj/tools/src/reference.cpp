// Regenerates tests/data/reference.json: high-accuracy values the acceptance
// run compares against.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "mjost/jost.hpp"
#include "mjost/martingale.hpp"
#include "mjost/sweep.hpp"

using namespace mjost;
using nlohmann::ordered_json;

namespace {

constexpr double kTightRel = 1e-13;
constexpr double kTightAbs = 1e-15;

ordered_json wkb_residuals() {
  ordered_json j;
  j["family"] = "delta_comb amplitude 1 alpha 2";
  j["E"] = 1.0;
  j["rel_tol"] = kTightRel;
  j["abs_tol"] = kTightAbs;
  ordered_json xs = ordered_json::array(), res = ordered_json::array();
  for (double X : {50.0, 100.0, 200.0}) {
    const auto d = build_decomposition(power_law_comb(1.0, 2.0, X), X);
    JostOptions o;
    o.integrator.rel_tol = kTightRel;
    o.integrator.abs_tol = kTightAbs;
    o.sample_at = {0.5 * X};
    const auto r = jost_direct(d, 1.0, X, o);
    xs.push_back(X);
    res.push_back(residual_at(r, 0.5 * X));
  }
  j["X_max"] = xs;
  j["residual_at_half"] = res;
  return j;
}

ordered_json tail_decay() {
  SweepConfig cfg;
  cfg.family = power_law_comb(1.0, 2.0, cfg.X_max);
  const std::vector<double> cuts{25.0, 150.0};
  const auto d = build_decomposition(cfg.family, cfg.X_max);
  const auto profile = QProfile::build(d);
  const auto ms = shared_structure(d, cfg.gamma, cfg.p, cfg.M_max);
  QuadratureConfig q;
  q.rel_tol = 1e-13;
  q.abs_tol = 1e-15;

  ordered_json j;
  j["family"] = "delta_comb amplitude 1 alpha 2";
  j["X_max"] = cfg.X_max;
  j["M_max"] = cfg.M_max;
  j["p"] = cfg.p;
  j["gamma"] = cfg.gamma;
  j["E_min"] = cfg.E_min;
  j["E_max"] = cfg.E_max;
  j["n_energies"] = cfg.n_energies;
  ordered_json e_arr = ordered_json::array(), t25 = ordered_json::array(), t150 = ordered_json::array();
  std::size_t good = 0;
  const auto energies = energy_grid(cfg);
  for (double E : energies) {
    const WkbKernel kernel(profile, E);
    auto integrate = [&](double a, double b) { return kernel.integrate_kernel(a, b, q); };
    const auto finest = finest_cell_integrals(ms, integrate);
    const auto tails = bs_tails(ms, finest, 1.0, cuts, integrate);
    e_arr.push_back(E);
    t25.push_back(tails[0]);
    t150.push_back(tails[1]);
    if (tails[1] <= 0.25 * tails[0]) ++good;
  }
  j["E"] = e_arr;
  j["b1_tail_M25"] = t25;
  j["b1_tail_M150"] = t150;
  j["fraction_decayed"] = static_cast<double>(good) / static_cast<double>(energies.size());
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <reference.json>\n", argv[0]);
    return 2;
  }
  ordered_json out;
  out["wkb_residual"] = wkb_residuals();
  out["tail_decay"] = tail_decay();
  std::ofstream f(argv[1], std::ios::binary);
  if (!f) {
    std::fprintf(stderr, "cannot write %s\n", argv[1]);
    return 2;
  }
  f << out.dump(2) << '\n';
  return 0;
}
