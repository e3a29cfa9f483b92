#include "mjost_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "mjost/csv.hpp"

namespace mjost::cli {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> output_grid(double x_max, double spacing) {
  std::vector<double> g;
  for (std::size_t i = 0;; ++i) {
    const double x = static_cast<double>(i) * spacing;
    if (x >= x_max * (1.0 - 1e-12)) break;
    g.push_back(x);
  }
  g.push_back(x_max);
  return g;
}

void write_jost_rows(CsvWriter& w, const JostResult& r, std::span<const double> grid) {
  for (double x : grid) {
    const auto it = std::lower_bound(r.x.begin(), r.x.end(), x - 1e-12 * std::max(1.0, x));
    if (it == r.x.end() || std::abs(*it - x) > 1e-12 * std::max(1.0, x)) continue;
    const auto i = static_cast<std::size_t>(it - r.x.begin());
    w.row({format_double(x), format_double(r.u[i].real()), format_double(r.u[i].imag()),
           format_double(r.u_quasi[i].real()), format_double(r.u_quasi[i].imag()),
           format_double(r.wkb_residual[i]), format_double(r.wkb_residual_tau[i])});
  }
}

void log_warnings(const JostResult& r) {
  for (const auto& wmsg : r.warnings) spdlog::warn("E = {}: {}", r.E, wmsg);
}

int cmd_decompose(const RunConfig& rc, std::ostream& out) {
  const Decomposition d = build_decomposition(rc.family, rc.X_max);
  spdlog::info("family {} gamma {} on [0, {}]", d.family_tag, d.gamma, rc.X_max);
  const auto s2 = cell_norms(d.sigma, 2.0, 0.0, rc.X_max);
  const auto t1 = cell_norms(d.tau, 1.0, 0.0, rc.X_max);
  CsvWriter w(out);
  w.row({"j", "sigma_l2_cell", "tau_l1_cell"});
  for (std::size_t j = 0; j < s2.size(); ++j) w.row({std::to_string(j), format_double(s2[j]), format_double(t1[j])});
  return kSuccess;
}

int cmd_jost(const RunConfig& rc, std::ostream& out) {
  const JostBlock& b = rc.jost;
  const Decomposition d = build_decomposition(rc.family, rc.X_max);
  const WkbKernel kernel(d, b.E);
  const auto grid = output_grid(rc.X_max, b.output_spacing);
  JostOptions opts;
  opts.sample_at = grid;
  opts.integrator.rel_tol = b.rel_tol;
  opts.integrator.abs_tol = b.abs_tol;

  CsvWriter w(out);
  w.row({"x", "re_u", "im_u", "re_uq", "im_uq", "resid_q", "resid_tau"});
  if (b.method == JostMethod::direct) {
    try {
      const JostResult r = jost_direct(kernel, rc.X_max, opts);
      log_warnings(r);
      spdlog::info("wronskian error {}", r.wronskian_error);
      write_jost_rows(w, r, grid);
    } catch (const JostFailure& e) {
      write_jost_rows(w, e.partial(), grid);
      w.row({format_double(e.last_good_x()), "nan", "nan", "nan", "nan", "nan", "nan"});
      spdlog::error("integration failed: {}", e.what());
      return kNumericFailure;
    }
    return kSuccess;
  }
  std::optional<MartingaleStructure> ms;
  if (b.adaptive_order) ms = shared_structure(d, 0.0, b.p, b.M_max);
  const JostResult r = jost_series(kernel, rc.X_max, b.n_max, ms ? &*ms : nullptr, opts);
  log_warnings(r);
  if (r.series_order) spdlog::info("series order {}", *r.series_order);
  write_jost_rows(w, r, grid);
  return kSuccess;
}

int cmd_sweep(const RunConfig& rc, std::ostream& out) {
  const SweepOutput res = run_sweep(rc.sweep);
  spdlog::info("structure: total mass {} min slack {} violations {}", res.adaptedness.total_mass,
               res.adaptedness.min_slack, res.adaptedness.violations);
  std::size_t failed = 0;
  for (const auto& row : res.rows)
    if (!row.fail_reason.empty()) {
      ++failed;
      spdlog::warn("E = {}: {}", row.E, row.fail_reason);
    }
  if (failed) spdlog::warn("{} of {} energies failed", failed, res.rows.size());
  write_sweep_csv(out, rc.sweep, res.rows);

  if (!rc.c_grid.empty()) {
    const auto stats = bad_set_summary(res.rows, rc.c_grid, rc.sweep.s);
    std::ostringstream summary;
    CsvWriter sw(summary);
    sw.row({"c", "count", "proportion", "box_width_1", "box_count_1", "box_width_2", "box_count_2", "box_width_3",
            "box_count_3"});
    for (const auto& st : stats) {
      std::vector<std::string> f{format_double(st.c), std::to_string(st.count), format_double(st.proportion)};
      for (std::size_t i = 0; i < 3; ++i) {
        f.push_back(format_double(st.box_width[i]));
        f.push_back(std::to_string(st.box_count[i]));
      }
      sw.row(f);
    }
    if (rc.summary_path) {
      std::ofstream f(*rc.summary_path, std::ios::binary);
      if (!f) throw ConfigError("sweep.summary_path: cannot write '" + *rc.summary_path + "'");
      f << summary.str();
    } else {
      spdlog::info("bad-set screen (box counts are an exploratory dimension proxy):\n{}", summary.str());
    }
  }
  return kSuccess;
}

int cmd_martingale(const RunConfig& rc, std::ostream& out) {
  const MartingaleBlock& b = rc.martingale;
  const Decomposition d = build_decomposition(rc.family, rc.X_max);
  const MartingaleStructure ms = shared_structure(d, b.gamma, b.p, b.M_max);
  const IntervalFunction weight = structure_weight(d, b.gamma);
  const LpL1Mass mass(weight, b.p);
  const double total = mass.total();
  const WkbKernel kernel(d, b.E);
  const auto finest = finest_cell_integrals(ms, [&](double x0, double x1) { return kernel.integrate_kernel(x0, x1); });
  const BsReport bs1 = bs_from_cell_integrals(ms, finest, 1.0);
  const BsReport bs2 = bs_from_cell_integrals(ms, finest, 2.0);

  CsvWriter w(out);
  w.row({"kind", "m", "j", "left", "right", "value"});
  for (int m = 1; m <= ms.m_max(); ++m)
    for (std::size_t j = 0; j < ms.cells(m); ++j) {
      const auto [l, r] = ms.cell(m, j);
      const double share = total > 0.0 ? mass.between(l, r) / total : 0.0;
      w.row({"cell", std::to_string(m), std::to_string(j + 1), format_double(l), format_double(r),
             format_double(share)});
    }
  for (const BsReport* rep : {&bs1, &bs2}) {
    const std::string name = rep == &bs1 ? "b1" : "b2";
    for (std::size_t m = 0; m < rep->terms.size(); ++m)
      w.row({name + "_term", std::to_string(m + 1), "", "", "", format_double(rep->terms[m])});
    w.row({name + "_total", "", "", "", "", format_double(rep->total)});
    w.row({name + "_tail_estimate", "", "", "", "", format_double(rep->tail_estimate)});
  }
  const AdaptednessReport rep = ms.adaptedness().value_or(AdaptednessReport{});
  w.row({"total_mass", "", "", "", "", format_double(rep.total_mass)});
  w.row({"min_slack", "", "", "", "", format_double(rep.min_slack)});
  w.row({"violations", "", "", "", "", std::to_string(rep.violations)});
  if (rep.violations) spdlog::warn("structure violates adaptedness in {} cells", rep.violations);
  return kSuccess;
}

int cmd_series_check(const RunConfig& rc, std::ostream& out) {
  const SeriesCheckBlock& b = rc.series_check;
  const Decomposition d = build_decomposition(rc.family, rc.X_max);
  const MartingaleStructure ms = shared_structure(d, b.gamma, b.p, b.M_max);
  const WkbKernel kernel(d, b.E);
  const IntervalFunction f = kernel.kernel_function();
  const FactorialBoundReport fb = factorial_bound_report(f, ms, b.n_max, rc.X_max, b.grid_density);
  if (fb.degenerate) spdlog::warn("B_1 norm vanishes while the kernel does not");
  const double x1 = std::min(b.oracle_x1, rc.X_max);

  CsvWriter w(out);
  w.row({"n", "b1_norm", "m_star", "r", "r_root", "re_m_n", "im_m_n", "re_oracle", "im_oracle", "rel_err"});
  for (int n = 1; n <= b.n_max; ++n) {
    const auto i = static_cast<std::size_t>(n - 1);
    const auto pattern = series_pattern(n);
    const cplx mn = m_n(f, pattern, 0.0, x1);
    cplx oracle(kNaN, kNaN);
    double rel = kNaN;
    if (b.oracle && n <= b.oracle_max_order) {
      oracle = m_n_nested(f, pattern, 0.0, x1);
      rel = std::abs(mn - oracle) / std::max(std::abs(oracle), 1e-300);
    }
    w.row({std::to_string(n), format_double(fb.b1_norm), format_double(fb.m_star[i]), format_double(fb.r[i]),
           format_double(fb.r_root[i]), format_double(mn.real()), format_double(mn.imag()),
           format_double(oracle.real()), format_double(oracle.imag()), format_double(rel)});
  }
  return kSuccess;
}

}  // namespace

int run_command(const RunConfig& rc, std::ostream& out) {
  switch (rc.command) {
    case Command::decompose: return cmd_decompose(rc, out);
    case Command::jost: return cmd_jost(rc, out);
    case Command::sweep: return cmd_sweep(rc, out);
    case Command::martingale: return cmd_martingale(rc, out);
    case Command::series_check: return cmd_series_check(rc, out);
  }
  return kConfigError;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Modified Jost solutions of half-line Schrodinger operators with distributional potentials"};
  app.require_subcommand(1);
  std::string config_path;
  std::string output_path;
  std::string log_level;
  int threads = 0;
  auto add_flags = [&](CLI::App& a) {
    a.add_option("--config", config_path, "JSON configuration file");
    a.add_option("--output", output_path, "CSV output path (default stdout)");
    a.add_option("--threads", threads, "Sweep worker threads")->check(CLI::PositiveNumber);
    a.add_option("--log-level", log_level, "Log level")->check(CLI::IsMember({"error", "warn", "info", "debug"}));
  };
  add_flags(app);
  const std::pair<const char*, const char*> subcommands[] = {
      {"decompose", "Per-cell norms of sigma and tau"},
      {"jost", "Jost solution and WKB residuals at one energy"},
      {"sweep", "Energy sweep of kernel tails, residuals and bad-set flags"},
      {"martingale", "Adapted martingale structure and B_1/B_2 seminorms"},
      {"series-check", "Factorial bound report and iterated-integral oracle check"}};
  for (const auto& [name, help] : subcommands) add_flags(*app.add_subcommand(name, help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }
  if (config_path.empty()) {
    std::cerr << "--config is required\n";
    return kConfigError;
  }

  auto logger = spdlog::stderr_logger_st("mjost");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);

  try {
    const Command command = parse_command(app.get_subcommands().front()->get_name());
    RunConfig rc = load_config(config_path, command);
    if (!log_level.empty()) rc.log_level = log_level;
    if (rc.log_level) {
      const auto lvl = spdlog::level::from_str(*rc.log_level);
      if (lvl == spdlog::level::off && *rc.log_level != "off")
        throw ConfigError("log_level: expected error, warn, info or debug");
      spdlog::set_level(lvl);
    }
    if (!output_path.empty()) rc.output_path = output_path;
    if (threads > 0) rc.sweep.threads = threads;

    std::ostringstream buf;
    int code = kSuccess;
    try {
      code = run_command(rc, buf);
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
    if (rc.output_path) {
      std::ofstream f(*rc.output_path, std::ios::binary);
      if (!f) throw ConfigError("output_path: cannot write '" + *rc.output_path + "'");
      f << buf.str();
    } else {
      std::cout << buf.str() << std::flush;
    }
    return code;
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kConfigError;
  } catch (const ParameterError& e) {
    spdlog::error("{}", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    spdlog::error("numeric failure: {}", e.what());
    return kNumericFailure;
  }
}

}  // namespace mjost::cli
