#include "mjost/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "mjost/csv.hpp"

namespace mjost {

void SweepConfig::validate() const {
  if (!(E_min > 0.0) || !(E_max > E_min)) throw ParameterError("sweep: need 0 < E_min < E_max");
  if (n_energies < 1) throw ParameterError("sweep: n_energies must be at least 1");
  if (!(X_max > 0.0)) throw ParameterError("sweep: X_max must be positive");
  for (std::size_t i = 0; i < M_list.size(); ++i) {
    if (!(M_list[i] >= 0.0) || !(M_list[i] < X_max)) throw ParameterError("sweep: M_list values must lie in [0, X_max)");
    if (i > 0 && !(M_list[i] > M_list[i - 1])) throw ParameterError("sweep: M_list must be increasing");
  }
  for (double c : checkpoints)
    if (!(c > 0.0) || c > X_max) throw ParameterError("sweep: checkpoints must lie in (0, X_max]");
  if (s != 1 && s != 2) throw ParameterError("sweep: s must be 1 or 2");
  if (!(gamma >= 0.0)) throw ParameterError("sweep: gamma must be nonnegative");
  if (!(p >= 1.0)) throw ParameterError("sweep: p must be at least 1");
  if (threads < 1) throw ParameterError("sweep: threads must be at least 1");
}

std::vector<double> energy_grid(const SweepConfig& cfg) {
  std::vector<double> E(static_cast<std::size_t>(cfg.n_energies));
  if (cfg.n_energies == 1) {
    E[0] = cfg.E_min;
    return E;
  }
  const double la = std::log(cfg.E_min), lb = std::log(cfg.E_max);
  for (int i = 0; i < cfg.n_energies; ++i)
    E[static_cast<std::size_t>(i)] = std::exp(la + (lb - la) * i / (cfg.n_energies - 1));
  E.front() = cfg.E_min;
  E.back() = cfg.E_max;
  return E;
}

IntervalFunction structure_weight(const Decomposition& d, double gamma) {
  const IntervalFunction q = d.tau - d.sigma * d.sigma;
  IntervalFunction w = combine(q, d.sigma, [](cplx a, cplx b) { return cplx(std::abs(a) + std::abs(b), 0.0); },
                               ValueKind::real);
  if (gamma > 0.0) w = weighted(w, [gamma](double x) { return std::pow(1.0 + x, gamma); });
  return w;
}

MartingaleStructure shared_structure(const Decomposition& d, double gamma, double p, int m_max) {
  const IntervalFunction weight = structure_weight(d, gamma);
  if (!(LpL1Mass(weight, p).total() > 0.0)) return MartingaleStructure::uniform(weight.x_max(), m_max);
  return MartingaleStructure::adapted(weight, p, m_max, "(1+x)^gamma (|Q| + |sigma|)");
}

bool bad_flag_from_tails(const SweepRow& row, double c, int s) {
  const auto& tails = s == 1 ? row.b1_tail : row.b2_tail;
  if (tails.empty()) return false;
  double mn = std::numeric_limits<double>::infinity();
  for (double t : tails) {
    if (std::isnan(t)) return false;
    mn = std::min(mn, t);
  }
  return mn >= c;
}

SweepOutput run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const Decomposition d = build_decomposition(cfg.family, cfg.X_max);
  const auto profile = QProfile::build(d);
  const MartingaleStructure ms = shared_structure(d, cfg.gamma, cfg.p, cfg.M_max);

  SweepOutput out;
  out.adaptedness = ms.adaptedness().value_or(AdaptednessReport{});
  const auto energies = energy_grid(cfg);
  out.rows.resize(energies.size());

  JostOptions jopts = cfg.jost;
  jopts.sample_at.insert(jopts.sample_at.end(), cfg.checkpoints.begin(), cfg.checkpoints.end());

  auto work = [&](std::size_t i) {
    SweepRow& row = out.rows[i];
    row.E = energies[i];
    row.k = std::sqrt(row.E);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    try {
      const WkbKernel kernel(profile, row.E);
      auto integrate = [&](double a, double b) { return kernel.integrate_kernel(a, b); };
      const auto finest = finest_cell_integrals(ms, integrate);
      row.b1_tail = bs_tails(ms, finest, 1.0, cfg.M_list, integrate);
      row.b2_tail = bs_tails(ms, finest, 2.0, cfg.M_list, integrate);
      const JostResult r = jost_direct(kernel, cfg.X_max, jopts);
      for (double c : cfg.checkpoints) row.residual.push_back(residual_at(r, c));
      row.wronskian_error = r.wronskian_error;
      row.bad_flag = bad_flag_from_tails(row, cfg.c_threshold, cfg.s);
    } catch (const std::exception& e) {
      row.b1_tail.assign(cfg.M_list.size(), nan);
      row.b2_tail.assign(cfg.M_list.size(), nan);
      row.residual.assign(cfg.checkpoints.size(), nan);
      row.wronskian_error = nan;
      row.bad_flag = false;
      row.fail_reason = e.what();
    }
  };

  const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), energies.size());
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < energies.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < energies.size(); i = next++) work(i);
      });
    for (auto& th : pool) th.join();
  }
  return out;
}

std::vector<BadSetStats> bad_set_summary(const std::vector<SweepRow>& rows, const std::vector<double>& c_grid, int s) {
  std::vector<BadSetStats> out;
  if (rows.empty()) return out;
  const double lo = rows.front().E, hi = rows.back().E;
  const double span = hi - lo;
  // Grid cells bounded by midpoints between neighbouring energies.
  std::vector<double> width(rows.size(), 1.0);
  if (rows.size() > 1) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double left = i == 0 ? lo : 0.5 * (rows[i - 1].E + rows[i].E);
      const double right = i + 1 == rows.size() ? hi : 0.5 * (rows[i].E + rows[i + 1].E);
      width[i] = right - left;
    }
  }
  const double total = rows.size() > 1 ? span : 1.0;
  for (double c : c_grid) {
    BadSetStats st;
    st.c = c;
    double covered = 0.0;
    for (int scale = 0; scale < 3; ++scale) {
      const std::size_t bins = std::size_t{1} << (4 + scale);
      st.box_width[static_cast<std::size_t>(scale)] = span > 0.0 ? span / static_cast<double>(bins) : 0.0;
      std::vector<char> hit(bins, 0);
      for (const auto& r : rows) {
        if (!bad_flag_from_tails(r, c, s)) continue;
        std::size_t b = span > 0.0 ? static_cast<std::size_t>((r.E - lo) / span * static_cast<double>(bins)) : 0;
        hit[std::min(b, bins - 1)] = 1;
      }
      st.box_count[static_cast<std::size_t>(scale)] = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
    }
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (bad_flag_from_tails(rows[i], c, s)) {
        ++st.count;
        covered += width[i];
      }
    st.proportion = covered / total;
    out.push_back(st);
  }
  return out;
}

std::string checkpoint_label(double x) {
  if (x == std::floor(x) && std::abs(x) < 1e15) return std::to_string(static_cast<long long>(x));
  std::string s = format_double(x);
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

void write_sweep_csv(std::ostream& out, const SweepConfig& cfg, const std::vector<SweepRow>& rows) {
  CsvWriter w(out);
  std::vector<std::string> header{"E", "k"};
  for (double M : cfg.M_list) header.push_back("b1_tail_M" + checkpoint_label(M));
  for (double M : cfg.M_list) header.push_back("b2_tail_M" + checkpoint_label(M));
  for (double c : cfg.checkpoints) header.push_back("resid_x" + checkpoint_label(c));
  header.insert(header.end(), {"wronskian_err", "bad_flag", "fail_reason"});
  w.row(header);
  for (const auto& r : rows) {
    std::vector<std::string> f{format_double(r.E), format_double(r.k)};
    for (double v : r.b1_tail) f.push_back(format_double(v));
    for (double v : r.b2_tail) f.push_back(format_double(v));
    for (double v : r.residual) f.push_back(format_double(v));
    f.push_back(format_double(r.wronskian_error));
    f.push_back(r.bad_flag ? "true" : "false");
    f.push_back(r.fail_reason);
    w.row(f);
  }
}

}  // namespace mjost
