#pragma once

#include <array>
#include <ostream>
#include <string>
#include <vector>

#include "mjost/jost.hpp"
#include "mjost/martingale.hpp"
#include "mjost/potential.hpp"

namespace mjost {

struct SweepConfig {
  double E_min = 0.5;
  double E_max = 4.0;
  int n_energies = 256;  // log-uniform on [E_min, E_max]
  std::vector<double> M_list{25.0, 50.0, 100.0, 150.0};
  double c_threshold = 0.5;
  int s = 2;  // which tail (b1 or b2) decides bad_flag
  double X_max = 200.0;
  PotentialFamily family = ClassicalL1{};
  double gamma = 0.0;  // structure adapted to (1+x)^gamma (|Q| + |sigma|)
  double p = 2.0;
  int M_max = 12;
  std::vector<double> checkpoints{50.0, 100.0, 200.0};
  JostOptions jost{};
  int threads = 1;

  void validate() const;
};

struct SweepRow {
  double E = 0.0;
  double k = 0.0;
  std::vector<double> b1_tail;  // per M_list entry
  std::vector<double> b2_tail;
  std::vector<double> residual;  // q-phase residual per checkpoint
  double wronskian_error = 0.0;
  bool bad_flag = false;
  std::string fail_reason;  // empty on success
};

std::vector<double> energy_grid(const SweepConfig& cfg);

/// The weight (1+x)^gamma (|tau - sigma^2| + |sigma|) the shared structure is adapted to.
IntervalFunction structure_weight(const Decomposition& d, double gamma);

/// Structure adapted to structure_weight(d, gamma) in l^p(L^1); uniform on
/// [0, x_max) when the weight vanishes identically.
MartingaleStructure shared_structure(const Decomposition& d, double gamma, double p, int m_max);

struct SweepOutput {
  std::vector<SweepRow> rows;  // ordered by E
  AdaptednessReport adaptedness;
};

/// One structure, shared by all energies; per energy: B_1/B_2 tails of F
/// beyond each M, a direct Jost run and its residuals. Failures are recorded
/// in the row and the sweep continues.
SweepOutput run_sweep(const SweepConfig& cfg);

/// bad_flag recomputed from stored tails: min over M of the selected tail >= c.
bool bad_flag_from_tails(const SweepRow& row, double c, int s);

struct BadSetStats {
  double c = 0.0;
  std::size_t count = 0;
  double proportion = 0.0;  // Lebesgue share of [E_min, E_max] covered by flagged grid cells
  std::array<double, 3> box_width{};
  std::array<std::size_t, 3> box_count{};  // occupied dyadic E-bins (exploratory dimension proxy)
};

std::vector<BadSetStats> bad_set_summary(const std::vector<SweepRow>& rows, const std::vector<double>& c_grid,
                                         int s = 2);

std::string checkpoint_label(double x);
void write_sweep_csv(std::ostream& out, const SweepConfig& cfg, const std::vector<SweepRow>& rows);

}  // namespace mjost
