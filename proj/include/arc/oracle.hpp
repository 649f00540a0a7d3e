#pragma once

#include <string>
#include <utility>
#include <vector>

#include "arc/belief.hpp"
#include "arc/rng.hpp"

namespace arc {

/// Grid layout for the 1 1/2-armed bandit value iteration. The d axis is the
/// exact deterministic orbit d -> d/(1+d) descending from d_hi, extended
/// below d_lo to d_floor so the d-transition never interpolates, plus d = 0;
/// the m axis is [m_lo, m_hi] padded by pad_sds * sqrt(d_hi) (the total
/// martingale standard deviation of the mean path).
struct ValueGridSpec {
  double m_lo = 0.0;
  double m_hi = 2.0;
  double m_step = 0.02;
  double d_lo = 0.01;
  double d_hi = 0.05;
  double d_floor = 1e-3;
  double pad_sds = 6.0;
};

struct ValueGrid {
  Eigen::VectorXd m_axis;  // ascending, padded
  Eigen::VectorXd d_axis;  // ascending, d_axis[0] = 0, orbit above
  Matrix values;           // d x m
  Matrix probs;            // probability of the risky arm
  double lambda = 0.1;
  double beta = 0.99;
  int mc_samples = 0;
  int iterations = 0;
  double sup_delta = 0.0;
  long clamped_queries = 0;  // m interpolation requests outside the padding
  ValueGridSpec spec;
};

/// Monte-Carlo value iteration for the regularised 1 1/2 bandit. One fixed
/// antithetic moment-matched draw set is shared by every node and sweep;
/// sweeps run Gauss-Seidel from small d upward with the stay-arm
/// self-consistency solved exactly per node, and iterate until the sup-norm
/// change drops below tol.
ValueGrid value_iterate(const ValueGridSpec& spec, double lambda, double beta,
                        int mc_samples, RngStream& rng, double tol = 1e-6,
                        int max_iters = 10000);

/// Closed-form ARC value and risky-arm probability:
///   alpha_1 = m + (2 lambda)^{-1} beta (1-beta)^{-1} nu_1 (1-nu_1) d^2/(1+d),
///   V = (1-beta)^{-1} smax((alpha_1, 1), lambda),  p = logistic((alpha_1-1)/lambda).
std::pair<double, double> arc_closed_form(double m, double d, double lambda,
                                          double beta);

struct CompareRow {
  double m, d, v_exact, v_arc, rel_err, p_exact, p_arc, p_diff;
};

struct CompareReport {
  std::vector<CompareRow> rows;
  double max_rel_err = 0.0;
  double mean_rel_err = 0.0;
  double max_p_diff = 0.0;
};

/// Per-node comparison over the report window (m in [m_lo, m_hi], d orbit
/// within [d_lo, d_hi]).
CompareReport compare_grid(const ValueGrid& grid);

/// CSV with header m,d,v_exact,v_arc,rel_err,p_exact,p_arc,p_diff.
void write_compare_csv(const CompareReport& report, const std::string& path);
/// JSON summary {max_rel_err, mean_rel_err, max_p_diff}.
void write_compare_summary(const CompareReport& report, const std::string& path);

}  // namespace arc
