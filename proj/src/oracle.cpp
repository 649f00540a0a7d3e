#include "arc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "arc/smoothmax.hpp"

namespace arc {

namespace {

double smax2(double a1, double a2, double lambda) {
  const double mx = std::max(a1, a2);
  return mx + lambda * std::log(std::exp((a1 - mx) / lambda) +
                                std::exp((a2 - mx) / lambda));
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Linear interpolation along one m row; out-of-range queries clamp.
double interp_row(const Eigen::VectorXd& m_axis, const Vector& row, double mq,
                  long& clamped) {
  if (row.size() == 1) return row[0];
  const double lo = m_axis[0];
  const double hi = m_axis[m_axis.size() - 1];
  if (mq <= lo) {
    if (mq < lo) ++clamped;
    return row[0];
  }
  if (mq >= hi) {
    if (mq > hi) ++clamped;
    return row[row.size() - 1];
  }
  const double step = m_axis[1] - m_axis[0];
  const double pos = (mq - lo) / step;
  const auto idx = static_cast<Eigen::Index>(pos);
  const double frac = pos - static_cast<double>(idx);
  return row[idx] + frac * (row[idx + 1] - row[idx]);
}

// Solve v = smax((a1, 1 + beta v), lambda) for the node value; F is strictly
// decreasing and concave, so safeguarded Newton converges from above.
double solve_node(double a1, double lambda, double beta, double v0) {
  double v = std::max({v0, a1, 1.0 / (1.0 - beta)});
  for (int it = 0; it < 200; ++it) {
    const double stay = 1.0 + beta * v;
    const double s = smax2(a1, stay, lambda);
    const double f = s - v;
    if (std::abs(f) < 1e-13 * std::max(1.0, std::abs(v))) return v;
    const double nu2 = logistic((stay - a1) / lambda);
    const double fp = beta * nu2 - 1.0;  // in (-1, beta-1]
    const double step = f / fp;
    const double vn = v - step;
    if (!std::isfinite(vn)) break;
    if (std::abs(vn - v) < 1e-13 * std::max(1.0, std::abs(v))) return vn;
    v = vn;
  }
  if (!std::isfinite(v)) {
    throw NumericError("oracle: node fixed point failed to converge");
  }
  return v;
}

}  // namespace

ValueGrid value_iterate(const ValueGridSpec& spec, double lambda, double beta,
                        int mc_samples, RngStream& rng, double tol,
                        int max_iters) {
  if (!(lambda > 0.0)) throw std::invalid_argument("value_iterate: lambda > 0");
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("value_iterate: beta in (0,1)");
  }
  if (mc_samples < 1 || !(tol > 0.0) || max_iters < 1) {
    throw std::invalid_argument("value_iterate: bad iteration parameters");
  }

  ValueGrid grid;
  grid.lambda = lambda;
  grid.beta = beta;
  grid.mc_samples = mc_samples;
  grid.spec = spec;

  // m axis: report window padded by pad_sds * sqrt(d_hi), rounded to steps.
  const double pad =
      std::ceil(spec.pad_sds * std::sqrt(std::max(spec.d_hi, 0.0)) / spec.m_step) *
      spec.m_step;
  const auto m_points = static_cast<Eigen::Index>(
      std::llround((spec.m_hi - spec.m_lo + 2.0 * pad) / spec.m_step)) + 1;
  grid.m_axis.resize(m_points);
  for (Eigen::Index j = 0; j < m_points; ++j) {
    grid.m_axis[j] = spec.m_lo - pad + spec.m_step * static_cast<double>(j);
  }

  // d axis: exact orbit down from d_hi (successor of row k is row k-1 for
  // k >= 2 by construction), plus the absorbing row d = 0.
  std::vector<double> orbit;
  for (double d = spec.d_hi; d >= spec.d_floor && d > 0.0; d = d / (1.0 + d)) {
    orbit.push_back(d);
  }
  grid.d_axis.resize(static_cast<Eigen::Index>(orbit.size()) + 1);
  grid.d_axis[0] = 0.0;
  for (std::size_t k = 0; k < orbit.size(); ++k) {
    grid.d_axis[static_cast<Eigen::Index>(orbit.size() - k)] = orbit[k];
  }
  const Eigen::Index rows = grid.d_axis.size();

  // One antithetic moment-matched draw set shared by all nodes and sweeps.
  Vector draws(mc_samples);
  const int half = mc_samples / 2;
  for (int i = 0; i < half; ++i) {
    const double z = rng.normal();
    draws[i] = z;
    draws[half + i] = -z;
  }
  if (mc_samples % 2 == 1) draws[mc_samples - 1] = 0.0;
  const double sd = std::sqrt(draws.squaredNorm() / mc_samples);
  if (sd > 0.0) draws /= sd;

  grid.values = Matrix::Zero(rows, m_points);
  grid.probs = Matrix::Zero(rows, m_points);

  // Absorbing row: once d = 0 neither arm moves the state, so the value is
  // the static regularised fixed point.
  for (Eigen::Index j = 0; j < m_points; ++j) {
    grid.values(0, j) = smax2(grid.m_axis[j], 1.0, lambda) / (1.0 - beta);
  }

  Vector cont(m_points);
  Vector below(m_points);
  const auto risky_continuation = [&](Eigen::Index k) {
    // E[V(m + sh z, d_next)] with d_next resolved one row down; the step off
    // the smallest orbit row lands between it and d = 0 and clamps to d = 0.
    const double d = grid.d_axis[k];
    const double sh = d / std::sqrt(1.0 + d);
    below = grid.values.row(k >= 2 ? k - 1 : 0);
    for (Eigen::Index j = 0; j < m_points; ++j) {
      double acc = 0.0;
      for (int n = 0; n < mc_samples; ++n) {
        acc += interp_row(grid.m_axis, below, grid.m_axis[j] + sh * draws[n],
                          grid.clamped_queries);
      }
      cont[j] = acc / static_cast<double>(mc_samples);
    }
  };

  double sup_delta = std::numeric_limits<double>::infinity();
  int iters = 0;
  while (iters < max_iters) {
    sup_delta = 0.0;
    for (Eigen::Index k = 1; k < rows; ++k) {
      risky_continuation(k);
      for (Eigen::Index j = 0; j < m_points; ++j) {
        const double a1 = grid.m_axis[j] + beta * cont[j];
        const double v = solve_node(a1, lambda, beta, grid.values(k, j));
        sup_delta = std::max(sup_delta, std::abs(v - grid.values(k, j)));
        grid.values(k, j) = v;
      }
    }
    ++iters;
    if (sup_delta < tol) break;
  }
  grid.iterations = iters;
  grid.sup_delta = sup_delta;
  if (sup_delta >= tol) {
    char msg[128];
    std::snprintf(msg, sizeof(msg),
                  "value_iterate: no convergence after %d sweeps (sup-delta %.3e)",
                  iters, sup_delta);
    throw NumericError(msg);
  }

  // Risky-arm probability from the converged action values.
  for (Eigen::Index j = 0; j < m_points; ++j) {
    grid.probs(0, j) = logistic((grid.m_axis[j] - 1.0) / lambda);
  }
  for (Eigen::Index k = 1; k < rows; ++k) {
    risky_continuation(k);
    for (Eigen::Index j = 0; j < m_points; ++j) {
      const double a1 = grid.m_axis[j] + beta * cont[j];
      const double a2 = 1.0 + beta * grid.values(k, j);
      grid.probs(k, j) = logistic((a1 - a2) / lambda);
    }
  }
  return grid;
}

std::pair<double, double> arc_closed_form(double m, double d, double lambda,
                                          double beta) {
  if (d < 0.0) throw std::invalid_argument("arc_closed_form: d >= 0");
  const double nu1 = logistic((m - 1.0) / lambda);
  const double alpha1 = m + 0.5 / lambda * beta / (1.0 - beta) * nu1 *
                            (1.0 - nu1) * d * d / (1.0 + d);
  const double value = smax2(alpha1, 1.0, lambda) / (1.0 - beta);
  const double prob = logistic((alpha1 - 1.0) / lambda);
  return {value, prob};
}

CompareReport compare_grid(const ValueGrid& grid) {
  CompareReport rep;
  double rel_sum = 0.0;
  const double eps = 1e-9;
  for (Eigen::Index k = 0; k < grid.d_axis.size(); ++k) {
    const double d = grid.d_axis[k];
    if (d < grid.spec.d_lo - 1e-12 || d > grid.spec.d_hi + 1e-12) continue;
    for (Eigen::Index j = 0; j < grid.m_axis.size(); ++j) {
      const double m = grid.m_axis[j];
      if (m < grid.spec.m_lo - 1e-12 || m > grid.spec.m_hi + 1e-12) continue;
      const auto [v_arc, p_arc] = arc_closed_form(m, d, grid.lambda, grid.beta);
      CompareRow row;
      row.m = m;
      row.d = d;
      row.v_exact = grid.values(k, j);
      row.v_arc = v_arc;
      row.rel_err = std::abs(v_arc - row.v_exact) /
                    std::max(std::abs(row.v_exact), eps);
      row.p_exact = grid.probs(k, j);
      row.p_arc = p_arc;
      row.p_diff = p_arc - row.p_exact;
      rep.rows.push_back(row);
      rep.max_rel_err = std::max(rep.max_rel_err, row.rel_err);
      rep.max_p_diff = std::max(rep.max_p_diff, std::abs(row.p_diff));
      rel_sum += row.rel_err;
    }
  }
  if (!rep.rows.empty()) rep.mean_rel_err = rel_sum / static_cast<double>(rep.rows.size());
  return rep;
}

void write_compare_csv(const CompareReport& report, const std::string& path) {
  std::filesystem::create_directories(
      std::filesystem::path(path).parent_path().empty()
          ? "."
          : std::filesystem::path(path).parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "m,d,v_exact,v_arc,rel_err,p_exact,p_arc,p_diff\n";
  char buf[256];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.m, r.d,
                  r.v_exact, r.v_arc, r.rel_err, r.p_exact, r.p_arc, r.p_diff);
    out << buf;
  }
}

void write_compare_summary(const CompareReport& report, const std::string& path) {
  nlohmann::json j;
  j["max_rel_err"] = report.max_rel_err;
  j["mean_rel_err"] = report.mean_rel_err;
  j["max_p_diff"] = report.max_p_diff;
  j["nodes"] = report.rows.size();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace arc
