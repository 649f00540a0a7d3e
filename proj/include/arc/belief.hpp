#pragma once

#include <Eigen/Dense>
#include <string>

#include <json.hpp>

#include "arc/reward_descriptor.hpp"

namespace arc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Thrown when a numerical operation degenerates (singular innovation
/// covariance, failed factorisation). Distinct from std::invalid_argument,
/// which flags caller errors.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Gaussian posterior N(m, d) over the p-dimensional unknown parameter.
struct GaussianBelief {
  Vector m;  // posterior mean
  Matrix d;  // posterior covariance, symmetric PSD

  int dim() const { return static_cast<int>(m.size()); }

  /// Operator norm of d (largest eigenvalue; d is PSD).
  double d_norm() const;
};

/// Observation channel of one arm: Y | theta ~ N(c^T theta, P^{-1}) with
/// P = diag(precision). A zero precision entry means that component of Y is
/// not observed. The reward is a scalar map of component `reward_component`.
struct GaussianArmModel {
  Matrix c;          // p x q loading
  Vector precision;  // length q, entries >= 0
  RewardDescriptor reward;
  int reward_component = 0;

  int obs_dim() const { return static_cast<int>(precision.size()); }

  /// Effective loading of the reward component (column of c).
  Vector reward_loading() const { return c.col(reward_component); }

  /// Observation noise variance of the reward component; +inf when the
  /// component is not observed (only legal for constant rewards).
  double reward_noise_var() const;

  void validate(int p) const;
};

/// Independent Beta posteriors Beta(m_j/d_j, (1-m_j)/d_j) per coordinate.
struct BetaBelief {
  Vector m;  // means in (0,1)
  Vector d;  // positive uncertainty scale, 1/(alpha+beta)

  int dim() const { return static_cast<int>(m.size()); }
  double d_norm() const { return d.maxCoeff(); }  // max-coordinate norm
};

/// Independent Gamma posteriors Gamma(m_j/d_j, 1/d_j) per coordinate.
struct GammaBelief {
  Vector m;  // means in (0,inf)
  Vector d;  // positive, 1/rate

  int dim() const { return static_cast<int>(m.size()); }
  double d_norm() const { return d.maxCoeff(); }
};

/// One-step posterior drift/volatility of an arm:
///   mu       = E[m' - m]          (zero for the conjugate families here)
///   b        = E[d' - d]          (deterministic for all three families)
///   sigma_sq = Var(m')            (one-step covariance of the mean update)
/// Gaussian family satisfies sigma_sq == -b exactly.
struct DynamicsCoefficients {
  Vector mu;
  Matrix b;
  Matrix sigma_sq;
};

// -- Gaussian family ---------------------------------------------------------

/// Conjugate update after observing y from `arm`. Components with zero
/// precision are dropped from the update. Uses the Woodbury form
/// d - d c (P^{-1} + c^T d c)^{-1} c^T d restricted to observed components,
/// then symmetrises and clamps negative eigenvalues at zero.
GaussianBelief gaussian_update(const GaussianBelief& belief,
                               const GaussianArmModel& arm, const Vector& y);

/// Drift and volatility of the posterior under one play of `arm`:
/// mu = 0, b = -d c (P^{-1}+c^T d c)^{-1} c^T d, sigma_sq = -b.
DynamicsCoefficients gaussian_dynamics(const GaussianBelief& belief,
                                       const GaussianArmModel& arm);

// -- Beta-Binomial / Gamma-Poisson families ----------------------------------

/// Coordinate-j update after observing y successes in n Binomial trials.
BetaBelief beta_binomial_update(const BetaBelief& belief, int n, int y, int j);

/// Coordinate-j update after observing a Poisson count y at exposure n.
GammaBelief gamma_poisson_update(const GammaBelief& belief, double n, int y,
                                 int j);

/// Family dynamics for an arm described by its per-coordinate trial counts
/// (Binomial) or exposures (Poisson); entry 0 = coordinate not observed.
DynamicsCoefficients beta_dynamics(const BetaBelief& belief,
                                   const Vector& trials);
DynamicsCoefficients gamma_dynamics(const GammaBelief& belief,
                                    const Vector& exposures);

// -- Serialisation ------------------------------------------------------------

nlohmann::json to_json(const GaussianBelief& b);
nlohmann::json to_json(const BetaBelief& b);
nlohmann::json to_json(const GammaBelief& b);
GaussianBelief gaussian_from_json(const nlohmann::json& j);
BetaBelief beta_from_json(const nlohmann::json& j);
GammaBelief gamma_from_json(const nlohmann::json& j);

}  // namespace arc
