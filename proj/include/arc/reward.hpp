#pragma once

#include <vector>

#include "arc/belief.hpp"

namespace arc {

/// Predictive expected reward f_i(m,d) = E_{m,d}[r_i(Y^(i))] and its
/// derivatives for every arm. All arms here are scalar projections
/// w = a_i^T theta + noise, so the derivative tensors are rank one:
///   d f_i/dm     = g_i a_i
///   d^2 f_i/dm^2 = h_i a_i a_i^T
///   d f_i/dd     = (h_i / 2) a_i a_i^T
/// with g_i = E[r'(w)], h_i = E[r''(w)].
struct RewardEval {
  Vector f;        // length K
  Matrix df_dm;    // K x p, row i = g_i a_i^T
  Vector g;        // E[r'] per arm
  Vector h;        // E[r''] per arm
  Matrix loading;  // p x K, column i = a_i (reward-component loading)
  Vector proj_var; // a_i^T d a_i + noise variance of the reward component

  int arms() const { return static_cast<int>(f.size()); }

  Matrix d2f_dm2(int i) const {
    return h[i] * (loading.col(i) * loading.col(i).transpose());
  }
  Matrix df_dd(int i) const {
    return 0.5 * h[i] * (loading.col(i) * loading.col(i).transpose());
  }
};

/// Evaluate f and derivatives under a Gaussian belief. Identity/affine
/// rewards are closed form; general smooth rewards use fixed-node
/// Gauss-Hermite quadrature.
RewardEval predictive_reward(const GaussianBelief& belief,
                             const std::vector<GaussianArmModel>& arms,
                             int quadrature_nodes = 32);

/// Family counterparts for identity/affine rewards: the reward of arm i is
/// its own coordinate's count, E = n_i * theta_i, so f is affine in m and
/// independent of d. `reward_scale` holds n_i (trials/exposure of the
/// reward coordinate).
RewardEval family_reward_eval(const Vector& m, const Vector& reward_scale);

}  // namespace arc
