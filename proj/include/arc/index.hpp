#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "arc/belief.hpp"
#include "arc/reward.hpp"
#include "arc/smoothmax.hpp"

namespace arc {

/// Hyper-parameters of the ARC policy. The temperature schedule is
/// lambda(m,d) = max(rho * ||d||^kappa, lambda_floor).
struct ArcConfig {
  double beta = 0.99;        // discount, in (0,1)
  double rho = 1.0;          // schedule scale, > 0
  double kappa = 1.0;        // schedule exponent, in (0,2]
  double lambda_floor = 1e-8;
  SmoothMaxKind smooth_max = SmoothMaxKind::Shannon;
  std::optional<int> horizon;  // steps to go; unset = infinite horizon
  double sigma_cap = 1e3;      // volatility truncation (Poisson family)
  int quadrature_nodes = 32;

  void validate() const;
  double lambda_at(double d_norm) const;
  /// beta (1-beta)^{-1}, or the partial geometric sum when horizon t is set
  /// (empty for t = 1: the terminal decision is myopic).
  double premium_weight() const;
};

/// Per-arm exploration index alpha = f + weight * L together with the
/// premium and, when the generic tensor path ran, the assembled tensors.
/// Closed-form dispatches leave B/M/Sigma empty.
struct ArcIndex {
  Vector alpha;
  Vector L;
  Vector f;
  Matrix B;      // sum_j nu_j df_dd_j           (p x p, shaped like d)
  Vector M;      // sum_j nu_j df_dm_j           (p)
  Matrix Sigma;  // Eq. second-order curvature   (p x p)
  double lambda_used = 0.0;
};

struct LearningPremium {
  Vector L;
  Matrix B;
  Vector M;
  Matrix Sigma;
};

/// Generic premium: B = sum_j nu_j df_dd_j, M = sum_j nu_j df_dm_j,
/// Sigma = sum_j nu_j d2f_dm2_j + lambda^{-1} df_dm^T eta df_dm,
/// L_i = <B; b_i> + <M; mu_i> + 1/2 <Sigma; sigma_i sigma_i^T>.
LearningPremium learning_premium(const RewardEval& reward,
                                 const std::vector<DynamicsCoefficients>& dyn,
                                 SmoothMaxKind kind, double lambda);

/// Closed form for the bandit with an informative arm (every arm observes
/// every coordinate through the identity loading with precision s_ij, d
/// diagonal):
/// L_i = (2 lambda)^{-1} sum_j nu_j(f)(1-nu_j(f)) d_jj^2 s_ij/(1+d_jj s_ij) g_j^2.
Vector learning_premium_info_arm(const Vector& f, const Vector& d_diag,
                                 const Matrix& s, const Vector& g,
                                 SmoothMaxKind kind, double lambda);

/// Closed form for the one-dimensional linear bandit (q = 1 per arm,
/// Shannon smooth max): a nu-weighted variance of c_i^T d c_j terms.
Vector learning_premium_linear(const GaussianBelief& belief,
                               const Matrix& loadings, const Vector& precisions,
                               const Vector& f, const Vector& g,
                               SmoothMaxKind kind, double lambda);

/// Assemble the index for a Gaussian bandit: schedule the temperature,
/// evaluate f, dispatch the premium (info-arm / linear closed form when the
/// structure matches, generic tensors otherwise), form alpha.
ArcIndex arc_index(const GaussianBelief& belief,
                   const std::vector<GaussianArmModel>& arms,
                   const ArcConfig& config);

enum class FamilyKind { Binomial, Poisson };

/// Index for the independent Beta/Gamma families. `observe` row i holds the
/// per-coordinate trial counts (exposures) revealed by playing arm i; the
/// reward of arm i is its own coordinate's count. Poisson volatility is
/// truncated at config.sigma_cap inside this computation only.
ArcIndex arc_index_family(const Vector& m, const Vector& d,
                          const Matrix& observe, FamilyKind family,
                          const ArcConfig& config);

/// Randomised decision of Algorithm 1: U = nu^lambda(alpha) and the
/// inverse-CDF pick A = min{ i : sum_{k<=i} U_k >= zeta }.
std::pair<Vector, int> arc_step(const ArcIndex& index, double rng_draw);

/// Index (argmax) variant; lowest index wins ties.
int arc_index_step(const ArcIndex& index);

/// Lowest-index argmax helper shared by the deterministic policies.
int argmax_lowest(const Vector& v);

}  // namespace arc
