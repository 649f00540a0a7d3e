#pragma once

#include <utility>
#include <variant>
#include <vector>

#include "arc/belief.hpp"
#include "arc/index.hpp"
#include "arc/reward.hpp"
#include "arc/rng.hpp"

namespace arc {

// Policy variants sharing the belief/arm abstractions and the RNG contract
// (identical seeds give identical decision sequences).
struct EpsilonGreedy {
  double epsilon = 0.1;
};
struct Boltzmann {
  double rho = 1.0;
  double kappa = 1.0;
  double lambda_floor = 1e-8;
};
struct Thompson {};
struct BayesUcb {
  double c = 0.0;          // quantile exponent; c = 0 performs best in practice
  int total_horizon = 0;   // 0 = take the experiment horizon
  int mc_samples = 1000;   // posterior-sampling quantile fallback
};
struct KnowledgeGradient {
  double beta = 0.99;
  int mc_samples = 100;
};
struct Ids {
  int mc_samples = 100;
};
struct Greedy {};
struct ArcPolicy {
  ArcConfig config;
  bool finite_horizon = false;
};
struct ArcIndexPolicy {
  ArcConfig config;
  bool finite_horizon = false;
};
struct OracleBestArm {};  // plays argmax E[r | theta]; test/debug only

using PolicyKind =
    std::variant<EpsilonGreedy, Boltzmann, Thompson, BayesUcb, KnowledgeGradient,
                 Ids, Greedy, ArcPolicy, ArcIndexPolicy, OracleBestArm>;

/// argmax f with probability 1 - epsilon, uniform arm otherwise.
int epsilon_greedy_step(const Vector& f, double epsilon, RngStream& rng);

/// Sample from softmax(f / lambda) with lambda = max(rho * d_norm^kappa, floor).
int boltzmann_step(const Vector& f, double rho, double kappa, double d_norm,
                   RngStream& rng, double lambda_floor = 1e-8);

/// Draw theta-hat from the posterior, play argmax_i E_{theta-hat}[r_i].
int thompson_step(const GaussianBelief& belief,
                  const std::vector<GaussianArmModel>& arms, RngStream& rng,
                  int quadrature_nodes = 32);

/// Bayes-UCB: argmax of the (1 - t^{-1} (log T)^{-c})-quantile of E_theta[r_i]
/// under the posterior. Closed form for identity/affine rewards; posterior
/// sampling fallback (consumes rng) otherwise.
int bayes_ucb_step(const GaussianBelief& belief,
                   const std::vector<GaussianArmModel>& arms, int t,
                   int total_horizon, double c, RngStream* rng = nullptr,
                   int mc_samples = 1000);

/// Knowledge gradient with Monte-Carlo one-step lookahead (common random
/// numbers across arms).
int kg_step(const GaussianBelief& belief,
            const std::vector<GaussianArmModel>& arms, double beta,
            int mc_samples, RngStream& rng);

/// Information-directed sampling with the deterministic Gaussian entropy
/// gain; the simplex optimum is found over two-arm supports.
std::pair<Vector, int> ids_step(const GaussianBelief& belief,
                                const std::vector<GaussianArmModel>& arms,
                                int mc_samples, RngStream& rng);

/// Expected reward of every arm under a fixed parameter value, E_theta[r_i].
Vector conditional_mean_rewards(const Vector& theta,
                                const std::vector<GaussianArmModel>& arms,
                                int quadrature_nodes = 32);

}  // namespace arc
