#pragma once

#include <string>
#include <vector>

#include "arc/belief.hpp"
#include "arc/rng.hpp"

namespace arc {

enum class EnvVariant { Classical, InformativeArm, Linear, Bernoulli, Poisson };

std::string to_string(EnvVariant v);
EnvVariant env_variant_from_string(const std::string& s);

/// Ground-truth bandit environment: theta sampling, observation/reward
/// channel, and closed-form conditional means so regret needs no Monte Carlo.
struct EnvironmentSpec {
  EnvVariant variant = EnvVariant::Classical;
  int arms = 2;             // K
  double noise_var = 5.0;   // Gaussian observation variance
  double penalty = 1.0;     // informative arm's reward shortfall
  Matrix loadings;          // linear variant, p x K; empty = ring default
  Vector counts;            // Bernoulli trials / Poisson exposures; empty = 1

  // Belief prior (m0, d0), broadcast over coordinates.
  double prior_mean = 0.0;
  double prior_unc = 1e3;
  // Ground-truth prior. Gaussian variants: N(theta_mean, theta_unc * I).
  // Bernoulli/Poisson: conjugate family with the same (m,d) parameterisation.
  double theta_mean = 1.0;
  double theta_unc = 1.0;

  int param_dim() const { return arms; }
  bool gaussian_family() const {
    return variant == EnvVariant::Classical ||
           variant == EnvVariant::InformativeArm || variant == EnvVariant::Linear;
  }
  Matrix effective_loadings() const;  // linear ring default when empty
  Vector effective_counts() const;
  void validate() const;
};

/// One interaction: which components of `values` are meaningful is given by
/// the observed mask; `reward` is the collected scalar.
struct Observation {
  int arm = 0;
  Vector values;
  std::vector<bool> observed;
  double reward = 0.0;
};

Vector sample_theta(const EnvironmentSpec& spec, RngStream& rng);

Observation observe(const EnvironmentSpec& spec, const Vector& theta, int arm,
                    RngStream& rng);

/// Conditional mean reward of every arm given theta (closed form).
Vector conditional_means(const EnvironmentSpec& spec, const Vector& theta);

double instant_regret(const EnvironmentSpec& spec, const Vector& theta, int arm);

// Belief-side encodings of the environments.
GaussianBelief make_gaussian_prior(const EnvironmentSpec& spec);
std::vector<GaussianArmModel> make_gaussian_arms(const EnvironmentSpec& spec);

BetaBelief make_beta_prior(const EnvironmentSpec& spec);
GammaBelief make_gamma_prior(const EnvironmentSpec& spec);
/// K x K matrix whose row i holds the per-coordinate trials/exposures
/// revealed by playing arm i (diagonal for these environments).
Matrix make_family_observe(const EnvironmentSpec& spec);

}  // namespace arc
