#include "arc/envs.hpp"

#include <cmath>

namespace arc {

std::string to_string(EnvVariant v) {
  switch (v) {
    case EnvVariant::Classical: return "classical";
    case EnvVariant::InformativeArm: return "informative_arm";
    case EnvVariant::Linear: return "linear";
    case EnvVariant::Bernoulli: return "bernoulli";
    case EnvVariant::Poisson: return "poisson";
  }
  return "classical";
}

EnvVariant env_variant_from_string(const std::string& s) {
  if (s == "classical") return EnvVariant::Classical;
  if (s == "informative_arm") return EnvVariant::InformativeArm;
  if (s == "linear") return EnvVariant::Linear;
  if (s == "bernoulli") return EnvVariant::Bernoulli;
  if (s == "poisson") return EnvVariant::Poisson;
  throw std::invalid_argument("unknown environment variant: " + s);
}

Matrix EnvironmentSpec::effective_loadings() const {
  if (loadings.size() > 0) return loadings;
  // Ring structure b_i = e_i + e_{i+1}, last arm wraps to e_1 + e_K.
  Matrix b = Matrix::Zero(arms, arms);
  for (int i = 0; i < arms; ++i) {
    b(i, i) = 1.0;
    b((i + 1) % arms, i) = 1.0;
  }
  return b;
}

Vector EnvironmentSpec::effective_counts() const {
  if (counts.size() > 0) return counts;
  return Vector::Ones(arms);
}

void EnvironmentSpec::validate() const {
  if (arms < 2) throw std::invalid_argument("EnvironmentSpec: need K >= 2");
  if (gaussian_family() && !(noise_var > 0.0)) {
    throw std::invalid_argument("EnvironmentSpec: noise_var must be > 0");
  }
  if (variant == EnvVariant::Linear && loadings.size() > 0 &&
      (loadings.rows() != arms || loadings.cols() != arms)) {
    throw std::invalid_argument("EnvironmentSpec: loadings must be p x K");
  }
  if (counts.size() > 0 && (counts.size() != arms || (counts.array() <= 0.0).any())) {
    throw std::invalid_argument("EnvironmentSpec: counts must be K positive entries");
  }
  if (!gaussian_family()) {
    if (variant == EnvVariant::Bernoulli &&
        !(theta_mean > 0.0 && theta_mean < 1.0 && theta_unc > 0.0 &&
          theta_unc <= 1.0)) {
      throw std::invalid_argument(
          "EnvironmentSpec: Bernoulli theta prior needs mean in (0,1), unc > 0");
    }
    if (variant == EnvVariant::Poisson && !(theta_mean > 0.0 && theta_unc > 0.0)) {
      throw std::invalid_argument(
          "EnvironmentSpec: Poisson theta prior needs mean > 0, unc > 0");
    }
  }
}

Vector sample_theta(const EnvironmentSpec& spec, RngStream& rng) {
  spec.validate();
  const int p = spec.param_dim();
  Vector theta(p);
  switch (spec.variant) {
    case EnvVariant::Classical:
    case EnvVariant::InformativeArm:
    case EnvVariant::Linear: {
      const double sd = std::sqrt(std::max(spec.theta_unc, 0.0));
      for (int j = 0; j < p; ++j) theta[j] = spec.theta_mean + sd * rng.normal();
      break;
    }
    case EnvVariant::Bernoulli: {
      const double a = spec.theta_mean / spec.theta_unc;
      const double b = (1.0 - spec.theta_mean) / spec.theta_unc;
      for (int j = 0; j < p; ++j) theta[j] = rng.beta(a, b);
      break;
    }
    case EnvVariant::Poisson: {
      const double shape = spec.theta_mean / spec.theta_unc;
      for (int j = 0; j < p; ++j) theta[j] = rng.gamma(shape, spec.theta_unc);
      break;
    }
  }
  return theta;
}

Observation observe(const EnvironmentSpec& spec, const Vector& theta, int arm,
                    RngStream& rng) {
  if (arm < 0 || arm >= spec.arms) {
    throw std::invalid_argument("observe: arm out of range");
  }
  const int p = spec.param_dim();
  const double sd = std::sqrt(spec.noise_var);
  Observation obs;
  obs.arm = arm;
  switch (spec.variant) {
    case EnvVariant::Classical: {
      obs.values = Vector::Zero(p);
      obs.observed.assign(static_cast<std::size_t>(p), false);
      obs.values[arm] = theta[arm] + sd * rng.normal();
      obs.observed[static_cast<std::size_t>(arm)] = true;
      obs.reward = obs.values[arm];
      break;
    }
    case EnvVariant::InformativeArm: {
      obs.values = Vector::Zero(p);
      obs.observed.assign(static_cast<std::size_t>(p), false);
      if (arm == 0) {
        // Full observation vector plus an independent penalised reward draw.
        for (int j = 0; j < p; ++j) {
          obs.values[j] = theta[j] + sd * rng.normal();
          obs.observed[static_cast<std::size_t>(j)] = true;
        }
        obs.reward = (theta[0] - spec.penalty) + sd * rng.normal();
      } else {
        obs.values[arm] = theta[arm] + sd * rng.normal();
        obs.observed[static_cast<std::size_t>(arm)] = true;
        obs.reward = obs.values[arm];
      }
      break;
    }
    case EnvVariant::Linear: {
      const Matrix b = spec.effective_loadings();
      obs.values = Vector::Zero(1);
      obs.observed.assign(1, true);
      obs.values[0] = b.col(arm).dot(theta) + sd * rng.normal();
      obs.reward = obs.values[0];
      break;
    }
    case EnvVariant::Bernoulli: {
      const Vector n = spec.effective_counts();
      obs.values = Vector::Zero(p);
      obs.observed.assign(static_cast<std::size_t>(p), false);
      obs.values[arm] = rng.binomial(static_cast<int>(n[arm]), theta[arm]);
      obs.observed[static_cast<std::size_t>(arm)] = true;
      obs.reward = obs.values[arm];
      break;
    }
    case EnvVariant::Poisson: {
      const Vector n = spec.effective_counts();
      obs.values = Vector::Zero(p);
      obs.observed.assign(static_cast<std::size_t>(p), false);
      obs.values[arm] = rng.poisson(n[arm] * theta[arm]);
      obs.observed[static_cast<std::size_t>(arm)] = true;
      obs.reward = obs.values[arm];
      break;
    }
  }
  return obs;
}

Vector conditional_means(const EnvironmentSpec& spec, const Vector& theta) {
  Vector means(spec.arms);
  switch (spec.variant) {
    case EnvVariant::Classical:
      means = theta;
      break;
    case EnvVariant::InformativeArm:
      means = theta;
      means[0] = theta[0] - spec.penalty;
      break;
    case EnvVariant::Linear:
      means = spec.effective_loadings().transpose() * theta;
      break;
    case EnvVariant::Bernoulli:
    case EnvVariant::Poisson:
      means = spec.effective_counts().cwiseProduct(theta);
      break;
  }
  return means;
}

double instant_regret(const EnvironmentSpec& spec, const Vector& theta, int arm) {
  if (arm < 0 || arm >= spec.arms) {
    throw std::invalid_argument("instant_regret: arm out of range");
  }
  const Vector means = conditional_means(spec, theta);
  return means.maxCoeff() - means[arm];
}

GaussianBelief make_gaussian_prior(const EnvironmentSpec& spec) {
  GaussianBelief b;
  b.m = Vector::Constant(spec.param_dim(), spec.prior_mean);
  b.d = spec.prior_unc * Matrix::Identity(spec.param_dim(), spec.param_dim());
  return b;
}

std::vector<GaussianArmModel> make_gaussian_arms(const EnvironmentSpec& spec) {
  const int p = spec.param_dim();
  std::vector<GaussianArmModel> arms;
  arms.reserve(static_cast<std::size_t>(spec.arms));
  switch (spec.variant) {
    case EnvVariant::Classical:
      for (int i = 0; i < spec.arms; ++i) {
        GaussianArmModel a;
        a.c = Matrix::Identity(p, p);
        a.precision = Vector::Zero(p);
        a.precision[i] = 1.0 / spec.noise_var;
        a.reward = RewardDescriptor::identity();
        a.reward_component = i;
        arms.push_back(std::move(a));
      }
      break;
    case EnvVariant::InformativeArm:
      for (int i = 0; i < spec.arms; ++i) {
        GaussianArmModel a;
        a.c = Matrix::Identity(p, p);
        if (i == 0) {
          a.precision = Vector::Constant(p, 1.0 / spec.noise_var);
          a.reward = RewardDescriptor::affine(1.0, -spec.penalty);
        } else {
          a.precision = Vector::Zero(p);
          a.precision[i] = 1.0 / spec.noise_var;
          a.reward = RewardDescriptor::identity();
        }
        a.reward_component = i;
        arms.push_back(std::move(a));
      }
      break;
    case EnvVariant::Linear: {
      const Matrix b = spec.effective_loadings();
      for (int i = 0; i < spec.arms; ++i) {
        GaussianArmModel a;
        a.c = b.col(i);
        a.precision = Vector::Constant(1, 1.0 / spec.noise_var);
        a.reward = RewardDescriptor::identity();
        a.reward_component = 0;
        arms.push_back(std::move(a));
      }
      break;
    }
    default:
      throw std::invalid_argument(
          "make_gaussian_arms: environment is not Gaussian");
  }
  return arms;
}

BetaBelief make_beta_prior(const EnvironmentSpec& spec) {
  BetaBelief b;
  b.m = Vector::Constant(spec.param_dim(), spec.prior_mean);
  b.d = Vector::Constant(spec.param_dim(), spec.prior_unc);
  return b;
}

GammaBelief make_gamma_prior(const EnvironmentSpec& spec) {
  GammaBelief b;
  b.m = Vector::Constant(spec.param_dim(), spec.prior_mean);
  b.d = Vector::Constant(spec.param_dim(), spec.prior_unc);
  return b;
}

Matrix make_family_observe(const EnvironmentSpec& spec) {
  Matrix obs = Matrix::Zero(spec.arms, spec.arms);
  obs.diagonal() = spec.effective_counts();
  return obs;
}

}  // namespace arc
