#include "arc/reward.hpp"

#include <cmath>

#include "arc/quadrature.hpp"

namespace arc {

RewardEval predictive_reward(const GaussianBelief& belief,
                             const std::vector<GaussianArmModel>& arms,
                             int quadrature_nodes) {
  const int K = static_cast<int>(arms.size());
  const int p = belief.dim();
  RewardEval out;
  out.f.resize(K);
  out.g.resize(K);
  out.h.resize(K);
  out.df_dm.resize(K, p);
  out.loading.resize(p, K);
  out.proj_var.resize(K);

  for (int i = 0; i < K; ++i) {
    const auto& arm = arms[i];
    arm.validate(p);
    const Vector a = arm.reward_loading();
    out.loading.col(i) = a;
    const double noise = arm.reward_noise_var();
    const double proj = a.dot(belief.d * a);

    switch (arm.reward.kind) {
      case RewardDescriptor::Kind::Identity:
        out.f[i] = a.dot(belief.m);
        out.g[i] = 1.0;
        out.h[i] = 0.0;
        out.proj_var[i] = proj + noise;
        break;
      case RewardDescriptor::Kind::Affine:
        out.f[i] = arm.reward.u * a.dot(belief.m) + arm.reward.v;
        out.g[i] = arm.reward.u;
        out.h[i] = 0.0;
        out.proj_var[i] = arm.reward.u == 0.0 ? 0.0 : proj + noise;
        break;
      case RewardDescriptor::Kind::Generic: {
        if (!arm.reward.r || !arm.reward.r_prime || !arm.reward.r_second) {
          throw std::invalid_argument(
              "predictive_reward: generic reward missing derivative callbacks");
        }
        const double var = proj + noise;
        if (!std::isfinite(var)) {
          throw std::invalid_argument(
              "predictive_reward: reward component not observed");
        }
        const double mean = a.dot(belief.m);
        const double sd = std::sqrt(std::max(var, 0.0));
        const auto& rule = gauss_hermite(quadrature_nodes);
        out.f[i] = rule.expect_affine(mean, sd, arm.reward.r);
        out.g[i] = rule.expect_affine(mean, sd, arm.reward.r_prime);
        out.h[i] = rule.expect_affine(mean, sd, arm.reward.r_second);
        out.proj_var[i] = var;
        break;
      }
    }
    out.df_dm.row(i) = out.g[i] * a.transpose();
  }
  return out;
}

RewardEval family_reward_eval(const Vector& m, const Vector& reward_scale) {
  const int K = static_cast<int>(m.size());
  if (reward_scale.size() != K) {
    throw std::invalid_argument("family_reward_eval: scale size mismatch");
  }
  RewardEval out;
  out.f = reward_scale.cwiseProduct(m);
  out.g = reward_scale;
  out.h = Vector::Zero(K);
  out.loading = Matrix::Identity(K, K);
  out.df_dm = Matrix::Zero(K, K);
  out.df_dm.diagonal() = reward_scale;
  out.proj_var = Vector::Zero(K);
  return out;
}

}  // namespace arc
