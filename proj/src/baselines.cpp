#include "arc/baselines.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>

#include "arc/quadrature.hpp"
#include "arc/stats.hpp"

namespace arc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Factor a PSD matrix as A A^T, clamping small negative eigenvalues.
Matrix psd_factor(const Matrix& d) {
  Eigen::LLT<Matrix> llt(d);
  if (llt.info() == Eigen::Success) return Matrix(llt.matrixL());
  Eigen::SelfAdjointEigenSolver<Matrix> es(d);
  if (es.info() != Eigen::Success) {
    throw NumericError("psd_factor: eigen decomposition failed");
  }
  const Vector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal();
}

struct ObservedBlock {
  Matrix c;     // p x q, observed columns only
  Vector pinv;  // observation noise variances
  int q = 0;
};

ObservedBlock observed_block(const GaussianArmModel& arm) {
  ObservedBlock blk;
  std::vector<int> idx;
  for (int j = 0; j < arm.precision.size(); ++j) {
    if (arm.precision[j] > 0.0) idx.push_back(j);
  }
  blk.q = static_cast<int>(idx.size());
  blk.c.resize(arm.c.rows(), blk.q);
  blk.pinv.resize(blk.q);
  for (int k = 0; k < blk.q; ++k) {
    blk.c.col(k) = arm.c.col(idx[k]);
    blk.pinv[k] = 1.0 / arm.precision[idx[k]];
  }
  return blk;
}

double expected_reward_given_theta(const Vector& theta,
                                   const GaussianArmModel& arm,
                                   int quadrature_nodes) {
  const double mean = arm.reward_loading().dot(theta);
  switch (arm.reward.kind) {
    case RewardDescriptor::Kind::Identity:
      return mean;
    case RewardDescriptor::Kind::Affine:
      return arm.reward.u * mean + arm.reward.v;
    case RewardDescriptor::Kind::Generic: {
      const double sd = std::sqrt(arm.reward_noise_var());
      return gauss_hermite(quadrature_nodes).expect_affine(mean, sd, arm.reward.r);
    }
  }
  return mean;
}

}  // namespace

Vector conditional_mean_rewards(const Vector& theta,
                                const std::vector<GaussianArmModel>& arms,
                                int quadrature_nodes) {
  Vector out(static_cast<Eigen::Index>(arms.size()));
  for (std::size_t i = 0; i < arms.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] =
        expected_reward_given_theta(theta, arms[i], quadrature_nodes);
  }
  return out;
}

int epsilon_greedy_step(const Vector& f, double epsilon, RngStream& rng) {
  if (epsilon < 0.0 || epsilon > 1.0) {
    throw std::invalid_argument("epsilon_greedy_step: epsilon must be in [0,1]");
  }
  if (epsilon > 0.0 && rng.uniform() < epsilon) {
    return static_cast<int>(rng.uniform() * static_cast<double>(f.size())) %
           static_cast<int>(f.size());
  }
  return argmax_lowest(f);
}

int boltzmann_step(const Vector& f, double rho, double kappa, double d_norm,
                   RngStream& rng, double lambda_floor) {
  if (!(rho > 0.0)) throw std::invalid_argument("boltzmann_step: rho must be > 0");
  const double lambda =
      std::max(rho * std::pow(std::max(d_norm, 0.0), kappa), lambda_floor);
  const Vector u = nu(f, lambda);
  const double z = rng.uniform();
  double acc = 0.0;
  for (int i = 0; i < u.size(); ++i) {
    acc += u[i];
    if (acc >= z) return i;
  }
  return static_cast<int>(u.size()) - 1;
}

int thompson_step(const GaussianBelief& belief,
                  const std::vector<GaussianArmModel>& arms, RngStream& rng,
                  int quadrature_nodes) {
  const Matrix a = psd_factor(belief.d);
  Vector z(belief.dim());
  for (int i = 0; i < z.size(); ++i) z[i] = rng.normal();
  const Vector theta_hat = belief.m + a * z;
  return argmax_lowest(conditional_mean_rewards(theta_hat, arms, quadrature_nodes));
}

int bayes_ucb_step(const GaussianBelief& belief,
                   const std::vector<GaussianArmModel>& arms, int t,
                   int total_horizon, double c, RngStream* rng,
                   int mc_samples) {
  if (t < 1 || total_horizon < 2) {
    throw std::invalid_argument("bayes_ucb_step: need t >= 1 and T >= 2");
  }
  const double p_quant =
      1.0 - (1.0 / static_cast<double>(t)) *
                std::pow(std::log(static_cast<double>(total_horizon)), -c);
  const double z = normal_quantile(std::clamp(p_quant, 0.0, 1.0));

  Vector q(static_cast<Eigen::Index>(arms.size()));
  for (std::size_t i = 0; i < arms.size(); ++i) {
    const auto& arm = arms[i];
    arm.validate(belief.dim());
    if (arm.reward.kind == RewardDescriptor::Kind::Generic) {
      // Posterior-sampling quantile of E_theta[r_i].
      if (rng == nullptr) {
        throw std::invalid_argument(
            "bayes_ucb_step: generic rewards need an rng for the quantile");
      }
      const Matrix a = psd_factor(belief.d);
      std::vector<double> vals(static_cast<std::size_t>(mc_samples));
      Vector zz(belief.dim());
      for (int s = 0; s < mc_samples; ++s) {
        for (int k = 0; k < zz.size(); ++k) zz[k] = rng->normal();
        vals[static_cast<std::size_t>(s)] =
            expected_reward_given_theta(belief.m + a * zz, arm, 32);
      }
      std::sort(vals.begin(), vals.end());
      q[static_cast<Eigen::Index>(i)] = sorted_quantile(vals, p_quant);
      continue;
    }
    const Vector load = arm.reward_loading();
    const double slope =
        arm.reward.kind == RewardDescriptor::Kind::Affine ? arm.reward.u : 1.0;
    const double offset =
        arm.reward.kind == RewardDescriptor::Kind::Affine ? arm.reward.v : 0.0;
    const double mean = slope * load.dot(belief.m) + offset;
    const double sd =
        std::abs(slope) * std::sqrt(std::max(load.dot(belief.d * load), 0.0));
    q[static_cast<Eigen::Index>(i)] = sd > 0.0 ? mean + z * sd : mean;
  }
  return argmax_lowest(q);
}

int kg_step(const GaussianBelief& belief,
            const std::vector<GaussianArmModel>& arms, double beta,
            int mc_samples, RngStream& rng) {
  if (mc_samples < 1) {
    throw std::invalid_argument("kg_step: mc_samples must be >= 1");
  }
  const int K = static_cast<int>(arms.size());
  if (K == 1) return 0;
  const int p = belief.dim();

  const RewardEval base = predictive_reward(belief, arms);
  const double cur_max = base.f.maxCoeff();

  // Precompute per-arm update machinery: posterior d_i (deterministic) and
  // mean gain against the observed block.
  struct ArmSim {
    Matrix gain_chol;  // p x q: G_i * chol(S_i), maps N(0,I_q) to mean update
    GaussianBelief next;
    int q = 0;
  };
  std::vector<ArmSim> sims(static_cast<std::size_t>(arms.size()));
  int qmax = 0;
  for (int i = 0; i < K; ++i) {
    const auto blk = observed_block(arms[i]);
    auto& sim = sims[static_cast<std::size_t>(i)];
    sim.q = blk.q;
    qmax = std::max(qmax, blk.q);
    sim.next.m = belief.m;
    if (blk.q == 0) {
      sim.next.d = belief.d;
      sim.gain_chol = Matrix::Zero(p, 0);
      continue;
    }
    Matrix s = blk.c.transpose() * belief.d * blk.c;
    s.diagonal() += blk.pinv;
    const Matrix schol = psd_factor(s);
    Eigen::LDLT<Matrix> ldlt(s);
    if (ldlt.info() != Eigen::Success) {
      throw NumericError("kg_step: singular innovation covariance");
    }
    const Matrix dc = belief.d * blk.c;
    const Matrix gain = ldlt.solve(dc.transpose()).transpose();
    sim.gain_chol = gain * schol;
    sim.next.d = belief.d - gain * dc.transpose();
    sim.next.d = 0.5 * (sim.next.d + sim.next.d.transpose()).eval();
  }

  bool all_affine = true;
  for (const auto& arm : arms) {
    all_affine &= arm.reward.kind != RewardDescriptor::Kind::Generic;
  }
  Matrix slope_load(K, p);  // row j = u_j a_j^T, so f(m') = slope_load m' + off
  Vector off(K);
  if (all_affine) {
    for (int j = 0; j < K; ++j) {
      const auto& r = arms[static_cast<std::size_t>(j)].reward;
      const double uj = r.kind == RewardDescriptor::Kind::Affine ? r.u : 1.0;
      off[j] = r.kind == RewardDescriptor::Kind::Affine ? r.v : 0.0;
      slope_load.row(j) =
          uj * arms[static_cast<std::size_t>(j)].reward_loading().transpose();
    }
  }

  // Common random numbers across arms: one N(0, I_qmax) draw per sample.
  Vector acc = Vector::Zero(K);
  Vector u(qmax);
  GaussianBelief probe;
  for (int s = 0; s < mc_samples; ++s) {
    for (int k = 0; k < qmax; ++k) u[k] = rng.normal();
    for (int i = 0; i < K; ++i) {
      const auto& sim = sims[static_cast<std::size_t>(i)];
      probe.m = belief.m + sim.gain_chol * u.head(sim.q);
      if (all_affine) {
        acc[i] += (slope_load * probe.m + off).maxCoeff();
      } else {
        probe.d = sim.next.d;
        acc[i] += predictive_reward(probe, arms).f.maxCoeff();
      }
    }
  }
  acc /= static_cast<double>(mc_samples);

  const Vector index =
      base.f + (beta / (1.0 - beta)) * (acc.array() - cur_max).matrix();
  return argmax_lowest(index);
}

std::pair<Vector, int> ids_step(const GaussianBelief& belief,
                                const std::vector<GaussianArmModel>& arms,
                                int mc_samples, RngStream& rng) {
  if (mc_samples < 1) {
    throw std::invalid_argument("ids_step: mc_samples must be >= 1");
  }
  const int K = static_cast<int>(arms.size());

  const RewardEval base = predictive_reward(belief, arms);

  // One-step regret per arm: E[max_j E_theta[r_j]] - f_i over posterior draws.
  const Matrix a = psd_factor(belief.d);
  Vector z(belief.dim());
  double best_mean = 0.0;
  for (int s = 0; s < mc_samples; ++s) {
    for (int k = 0; k < z.size(); ++k) z[k] = rng.normal();
    best_mean += conditional_mean_rewards(belief.m + a * z, arms).maxCoeff();
  }
  best_mean /= static_cast<double>(mc_samples);
  const Vector delta = (best_mean - base.f.array()).cwiseMax(0.0);

  // Gaussian information gain is deterministic:
  // g_i = (1/2) [ln det(P^{-1} + c^T d c) - ln det P^{-1}] on the observed block.
  Vector gain(K);
  for (int i = 0; i < K; ++i) {
    const auto blk = observed_block(arms[i]);
    if (blk.q == 0) {
      gain[i] = 0.0;
      continue;
    }
    Matrix s = blk.c.transpose() * belief.d * blk.c;
    s.diagonal() += blk.pinv;
    Eigen::LLT<Matrix> llt(s);
    if (llt.info() != Eigen::Success) {
      throw NumericError("ids_step: predictive covariance not PD");
    }
    double logdet = 0.0;
    for (int k = 0; k < blk.q; ++k) {
      logdet += 2.0 * std::log(llt.matrixL()(k, k));
      logdet -= std::log(blk.pinv[k]);
    }
    gain[i] = std::max(0.5 * logdet, 0.0);
  }

  if (gain.maxCoeff() <= 0.0) {
    static std::atomic<bool> warned{false};
    if (!warned.exchange(true)) {
      std::fprintf(stderr,
                   "ids_step: all information gains are zero; falling back to "
                   "the greedy arm\n");
    }
    Vector u = Vector::Zero(K);
    const int pick = argmax_lowest(base.f);
    u[pick] = 1.0;
    return {u, pick};
  }

  const auto objective = [](double dlt, double gn) {
    if (dlt <= 0.0) return 0.0;
    if (gn <= 0.0) return kInf;
    return dlt * dlt / gn;
  };

  // Vertices first, then two-arm supports with the closed-form inner minimum.
  double best_obj = kInf;
  Vector best_u = Vector::Zero(K);
  int best_vertex = argmax_lowest(base.f);
  best_u[best_vertex] = 1.0;
  for (int i = 0; i < K; ++i) {
    const double obj = objective(delta[i], gain[i]);
    if (obj < best_obj) {
      best_obj = obj;
      best_u.setZero();
      best_u[i] = 1.0;
    }
  }
  for (int i = 0; i < K; ++i) {
    for (int j = i + 1; j < K; ++j) {
      const double A = delta[i] - delta[j], B = delta[j];
      const double C = gain[i] - gain[j], D = gain[j];
      std::vector<double> cands;
      if (A == 0.0 && C == 0.0) {
        cands.push_back(0.5);  // flat ridge: split the support evenly
      } else if (A != 0.0 && C != 0.0) {
        cands.push_back((C * B - 2.0 * A * D) / (A * C));
      } else if (A != 0.0) {  // linear regret, constant gain: endpoint suffices
        cands.push_back(-B / A);
      }
      for (double q : cands) {
        if (!(q > 0.0 && q < 1.0)) continue;
        const double dl = q * delta[i] + (1.0 - q) * delta[j];
        const double gn = q * gain[i] + (1.0 - q) * gain[j];
        const double obj = objective(dl, gn);
        // ties go to the mixed support (flat ridges resolve to the even split)
        if (obj <= best_obj && obj < kInf) {
          best_obj = obj;
          best_u.setZero();
          best_u[i] = q;
          best_u[j] = 1.0 - q;
        }
      }
    }
  }

  const double draw = rng.uniform();
  double acc = 0.0;
  int pick = K - 1;
  for (int i = 0; i < K; ++i) {
    acc += best_u[i];
    if (acc >= draw) {
      pick = i;
      break;
    }
  }
  return {best_u, pick};
}

}  // namespace arc
