#include "arc/index.hpp"

#include <cmath>

namespace arc {

void ArcConfig::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("ArcConfig: beta must lie in (0,1)");
  }
  if (!(rho > 0.0)) throw std::invalid_argument("ArcConfig: rho must be > 0");
  if (!(kappa > 0.0 && kappa <= 2.0)) {
    throw std::invalid_argument("ArcConfig: kappa must lie in (0,2]");
  }
  if (!(lambda_floor > 0.0)) {
    throw std::invalid_argument("ArcConfig: lambda_floor must be > 0");
  }
  if (horizon && *horizon < 1) {
    throw std::invalid_argument("ArcConfig: horizon must be >= 1");
  }
}

double ArcConfig::lambda_at(double d_norm) const {
  return std::max(rho * std::pow(std::max(d_norm, 0.0), kappa), lambda_floor);
}

double ArcConfig::premium_weight() const {
  if (!horizon) return beta / (1.0 - beta);
  // sum_{s=1}^{t-1} beta^s, exact partial geometric sum
  const int t = *horizon;
  if (t <= 1) return 0.0;
  return beta * (1.0 - std::pow(beta, t - 1)) / (1.0 - beta);
}

int argmax_lowest(const Vector& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

LearningPremium learning_premium(const RewardEval& reward,
                                 const std::vector<DynamicsCoefficients>& dyn,
                                 SmoothMaxKind kind, double lambda) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("learning_premium: lambda must be > 0");
  }
  const int K = reward.arms();
  if (static_cast<int>(dyn.size()) != K) {
    throw std::invalid_argument("learning_premium: dynamics size mismatch");
  }
  const int p = static_cast<int>(reward.df_dm.cols());

  const Vector nu_f = nu(reward.f, lambda, kind);
  const Matrix eta_f = eta(reward.f, lambda, kind);

  LearningPremium out;
  out.B = Matrix::Zero(p, p);
  out.M = Vector::Zero(p);
  out.Sigma = Matrix::Zero(p, p);
  for (int j = 0; j < K; ++j) {
    out.B += nu_f[j] * reward.df_dd(j);
    out.M += nu_f[j] * reward.df_dm.row(j).transpose();
    out.Sigma += nu_f[j] * reward.d2f_dm2(j);
  }
  out.Sigma += (reward.df_dm.transpose() * eta_f * reward.df_dm) / lambda;

  out.L.resize(K);
  for (int i = 0; i < K; ++i) {
    out.L[i] = out.B.cwiseProduct(dyn[i].b).sum() + out.M.dot(dyn[i].mu) +
               0.5 * out.Sigma.cwiseProduct(dyn[i].sigma_sq).sum();
  }
  return out;
}

Vector learning_premium_info_arm(const Vector& f, const Vector& d_diag,
                                 const Matrix& s, const Vector& g,
                                 SmoothMaxKind kind, double lambda) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("learning_premium_info_arm: lambda must be > 0");
  }
  const int K = static_cast<int>(f.size());
  if (s.rows() != K || s.cols() != K || d_diag.size() != K || g.size() != K) {
    throw std::invalid_argument("learning_premium_info_arm: dimension mismatch");
  }
  if ((s.array() < 0.0).any()) {
    throw std::invalid_argument("learning_premium_info_arm: negative precision");
  }
  const Vector nu_f = nu(f, lambda, kind);
  // per-coordinate weight nu_j (1-nu_j) d_jj^2 g_j^2
  const Vector w = nu_f.array() * (1.0 - nu_f.array()) * d_diag.array().square() *
                   g.array().square();
  Vector L(K);
  for (int i = 0; i < K; ++i) {
    double acc = 0.0;
    for (int j = 0; j < K; ++j) {
      const double sij = s(i, j);
      if (sij > 0.0) acc += w[j] * sij / (1.0 + d_diag[j] * sij);
    }
    L[i] = acc / (2.0 * lambda);
  }
  return L;
}

Vector learning_premium_linear(const GaussianBelief& belief,
                               const Matrix& loadings, const Vector& precisions,
                               const Vector& f, const Vector& g,
                               SmoothMaxKind kind, double lambda) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("learning_premium_linear: lambda must be > 0");
  }
  const int K = static_cast<int>(f.size());
  if (loadings.cols() != K || precisions.size() != K || g.size() != K ||
      loadings.rows() != belief.dim()) {
    throw std::invalid_argument("learning_premium_linear: dimension mismatch");
  }
  const Vector nu_f = nu(f, lambda, kind);
  const Matrix w = loadings.transpose() * belief.d * loadings;  // c_i^T d c_j
  Vector L(K);
  for (int i = 0; i < K; ++i) {
    const double pinv = precisions[i] > 0.0
                            ? 1.0 / precisions[i]
                            : std::numeric_limits<double>::infinity();
    if (!std::isfinite(pinv)) {  // observes nothing
      L[i] = 0.0;
      continue;
    }
    double first = 0.0, second = 0.0;
    for (int j = 0; j < K; ++j) {
      const double x = g[j] * w(i, j);
      first += nu_f[j] * x * x;
      second += nu_f[j] * x;
    }
    L[i] = (first - second * second) / (2.0 * lambda * (w(i, i) + pinv));
  }
  return L;
}

namespace {

bool is_diagonal(const Matrix& d) {
  const double scale = d.cwiseAbs().maxCoeff();
  if (scale == 0.0) return true;
  for (int i = 0; i < d.rows(); ++i) {
    for (int j = 0; j < d.cols(); ++j) {
      if (i != j && std::abs(d(i, j)) > 1e-12 * scale) return false;
    }
  }
  return true;
}

// Every arm loads the full parameter through the identity with diagonal
// per-coordinate precision, and collects the reward of its own coordinate.
bool matches_info_arm(const std::vector<GaussianArmModel>& arms, int p) {
  if (static_cast<int>(arms.size()) != p) return false;
  for (int i = 0; i < p; ++i) {
    const auto& a = arms[i];
    if (a.c.rows() != p || a.c.cols() != p) return false;
    if (!a.c.isIdentity(1e-12)) return false;
    if (a.reward_component != i) return false;
    if (a.precision[i] <= 0.0) return false;
  }
  return true;
}

// Every arm observes a single scalar projection and rewards it.
bool matches_linear(const std::vector<GaussianArmModel>& arms) {
  for (const auto& a : arms) {
    int observed = 0, obs_idx = -1;
    for (int j = 0; j < a.precision.size(); ++j) {
      if (a.precision[j] > 0.0) {
        ++observed;
        obs_idx = j;
      }
    }
    if (observed != 1 || a.reward_component != obs_idx) return false;
  }
  return true;
}

}  // namespace

ArcIndex arc_index(const GaussianBelief& belief,
                   const std::vector<GaussianArmModel>& arms,
                   const ArcConfig& config) {
  config.validate();
  const int K = static_cast<int>(arms.size());
  const int p = belief.dim();
  const double lambda = config.lambda_at(belief.d_norm());

  const RewardEval reward =
      predictive_reward(belief, arms, config.quadrature_nodes);

  ArcIndex out;
  out.f = reward.f;
  out.lambda_used = lambda;

  if (matches_info_arm(arms, p) && is_diagonal(belief.d)) {
    Matrix s(K, K);
    for (int i = 0; i < K; ++i) s.row(i) = arms[i].precision.transpose();
    out.L = learning_premium_info_arm(reward.f, belief.d.diagonal(), s,
                                      reward.g, config.smooth_max, lambda);
  } else if (matches_linear(arms)) {
    Matrix loadings(p, K);
    Vector precisions(K);
    for (int i = 0; i < K; ++i) {
      loadings.col(i) = arms[i].reward_loading();
      precisions[i] = arms[i].precision[arms[i].reward_component];
    }
    out.L = learning_premium_linear(belief, loadings, precisions, reward.f,
                                    reward.g, config.smooth_max, lambda);
  } else {
    std::vector<DynamicsCoefficients> dyn;
    dyn.reserve(arms.size());
    for (const auto& a : arms) dyn.push_back(gaussian_dynamics(belief, a));
    LearningPremium prem =
        learning_premium(reward, dyn, config.smooth_max, lambda);
    out.L = std::move(prem.L);
    out.B = std::move(prem.B);
    out.M = std::move(prem.M);
    out.Sigma = std::move(prem.Sigma);
  }

  out.alpha = reward.f + config.premium_weight() * out.L;
  return out;
}

ArcIndex arc_index_family(const Vector& m, const Vector& d,
                          const Matrix& observe, FamilyKind family,
                          const ArcConfig& config) {
  config.validate();
  const int K = static_cast<int>(m.size());
  if (observe.rows() != K || observe.cols() != K || d.size() != K) {
    throw std::invalid_argument("arc_index_family: dimension mismatch");
  }
  const double lambda = config.lambda_at(d.maxCoeff());  // max-coordinate norm

  const RewardEval reward = family_reward_eval(m, observe.diagonal());

  std::vector<DynamicsCoefficients> dyn;
  dyn.reserve(K);
  const double cap = config.sigma_cap * config.sigma_cap;
  for (int i = 0; i < K; ++i) {
    BetaBelief bb{m, d};
    GammaBelief gb{m, d};
    DynamicsCoefficients c = family == FamilyKind::Binomial
                                 ? beta_dynamics(bb, observe.row(i).transpose())
                                 : gamma_dynamics(gb, observe.row(i).transpose());
    if (family == FamilyKind::Poisson) {
      c.sigma_sq = c.sigma_sq.cwiseMin(cap);  // H.2(v) truncation
    }
    dyn.push_back(std::move(c));
  }

  LearningPremium prem = learning_premium(reward, dyn, config.smooth_max, lambda);
  ArcIndex out;
  out.f = reward.f;
  out.lambda_used = lambda;
  out.L = std::move(prem.L);
  out.B = std::move(prem.B);
  out.M = std::move(prem.M);
  out.Sigma = std::move(prem.Sigma);
  out.alpha = out.f + config.premium_weight() * out.L;
  return out;
}

std::pair<Vector, int> arc_step(const ArcIndex& index, double rng_draw) {
  const Vector u = nu(index.alpha, index.lambda_used);
  double acc = 0.0;
  int pick = static_cast<int>(u.size()) - 1;
  for (int i = 0; i < u.size(); ++i) {
    acc += u[i];
    if (acc >= rng_draw) {
      pick = i;
      break;
    }
  }
  return {u, pick};
}

int arc_index_step(const ArcIndex& index) { return argmax_lowest(index.alpha); }

}  // namespace arc
