#include <doctest.h>

#include <random>

#include "arc/index.hpp"

using namespace arc;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Informative-arm instance: every arm observes every coordinate through the
// identity loading with per-coordinate precision s_ij and rewards its own
// coordinate through an affine (or tanh) map.
struct InfoArmInstance {
  GaussianBelief belief;
  std::vector<GaussianArmModel> arms;
  Matrix s;
  Vector f_target;
};

InfoArmInstance random_info_arm(std::mt19937_64& gen, bool tanh_rewards) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  const int k = 2 + static_cast<int>(gen() % 5);
  InfoArmInstance inst;
  inst.belief.m = VectorXd::Zero(k).unaryExpr([&](double) { return n(gen); });
  inst.belief.d = MatrixXd::Zero(k, k);
  for (int j = 0; j < k; ++j) inst.belief.d(j, j) = 0.05 + u01(gen);
  inst.s.resize(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      inst.s(i, j) = u01(gen) < 0.3 ? 0.0 : 0.2 + 2.0 * u01(gen);
    }
    if (inst.s(i, i) == 0.0) inst.s(i, i) = 0.5 + u01(gen);  // reward observed
  }
  for (int i = 0; i < k; ++i) {
    GaussianArmModel arm;
    arm.c = MatrixXd::Identity(k, k);
    arm.precision = inst.s.row(i).transpose();
    arm.reward_component = i;
    if (tanh_rewards) {
      arm.reward = RewardDescriptor::generic(
          [](double y) { return std::tanh(y); },
          [](double y) { const double t = std::tanh(y); return 1.0 - t * t; },
          [](double y) {
            const double t = std::tanh(y);
            return -2.0 * t * (1.0 - t * t);
          });
    } else {
      arm.reward = RewardDescriptor::affine(0.5 + u01(gen), n(gen));
    }
    inst.arms.push_back(std::move(arm));
  }
  return inst;
}

}  // namespace

TEST_CASE("premium vanishes with nothing to learn") {
  const int k = 3;
  RewardEval r = family_reward_eval(VectorXd::Ones(k), VectorXd::Ones(k));
  std::vector<DynamicsCoefficients> dyn(k);
  for (auto& d : dyn) {
    d.mu = VectorXd::Zero(k);
    d.b = MatrixXd::Zero(k, k);
    d.sigma_sq = MatrixXd::Zero(k, k);
  }
  const auto prem = learning_premium(r, dyn, SmoothMaxKind::Shannon, 0.5);
  CHECK(prem.L.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hand-evaluated symmetric informative instance gives L = 0.125") {
  // K=2, lambda=1, f=(0,0), d=diag(1,1), all s=1, identity rewards.
  const VectorXd f = VectorXd::Zero(2);
  const VectorXd d = VectorXd::Ones(2);
  const MatrixXd s = MatrixXd::Ones(2, 2);
  const VectorXd g = VectorXd::Ones(2);
  const VectorXd L =
      learning_premium_info_arm(f, d, s, g, SmoothMaxKind::Shannon, 1.0);
  CHECK(L[0] == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(L[1] == doctest::Approx(0.125).epsilon(1e-14));

  // Same instance through the generic tensor path.
  GaussianBelief belief{VectorXd::Zero(2), MatrixXd::Identity(2, 2)};
  std::vector<GaussianArmModel> arms;
  for (int i = 0; i < 2; ++i) {
    GaussianArmModel arm;
    arm.c = MatrixXd::Identity(2, 2);
    arm.precision = VectorXd::Ones(2);
    arm.reward = RewardDescriptor::identity();
    arm.reward_component = i;
    arms.push_back(std::move(arm));
  }
  const RewardEval r = predictive_reward(belief, arms);
  std::vector<DynamicsCoefficients> dyn;
  for (const auto& a : arms) dyn.push_back(gaussian_dynamics(belief, a));
  const auto prem = learning_premium(r, dyn, SmoothMaxKind::Shannon, 1.0);
  CHECK(prem.L[0] == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(prem.L[1] == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("dominant arm suppresses the premium") {
  GaussianBelief belief{VectorXd::Zero(2), MatrixXd::Identity(2, 2)};
  std::vector<GaussianArmModel> arms;
  for (int i = 0; i < 2; ++i) {
    GaussianArmModel arm;
    arm.c = MatrixXd::Identity(2, 2);
    arm.precision = VectorXd::Ones(2);
    arm.reward = RewardDescriptor::affine(1.0, i == 0 ? 100.0 : 0.0);
    arm.reward_component = i;
    arms.push_back(std::move(arm));
  }
  const RewardEval r = predictive_reward(belief, arms);
  std::vector<DynamicsCoefficients> dyn;
  for (const auto& a : arms) dyn.push_back(gaussian_dynamics(belief, a));
  const auto prem = learning_premium(r, dyn, SmoothMaxKind::Shannon, 0.1);
  CHECK(prem.L.cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("info-arm closed form: zero row, asymmetry preference, negatives") {
  const VectorXd f = VectorXd::Zero(2);
  const VectorXd d = VectorXd::Ones(2);
  const VectorXd g = VectorXd::Ones(2);
  MatrixXd s(2, 2);
  s << 0.0, 0.0, 1.0, 1.0;
  const VectorXd L =
      learning_premium_info_arm(f, d, s, g, SmoothMaxKind::Shannon, 1.0);
  CHECK(L[0] == 0.0);  // observes nothing
  CHECK(L[1] > 0.0);

  MatrixXd s2(2, 2);
  s2 << 1.0, 1.0, 0.0, 1.0;  // arm 1 observes everything, arm 2 only itself
  const VectorXd L2 =
      learning_premium_info_arm(f, d, s2, g, SmoothMaxKind::Shannon, 1.0);
  CHECK(L2[0] > L2[1]);

  MatrixXd bad = s2;
  bad(0, 1) = -0.5;
  CHECK_THROWS_AS(
      learning_premium_info_arm(f, d, bad, g, SmoothMaxKind::Shannon, 1.0),
      std::invalid_argument);
  CHECK_THROWS_AS(
      learning_premium_info_arm(f, d, s2, g, SmoothMaxKind::Shannon, 0.0),
      std::invalid_argument);
}

TEST_CASE("linear closed form: degenerate, nonnegativity, orthogonal arms") {
  const int k = 4;
  GaussianBelief belief{VectorXd::Zero(k), MatrixXd::Zero(k, k)};
  const MatrixXd loadings = MatrixXd::Identity(k, k);
  const VectorXd prec = VectorXd::Ones(k);
  const VectorXd f = VectorXd::Zero(k);
  const VectorXd g = VectorXd::Ones(k);
  VectorXd L = learning_premium_linear(belief, loadings, prec, f, g,
                                       SmoothMaxKind::Shannon, 0.5);
  CHECK(L.cwiseAbs().maxCoeff() == 0.0);  // d = 0

  // orthogonal arms, d = I, P = I: L_i = (1/(4 lambda)) (1/K)(1 - 1/K)
  belief.d = MatrixXd::Identity(k, k);
  const double lambda = 0.7;
  L = learning_premium_linear(belief, loadings, prec, f, g,
                              SmoothMaxKind::Shannon, lambda);
  const double expect = (1.0 / (4.0 * lambda)) * (1.0 / k) * (1.0 - 1.0 / k);
  for (int i = 0; i < k; ++i) {
    CHECK(L[i] == doctest::Approx(expect).epsilon(1e-12));
  }

  std::mt19937_64 gen(43);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int p = 2 + static_cast<int>(gen() % 3);
    const int kk = 2 + static_cast<int>(gen() % 4);
    MatrixXd c(p, kk);
    for (int i = 0; i < p * kk; ++i) c(i % p, i / p) = n(gen);
    MatrixXd a(p, p);
    for (int i = 0; i < p * p; ++i) a(i % p, i / p) = n(gen);
    GaussianBelief bel{VectorXd::Zero(p),
                       MatrixXd(a * a.transpose() + 0.01 * MatrixXd::Identity(p, p))};
    VectorXd pr(kk), ff(kk), gg(kk);
    for (int i = 0; i < kk; ++i) {
      pr[i] = 0.2 + u01(gen);
      ff[i] = n(gen);
      gg[i] = n(gen);
    }
    const VectorXd Lr = learning_premium_linear(bel, c, pr, ff, gg,
                                                SmoothMaxKind::Shannon, 0.4);
    CHECK(Lr.minCoeff() >= -1e-12);  // nu-weighted variance form
  }
}

TEST_CASE("generic premium matches closed forms on random instances") {
  std::mt19937_64 gen(47);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);

  // 100 informative-arm instances (mixed affine and tanh rewards)
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = random_info_arm(gen, trial % 3 == 0);
    const double lambda = 0.2 + u01(gen);
    const RewardEval r = predictive_reward(inst.belief, inst.arms);
    std::vector<DynamicsCoefficients> dyn;
    for (const auto& a : inst.arms) dyn.push_back(gaussian_dynamics(inst.belief, a));
    const auto generic =
        learning_premium(r, dyn, SmoothMaxKind::Shannon, lambda);
    const VectorXd closed = learning_premium_info_arm(
        r.f, inst.belief.d.diagonal(), inst.s, r.g, SmoothMaxKind::Shannon,
        lambda);
    for (int i = 0; i < closed.size(); ++i) {
      CHECK(std::abs(generic.L[i] - closed[i]) <=
            1e-9 * std::max(1.0, std::abs(closed[i])));
    }
  }

  // 100 linear-bandit instances
  for (int trial = 0; trial < 100; ++trial) {
    const int p = 2 + static_cast<int>(gen() % 3);
    const int k = 2 + static_cast<int>(gen() % 4);
    GaussianBelief belief;
    belief.m = VectorXd::Zero(p).unaryExpr([&](double) { return n(gen); });
    MatrixXd a(p, p);
    for (int i = 0; i < p * p; ++i) a(i % p, i / p) = 0.4 * n(gen);
    belief.d = a * a.transpose() + 0.01 * MatrixXd::Identity(p, p);

    std::vector<GaussianArmModel> arms;
    MatrixXd loadings(p, k);
    VectorXd prec(k);
    for (int i = 0; i < k; ++i) {
      GaussianArmModel arm;
      arm.c.resize(p, 1);
      for (int j = 0; j < p; ++j) arm.c(j, 0) = n(gen);
      prec[i] = 0.2 + u01(gen);
      arm.precision = VectorXd::Constant(1, prec[i]);
      arm.reward = trial % 4 == 0
                       ? RewardDescriptor::generic(
                             [](double y) { return std::tanh(y); },
                             [](double y) {
                               const double t = std::tanh(y);
                               return 1.0 - t * t;
                             },
                             [](double y) {
                               const double t = std::tanh(y);
                               return -2.0 * t * (1.0 - t * t);
                             })
                       : RewardDescriptor::affine(0.5 + u01(gen), n(gen));
      loadings.col(i) = arm.c.col(0);
      arms.push_back(std::move(arm));
    }
    const double lambda = 0.2 + u01(gen);
    const RewardEval r = predictive_reward(belief, arms);
    std::vector<DynamicsCoefficients> dyn;
    for (const auto& arm : arms) dyn.push_back(gaussian_dynamics(belief, arm));
    const auto generic = learning_premium(r, dyn, SmoothMaxKind::Shannon, lambda);
    const VectorXd closed = learning_premium_linear(
        belief, loadings, prec, r.f, r.g, SmoothMaxKind::Shannon, lambda);
    for (int i = 0; i < k; ++i) {
      CHECK(std::abs(generic.L[i] - closed[i]) <=
            1e-9 * std::max(1.0, std::abs(closed[i])));
    }
  }
}

TEST_CASE("arc config validation and premium weight") {
  ArcConfig cfg;
  cfg.validate();
  cfg.beta = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.beta = 0.5;
  cfg.kappa = 2.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.kappa = 1.0;

  CHECK(cfg.premium_weight() == doctest::Approx(1.0));  // beta/(1-beta)
  cfg.horizon = 1;
  CHECK(cfg.premium_weight() == 0.0);  // myopic terminal step
  cfg.horizon = 3;
  CHECK(cfg.premium_weight() == doctest::Approx(0.5 + 0.25));
}

TEST_CASE("arc index reduces to greedy at d = 0") {
  const int k = 3;
  GaussianBelief belief{VectorXd::LinSpaced(k, 0.0, 1.0), MatrixXd::Zero(k, k)};
  std::vector<GaussianArmModel> arms;
  for (int i = 0; i < k; ++i) {
    GaussianArmModel arm;
    arm.c = MatrixXd::Identity(k, k);
    arm.precision = VectorXd::Zero(k);
    arm.precision[i] = 1.0;
    arm.reward = RewardDescriptor::identity();
    arm.reward_component = i;
    arms.push_back(std::move(arm));
  }
  ArcConfig cfg;
  cfg.lambda_floor = 1e-8;
  const ArcIndex idx = arc_index(belief, arms, cfg);
  CHECK((idx.alpha - idx.f).cwiseAbs().maxCoeff() == 0.0);
  CHECK(idx.lambda_used == 1e-8);
  CHECK(arc_index_step(idx) == k - 1);
}

TEST_CASE("one-and-a-half-armed bandit index hand value") {
  // m=1, d=0.04, lambda=0.1 (rho 2.5 * ||d||), beta=0.99 -> alpha_1 = 1.190385
  GaussianBelief belief{VectorXd::Constant(1, 1.0), MatrixXd::Constant(1, 1, 0.04)};
  std::vector<GaussianArmModel> arms(2);
  arms[0].c = MatrixXd::Constant(1, 1, 1.0);
  arms[0].precision = VectorXd::Constant(1, 1.0);
  arms[0].reward = RewardDescriptor::identity();
  arms[1].c = MatrixXd::Zero(1, 1);
  arms[1].precision = VectorXd::Zero(1);
  arms[1].reward = RewardDescriptor::affine(0.0, 1.0);

  ArcConfig cfg;
  cfg.beta = 0.99;
  cfg.rho = 2.5;
  cfg.kappa = 1.0;
  const ArcIndex idx = arc_index(belief, arms, cfg);
  CHECK(idx.lambda_used == doctest::Approx(0.1).epsilon(1e-14));
  const double expected =
      1.0 + 0.5 / 0.1 * 99.0 * 0.25 * (0.04 * 0.04 / 1.04);
  CHECK(idx.alpha[0] == doctest::Approx(expected).epsilon(1e-10));
  CHECK(idx.alpha[0] == doctest::Approx(1.19038).epsilon(1e-4));
  CHECK(idx.alpha[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("finite-horizon index: terminal step is myopic") {
  GaussianBelief belief{VectorXd::Constant(1, 1.0), MatrixXd::Constant(1, 1, 0.04)};
  std::vector<GaussianArmModel> arms(2);
  arms[0].c = MatrixXd::Constant(1, 1, 1.0);
  arms[0].precision = VectorXd::Constant(1, 1.0);
  arms[0].reward = RewardDescriptor::identity();
  arms[1].c = MatrixXd::Zero(1, 1);
  arms[1].precision = VectorXd::Zero(1);
  arms[1].reward = RewardDescriptor::affine(0.0, 1.0);
  ArcConfig cfg;
  cfg.horizon = 1;
  const ArcIndex idx = arc_index(belief, arms, cfg);
  CHECK((idx.alpha - idx.f).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("arc_step selection rule") {
  ArcIndex idx;
  idx.lambda_used = 0.5;
  idx.alpha.resize(3);
  // alpha chosen so nu(alpha) = (0.2, 0.3, 0.5)
  idx.alpha << 0.5 * std::log(0.2), 0.5 * std::log(0.3), 0.5 * std::log(0.5);
  auto [u, arm] = arc_step(idx, 0.45);
  CHECK(u[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(u[1] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(u[2] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(arm == 1);  // prefix sums 0.2, 0.5: first >= 0.45

  CHECK(arc_step(idx, 0.0).second == 0);      // zeta = 0 picks the first arm
  CHECK(arc_step(idx, 0.9999).second == 2);
}

TEST_CASE("arc degenerates to Boltzmann exploration when L = 0") {
  ArcIndex idx;
  idx.lambda_used = 0.8;
  idx.f.resize(3);
  idx.f << 0.4, -0.2, 0.1;
  idx.L = VectorXd::Zero(3);
  idx.alpha = idx.f;  // weight * 0
  const auto [u, arm] = arc_step(idx, 0.3);
  const VectorXd boltz = nu(idx.f, 0.8);
  CHECK((u - boltz).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("index argmax tie-breaks to the lowest arm") {
  ArcIndex idx;
  idx.alpha.resize(3);
  idx.alpha << 1.0, 2.0, 2.0;
  CHECK(arc_index_step(idx) == 1);
}

TEST_CASE("informative toy: premium outweighs a small payoff gap") {
  // Eq.-19-style instance, f = (0, 0.01): arm 1 observes everything, arm 2
  // only itself. With a large enough premium weight the informative arm wins.
  VectorXd f(2);
  f << 0.0, 0.01;
  const VectorXd d = VectorXd::Ones(2);
  const VectorXd g = VectorXd::Ones(2);
  MatrixXd s(2, 2);
  s << 1.0, 1.0, 0.0, 1.0;
  const double lambda = 1.0;
  const VectorXd L =
      learning_premium_info_arm(f, d, s, g, SmoothMaxKind::Shannon, lambda);
  REQUIRE(L[0] > L[1]);
  const double beta = 0.99;  // weight 99 makes the gap irrelevant
  const VectorXd alpha = f + beta / (1.0 - beta) * L;
  CHECK(beta / (1.0 - beta) * (L[0] - L[1]) > 0.01);
  CHECK(argmax_lowest(alpha) == 0);

  const double beta_small = 0.01;  // almost myopic: payoff gap wins
  const VectorXd alpha2 = f + beta_small / (1.0 - beta_small) * L;
  CHECK(argmax_lowest(alpha2) == 1);
}

TEST_CASE("decision is covariant under joint reward/temperature scaling") {
  std::mt19937_64 gen(53);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = random_info_arm(gen, false);
    // identity-reward version of the instance, then scaled by s
    const double scale = 0.5 + 4.0 * u01(gen);
    auto arms_scaled = inst.arms;
    for (auto& a : arms_scaled) {
      a.reward = RewardDescriptor::affine(scale * a.reward.u, scale * a.reward.v);
    }
    ArcConfig cfg;
    cfg.beta = 0.9;
    cfg.rho = 0.3 + u01(gen);
    const ArcIndex base = arc_index(inst.belief, inst.arms, cfg);
    ArcConfig cfg2 = cfg;
    cfg2.rho = cfg.rho * scale;  // lambda scales with the rewards
    const ArcIndex scaled = arc_index(inst.belief, arms_scaled, cfg2);
    const VectorXd u1 = nu(base.alpha, base.lambda_used);
    const VectorXd u2 = nu(scaled.alpha, scaled.lambda_used);
    CHECK((u1 - u2).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("alpha is monotone in beta when the premium is nonnegative") {
  std::mt19937_64 gen(59);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = random_info_arm(gen, false);
    ArcConfig lo, hi;
    lo.beta = 0.5;
    hi.beta = 0.9;
    const ArcIndex a_lo = arc_index(inst.belief, inst.arms, lo);
    const ArcIndex a_hi = arc_index(inst.belief, inst.arms, hi);
    REQUIRE(a_lo.L.minCoeff() >= 0.0);
    CHECK(((a_hi.alpha - a_lo.alpha).array() >= -1e-12).all());
  }
}

TEST_CASE("family index truncates the Poisson volatility") {
  const int k = 2;
  const VectorXd m = VectorXd::Constant(k, 1e5);  // huge mean, huge sigma
  const VectorXd d = VectorXd::Constant(k, 10.0);
  Matrix obs = MatrixXd::Identity(k, k);
  ArcConfig cfg;
  cfg.sigma_cap = 1.0;
  const ArcIndex capped = arc_index_family(m, d, obs, FamilyKind::Poisson, cfg);
  ArcConfig loose = cfg;
  loose.sigma_cap = 1e9;
  const ArcIndex free = arc_index_family(m, d, obs, FamilyKind::Poisson, loose);
  CHECK(capped.L[0] < free.L[0]);
}
