#include "arc/belief.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

namespace arc {

namespace {

constexpr double kDegenerateFloor = 1e-12;  // Beta/Gamma pinned-d floor

std::vector<int> observed_components(const GaussianArmModel& arm) {
  std::vector<int> idx;
  idx.reserve(arm.precision.size());
  for (int j = 0; j < arm.precision.size(); ++j) {
    if (arm.precision[j] > 0.0) idx.push_back(j);
  }
  return idx;
}

void symmetrize_and_clamp(Matrix& d) {
  d = 0.5 * (d + d.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(d, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericError("gaussian_update: eigenvalue check failed");
  }
  if (es.eigenvalues().minCoeff() < 0.0) {
    Eigen::SelfAdjointEigenSolver<Matrix> full(d);
    Vector ev = full.eigenvalues().cwiseMax(0.0);
    d = full.eigenvectors() * ev.asDiagonal() * full.eigenvectors().transpose();
    d = 0.5 * (d + d.transpose()).eval();
  }
}

}  // namespace

double GaussianBelief::d_norm() const {
  if (d.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(d, Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues().maxCoeff());
}

double GaussianArmModel::reward_noise_var() const {
  const double prec = precision[reward_component];
  if (prec <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / prec;
}

void GaussianArmModel::validate(int p) const {
  if (c.rows() != p) {
    throw std::invalid_argument("GaussianArmModel: loading rows != belief dim");
  }
  if (c.cols() != precision.size()) {
    throw std::invalid_argument("GaussianArmModel: loading cols != precision size");
  }
  if ((precision.array() < 0.0).any()) {
    throw std::invalid_argument("GaussianArmModel: negative precision");
  }
  if (reward_component < 0 || reward_component >= precision.size()) {
    throw std::invalid_argument("GaussianArmModel: reward component out of range");
  }
  const bool constant_reward =
      reward.kind == RewardDescriptor::Kind::Affine && reward.u == 0.0;
  if (!constant_reward && precision[reward_component] <= 0.0) {
    throw std::invalid_argument(
        "GaussianArmModel: reward component is not observed");
  }
}

GaussianBelief gaussian_update(const GaussianBelief& belief,
                               const GaussianArmModel& arm, const Vector& y) {
  arm.validate(belief.dim());
  if (y.size() != arm.precision.size()) {
    throw std::invalid_argument("gaussian_update: observation dimension mismatch");
  }
  const auto idx = observed_components(arm);
  if (idx.empty()) return belief;  // nothing observed

  const int p = belief.dim();
  const int q = static_cast<int>(idx.size());
  Matrix c(p, q);
  Vector pinv(q), yo(q);
  for (int k = 0; k < q; ++k) {
    c.col(k) = arm.c.col(idx[k]);
    pinv[k] = 1.0 / arm.precision[idx[k]];
    yo[k] = y[idx[k]];
  }

  // S = P^{-1} + c^T d c is the predictive covariance of the observed block.
  Matrix s = c.transpose() * belief.d * c;
  s.diagonal() += pinv;
  Eigen::LDLT<Matrix> ldlt(s);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw NumericError("gaussian_update: singular innovation covariance");
  }

  const Matrix dc = belief.d * c;                       // p x q
  const Matrix gain = ldlt.solve(dc.transpose()).transpose();  // d c S^{-1}

  GaussianBelief out;
  out.m = belief.m + gain * (yo - c.transpose() * belief.m);
  out.d = belief.d - gain * dc.transpose();
  symmetrize_and_clamp(out.d);
  return out;
}

DynamicsCoefficients gaussian_dynamics(const GaussianBelief& belief,
                                       const GaussianArmModel& arm) {
  arm.validate(belief.dim());
  const int p = belief.dim();
  DynamicsCoefficients dyn;
  dyn.mu = Vector::Zero(p);
  const auto idx = observed_components(arm);
  if (idx.empty() || belief.d.isZero(0.0)) {
    dyn.b = Matrix::Zero(p, p);
    dyn.sigma_sq = Matrix::Zero(p, p);
    return dyn;
  }
  const int q = static_cast<int>(idx.size());
  Matrix c(p, q);
  Vector pinv(q);
  for (int k = 0; k < q; ++k) {
    c.col(k) = arm.c.col(idx[k]);
    pinv[k] = 1.0 / arm.precision[idx[k]];
  }
  Matrix s = c.transpose() * belief.d * c;
  s.diagonal() += pinv;
  Eigen::LDLT<Matrix> ldlt(s);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw NumericError("gaussian_dynamics: singular innovation covariance");
  }
  const Matrix dc = belief.d * c;
  Matrix shrink = dc * ldlt.solve(dc.transpose());
  shrink = 0.5 * (shrink + shrink.transpose()).eval();
  dyn.b = -shrink;
  dyn.sigma_sq = shrink;
  return dyn;
}

BetaBelief beta_binomial_update(const BetaBelief& belief, int n, int y, int j) {
  if (j < 0 || j >= belief.dim()) {
    throw std::invalid_argument("beta_binomial_update: coordinate out of range");
  }
  if (n < 0 || y < 0 || y > n) {
    throw std::invalid_argument("beta_binomial_update: need 0 <= y <= n");
  }
  if (n == 0) return belief;  // no trial performed

  BetaBelief out = belief;
  const double dj = belief.d[j];
  if (dj <= kDegenerateFloor) return belief;  // pinned, no-op
  const double a = belief.m[j] / dj;
  const double b = (1.0 - belief.m[j]) / dj;
  const double a2 = a + static_cast<double>(y);
  const double b2 = b + static_cast<double>(n - y);
  out.m[j] = a2 / (a2 + b2);
  out.d[j] = std::max(1.0 / (a2 + b2), kDegenerateFloor);
  return out;
}

GammaBelief gamma_poisson_update(const GammaBelief& belief, double n, int y,
                                 int j) {
  if (j < 0 || j >= belief.dim()) {
    throw std::invalid_argument("gamma_poisson_update: coordinate out of range");
  }
  if (!(n > 0.0) || y < 0) {
    throw std::invalid_argument("gamma_poisson_update: need n > 0, y >= 0");
  }
  GammaBelief out = belief;
  const double dj = belief.d[j];
  if (dj <= kDegenerateFloor) return belief;
  const double shape = belief.m[j] / dj + static_cast<double>(y);
  const double rate = 1.0 / dj + n;
  out.m[j] = shape / rate;
  out.d[j] = std::max(1.0 / rate, kDegenerateFloor);
  return out;
}

DynamicsCoefficients beta_dynamics(const BetaBelief& belief,
                                   const Vector& trials) {
  if (trials.size() != belief.dim()) {
    throw std::invalid_argument("beta_dynamics: trials size mismatch");
  }
  if ((trials.array() < 0.0).any()) {
    throw std::invalid_argument("beta_dynamics: negative trial count");
  }
  const int p = belief.dim();
  DynamicsCoefficients dyn;
  dyn.mu = Vector::Zero(p);
  dyn.b = Matrix::Zero(p, p);
  dyn.sigma_sq = Matrix::Zero(p, p);
  for (int j = 0; j < p; ++j) {
    const double n = trials[j];
    const double dj = belief.d[j];
    if (n <= 0.0 || dj <= kDegenerateFloor) continue;
    const double shrink = dj / (1.0 + n * dj);
    dyn.b(j, j) = -n * dj * shrink;
    // Exact Var(m') from the Beta-Binomial predictive: the mean update is
    // d (y - n m)/(1 + n d) and Var(y) = n m (1-m)(1 + n d)/(1 + d).
    dyn.sigma_sq(j, j) =
        dj * shrink * n * belief.m[j] * (1.0 - belief.m[j]) / (1.0 + dj);
  }
  return dyn;
}

DynamicsCoefficients gamma_dynamics(const GammaBelief& belief,
                                    const Vector& exposures) {
  if (exposures.size() != belief.dim()) {
    throw std::invalid_argument("gamma_dynamics: exposures size mismatch");
  }
  if ((exposures.array() < 0.0).any()) {
    throw std::invalid_argument("gamma_dynamics: negative exposure");
  }
  const int p = belief.dim();
  DynamicsCoefficients dyn;
  dyn.mu = Vector::Zero(p);
  dyn.b = Matrix::Zero(p, p);
  dyn.sigma_sq = Matrix::Zero(p, p);
  for (int j = 0; j < p; ++j) {
    const double n = exposures[j];
    const double dj = belief.d[j];
    if (n <= 0.0 || dj <= kDegenerateFloor) continue;
    const double shrink = dj / (1.0 + n * dj);
    dyn.b(j, j) = -n * dj * shrink;
    // Exact Var(m') from the negative-binomial predictive, Var(y) = n m (1+n d).
    dyn.sigma_sq(j, j) = dj * shrink * n * belief.m[j];
  }
  return dyn;
}

nlohmann::json to_json(const GaussianBelief& b) {
  nlohmann::json j;
  j["family"] = "gaussian";
  j["m"] = std::vector<double>(b.m.data(), b.m.data() + b.m.size());
  std::vector<std::vector<double>> rows;
  for (int r = 0; r < b.d.rows(); ++r) {
    rows.emplace_back(b.d.row(r).begin(), b.d.row(r).end());
  }
  j["d"] = rows;
  return j;
}

nlohmann::json to_json(const BetaBelief& b) {
  nlohmann::json j;
  j["family"] = "beta";
  j["m"] = std::vector<double>(b.m.data(), b.m.data() + b.m.size());
  j["d"] = std::vector<double>(b.d.data(), b.d.data() + b.d.size());
  return j;
}

nlohmann::json to_json(const GammaBelief& b) {
  nlohmann::json j;
  j["family"] = "gamma";
  j["m"] = std::vector<double>(b.m.data(), b.m.data() + b.m.size());
  j["d"] = std::vector<double>(b.d.data(), b.d.data() + b.d.size());
  return j;
}

namespace {
Vector vector_from_json(const nlohmann::json& j) {
  auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}
}  // namespace

GaussianBelief gaussian_from_json(const nlohmann::json& j) {
  if (j.at("family") != "gaussian") {
    throw std::invalid_argument("gaussian_from_json: wrong family tag");
  }
  GaussianBelief b;
  b.m = vector_from_json(j.at("m"));
  const auto rows = j.at("d").get<std::vector<std::vector<double>>>();
  b.d.resize(static_cast<Eigen::Index>(rows.size()), b.m.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    b.d.row(static_cast<Eigen::Index>(r)) = Eigen::Map<const Vector>(
        rows[r].data(), static_cast<Eigen::Index>(rows[r].size()));
  }
  return b;
}

BetaBelief beta_from_json(const nlohmann::json& j) {
  if (j.at("family") != "beta") {
    throw std::invalid_argument("beta_from_json: wrong family tag");
  }
  return BetaBelief{vector_from_json(j.at("m")), vector_from_json(j.at("d"))};
}

GammaBelief gamma_from_json(const nlohmann::json& j) {
  if (j.at("family") != "gamma") {
    throw std::invalid_argument("gamma_from_json: wrong family tag");
  }
  return GammaBelief{vector_from_json(j.at("m")), vector_from_json(j.at("d"))};
}

}  // namespace arc
