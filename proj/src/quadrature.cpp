#include "arc/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace arc {

namespace {

GaussHermiteRule build_rule(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: need n >= 1");
  // Jacobi matrix of the probabilists' Hermite polynomials: zero diagonal,
  // off-diagonal sqrt(k). Eigenvalues are the nodes; weights are the squared
  // first components of the eigenvectors.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double off = std::sqrt(static_cast<double>(k));
    jac(k, k - 1) = off;
    jac(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("gauss_hermite: eigen decomposition failed");
  }
  GaussHermiteRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights = es.eigenvectors().row(0).transpose().array().square();
  rule.weights /= rule.weights.sum();
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(int n) {
  static std::mutex mu;
  static std::map<int, GaussHermiteRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

}  // namespace arc
