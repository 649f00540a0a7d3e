#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace arc {

/// Smooth-max approximator family. Shannon realises
///   S(a)     = ln sum_i exp(a_i),
///   nu(a)    = softmax(a),
///   eta_ij   = nu_i (I(i=j) - nu_j),
/// and any future variant must provide the same (value, gradient, Hessian)
/// triple with nu a simplex vector and eta symmetric with zero row sums.
enum class SmoothMaxKind { Shannon };

namespace detail {

template <typename Derived>
void check_smax_args(const Eigen::MatrixBase<Derived>& a, double lambda) {
  if (a.size() < 1) throw std::invalid_argument("smooth max: empty input");
  if (!(lambda > 0.0)) throw std::invalid_argument("smooth max: lambda must be > 0");
  if (!a.allFinite()) throw std::invalid_argument("smooth max: non-finite input");
}

}  // namespace detail

/// lambda * S(a / lambda). For Shannon this is the scaled log-sum-exp,
/// evaluated with a max shift so small lambda with large scores cannot
/// overflow.
template <typename Derived>
typename Derived::Scalar smax(const Eigen::MatrixBase<Derived>& a, double lambda,
                              SmoothMaxKind kind = SmoothMaxKind::Shannon) {
  detail::check_smax_args(a, lambda);
  (void)kind;  // single variant
  using Scalar = typename Derived::Scalar;
  const Scalar mx = a.maxCoeff();
  const Scalar s = ((a.array() - mx) / lambda).exp().sum();
  return mx + lambda * std::log(s);
}

/// Gradient of smax at a (the soft argmax). Softmax of a / lambda;
/// translation invariant by construction.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> nu(
    const Eigen::MatrixBase<Derived>& a, double lambda,
    SmoothMaxKind kind = SmoothMaxKind::Shannon) {
  detail::check_smax_args(a, lambda);
  (void)kind;
  using Vec = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>;
  const auto mx = a.maxCoeff();
  Vec w = ((a.array() - mx) / lambda).exp().matrix();
  w /= w.sum();
  return w;
}

/// eta(a) = lambda * d^2_a smax(a): symmetric PSD with zero row sums.
/// Shannon closed form eta_ij = nu_i (I(i=j) - nu_j).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> eta(
    const Eigen::MatrixBase<Derived>& a, double lambda,
    SmoothMaxKind kind = SmoothMaxKind::Shannon) {
  using Mat = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const auto v = nu(a, lambda, kind);
  Mat e = -v * v.transpose();
  e.diagonal() += v;
  return e;
}

/// Bundled evaluation (value, gradient, Hessian scale) at one point.
struct SmoothMaxEval {
  double value = 0.0;
  Eigen::VectorXd nu;
  Eigen::MatrixXd eta;
  double lambda = 1.0;
};

inline SmoothMaxEval smooth_max_eval(const Eigen::VectorXd& a, double lambda,
                                     SmoothMaxKind kind = SmoothMaxKind::Shannon) {
  SmoothMaxEval out;
  out.value = smax(a, lambda, kind);
  out.nu = nu(a, lambda, kind);
  out.eta = -out.nu * out.nu.transpose();
  out.eta.diagonal() += out.nu;
  out.lambda = lambda;
  return out;
}

}  // namespace arc
