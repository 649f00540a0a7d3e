#pragma once

#include <Eigen/Dense>

namespace arc {

/// Gauss-Hermite rule adapted to standard-normal expectations:
/// E[g(Z)] ~ sum_k weights[k] * g(nodes[k]) with Z ~ N(0,1).
struct GaussHermiteRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;  // sum to 1

  template <typename F>
  double expect(F&& g) const {
    double acc = 0.0;
    for (int k = 0; k < nodes.size(); ++k) acc += weights[k] * g(nodes[k]);
    return acc;
  }

  /// E[g(mean + sd * Z)].
  template <typename F>
  double expect_affine(double mean, double sd, F&& g) const {
    double acc = 0.0;
    for (int k = 0; k < nodes.size(); ++k) {
      acc += weights[k] * g(mean + sd * nodes[k]);
    }
    return acc;
  }
};

/// Nodes/weights by Golub-Welsch on the probabilists' Hermite recurrence.
/// Cached per n; thread-safe after first use of a given n.
const GaussHermiteRule& gauss_hermite(int n);

}  // namespace arc
