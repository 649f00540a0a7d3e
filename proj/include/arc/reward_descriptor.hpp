#pragma once

#include <functional>
#include <stdexcept>

namespace arc {

/// Per-arm reward map applied to the scalar reward component of the arm's
/// observation. Identity and affine rewards have closed-form posterior
/// expectations; a general smooth map must supply its first two derivatives
/// so the premium tensors can be formed.
struct RewardDescriptor {
  enum class Kind { Identity, Affine, Generic };

  Kind kind = Kind::Identity;
  double u = 1.0;  // affine slope
  double v = 0.0;  // affine offset
  std::function<double(double)> r;
  std::function<double(double)> r_prime;
  std::function<double(double)> r_second;

  static RewardDescriptor identity() { return RewardDescriptor{}; }

  static RewardDescriptor affine(double slope, double offset) {
    RewardDescriptor d;
    d.kind = Kind::Affine;
    d.u = slope;
    d.v = offset;
    return d;
  }

  static RewardDescriptor generic(std::function<double(double)> r,
                                  std::function<double(double)> r_prime,
                                  std::function<double(double)> r_second) {
    if (!r || !r_prime || !r_second) {
      throw std::invalid_argument(
          "RewardDescriptor: generic reward requires r, r', r''");
    }
    RewardDescriptor d;
    d.kind = Kind::Generic;
    d.r = std::move(r);
    d.r_prime = std::move(r_prime);
    d.r_second = std::move(r_second);
    return d;
  }

  double eval(double y) const {
    switch (kind) {
      case Kind::Identity: return y;
      case Kind::Affine: return u * y + v;
      case Kind::Generic: return r(y);
    }
    return y;
  }
};

}  // namespace arc
