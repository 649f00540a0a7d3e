#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace arc {

/// Quantile of the standard normal distribution (Wichura's AS241, double
/// precision). Returns -inf / +inf at p = 0 / 1.
double normal_quantile(double p);

/// Type-7 (linear interpolation) sample quantile; `sorted` must be ascending.
double sorted_quantile(const std::vector<double>& sorted, double q);

/// FNV-1a 64-bit content hash, used to fingerprint emitted artifacts.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace arc
