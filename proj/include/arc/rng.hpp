#pragma once

#include <cstdint>
#include <random>

namespace arc {

/// splitmix64 mixing step; used to derive well-separated stream seeds
/// from (base_seed, replication, policy, stream-kind) tuples.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b));
}

/// Stream kinds, kept distinct so decision noise (zeta) and observation
/// noise (xi) never share a generator.
enum class StreamKind : std::uint64_t {
  Theta = 1,        // ground-truth parameter draw
  Observation = 2,  // environment outcome noise (xi)
  Decision = 3,     // policy randomisation (zeta)
};

/// A self-contained RNG stream. Episodes own one stream per kind; streams
/// derived from the same (seed, ids) are identical, which is what makes
/// paired replications and bit-exact reruns possible.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  static RngStream derive(std::uint64_t base_seed, std::uint64_t replication,
                          std::uint64_t policy_id, StreamKind kind) {
    std::uint64_t s = mix_seed(base_seed, replication);
    s = mix_seed(s, 0x5851F42D4C957F2DULL + policy_id);
    s = mix_seed(s, static_cast<std::uint64_t>(kind));
    return RngStream(s);
  }

  /// Uniform draw on [0, 1).
  double uniform() {
    return std::generate_canonical<double, 53>(gen_);
  }

  double normal() { return normal_(gen_); }

  int binomial(int n, double p) {
    std::binomial_distribution<int> dist(n, p);
    return dist(gen_);
  }

  int poisson(double mean) {
    std::poisson_distribution<int> dist(mean);
    return dist(gen_);
  }

  double gamma(double shape, double scale) {
    std::gamma_distribution<double> dist(shape, scale);
    return dist(gen_);
  }

  double beta(double a, double b) {
    // Beta via two gamma draws.
    double x = gamma(a, 1.0);
    double y = gamma(b, 1.0);
    return x / (x + y);
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace arc
