#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ccmaae/types.hpp"

namespace ccmaae {

/// splitmix64 step; used to derive independent sub-stream seeds from a
/// master seed without correlating the streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic random source. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard, and all transforms below are explicit,
/// so identical seeds give identical draws on every platform. Gaussians use
/// the Box-Muller transform: exactly two uniforms per pair, no rejection, so
/// stream consumption never depends on the values drawn.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  Vector gaussian_vector(Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = gaussian();
    return v;
  }

  /// Filled in row-major order: row i is drawn before row i+1.
  Matrix gaussian_matrix(Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) m(i, j) = gaussian();
    return m;
  }

  double uniform_range(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform in {0, ..., n-1}. Scaled-double construction: the O(n * 2^-53)
  /// bias is irrelevant here and consumption stays one word per index.
  Index uniform_index(Index n) {
    const Index i = static_cast<Index>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  template <typename Container>
  void shuffle(Container& c) {
    for (Index i = static_cast<Index>(c.size()) - 1; i > 0; --i) {
      const Index j = uniform_index(i + 1);
      std::swap(c[i], c[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ccmaae
