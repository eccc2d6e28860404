#pragma once

#include <cstdint>
#include <random>

namespace intan {

/// Versioned pseudo-random stream: mt19937_64, uniforms from the top 53 bits, normals by
/// Box-Muller with the second variate cached. Output for a seed never changes within a version.
class Rng {
 public:
  static constexpr const char* kName = "mt64-boxmuller-v1";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace intan
