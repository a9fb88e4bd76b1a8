#pragma once

#include <cmath>
#include <cstdint>

#include "elastcert/tensor.hpp"

namespace elastcert {

/// Deterministic pseudo-random stream (splitmix64). The same seed always yields
/// the same sequence on every platform; scans derive one independent stream per
/// (seed, sample index) so any partitioning across workers reproduces bit-identical
/// reports.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng for_index(std::uint64_t seed, std::uint64_t index) {
    Rng r(seed + 0x9e3779b97f4a7c15ull * (index + 1));
    r.next();
    return r;
  }

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Gaussian-like variate: sum of 12 uniforms minus 6 (mean 0, variance 1).
  /// Avoids transcendental functions so streams stay bit-reproducible.
  double gaussian_like() {
    double s = 0.0;
    for (int i = 0; i < 12; ++i) s += uniform();
    return s - 6.0;
  }

private:
  std::uint64_t state_;
};

/// Strictly positive definite sample A^T A + floor * I with A entries uniform in
/// [-spread, spread]. The floor keeps the spectrum away from zero while A^T A
/// still covers ill-conditioned shapes.
inline SymMat3 sample_psym(Rng& rng, double spread, double floor = 1e-3) {
  Mat3 a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = rng.uniform(-spread, spread);
  SymMat3 c;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a(k, i) * a(k, j);
      c.set(i, j, s);
    }
  }
  c.a[0] += floor;
  c.a[1] += floor;
  c.a[2] += floor;
  return c;
}

inline SymMat3 sample_psym(std::uint64_t seed, double spread, double floor = 1e-3) {
  Rng rng(seed);
  return sample_psym(rng, spread, floor);
}

/// Rotation matrix from a random unit quaternion.
inline Mat3 sample_rotation(Rng& rng) {
  double q[4];
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (double& qi : q) {
      qi = rng.gaussian_like();
      n2 += qi * qi;
    }
  } while (n2 < 1e-8);
  const double inv = 1.0 / std::sqrt(n2);
  const double w = q[0] * inv, x = q[1] * inv, y = q[2] * inv, z = q[3] * inv;
  Mat3 r;
  r(0, 0) = 1 - 2 * (y * y + z * z);
  r(0, 1) = 2 * (x * y - w * z);
  r(0, 2) = 2 * (x * z + w * y);
  r(1, 0) = 2 * (x * y + w * z);
  r(1, 1) = 1 - 2 * (x * x + z * z);
  r(1, 2) = 2 * (y * z - w * x);
  r(2, 0) = 2 * (x * z - w * y);
  r(2, 1) = 2 * (y * z + w * x);
  r(2, 2) = 1 - 2 * (x * x + y * y);
  return r;
}

/// Orientation-preserving deformation gradient R1 diag(s) R2^T with singular
/// values uniform in [sv_lo, sv_hi]; det F > 0 by construction.
inline Mat3 sample_deformation_gradient(Rng& rng, double sv_lo = 0.2, double sv_hi = 2.0) {
  const Mat3 r1 = sample_rotation(rng);
  const Mat3 r2 = sample_rotation(rng);
  const Mat3 s = Mat3::diag(rng.uniform(sv_lo, sv_hi), rng.uniform(sv_lo, sv_hi),
                            rng.uniform(sv_lo, sv_hi));
  return r1 * s * transpose(r2);
}

/// k-th of n points of the Fibonacci spiral on the unit sphere.
inline Vec3 fibonacci_sphere_point(int k, int n) {
  const double golden = 2.399963229728653;  // 2*pi*(2 - phi)
  const double z = 1.0 - 2.0 * (k + 0.5) / n;
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = golden * k;
  return {{r * std::cos(phi), r * std::sin(phi), z}};
}

}  // namespace elastcert
