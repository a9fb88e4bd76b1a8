#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "elastcert/errors.hpp"
#include "elastcert/tensor.hpp"

namespace elastcert {

/// Eigen-decomposition of a small symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues come back ascending with matching orthonormal eigenvector columns.
template <int N>
struct EigResult {
  std::array<double, N> values{};
  std::array<double, static_cast<std::size_t>(N) * N> vectors{};  // row-major, columns are eigenvectors

  double vec(int i, int j) const { return vectors[static_cast<std::size_t>(N * i + j)]; }
};

namespace detail {

template <int N>
inline double offdiag_norm(const std::array<double, static_cast<std::size_t>(N) * N>& a) {
  double s = 0.0;
  for (int p = 0; p < N; ++p)
    for (int q = p + 1; q < N; ++q) s += a[static_cast<std::size_t>(N * p + q)] * a[static_cast<std::size_t>(N * p + q)];
  return std::sqrt(2.0 * s);
}

}  // namespace detail

template <int N>
inline EigResult<N> jacobi_eigen(std::array<double, static_cast<std::size_t>(N) * N> a,
                                 int max_sweeps = 50) {
  auto at = [&a](int i, int j) -> double& { return a[static_cast<std::size_t>(N * i + j)]; };
  std::array<double, static_cast<std::size_t>(N) * N> v{};
  auto vt = [&v](int i, int j) -> double& { return v[static_cast<std::size_t>(N * i + j)]; };
  for (int i = 0; i < N; ++i) vt(i, i) = 1.0;

  double scale = 0.0;
  for (double x : a) scale += x * x;
  scale = std::sqrt(scale);
  const double stop = 1e-15 * (1.0 + scale);

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    if (detail::offdiag_norm<N>(a) <= stop) break;
    for (int p = 0; p < N; ++p) {
      for (int q = p + 1; q < N; ++q) {
        const double apq = at(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t =
            (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // A <- J^T A J with the Givens rotation J in the (p,q) plane.
        for (int k = 0; k < N; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < N; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < N; ++k) {
          const double vkp = vt(k, p), vkq = vt(k, q);
          vt(k, p) = c * vkp - s * vkq;
          vt(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  // NaN-safe: a non-finite off-diagonal norm must also land here
  if (sweep >= max_sweeps && !(detail::offdiag_norm<N>(a) <= stop)) {
    throw NoConvergence("jacobi eigen iteration exceeded sweep cap");
  }

  EigResult<N> res;
  std::array<int, N> order{};
  for (int i = 0; i < N; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return a[static_cast<std::size_t>(N * i + i)] < a[static_cast<std::size_t>(N * j + j)]; });
  for (int i = 0; i < N; ++i) {
    const int src = order[static_cast<std::size_t>(i)];
    res.values[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(N * src + src)];
    for (int k = 0; k < N; ++k)
      res.vectors[static_cast<std::size_t>(N * k + i)] = v[static_cast<std::size_t>(N * k + src)];
  }
  return res;
}

/// Spectral decomposition of a symmetric 3x3 matrix: ascending eigenvalues and
/// orthonormal eigenvector columns.
struct SpectralDecomp {
  std::array<double, 3> eigenvalues{};
  Mat3 eigenvectors;

  Vec3 eigenvector(int k) const {
    return {{eigenvectors(0, k), eigenvectors(1, k), eigenvectors(2, k)}};
  }
};

inline SpectralDecomp spectral(const SymMat3& a) {
  std::array<double, 9> full{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) full[static_cast<std::size_t>(3 * i + j)] = a(i, j);
  const EigResult<3> e = jacobi_eigen<3>(full);
  SpectralDecomp d;
  d.eigenvalues = e.values;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) d.eigenvectors(i, j) = e.vec(i, j);
  return d;
}

struct PdResult {
  bool positive_definite = false;
  double lambda_min = 0.0;
};

/// Strict positive definiteness with a scale-free threshold:
/// true iff lambda_min > tol * (1 + ||A||_F).
inline PdResult is_positive_definite(const SymMat3& a, double tol) {
  const SpectralDecomp d = spectral(a);
  PdResult r;
  r.lambda_min = d.eigenvalues[0];
  r.positive_definite = r.lambda_min > tol * (1.0 + frobenius_norm(a));
  return r;
}

/// Ascending eigenvalues of a symmetric 6x6 Kelvin operator. The input is
/// averaged with its transpose first, so last-ulp asymmetry from assembled
/// operators cannot stall the rotations.
inline EigResult<6> eigen6(const Mat6& a) {
  std::array<double, 36> sym = a.m;
  for (int i = 0; i < 6; ++i) {
    for (int j = i + 1; j < 6; ++j) {
      const double avg = 0.5 * (sym[static_cast<std::size_t>(6 * i + j)] +
                                sym[static_cast<std::size_t>(6 * j + i)]);
      sym[static_cast<std::size_t>(6 * i + j)] = avg;
      sym[static_cast<std::size_t>(6 * j + i)] = avg;
    }
  }
  return jacobi_eigen<6>(sym);
}

}  // namespace elastcert
