#pragma once

#include <array>
#include <cmath>

#include "elastcert/errors.hpp"

namespace elastcert {

struct Vec3 {
  std::array<double, 3> v{};

  constexpr double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
  constexpr double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }

  static constexpr Vec3 zero() { return {}; }
  static constexpr Vec3 unit(int i) {
    Vec3 e;
    e[i] = 1.0;
    return e;
  }
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {{a[0] + b[0], a[1] + b[1], a[2] + b[2]}};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {{a[0] - b[0], a[1] - b[1], a[2] - b[2]}};
}
inline Vec3 operator*(double s, const Vec3& a) { return {{s * a[0], s * a[1], s * a[2]}}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Dense 3x3 matrix, row-major. Holds deformation gradients, rotations and
/// generic increments; symmetric quantities live in SymMat3 instead.
struct Mat3 {
  std::array<double, 9> m{};

  constexpr double& operator()(int i, int j) { return m[static_cast<std::size_t>(3 * i + j)]; }
  constexpr double operator()(int i, int j) const {
    return m[static_cast<std::size_t>(3 * i + j)];
  }

  static constexpr Mat3 zero() { return {}; }
  static constexpr Mat3 identity() {
    Mat3 a;
    a(0, 0) = a(1, 1) = a(2, 2) = 1.0;
    return a;
  }
  static constexpr Mat3 diag(double d0, double d1, double d2) {
    Mat3 a;
    a(0, 0) = d0;
    a(1, 1) = d1;
    a(2, 2) = d2;
    return a;
  }
};

inline Mat3 operator+(const Mat3& a, const Mat3& b) {
  Mat3 c;
  for (int i = 0; i < 9; ++i) c.m[i] = a.m[i] + b.m[i];
  return c;
}
inline Mat3 operator-(const Mat3& a, const Mat3& b) {
  Mat3 c;
  for (int i = 0; i < 9; ++i) c.m[i] = a.m[i] - b.m[i];
  return c;
}
inline Mat3 operator*(double s, const Mat3& a) {
  Mat3 c;
  for (int i = 0; i < 9; ++i) c.m[i] = s * a.m[i];
  return c;
}
inline Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      c(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j);
  return c;
}
inline Vec3 operator*(const Mat3& a, const Vec3& x) {
  Vec3 y;
  for (int i = 0; i < 3; ++i) y[i] = a(i, 0) * x[0] + a(i, 1) * x[1] + a(i, 2) * x[2];
  return y;
}

inline Mat3 transpose(const Mat3& a) {
  Mat3 t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t(i, j) = a(j, i);
  return t;
}

inline Mat3 outer(const Vec3& a, const Vec3& b) {
  Mat3 c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) c(i, j) = a[i] * b[j];
  return c;
}

/// Determinant by cofactor expansion (exact formula, no factorization).
inline double det(const Mat3& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
         a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

inline double trace(const Mat3& a) { return a(0, 0) + a(1, 1) + a(2, 2); }

/// Canonical inner product <X,Y> = tr(Y^T X).
inline double inner(const Mat3& x, const Mat3& y) {
  double s = 0.0;
  for (int i = 0; i < 9; ++i) s += x.m[i] * y.m[i];
  return s;
}

inline double frobenius_norm(const Mat3& a) { return std::sqrt(inner(a, a)); }

/// Inverse via the adjugate. Caller guarantees det != 0.
inline Mat3 inverse(const Mat3& a) {
  const double d = det(a);
  Mat3 inv;
  inv(0, 0) = (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) / d;
  inv(0, 1) = (a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2)) / d;
  inv(0, 2) = (a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1)) / d;
  inv(1, 0) = (a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2)) / d;
  inv(1, 1) = (a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0)) / d;
  inv(1, 2) = (a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2)) / d;
  inv(2, 0) = (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0)) / d;
  inv(2, 1) = (a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1)) / d;
  inv(2, 2) = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) / d;
  return inv;
}

/// Symmetric 3x3 matrix stored by its six unique entries
/// (a11, a22, a33, a23, a13, a12) -- symmetric by construction.
struct SymMat3 {
  std::array<double, 6> a{};

  double operator()(int i, int j) const { return a[static_cast<std::size_t>(flat(i, j))]; }
  void set(int i, int j, double value) { a[static_cast<std::size_t>(flat(i, j))] = value; }

  static constexpr int flat(int i, int j) {
    if (i == j) return i;
    const int s = i + j;  // 0+1->5, 0+2->4, 1+2->3
    return s == 3 ? 3 : (s == 2 ? 4 : 5);
  }

  static constexpr SymMat3 zero() { return {}; }
  static constexpr SymMat3 identity() { return {{1.0, 1.0, 1.0, 0.0, 0.0, 0.0}}; }
  static constexpr SymMat3 diag(double d0, double d1, double d2) {
    return {{d0, d1, d2, 0.0, 0.0, 0.0}};
  }

  Mat3 to_mat() const {
    Mat3 full;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) full(i, j) = (*this)(i, j);
    return full;
  }

  /// Symmetric part of a general matrix, averaged entry by entry.
  static SymMat3 symmetrized(const Mat3& g) {
    SymMat3 s;
    s.a = {g(0, 0), g(1, 1), g(2, 2), 0.5 * (g(1, 2) + g(2, 1)), 0.5 * (g(0, 2) + g(2, 0)),
           0.5 * (g(0, 1) + g(1, 0))};
    return s;
  }
};

inline SymMat3 operator+(const SymMat3& x, const SymMat3& y) {
  SymMat3 z;
  for (int i = 0; i < 6; ++i) z.a[i] = x.a[i] + y.a[i];
  return z;
}
inline SymMat3 operator-(const SymMat3& x, const SymMat3& y) {
  SymMat3 z;
  for (int i = 0; i < 6; ++i) z.a[i] = x.a[i] - y.a[i];
  return z;
}
inline SymMat3 operator*(double s, const SymMat3& x) {
  SymMat3 z;
  for (int i = 0; i < 6; ++i) z.a[i] = s * x.a[i];
  return z;
}

inline double trace(const SymMat3& x) { return x.a[0] + x.a[1] + x.a[2]; }

inline double det(const SymMat3& x) { return det(x.to_mat()); }

/// Frobenius inner product; off-diagonal entries count twice.
inline double inner(const SymMat3& x, const SymMat3& y) {
  return x.a[0] * y.a[0] + x.a[1] * y.a[1] + x.a[2] * y.a[2] +
         2.0 * (x.a[3] * y.a[3] + x.a[4] * y.a[4] + x.a[5] * y.a[5]);
}

inline double frobenius_norm(const SymMat3& x) { return std::sqrt(inner(x, x)); }

/// Full (generally non-symmetric) product of two symmetric matrices.
inline Mat3 operator*(const SymMat3& x, const SymMat3& y) { return x.to_mat() * y.to_mat(); }

inline Vec3 operator*(const SymMat3& x, const Vec3& u) { return x.to_mat() * u; }

/// Inverse of a symmetric matrix, returned symmetric. Caller guarantees det != 0.
inline SymMat3 inverse(const SymMat3& x) {
  return SymMat3::symmetrized(inverse(x.to_mat()));
}

/// Congruence P X P for symmetric P, X; the exact result is symmetric, so the
/// floating-point product is symmetrized entry by entry.
inline SymMat3 congruence(const SymMat3& p, const SymMat3& x) {
  const Mat3 pm = p.to_mat();
  return SymMat3::symmetrized(pm * x.to_mat() * pm);
}

/// A - (tr A / 3) I.
inline SymMat3 deviator(const SymMat3& x) {
  const double t = trace(x) / 3.0;
  SymMat3 d = x;
  d.a[0] -= t;
  d.a[1] -= t;
  d.a[2] -= t;
  return d;
}

/// C = F^T F. Throws SingularGradient when |det F| <= 1e-14 * ||F||^3.
inline SymMat3 right_cauchy_green(const Mat3& f) {
  const double nf = frobenius_norm(f);
  if (std::abs(det(f)) <= 1e-14 * nf * nf * nf) {
    throw SingularGradient("deformation gradient numerically singular");
  }
  SymMat3 c;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += f(k, i) * f(k, j);
      c.set(i, j, s);
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Kelvin 6-vector coordinates: (a11, a22, a33, sqrt2*a23, sqrt2*a13, sqrt2*a12).
// The sqrt(2) scaling makes sym<->kelvin a linear isometry, so eigenvalues of a
// 6x6 Kelvin matrix coincide with the spectrum of the quadratic form it encodes.
// ---------------------------------------------------------------------------

inline constexpr double kSqrt2 = 1.4142135623730950488;

struct KelvinVec6 {
  std::array<double, 6> c{};

  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
};

inline double dot(const KelvinVec6& x, const KelvinVec6& y) {
  double s = 0.0;
  for (int i = 0; i < 6; ++i) s += x[i] * y[i];
  return s;
}
inline double norm(const KelvinVec6& x) { return std::sqrt(dot(x, x)); }

inline KelvinVec6 sym_to_kelvin(const SymMat3& x) {
  return {{x.a[0], x.a[1], x.a[2], kSqrt2 * x.a[3], kSqrt2 * x.a[4], kSqrt2 * x.a[5]}};
}

inline SymMat3 kelvin_to_sym(const KelvinVec6& v) {
  return {{v[0], v[1], v[2], v[3] / kSqrt2, v[4] / kSqrt2, v[5] / kSqrt2}};
}

/// k-th Kelvin basis element as a symmetric matrix (unit Frobenius norm).
inline SymMat3 kelvin_basis(int k) {
  KelvinVec6 e;
  e[k] = 1.0;
  return kelvin_to_sym(e);
}

/// Dense symmetric 6x6 operator in Kelvin coordinates.
struct Mat6 {
  std::array<double, 36> m{};

  double& operator()(int i, int j) { return m[static_cast<std::size_t>(6 * i + j)]; }
  double operator()(int i, int j) const { return m[static_cast<std::size_t>(6 * i + j)]; }

  static Mat6 identity() {
    Mat6 a;
    for (int i = 0; i < 6; ++i) a(i, i) = 1.0;
    return a;
  }
};

inline double frobenius_norm(const Mat6& a) {
  double s = 0.0;
  for (double x : a.m) s += x * x;
  return std::sqrt(s);
}

inline KelvinVec6 operator*(const Mat6& a, const KelvinVec6& x) {
  KelvinVec6 y;
  for (int i = 0; i < 6; ++i) {
    double s = 0.0;
    for (int j = 0; j < 6; ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

}  // namespace elastcert
