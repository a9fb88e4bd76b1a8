#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "elastcert/fem.hpp"

namespace elastcert {

namespace detail {

/// In-place dense Cholesky (lower triangle). Returns false when the matrix is
/// not positive definite, which the Newton loop uses as its fallback signal.
inline bool cholesky_factor(std::vector<double>& a, long n) {
  for (long j = 0; j < n; ++j) {
    double d = a[static_cast<std::size_t>(j * n + j)];
    for (long k = 0; k < j; ++k) {
      const double l = a[static_cast<std::size_t>(j * n + k)];
      d -= l * l;
    }
    if (!(d > 0.0)) return false;
    const double dj = std::sqrt(d);
    a[static_cast<std::size_t>(j * n + j)] = dj;
    for (long i = j + 1; i < n; ++i) {
      double s = a[static_cast<std::size_t>(i * n + j)];
      for (long k = 0; k < j; ++k)
        s -= a[static_cast<std::size_t>(i * n + k)] * a[static_cast<std::size_t>(j * n + k)];
      a[static_cast<std::size_t>(i * n + j)] = s / dj;
    }
  }
  return true;
}

inline void cholesky_solve(const std::vector<double>& l, long n, std::vector<double>& b) {
  for (long i = 0; i < n; ++i) {
    double s = b[static_cast<std::size_t>(i)];
    for (long k = 0; k < i; ++k) s -= l[static_cast<std::size_t>(i * n + k)] * b[static_cast<std::size_t>(k)];
    b[static_cast<std::size_t>(i)] = s / l[static_cast<std::size_t>(i * n + i)];
  }
  for (long i = n - 1; i >= 0; --i) {
    double s = b[static_cast<std::size_t>(i)];
    for (long k = i + 1; k < n; ++k) s -= l[static_cast<std::size_t>(k * n + i)] * b[static_cast<std::size_t>(k)];
    b[static_cast<std::size_t>(i)] = s / l[static_cast<std::size_t>(i * n + i)];
  }
}

}  // namespace detail

/// Dirichlet data on the tagged boundary nodes: either an affine map x -> Bx+c
/// or an explicit per-node table (only tagged entries are read).
struct DirichletData {
  std::optional<std::pair<Mat3, Vec3>> affine;
  std::optional<std::vector<Vec3>> table;

  static DirichletData affine_map(const Mat3& b, const Vec3& c = Vec3::zero()) {
    DirichletData d;
    d.affine = {b, c};
    return d;
  }
  static DirichletData node_table(std::vector<Vec3> values) {
    DirichletData d;
    d.table = std::move(values);
    return d;
  }
};

struct SolveSettings {
  double tolerance = 1e-10;   // residual target: tol * (1 + initial residual)
  int max_iterations = 30;
  double det_floor = 1e-6;    // admissibility floor enforced during line search
  int max_halvings = 50;
};

struct SolveResult {
  DeformationField field;
  bool converged = false;
  double residual_norm = 0.0;
  double initial_residual = 0.0;
  int iterations = 0;
  double energy = 0.0;
  bool used_gradient_fallback = false;
};

namespace detail {

/// Least-squares affine fit x -> Bx + c of the boundary values, used to extend
/// per-node Dirichlet tables into the interior as an initial guess.
inline std::pair<Mat3, Vec3> affine_fit(const HexMesh& mesh, const std::vector<Vec3>& values) {
  // normal equations over the 4-vector (x, 1)
  double a[4][4] = {};
  double rhs[4][3] = {};
  for (long n = 0; n < mesh.node_count(); ++n) {
    if (!mesh.is_dirichlet(n)) continue;
    const Vec3 x = mesh.node_position(n);
    const double xe[4] = {x[0], x[1], x[2], 1.0};
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) a[i][j] += xe[i] * xe[j];
      for (int k = 0; k < 3; ++k) rhs[i][k] += xe[i] * values[static_cast<std::size_t>(n)][k];
    }
  }
  // small Gaussian elimination with partial pivoting
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    std::swap(rhs[col], rhs[piv]);
    for (int r = 0; r < 4; ++r) {
      if (r == col || a[col][col] == 0.0) continue;
      const double fac = a[r][col] / a[col][col];
      for (int cc = 0; cc < 4; ++cc) a[r][cc] -= fac * a[col][cc];
      for (int k = 0; k < 3; ++k) rhs[r][k] -= fac * rhs[col][k];
    }
  }
  Mat3 b;
  Vec3 c;
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < 3; ++j) b(k, j) = rhs[j][k] / a[j][j];
    c[k] = rhs[3][k] / a[3][3];
  }
  return {b, c};
}

}  // namespace detail

/// Affine extension of the boundary data; the Newton iteration starts here.
/// Throws InadmissibleBoundary when that extension already violates det F > 0.
inline DeformationField initial_field(const HexMesh& mesh, const DirichletData& data,
                                      double det_floor = 1e-6) {
  DeformationField field;
  if (data.affine) {
    field = DeformationField::affine(mesh, data.affine->first, data.affine->second);
  } else if (data.table) {
    const auto [b, c] = detail::affine_fit(mesh, *data.table);
    field = DeformationField::affine(mesh, b, c);
    for (long n = 0; n < mesh.node_count(); ++n)
      if (mesh.is_dirichlet(n))
        field.values[static_cast<std::size_t>(n)] = (*data.table)[static_cast<std::size_t>(n)];
  } else {
    throw ConfigError("dirichlet data missing: provide an affine map or a node table");
  }
  const AdmissibilityScan scan = scan_admissibility(field);
  if (scan.min_det <= det_floor)
    throw InadmissibleBoundary("affine extension of boundary data violates det F > 0");
  return field;
}

/// Newton iteration on the weak Euler-Lagrange system with backtracking line
/// search on the energy. A non-positive-definite tangent falls back to a
/// gradient step for that iteration; steps that violate det F > det_floor at
/// any quadrature point are halved away.
inline SolveResult solve(const HexMesh& mesh, const EnergyModel& model,
                         const DirichletData& data, const SolveSettings& settings = {}) {
  SolveResult result;
  result.field = initial_field(mesh, data, settings.det_floor);
  const DofMap dofs(mesh);
  const long n = dofs.dof_count();

  std::vector<Vec3> residual = assemble_residual(result.field, model);
  result.initial_residual = residual_norm(residual);
  result.residual_norm = result.initial_residual;
  const double target = settings.tolerance * (1.0 + result.initial_residual);
  double energy = assemble_energy(result.field, model);

  auto gather = [&](const std::vector<Vec3>& r) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (long node = 0; node < mesh.node_count(); ++node) {
      const long fn = dofs.free_of_node[static_cast<std::size_t>(node)];
      if (fn < 0) continue;
      for (int k = 0; k < 3; ++k)
        v[static_cast<std::size_t>(3 * fn + k)] = r[static_cast<std::size_t>(node)][k];
    }
    return v;
  };

  for (int it = 0; it < settings.max_iterations; ++it) {
    if (result.residual_norm <= target) {
      result.converged = true;
      break;
    }
    std::vector<double> rhs = gather(residual);

    std::vector<double> direction;
    std::vector<double> k = assemble_hessian(result.field, model, dofs);
    if (detail::cholesky_factor(k, n)) {
      direction = rhs;
      detail::cholesky_solve(k, n, direction);
      for (double& d : direction) d = -d;
    }
    double descent = 0.0;
    if (!direction.empty()) {
      for (long i = 0; i < n; ++i)
        descent += rhs[static_cast<std::size_t>(i)] * direction[static_cast<std::size_t>(i)];
    }
    if (direction.empty() || descent >= 0.0) {
      // steepest descent on the energy
      result.used_gradient_fallback = true;
      direction.assign(static_cast<std::size_t>(n), 0.0);
      descent = 0.0;
      for (long i = 0; i < n; ++i) {
        direction[static_cast<std::size_t>(i)] = -rhs[static_cast<std::size_t>(i)];
        descent -= rhs[static_cast<std::size_t>(i)] * rhs[static_cast<std::size_t>(i)];
      }
    }

    double alpha = 1.0;
    bool accepted = false;
    DeformationField trial = result.field;
    for (int halvings = 0; halvings <= settings.max_halvings; ++halvings) {
      for (long node = 0; node < mesh.node_count(); ++node) {
        const long fn = dofs.free_of_node[static_cast<std::size_t>(node)];
        if (fn < 0) continue;
        for (int kk = 0; kk < 3; ++kk)
          trial.values[static_cast<std::size_t>(node)][kk] =
              result.field.values[static_cast<std::size_t>(node)][kk] +
              alpha * direction[static_cast<std::size_t>(3 * fn + kk)];
      }
      if (scan_admissibility(trial).min_det > settings.det_floor) {
        const double trial_energy = assemble_energy(trial, model);
        // the epsilon term keeps steps acceptable once the attainable decrease
        // drops below the floating-point resolution of the energy
        const double slack =
            4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(energy));
        if (trial_energy <= energy + 1e-4 * alpha * descent + slack) {
          result.field = trial;
          energy = trial_energy;
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    result.iterations = it + 1;
    if (!accepted) break;  // line search exhausted; report best iterate

    residual = assemble_residual(result.field, model);
    result.residual_norm = residual_norm(residual);
  }
  if (result.residual_norm <= target) result.converged = true;
  result.energy = assemble_energy(result.field, model);
  return result;
}

}  // namespace elastcert
