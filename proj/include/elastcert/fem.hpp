#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "elastcert/energy.hpp"
#include "elastcert/errors.hpp"
#include "elastcert/tensor.hpp"

namespace elastcert {

/// Structured axis-aligned hexahedral mesh over a box, trilinear elements,
/// nodes ordered lexicographically (x fastest). Dirichlet nodes carry a tag;
/// the factory tags the whole boundary.
struct HexMesh {
  std::array<int, 3> dims{1, 1, 1};  // cells per axis
  Vec3 lo, hi;
  std::vector<std::uint8_t> dirichlet;

  static HexMesh structured(std::array<int, 3> dims, const Vec3& lo, const Vec3& hi) {
    HexMesh m;
    m.dims = dims;
    m.lo = lo;
    m.hi = hi;
    m.dirichlet.assign(static_cast<std::size_t>(m.node_count()), 0);
    for (int k = 0; k <= dims[2]; ++k)
      for (int j = 0; j <= dims[1]; ++j)
        for (int i = 0; i <= dims[0]; ++i)
          if (i == 0 || i == dims[0] || j == 0 || j == dims[1] || k == 0 || k == dims[2])
            m.dirichlet[static_cast<std::size_t>(m.node_index(i, j, k))] = 1;
    return m;
  }

  long node_count() const {
    return static_cast<long>(dims[0] + 1) * (dims[1] + 1) * (dims[2] + 1);
  }
  long cell_count() const { return static_cast<long>(dims[0]) * dims[1] * dims[2]; }

  long node_index(int i, int j, int k) const {
    return i + static_cast<long>(dims[0] + 1) * (j + static_cast<long>(dims[1] + 1) * k);
  }

  std::array<int, 3> cell_coords(long cell) const {
    const int ci = static_cast<int>(cell % dims[0]);
    const int cj = static_cast<int>((cell / dims[0]) % dims[1]);
    const int ck = static_cast<int>(cell / (static_cast<long>(dims[0]) * dims[1]));
    return {ci, cj, ck};
  }

  /// Global node indices of a cell, local order (i,j,k) bits with i fastest.
  std::array<long, 8> cell_nodes(long cell) const {
    const auto [ci, cj, ck] = cell_coords(cell);
    std::array<long, 8> n{};
    int a = 0;
    for (int dk = 0; dk <= 1; ++dk)
      for (int dj = 0; dj <= 1; ++dj)
        for (int di = 0; di <= 1; ++di) n[a++] = node_index(ci + di, cj + dj, ck + dk);
    return n;
  }

  Vec3 spacing() const {
    return {{(hi[0] - lo[0]) / dims[0], (hi[1] - lo[1]) / dims[1], (hi[2] - lo[2]) / dims[2]}};
  }

  double min_spacing() const {
    const Vec3 h = spacing();
    return std::min(h[0], std::min(h[1], h[2]));
  }

  Vec3 node_position(int i, int j, int k) const {
    const Vec3 h = spacing();
    return {{lo[0] + h[0] * i, lo[1] + h[1] * j, lo[2] + h[2] * k}};
  }

  Vec3 node_position(long node) const {
    const int i = static_cast<int>(node % (dims[0] + 1));
    const int j = static_cast<int>((node / (dims[0] + 1)) % (dims[1] + 1));
    const int k = static_cast<int>(node / (static_cast<long>(dims[0] + 1) * (dims[1] + 1)));
    return node_position(i, j, k);
  }

  bool is_dirichlet(long node) const { return dirichlet[static_cast<std::size_t>(node)] != 0; }
};

/// Nodal deformation values on a HexMesh.
struct DeformationField {
  HexMesh mesh;
  std::vector<Vec3> values;

  static DeformationField affine(const HexMesh& mesh, const Mat3& b, const Vec3& c) {
    DeformationField f;
    f.mesh = mesh;
    f.values.resize(static_cast<std::size_t>(mesh.node_count()));
    for (long n = 0; n < mesh.node_count(); ++n)
      f.values[static_cast<std::size_t>(n)] = b * mesh.node_position(n) + c;
    return f;
  }

  static DeformationField identity_map(const HexMesh& mesh) {
    return affine(mesh, Mat3::identity(), Vec3::zero());
  }
};

/// Per-mesh shape-function data for 2x2x2 Gauss quadrature. The mesh is
/// uniform, so one table of physical shape gradients serves every cell.
struct QuadratureTable {
  static constexpr int kPoints = 8;
  // grad[qp][local_node] = physical gradient of the trilinear shape function
  std::array<std::array<Vec3, 8>, 8> grad{};
  double weight = 0.0;  // detJ, Gauss weights are 1 on [-1,1]^3

  explicit QuadratureTable(const HexMesh& mesh) {
    const Vec3 h = mesh.spacing();
    weight = h[0] * h[1] * h[2] / 8.0;
    const double g = 1.0 / std::sqrt(3.0);
    int qp = 0;
    for (int qk = 0; qk <= 1; ++qk) {
      for (int qj = 0; qj <= 1; ++qj) {
        for (int qi = 0; qi <= 1; ++qi) {
          const Vec3 xi = {{g * (2 * qi - 1), g * (2 * qj - 1), g * (2 * qk - 1)}};
          int a = 0;
          for (int dk = 0; dk <= 1; ++dk) {
            for (int dj = 0; dj <= 1; ++dj) {
              for (int di = 0; di <= 1; ++di) {
                const double sx = 2 * di - 1, sy = 2 * dj - 1, sz = 2 * dk - 1;
                // dN/dxi on [-1,1]^3, then chain through x = lo + h (xi+1)/2
                const double nx = 0.125 * sx * (1 + sy * xi[1]) * (1 + sz * xi[2]);
                const double ny = 0.125 * (1 + sx * xi[0]) * sy * (1 + sz * xi[2]);
                const double nz = 0.125 * (1 + sx * xi[0]) * (1 + sy * xi[1]) * sz;
                grad[static_cast<std::size_t>(qp)][static_cast<std::size_t>(a)] = {
                    {nx * 2.0 / h[0], ny * 2.0 / h[1], nz * 2.0 / h[2]}};
                ++a;
              }
            }
          }
          ++qp;
        }
      }
    }
  }

  /// Physical shape gradients at an arbitrary reference point xi in [-1,1]^3.
  static std::array<Vec3, 8> gradients_at(const HexMesh& mesh, const Vec3& xi) {
    const Vec3 h = mesh.spacing();
    std::array<Vec3, 8> out{};
    int a = 0;
    for (int dk = 0; dk <= 1; ++dk) {
      for (int dj = 0; dj <= 1; ++dj) {
        for (int di = 0; di <= 1; ++di) {
          const double sx = 2 * di - 1, sy = 2 * dj - 1, sz = 2 * dk - 1;
          const double nx = 0.125 * sx * (1 + sy * xi[1]) * (1 + sz * xi[2]);
          const double ny = 0.125 * (1 + sx * xi[0]) * sy * (1 + sz * xi[2]);
          const double nz = 0.125 * (1 + sx * xi[0]) * (1 + sy * xi[1]) * sz;
          out[static_cast<std::size_t>(a)] = {{nx * 2.0 / h[0], ny * 2.0 / h[1], nz * 2.0 / h[2]}};
          ++a;
        }
      }
    }
    return out;
  }
};

namespace detail {

inline Mat3 gradient_from_table(const DeformationField& field, const std::array<long, 8>& nodes,
                                const std::array<Vec3, 8>& grads) {
  Mat3 f = Mat3::zero();
  for (int a = 0; a < 8; ++a) {
    const Vec3& x = field.values[static_cast<std::size_t>(nodes[static_cast<std::size_t>(a)])];
    const Vec3& g = grads[static_cast<std::size_t>(a)];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) f(i, j) += x[i] * g[j];
  }
  return f;
}

/// F^T F without the singularity guard; assembly checks det F itself.
inline SymMat3 ftf(const Mat3& f) {
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

}  // namespace detail

/// Deformation gradient at one quadrature point of one cell; exact for affine
/// nodal data (trilinear shape functions reproduce affine fields).
inline Mat3 interpolate_gradient(const DeformationField& field, long cell, int qp) {
  const QuadratureTable table(field.mesh);
  return detail::gradient_from_table(field, field.mesh.cell_nodes(cell),
                                     table.grad[static_cast<std::size_t>(qp)]);
}

/// Deformation gradient at an arbitrary reference point xi in [-1,1]^3.
inline Mat3 interpolate_gradient_at(const DeformationField& field, long cell, const Vec3& xi) {
  return detail::gradient_from_table(field, field.mesh.cell_nodes(cell),
                                     QuadratureTable::gradients_at(field.mesh, xi));
}

/// Minimum det F over all quadrature points; admissibility diagnostics.
struct AdmissibilityScan {
  double min_det = 0.0;
  long arg_cell = -1;
  int arg_qp = -1;
};

inline AdmissibilityScan scan_admissibility(const DeformationField& field) {
  const QuadratureTable table(field.mesh);
  AdmissibilityScan scan;
  scan.min_det = std::numeric_limits<double>::infinity();
  for (long cell = 0; cell < field.mesh.cell_count(); ++cell) {
    const auto nodes = field.mesh.cell_nodes(cell);
    for (int qp = 0; qp < QuadratureTable::kPoints; ++qp) {
      const Mat3 f =
          detail::gradient_from_table(field, nodes, table.grad[static_cast<std::size_t>(qp)]);
      const double d = det(f);
      if (d < scan.min_det) {
        scan.min_det = d;
        scan.arg_cell = cell;
        scan.arg_qp = qp;
      }
    }
  }
  return scan;
}

/// Discrete elastic energy: 8-point Gauss quadrature per cell, summed in a
/// fixed cell order so reruns are bit-stable.
inline double assemble_energy(const DeformationField& field, const EnergyModel& model) {
  const QuadratureTable table(field.mesh);
  double total = 0.0;
  for (long cell = 0; cell < field.mesh.cell_count(); ++cell) {
    const auto nodes = field.mesh.cell_nodes(cell);
    for (int qp = 0; qp < QuadratureTable::kPoints; ++qp) {
      const Mat3 f =
          detail::gradient_from_table(field, nodes, table.grad[static_cast<std::size_t>(qp)]);
      const double d = det(f);
      if (d <= 0.0)
        throw InadmissibleField("det F <= 0 at quadrature point", static_cast<int>(cell), qp, d);
      total += table.weight * model.energy(detail::ftf(f));
    }
  }
  return total;
}

/// Weak Euler-Lagrange residual: entries \int <S1(F), e_i x grad N_a> dx, i.e.
/// exactly the gradient of assemble_energy in the free nodal values. Dirichlet
/// rows are zeroed.
inline std::vector<Vec3> assemble_residual(const DeformationField& field,
                                           const EnergyModel& model) {
  const QuadratureTable table(field.mesh);
  std::vector<Vec3> residual(static_cast<std::size_t>(field.mesh.node_count()));
  for (long cell = 0; cell < field.mesh.cell_count(); ++cell) {
    const auto nodes = field.mesh.cell_nodes(cell);
    for (int qp = 0; qp < QuadratureTable::kPoints; ++qp) {
      const auto& grads = table.grad[static_cast<std::size_t>(qp)];
      const Mat3 f = detail::gradient_from_table(field, nodes, grads);
      const double d = det(f);
      if (d <= 0.0)
        throw InadmissibleField("det F <= 0 at quadrature point", static_cast<int>(cell), qp, d);
      const Mat3 p = f * model.s2(detail::ftf(f)).to_mat();  // S1 = F S2
      for (int a = 0; a < 8; ++a) {
        const Vec3 contrib = table.weight * (p * grads[static_cast<std::size_t>(a)]);
        Vec3& r = residual[static_cast<std::size_t>(nodes[static_cast<std::size_t>(a)])];
        r = r + contrib;
      }
    }
  }
  for (long n = 0; n < field.mesh.node_count(); ++n)
    if (field.mesh.is_dirichlet(n)) residual[static_cast<std::size_t>(n)] = Vec3::zero();
  return residual;
}

inline double residual_norm(const std::vector<Vec3>& residual) {
  double s = 0.0;
  for (const Vec3& r : residual) s += dot(r, r);
  return std::sqrt(s);
}

/// Map from mesh nodes to free (non-Dirichlet) scalar DOFs.
struct DofMap {
  std::vector<long> free_of_node;  // -1 for Dirichlet nodes
  long free_node_count = 0;

  explicit DofMap(const HexMesh& mesh) {
    free_of_node.assign(static_cast<std::size_t>(mesh.node_count()), -1);
    for (long n = 0; n < mesh.node_count(); ++n)
      if (!mesh.is_dirichlet(n)) free_of_node[static_cast<std::size_t>(n)] = free_node_count++;
  }

  long dof_count() const { return 3 * free_node_count; }
};

/// Dense tangent stiffness over free DOFs. The chain rule splits each entry
/// into a geometric part delta_ij grad(N_a)^T S2 grad(N_b) and a material part
/// 4 g_ai^T [Kelvin Hessian] g_bj with g_ai = kelvin(sym(F^T e_i x grad N_a)).
inline std::vector<double> assemble_hessian(const DeformationField& field,
                                            const EnergyModel& model, const DofMap& dofs) {
  const QuadratureTable table(field.mesh);
  const long n = dofs.dof_count();
  std::vector<double> k(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);

  for (long cell = 0; cell < field.mesh.cell_count(); ++cell) {
    const auto nodes = field.mesh.cell_nodes(cell);
    for (int qp = 0; qp < QuadratureTable::kPoints; ++qp) {
      const auto& grads = table.grad[static_cast<std::size_t>(qp)];
      const Mat3 f = detail::gradient_from_table(field, nodes, grads);
      const double d = det(f);
      if (d <= 0.0)
        throw InadmissibleField("det F <= 0 at quadrature point", static_cast<int>(cell), qp, d);
      const SymMat3 c = detail::ftf(f);
      const SymMat3 s2 = model.s2(c);
      const Mat6 hk = hessian_c(model, c).matrix;

      // Kelvin vectors g_{a,i} and their images under the Hessian operator
      std::array<KelvinVec6, 24> g{};
      std::array<KelvinVec6, 24> hg{};
      std::array<Vec3, 8> s2g{};
      for (int a = 0; a < 8; ++a) {
        const Vec3& gn = grads[static_cast<std::size_t>(a)];
        s2g[static_cast<std::size_t>(a)] = s2 * gn;
        for (int i = 0; i < 3; ++i) {
          // sym(F^T e_i  x  grad N_a): row i of F dyaded with the shape gradient
          SymMat3 gm;
          for (int r = 0; r < 3; ++r)
            for (int s = r; s < 3; ++s)
              gm.set(r, s, 0.5 * (f(i, r) * gn[s] + f(i, s) * gn[r]));
          const int idx = 3 * a + i;
          g[static_cast<std::size_t>(idx)] = sym_to_kelvin(gm);
          hg[static_cast<std::size_t>(idx)] = hk * g[static_cast<std::size_t>(idx)];
        }
      }

      for (int a = 0; a < 8; ++a) {
        const long fa = dofs.free_of_node[static_cast<std::size_t>(nodes[static_cast<std::size_t>(a)])];
        if (fa < 0) continue;
        for (int b = 0; b < 8; ++b) {
          const long fb = dofs.free_of_node[static_cast<std::size_t>(nodes[static_cast<std::size_t>(b)])];
          if (fb < 0) continue;
          const double geo =
              table.weight * dot(grads[static_cast<std::size_t>(a)], s2g[static_cast<std::size_t>(b)]);
          for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
              double v = 4.0 * dot(g[static_cast<std::size_t>(3 * a + i)],
                                   hg[static_cast<std::size_t>(3 * b + j)]) *
                         table.weight;
              if (i == j) v += geo;
              k[static_cast<std::size_t>((3 * fa + i) * n + (3 * fb + j))] += v;
            }
          }
        }
      }
    }
  }

  // the form is symmetric; average out last-ulp asymmetry from accumulation
  for (long i = 0; i < n; ++i) {
    for (long j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (k[static_cast<std::size_t>(i * n + j)] +
                                k[static_cast<std::size_t>(j * n + i)]);
      k[static_cast<std::size_t>(i * n + j)] = avg;
      k[static_cast<std::size_t>(j * n + i)] = avg;
    }
  }
  return k;
}

}  // namespace elastcert
