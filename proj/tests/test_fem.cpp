#include <cmath>

#include <gtest/gtest.h>

#include "elastcert/certify.hpp"
#include "elastcert/fem.hpp"
#include "elastcert/solver.hpp"
#include "suite_models.hpp"

using namespace elastcert;

namespace {

HexMesh unit_mesh(int n) {
  return HexMesh::structured({n, n, n}, Vec3::zero(), {{1, 1, 1}});
}

/// identity + small deterministic interior wiggle, admissible by construction
DeformationField wiggled_field(const HexMesh& mesh, std::uint64_t seed, double amp) {
  DeformationField f = DeformationField::identity_map(mesh);
  Rng rng(seed);
  for (long n = 0; n < mesh.node_count(); ++n) {
    if (mesh.is_dirichlet(n)) continue;
    for (int k = 0; k < 3; ++k)
      f.values[static_cast<std::size_t>(n)][k] += amp * rng.uniform(-1.0, 1.0);
  }
  return f;
}

}  // namespace

TEST(Interpolation, AffineFieldsAreExact) {
  const HexMesh mesh = unit_mesh(3);
  Mat3 b = Mat3::diag(1.3, 0.9, 1.1);
  b(0, 1) = 0.2;
  b(2, 0) = -0.1;
  const DeformationField field = DeformationField::affine(mesh, b, {{0.3, -0.2, 0.05}});
  for (long cell = 0; cell < mesh.cell_count(); ++cell)
    for (int qp = 0; qp < 8; ++qp)
      EXPECT_LE(frobenius_norm(interpolate_gradient(field, cell, qp) - b), 1e-13);

  const DeformationField ident = DeformationField::identity_map(mesh);
  EXPECT_LE(frobenius_norm(interpolate_gradient(ident, 5, 3) - Mat3::identity()), 1e-14);
}

TEST(Interpolation, QuadraticFieldAtCellCenters) {
  const HexMesh mesh = unit_mesh(4);
  const double eps = 0.05;
  DeformationField field = DeformationField::identity_map(mesh);
  for (long n = 0; n < mesh.node_count(); ++n) {
    const Vec3 x = mesh.node_position(n);
    field.values[static_cast<std::size_t>(n)][0] += eps * x[0] * x[0];
  }
  const double h = mesh.spacing()[0];
  for (long cell = 0; cell < mesh.cell_count(); ++cell) {
    const auto cc = mesh.cell_coords(cell);
    const double xc = (cc[0] + 0.5) * h;
    // the trilinear interpolant is linear in x here, so the center value of
    // d(phi_1)/dx_1 is exactly 1 + 2 eps x_c
    const Mat3 g = interpolate_gradient_at(field, cell, Vec3::zero());
    EXPECT_NEAR(g(0, 0), 1.0 + 2.0 * eps * xc, 1e-13);
    // at a Gauss point the analytic gradient differs by O(eps h)
    const Mat3 gq = interpolate_gradient(field, cell, 0);
    const double gauss_x = xc - h / (2.0 * std::sqrt(3.0));
    EXPECT_NEAR(gq(0, 0), 1.0 + 2.0 * eps * gauss_x, eps * h);
  }
}

TEST(Assembly, ConstantIntegrands) {
  const HexMesh mesh = unit_mesh(4);
  QuadLogModel quad(1.0 / 12.0, 1.0 / 4.0);
  const DeformationField ident = DeformationField::identity_map(mesh);
  // volume * What(I) with What(I) = 9a + 3b = 1.5 on the unit cube
  EXPECT_NEAR(assemble_energy(ident, quad), 1.5, 1e-12);

  SaintVenantKirchhoffModel svk(1.0, 0.0);
  const DeformationField stretched =
      DeformationField::affine(mesh, Mat3::diag(2, 1, 1), Vec3::zero());
  EXPECT_NEAR(assemble_energy(stretched, svk), 2.25, 1e-12);

  const DeformationField finer =
      DeformationField::affine(unit_mesh(8), Mat3::diag(2, 1, 1), Vec3::zero());
  EXPECT_NEAR(assemble_energy(finer, svk), assemble_energy(stretched, svk), 1e-12);
}

TEST(Assembly, InadmissibleFieldReported) {
  const HexMesh mesh = unit_mesh(2);
  SaintVenantKirchhoffModel svk(1.0, 0.0);
  DeformationField field = DeformationField::identity_map(mesh);
  // crush one interior node far enough to invert neighboring cells
  const long node = mesh.node_index(1, 1, 1);
  field.values[static_cast<std::size_t>(node)] = {{-2.0, -2.0, -2.0}};
  EXPECT_THROW(assemble_energy(field, svk), InadmissibleField);
  try {
    assemble_energy(field, svk);
  } catch (const InadmissibleField& e) {
    EXPECT_GE(e.cell, 0);
    EXPECT_GE(e.qp, 0);
    EXPECT_LE(e.det_f, 0.0);
  }
}

TEST(Assembly, StressFreeIdentityHasZeroResidual) {
  const HexMesh mesh = unit_mesh(3);
  QuadLogModel quad(1.0 / 12.0, 1.0 / 4.0);
  const auto residual = assemble_residual(DeformationField::identity_map(mesh), quad);
  EXPECT_LE(residual_norm(residual), 1e-12);
}

TEST(Assembly, ConstantStressIsDiscretelyDivergenceFree) {
  const HexMesh mesh = unit_mesh(4);
  QuadLogModel quad(1.0 / 12.0, 1.0 / 4.0);
  const DeformationField affine =
      DeformationField::affine(mesh, Mat3::diag(1.2, 1.1, 1.05), Vec3::zero());
  const auto residual = assemble_residual(affine, quad);
  EXPECT_LE(residual_norm(residual), 1e-12 * (1.0 + assemble_energy(affine, quad)));
}

TEST(Assembly, ResidualMatchesEnergyGradient) {
  const HexMesh mesh = unit_mesh(3);
  for (const auto& nm : elastcert::testing::suite_models()) {
    if (nm.label == "svk(1,-1)" || nm.label == "det" || nm.label == "valanis_landel(sqrt)")
      continue;  // gradient check needs no convexity, but keep the budget lean
    const DeformationField field = wiggled_field(mesh, 97, 0.04);
    const auto residual = assemble_residual(field, *nm.model);

    DeformationField probe = field;
    const double h = 1e-6;
    double max_err = 0.0, scale = 0.0;
    for (long n = 0; n < mesh.node_count(); ++n) {
      if (mesh.is_dirichlet(n)) continue;
      for (int k = 0; k < 3; ++k) {
        probe.values[static_cast<std::size_t>(n)][k] += h;
        const double ep = assemble_energy(probe, *nm.model);
        probe.values[static_cast<std::size_t>(n)][k] -= 2.0 * h;
        const double em = assemble_energy(probe, *nm.model);
        probe.values[static_cast<std::size_t>(n)][k] += h;
        const double fd = (ep - em) / (2.0 * h);
        max_err = std::max(max_err,
                           std::abs(fd - residual[static_cast<std::size_t>(n)][k]));
        scale = std::max(scale, std::abs(fd));
      }
    }
    EXPECT_LE(max_err, 1e-6 * (1.0 + scale)) << nm.label;
  }
}

TEST(Assembly, HessianMatchesSecondDifferences) {
  const HexMesh mesh = unit_mesh(2);
  QuadLogModel quad(1.0 / 12.0, 1.0 / 4.0);
  const DeformationField field = wiggled_field(mesh, 101, 0.03);
  const DofMap dofs(mesh);
  const auto k = assemble_hessian(field, quad, dofs);
  const long n = dofs.dof_count();

  Rng rng(5);
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<double> dir(static_cast<std::size_t>(n));
    for (double& d : dir) d = rng.uniform(-1.0, 1.0);

    double quad_form = 0.0;
    for (long i = 0; i < n; ++i) {
      double row = 0.0;
      for (long j = 0; j < n; ++j)
        row += k[static_cast<std::size_t>(i * n + j)] * dir[static_cast<std::size_t>(j)];
      quad_form += dir[static_cast<std::size_t>(i)] * row;
    }

    auto shifted = [&](double t) {
      DeformationField f = field;
      for (long node = 0; node < mesh.node_count(); ++node) {
        const long fn = dofs.free_of_node[static_cast<std::size_t>(node)];
        if (fn < 0) continue;
        for (int c = 0; c < 3; ++c)
          f.values[static_cast<std::size_t>(node)][c] +=
              t * dir[static_cast<std::size_t>(3 * fn + c)];
      }
      return assemble_energy(f, quad);
    };
    const double t = 1e-4;
    const double fd = (shifted(t) - 2.0 * shifted(0.0) + shifted(-t)) / (t * t);
    EXPECT_NEAR(fd, quad_form, 1e-5 * (1.0 + std::abs(quad_form)));
  }
}

TEST(Assembly, TranslationInvariance) {
  const HexMesh mesh = unit_mesh(3);
  QuadLogModel quad(1.0 / 12.0, 1.0 / 4.0);
  DeformationField field = wiggled_field(mesh, 103, 0.04);
  const double e0 = assemble_energy(field, quad);
  const auto r0 = assemble_residual(field, quad);
  const Vec3 shift = {{0.37, -1.4, 0.9}};
  for (Vec3& v : field.values) v = v + shift;
  EXPECT_NEAR(assemble_energy(field, quad), e0, 1e-13 * (1.0 + std::abs(e0)));
  const auto r1 = assemble_residual(field, quad);
  double diff = 0.0;
  for (std::size_t i = 0; i < r0.size(); ++i) diff = std::max(diff, norm(r0[i] - r1[i]));
  EXPECT_LE(diff, 1e-13 * (1.0 + residual_norm(r0)));
}

TEST(Solve, HomogeneousStatesAcceptedImmediately) {
  const HexMesh mesh = unit_mesh(4);
  QuadLogModel quad(1.0 / 12.0, 1.0 / 4.0);
  const Mat3 f0 = Mat3::diag(1.2, 1.1, 1.05);
  const SolveResult res = solve(mesh, quad, DirichletData::affine_map(f0));
  EXPECT_TRUE(res.converged);
  EXPECT_EQ(res.iterations, 0);  // affine guess already solves the discrete system
  for (long cell = 0; cell < mesh.cell_count(); ++cell)
    for (int qp = 0; qp < 8; ++qp)
      EXPECT_LE(frobenius_norm(interpolate_gradient(res.field, cell, qp) - f0), 1e-12);
}

TEST(Solve, IdentityDataStressFreeModel) {
  const HexMesh mesh = unit_mesh(3);
  QuadLogModel quad(1.0 / 12.0, 1.0 / 4.0);
  const SolveResult res = solve(mesh, quad, DirichletData::affine_map(Mat3::identity()));
  EXPECT_TRUE(res.converged);
  EXPECT_NEAR(res.energy, 1.5, 1e-12);  // volume * What(I)
  for (long n = 0; n < mesh.node_count(); ++n)
    EXPECT_LE(norm(res.field.values[static_cast<std::size_t>(n)] - mesh.node_position(n)),
              1e-10);
}

TEST(Solve, EnergyNeverIncreasesAlongIteration) {
  const HexMesh mesh = unit_mesh(3);
  QuadLogModel quad(1.0 / 12.0, 1.0 / 4.0);
  Mat3 f0 = Mat3::identity();
  f0(0, 0) += 1e-3;
  const DeformationField guess = DeformationField::affine(mesh, f0, Vec3::zero());
  const double guess_energy = assemble_energy(guess, quad);
  const SolveResult res = solve(mesh, quad, DirichletData::affine_map(f0));
  EXPECT_TRUE(res.converged);
  EXPECT_LE(res.energy, guess_energy + 1e-12 * (1.0 + std::abs(guess_energy)));
}

TEST(Solve, NonAffineBoundaryNeedsNewtonSteps) {
  const HexMesh mesh = unit_mesh(4);
  QuadLogModel quad(1.0 / 12.0, 1.0 / 4.0);
  // boundary data = identity + polynomial bump: no homogeneous solution exists
  std::vector<Vec3> table(static_cast<std::size_t>(mesh.node_count()));
  for (long n = 0; n < mesh.node_count(); ++n) {
    const Vec3 x = mesh.node_position(n);
    table[static_cast<std::size_t>(n)] = x;
    table[static_cast<std::size_t>(n)][0] += 0.08 * x[1] * (1.0 - x[1]) * x[2];
    table[static_cast<std::size_t>(n)][2] += 0.05 * x[0] * x[1];
  }
  const SolveResult res = solve(mesh, quad, DirichletData::node_table(table));
  EXPECT_TRUE(res.converged);
  EXPECT_GE(res.iterations, 1);
  EXPECT_LE(res.residual_norm, 1e-10 * (1.0 + res.initial_residual));
  EXPECT_FALSE(res.used_gradient_fallback);  // convex model: tangent stays SPD

  // converged state beats the affine initial guess on energy
  const DeformationField guess = initial_field(mesh, DirichletData::node_table(table));
  EXPECT_LT(res.energy, assemble_energy(guess, quad));
}

TEST(Solve, NodeTableBoundaryMatchesAffine) {
  const HexMesh mesh = unit_mesh(3);
  QuadLogModel quad(1.0 / 12.0, 1.0 / 4.0);
  const Mat3 f0 = Mat3::diag(1.1, 1.05, 0.95);
  std::vector<Vec3> table(static_cast<std::size_t>(mesh.node_count()));
  for (long n = 0; n < mesh.node_count(); ++n)
    table[static_cast<std::size_t>(n)] = f0 * mesh.node_position(n);
  const SolveResult via_table = solve(mesh, quad, DirichletData::node_table(table));
  const SolveResult via_affine = solve(mesh, quad, DirichletData::affine_map(f0));
  EXPECT_TRUE(via_table.converged);
  EXPECT_NEAR(via_table.energy, via_affine.energy, 1e-10);
}

TEST(Solve, InadmissibleBoundaryRejected) {
  const HexMesh mesh = unit_mesh(2);
  QuadLogModel quad(1.0 / 12.0, 1.0 / 4.0);
  EXPECT_THROW(solve(mesh, quad, DirichletData::affine_map(Mat3::diag(-1, 1, 1))),
               InadmissibleBoundary);
}

TEST(Solve, CholeskyRejectsIndefiniteMatrices) {
  std::vector<double> indefinite = {1.0, 0.0, 0.0, -1.0};
  EXPECT_FALSE(detail::cholesky_factor(indefinite, 2));
  std::vector<double> spd = {4.0, 2.0, 2.0, 3.0};
  EXPECT_TRUE(detail::cholesky_factor(spd, 2));
  // L should reproduce A = L L^T: l11 = 2, l21 = 1, l22 = sqrt(2)
  EXPECT_DOUBLE_EQ(spd[0], 2.0);
  EXPECT_DOUBLE_EQ(spd[2], 1.0);
  EXPECT_NEAR(spd[3], std::sqrt(2.0), 1e-15);
}

TEST(Solve, GradientFallbackMakesProgress) {
  // model whose reported Hessian is the negative of the true one: the Newton
  // system is never positive definite, forcing the gradient path every step
  class MisleadingHessian : public EnergyModel {
  public:
    std::string name() const override { return inner_.name(); }
    std::vector<std::pair<std::string, double>> parameters() const override {
      return inner_.parameters();
    }
    double energy(const SymMat3& c) const override { return inner_.energy(c); }
    SymMat3 s2(const SymMat3& c) const override { return inner_.s2(c); }
    SymMat3 hessian_apply(const SymMat3& c, const SymMat3& h) const override {
      return (-1.0) * inner_.hessian_apply(c, h);
    }
    bool has_analytic_hessian() const override { return true; }

  private:
    QuadLogModel inner_{1.0 / 12.0, 1.0 / 4.0};
  };

  const HexMesh mesh = unit_mesh(2);
  // non-affine boundary data so the initial guess is not already stationary
  std::vector<Vec3> table(static_cast<std::size_t>(mesh.node_count()));
  for (long n = 0; n < mesh.node_count(); ++n) {
    const Vec3 x = mesh.node_position(n);
    table[static_cast<std::size_t>(n)] = x;
    table[static_cast<std::size_t>(n)][0] += 0.02 * x[1] * x[2];
  }
  MisleadingHessian model;
  SolveSettings settings;
  settings.max_iterations = 10;
  const SolveResult res = solve(mesh, model, DirichletData::node_table(table), settings);
  EXPECT_TRUE(res.used_gradient_fallback);
  EXPECT_LT(res.residual_norm, res.initial_residual);
}
