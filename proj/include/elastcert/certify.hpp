#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "elastcert/convexity.hpp"
#include "elastcert/fem.hpp"
#include "elastcert/solver.hpp"
#include "elastcert/spectral.hpp"

namespace elastcert {

enum class CertificateStatus { GlobalMinimizer, Refused };

inline const char* to_string(CertificateStatus s) {
  return s == CertificateStatus::GlobalMinimizer ? "global_minimizer" : "refused";
}

/// Outcome of the global-minimizer check. Certification requires convexity
/// evidence plus three gates evaluated on the discrete solution: small
/// residual, S2 strictly positive definite at every quadrature point, and a
/// determinant floor. "Everywhere in the body" means "at every quadrature
/// point" here; pd_scope records that substitution. Refusal is a value, not an
/// error.
struct Certificate {
  CertificateStatus status = CertificateStatus::Refused;
  std::string failing_gate;  // empty when certified
  double residual_norm = 0.0;
  double min_s2_eigenvalue = 0.0;
  double min_det_f = 0.0;
  ConvexityReport convexity_evidence;
  double tol_residual = 0.0;
  double tol_pd = 0.0;
  double det_floor = 0.0;
  std::string pd_scope = "quadrature-point check";
};

inline Certificate certify_global(const DeformationField& field, const EnergyModel& model,
                                  const ConvexityReport& evidence, double tol_residual = 1e-8,
                                  double tol_pd = 1e-8, double det_floor = 1e-6) {
  Certificate cert;
  cert.convexity_evidence = evidence;
  cert.tol_residual = tol_residual;
  cert.tol_pd = tol_pd;
  cert.det_floor = det_floor;

  cert.residual_norm = residual_norm(assemble_residual(field, model));

  const QuadratureTable table(field.mesh);
  bool all_pd = true;
  cert.min_s2_eigenvalue = std::numeric_limits<double>::infinity();
  cert.min_det_f = std::numeric_limits<double>::infinity();
  for (long cell = 0; cell < field.mesh.cell_count(); ++cell) {
    const auto nodes = field.mesh.cell_nodes(cell);
    for (int qp = 0; qp < QuadratureTable::kPoints; ++qp) {
      const Mat3 f =
          detail::gradient_from_table(field, nodes, table.grad[static_cast<std::size_t>(qp)]);
      cert.min_det_f = std::min(cert.min_det_f, det(f));
      const SymMat3 s2 = model.s2(detail::ftf(f));
      const PdResult pd = is_positive_definite(s2, tol_pd);
      cert.min_s2_eigenvalue = std::min(cert.min_s2_eigenvalue, pd.lambda_min);
      all_pd = all_pd && pd.positive_definite;
    }
  }

  if (evidence.verdict != Verdict::Convex) {
    cert.failing_gate = "convexity_evidence";
  } else if (!(cert.residual_norm <= tol_residual)) {
    cert.failing_gate = "residual";
  } else if (!all_pd) {
    cert.failing_gate = "s2_positive_definite";
  } else if (!(cert.min_det_f >= det_floor)) {
    cert.failing_gate = "det_floor";
  } else {
    cert.status = CertificateStatus::GlobalMinimizer;
  }
  return cert;
}

/// One admissible perturbation u of the base field: deterministic
/// Gaussian-like nodal offsets, zero on the Dirichlet set, scaled to
/// `amplitude` in the max norm.
inline std::vector<Vec3> sample_perturbation(const HexMesh& mesh, std::uint64_t seed,
                                             std::uint64_t index, double amplitude) {
  Rng rng = Rng::for_index(seed, index);
  std::vector<Vec3> u(static_cast<std::size_t>(mesh.node_count()));
  double max_abs = 0.0;
  for (long n = 0; n < mesh.node_count(); ++n) {
    Vec3 v;
    for (int k = 0; k < 3; ++k) v[k] = rng.gaussian_like();
    if (mesh.is_dirichlet(n)) v = Vec3::zero();
    u[static_cast<std::size_t>(n)] = v;
    for (int k = 0; k < 3; ++k) max_abs = std::max(max_abs, std::abs(v[k]));
  }
  if (max_abs > 0.0) {
    const double s = amplitude / max_abs;
    for (Vec3& v : u) v = s * v;
  }
  return u;
}

/// Quantitative minimality margin: for each perturbation u vanishing on the
/// boundary, Delta = I(phi0 + u) - I(phi0) is compared against the bound
/// B = (1/2) int <S2(C0), grad u^T grad u> dx. At a certified state both
/// Delta - B and B must be nonnegative up to roundoff.
struct GapReport {
  double min_gap_minus_bound = 0.0;
  double min_bound = 0.0;
  int perturbations = 0;
  int rescales = 0;
  double base_energy = 0.0;
};

inline GapReport energy_gap_test(const DeformationField& field0, const EnergyModel& model,
                                 int perturbation_count, std::uint64_t seed,
                                 double scale_factor = 1e-2, double det_floor = 1e-6) {
  GapReport rep;
  rep.perturbations = perturbation_count;
  rep.base_energy = assemble_energy(field0, model);
  rep.min_gap_minus_bound = std::numeric_limits<double>::infinity();
  rep.min_bound = std::numeric_limits<double>::infinity();

  const QuadratureTable table(field0.mesh);
  const long cells = field0.mesh.cell_count();
  std::vector<SymMat3> s2_at_qp(static_cast<std::size_t>(cells) * QuadratureTable::kPoints);
  for (long cell = 0; cell < cells; ++cell) {
    const auto nodes = field0.mesh.cell_nodes(cell);
    for (int qp = 0; qp < QuadratureTable::kPoints; ++qp) {
      const Mat3 f =
          detail::gradient_from_table(field0, nodes, table.grad[static_cast<std::size_t>(qp)]);
      s2_at_qp[static_cast<std::size_t>(cell * QuadratureTable::kPoints + qp)] =
          model.s2(detail::ftf(f));
    }
  }

  const double base_amplitude = scale_factor * field0.mesh.min_spacing();
  for (int trial = 0; trial < perturbation_count; ++trial) {
    std::vector<Vec3> u = sample_perturbation(field0.mesh, seed,
                                              static_cast<std::uint64_t>(trial), base_amplitude);
    DeformationField perturbed = field0;
    bool admissible = false;
    for (int attempt = 0; attempt <= 10; ++attempt) {
      for (long n = 0; n < field0.mesh.node_count(); ++n)
        perturbed.values[static_cast<std::size_t>(n)] =
            field0.values[static_cast<std::size_t>(n)] + u[static_cast<std::size_t>(n)];
      if (scan_admissibility(perturbed).min_det > det_floor) {
        admissible = true;
        break;
      }
      for (Vec3& v : u) v = 0.5 * v;
      ++rep.rescales;
    }
    if (!admissible)
      throw InadmissibleField("perturbation inadmissible after 10 rescales", -1, -1, 0.0);

    const double delta = assemble_energy(perturbed, model) - rep.base_energy;

    DeformationField u_field;
    u_field.mesh = field0.mesh;
    u_field.values = u;
    double bound = 0.0;
    for (long cell = 0; cell < cells; ++cell) {
      const auto nodes = field0.mesh.cell_nodes(cell);
      for (int qp = 0; qp < QuadratureTable::kPoints; ++qp) {
        const Mat3 gu =
            detail::gradient_from_table(u_field, nodes, table.grad[static_cast<std::size_t>(qp)]);
        bound += 0.5 * table.weight *
                 inner(s2_at_qp[static_cast<std::size_t>(cell * QuadratureTable::kPoints + qp)],
                       detail::ftf(gu));
      }
    }
    rep.min_gap_minus_bound = std::min(rep.min_gap_minus_bound, delta - bound);
    rep.min_bound = std::min(rep.min_bound, bound);
  }
  return rep;
}

/// Minimum Rayleigh quotient of the second variation over random test fields
/// vanishing on the boundary:
///   min_theta  int D^2_F W(grad phi0)[grad theta, grad theta] dx / ||grad theta||^2.
/// Reports the measured minimum; a strictly positive value indicates local
/// stability on the sampled budget.
struct StabilityReport {
  double min_quotient = 0.0;
  int samples = 0;
};

inline StabilityReport stability_quadform_scan(const DeformationField& field0,
                                               const EnergyModel& model, int testfield_count,
                                               std::uint64_t seed) {
  StabilityReport rep;
  rep.samples = testfield_count;
  rep.min_quotient = std::numeric_limits<double>::infinity();

  const DofMap dofs(field0.mesh);
  const long n = dofs.dof_count();
  const std::vector<double> k = assemble_hessian(field0, model, dofs);
  const QuadratureTable table(field0.mesh);

  for (int trial = 0; trial < testfield_count; ++trial) {
    const std::vector<Vec3> theta =
        sample_perturbation(field0.mesh, seed, static_cast<std::uint64_t>(trial), 1.0);

    std::vector<double> t(static_cast<std::size_t>(n), 0.0);
    for (long node = 0; node < field0.mesh.node_count(); ++node) {
      const long fn = dofs.free_of_node[static_cast<std::size_t>(node)];
      if (fn < 0) continue;
      for (int kk = 0; kk < 3; ++kk)
        t[static_cast<std::size_t>(3 * fn + kk)] = theta[static_cast<std::size_t>(node)][kk];
    }

    double numerator = 0.0;
    for (long i = 0; i < n; ++i) {
      double row = 0.0;
      for (long j = 0; j < n; ++j)
        row += k[static_cast<std::size_t>(i * n + j)] * t[static_cast<std::size_t>(j)];
      numerator += t[static_cast<std::size_t>(i)] * row;
    }

    DeformationField theta_field;
    theta_field.mesh = field0.mesh;
    theta_field.values = theta;
    double denominator = 0.0;
    for (long cell = 0; cell < field0.mesh.cell_count(); ++cell) {
      const auto nodes = field0.mesh.cell_nodes(cell);
      for (int qp = 0; qp < QuadratureTable::kPoints; ++qp) {
        const Mat3 g = detail::gradient_from_table(theta_field, nodes,
                                                   table.grad[static_cast<std::size_t>(qp)]);
        denominator += table.weight * inner(g, g);
      }
    }
    if (denominator <= 0.0) continue;  // zero test field, excluded by contract
    rep.min_quotient = std::min(rep.min_quotient, numerator / denominator);
  }
  return rep;
}

}  // namespace elastcert
