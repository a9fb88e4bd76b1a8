// Acceptance suite: one criterion per check, each printed as a PASS/FAIL line
// with its runtime. The process exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "elastcert/certify.hpp"
#include "elastcert/convexity.hpp"
#include "elastcert/energy.hpp"
#include "elastcert/hull.hpp"
#include "elastcert/solver.hpp"

using namespace elastcert;

namespace {

struct Criterion {
  std::string label;
  double time_limit_s;
  std::function<bool(std::string&)> run;
};

bool approx(double value, double target, double tol) { return std::abs(value - target) <= tol; }

std::string format_scientific(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::vector<std::pair<std::string, std::shared_ptr<EnergyModel>>> acceptance_models() {
  return {
      {"quad_log(1/12,1/4)", std::make_shared<QuadLogModel>(1.0 / 12.0, 0.25)},
      {"trace_log(1/2,1/4)", std::make_shared<TraceLogModel>(0.5, 0.25)},
      {"neo_hooke(1,1/4,-1/2)", std::make_shared<NeoHookeModel>(1.0, 0.25, -0.5)},
      {"svk(1,1)", std::make_shared<SaintVenantKirchhoffModel>(1.0, 1.0)},
      {"svk(1,-1)", std::make_shared<SaintVenantKirchhoffModel>(1.0, -1.0)},
      {"neg_log_det", std::make_shared<DetFunctionModel>(neg_log_function())},
      {"det", std::make_shared<DetFunctionModel>(power_function(1.0))},
      {"valanis_landel(t^2,-log)",
       std::make_shared<ValanisLandelModel>(power_function(2.0), neg_log_function())},
      {"valanis_landel(sqrt)", std::make_shared<ValanisLandelModel>(power_function(0.5))},
  };
}

bool criterion_det_convexity_agreement(std::string& detail) {
  struct Case {
    const char* label;
    ScalarC2Function f;
    bool expect_convex;
  };
  const std::vector<Case> cases = {
      {"-log s", neg_log_function(), true},   {"1/s", power_function(-1.0), true},
      {"s", power_function(1.0), false},      {"sqrt(s)", power_function(0.5), false},
      {"s^-2", power_function(-2.0), true},   {"s^2", power_function(2.0), false},
  };
  const auto grid = log_grid();
  for (const Case& c : cases) {
    const ConvexityReport scalar_rep = det_convexity_check(c.f, 3, grid);
    DetFunctionModel model(c.f);
    const ConvexityReport hess_rep = hessian_psd_scan(model, 1000, 17, 1e-8);
    if (scalar_rep.verdict != hess_rep.verdict) {
      detail = std::string("verdict mismatch for f = ") + c.label;
      return false;
    }
    if ((scalar_rep.verdict == Verdict::Convex) != c.expect_convex) {
      detail = std::string("unexpected verdict for f = ") + c.label;
      return false;
    }
  }
  return true;
}

bool criterion_stress_free(std::string& detail) {
  const double quad = frobenius_norm(QuadLogModel(1.0 / 12.0, 0.25).s2(SymMat3::identity()));
  const double trace = frobenius_norm(TraceLogModel(0.5, 0.25).s2(SymMat3::identity()));
  detail = "||S2(I)|| quad_log = " + format_scientific(quad) + ", trace_log = " +
           format_scientific(trace);
  return quad <= 1e-12 && trace <= 1e-12;
}

bool criterion_svk_dichotomy(std::string& detail) {
  SaintVenantKirchhoffModel svk(1.0, 1.0);
  const ConvexityReport hess = hessian_psd_scan(svk, 1000, 7, 1e-8);
  if (hess.verdict != Verdict::Convex) {
    detail = "hessian scan did not report convex";
    return false;
  }
  const Mat3 f_axial = Mat3::diag(0.1, 1.0, 1.0);
  const double axial = legendre_hadamard_value(svk, f_axial, Vec3::unit(0), Vec3::unit(0));
  if (!(axial <= -0.9)) {
    detail = "axial rank-one value " + format_scientific(axial);
    return false;
  }
  const auto fs = lh_default_f_samples(50, 31);
  const auto dirs = default_direction_samples(32);
  const ConvexityReport lh = legendre_hadamard_scan(svk, fs, dirs, 1e-8);
  if (lh.verdict != Verdict::NotConvex || !lh.witness || !(lh.witness->value <= -0.9)) {
    detail = "scan found no witness at or below -0.9";
    return false;
  }
  // scalar finite-difference oracle for the lambda = 0 variant: w''(0.1) = -0.97
  SaintVenantKirchhoffModel svk0(1.0, 0.0);
  auto w = [&](double t) { return energy_from_gradient(svk0, Mat3::diag(t, 1, 1)); };
  const double h = 1e-4;
  const double fd = (w(0.1 + h) - 2.0 * w(0.1) + w(0.1 - h)) / (h * h);
  if (!approx(fd, -0.97, 0.01)) {
    detail = "scalar FD oracle gave " + format_scientific(fd);
    return false;
  }
  detail = "witness value " + format_scientific(lh.witness->value) + ", FD oracle " +
           format_scientific(fd);
  return true;
}

bool criterion_certificate_soundness(std::string& detail) {
  const HexMesh mesh = HexMesh::structured({4, 4, 4}, Vec3::zero(), {{1, 1, 1}});
  QuadLogModel model(1.0 / 12.0, 0.25);
  const ConvexityReport evidence = hessian_psd_scan(model, 1000, 7, 1e-8);
  const SolveResult sol =
      solve(mesh, model, DirichletData::affine_map(Mat3::diag(1.2, 1.1, 1.05)));
  if (!sol.converged) {
    detail = "solver failed";
    return false;
  }
  const Certificate cert = certify_global(sol.field, model, evidence);
  if (cert.status != CertificateStatus::GlobalMinimizer) {
    detail = "certificate refused at gate " + cert.failing_gate;
    return false;
  }
  const GapReport gap = energy_gap_test(sol.field, model, 100, 2024);
  const double scale = 1.0 + std::abs(gap.base_energy);
  detail = "min(gap - bound) = " + format_scientific(gap.min_gap_minus_bound) +
           ", min bound = " + format_scientific(gap.min_bound);
  return gap.min_gap_minus_bound >= -1e-10 * scale && gap.min_bound >= -1e-12 * scale;
}

bool criterion_certificate_refusal(std::string& detail) {
  const HexMesh mesh = HexMesh::structured({4, 4, 4}, Vec3::zero(), {{1, 1, 1}});
  QuadLogModel model(1.0 / 12.0, 0.25);
  const ConvexityReport evidence = hessian_psd_scan(model, 1000, 7, 1e-8);
  const SolveResult sol =
      solve(mesh, model, DirichletData::affine_map(Mat3::diag(0.5, 0.5, 0.5)));
  const Certificate cert = certify_global(sol.field, model, evidence);
  detail = "gate " + cert.failing_gate + ", min eigenvalue " +
           format_scientific(cert.min_s2_eigenvalue);
  return cert.status == CertificateStatus::Refused &&
         cert.failing_gate == "s2_positive_definite" &&
         approx(cert.min_s2_eigenvalue, -7.5, 1e-9);
}

bool criterion_derivative_consistency(std::string& detail) {
  double worst = 0.0;
  for (const auto& [label, model] : acceptance_models()) {
    for (int i = 0; i < 100; ++i) {
      Rng rng = Rng::for_index(101, static_cast<std::uint64_t>(i));
      const SymMat3 c = sample_psym(rng, 1.2);
      const DerivativeReport rep = verify_derivatives(*model, c, 1e-5);
      worst = std::max(worst, std::max(rep.grad_rel_err, rep.hess_rel_err));
      if (rep.grad_rel_err > 1e-5 || rep.hess_rel_err > 1e-5) {
        detail = label + ": derivative mismatch " +
                 format_scientific(std::max(rep.grad_rel_err, rep.hess_rel_err));
        return false;
      }
    }
  }
  detail = "max relative error " + format_scientific(worst);
  return true;
}

bool criterion_pipkin_hull(std::string& detail) {
  SaintVenantKirchhoffModel svk(1.0, 0.0);
  const ConvexityReport svk_ev = hessian_psd_scan(svk, 500, 7, 1e-8);
  const HullResult r = qw_evaluate(svk, Mat3::diag(0.1, 1, 1), svk_ev);
  // closed-form completion: shift diag(0.99,0,0) gives QW = 0, gap = W(F)
  const double expected_gap = 0.25 * 0.99 * 0.99;
  if (!approx(r.qw_value, 0.0, 1e-6) || !approx(r.gap, expected_gap, 1e-4)) {
    detail = "QW = " + format_scientific(r.qw_value) + ", gap = " + format_scientific(r.gap);
    return false;
  }
  QuadLogModel quad(1.0 / 12.0, 0.25);
  const ConvexityReport quad_ev = hessian_psd_scan(quad, 500, 7, 1e-8);
  const Mat3 f_tension = Mat3::diag(1.2, 1.1, 1.05);
  if (!is_positive_definite(quad.s2(right_cauchy_green(f_tension)), 1e-10).positive_definite) {
    detail = "tension point unexpectedly not PSD";
    return false;
  }
  const HullResult r2 = qw_evaluate(quad, f_tension, quad_ev);
  detail = "svk gap = " + format_scientific(r.gap) +
           ", psd-point gap = " + format_scientific(r2.gap);
  return std::abs(r2.gap) <= 1e-8;
}

bool criterion_monotonicity_equivalence(std::string& detail) {
  for (const auto& [label, model] : acceptance_models()) {
    const ConvexityReport hess = hessian_psd_scan(*model, 1000, 21, 1e-8);
    const ConvexityReport mono = s2_monotonicity_scan(*model, 1000, 21, 1e-8);
    const bool mono_ok = mono.min_value >= -1e-8;
    const bool hess_convex = hess.verdict == Verdict::Convex;
    if (mono_ok != hess_convex) {
      detail = label + ": monotonicity min " + format_scientific(mono.min_value) +
               " vs hessian verdict " + to_string(hess.verdict);
      return false;
    }
  }
  return true;
}

bool criterion_poisson(std::string& detail) {
  const LinearizedResponse quarter = linearized_response(NeoHookeModel(1.0, 0.25, -0.5));
  if (quarter.poisson != 0.25) {
    detail = "nu(1/4) = " + format_scientific(quarter.poisson);
    return false;
  }
  for (double alpha : {1e-3, 1.0, 1e3}) {
    const NeoHookeModel m(1.0, alpha, 1.0 - 6.0 * alpha);
    const double nu = linearized_response(m).poisson;
    const double expected = 0.5 * 4.0 * alpha / (4.0 * alpha + 1.0);
    if (!(nu > 0.0 && nu < 0.5) || !approx(nu, expected, 1e-15)) {
      detail = "nu(" + format_scientific(alpha) + ") = " + format_scientific(nu);
      return false;
    }
  }
  return true;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"det-convexity agreement (scalar conditions vs Hessian scan)", 10.0, criterion_det_convexity_agreement},
      {"stress-free reference states", 1.0, criterion_stress_free},
      {"svk dichotomy (convex in C, rank-one witness)", 30.0, criterion_svk_dichotomy},
      {"certificate soundness under homogeneous tension", 60.0, criterion_certificate_soundness},
      {"certificate refusal under homogeneous compression", 10.0, criterion_certificate_refusal},
      {"derivative consistency across the model suite", 30.0, criterion_derivative_consistency},
      {"pipkin hull values", 30.0, criterion_pipkin_hull},
      {"monotonicity/convexity equivalence", 30.0, criterion_monotonicity_equivalence},
      {"induced poisson coefficient", 1.0, criterion_poisson},
  };

  int failures = 0;
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    std::string detail;
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > c.time_limit_s) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + std::string("over time limit");
    }
    std::printf("[%s] criterion %d: %s (%.2f s%s%s)\n", ok ? "PASS" : "FAIL", index,
                c.label.c_str(), seconds, detail.empty() ? "" : "; ", detail.c_str());
    if (!ok) ++failures;
  }
  if (failures) std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
