#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "elastcert/convexity.hpp"
#include "elastcert/energy.hpp"
#include "elastcert/errors.hpp"
#include "elastcert/sampling.hpp"
#include "elastcert/spectral.hpp"
#include "elastcert/tensor.hpp"

namespace elastcert {

/// Quasiconvex hull value at one deformation gradient:
///   QW(F) = inf over PSD shifts S of What(F^T F + S),
/// valid when What is convex in C. The shift is parameterized as S = A A^T,
/// which reaches the cone boundary (rank-deficient optima) naturally.
struct HullResult {
  double qw_value = 0.0;
  double w_value = 0.0;
  SymMat3 argmin_shift;
  int starts_used = 0;
  double gap = 0.0;  // W(F) - QW(F) >= 0
  bool converged = false;
};

struct HullSettings {
  int starts = 16;  // A = 0, six axis dyads, the rest pseudo-random
  double tol = 1e-9;  // stationarity: ||grad|| <= tol * (1 + |objective|)
  int max_iterations = 500;
  std::uint64_t seed = 0;
  double shift_norm_cap = 1e6;  // beyond this the inf is reported unattained
};

namespace detail {

struct LocalMin {
  Mat3 a;
  double value = 0.0;
  bool converged = false;
};

/// Gradient descent with backtracking on h(A) = What(C + A A^T).
/// grad h = S2(C + A A^T) A, exact for every model.
inline LocalMin minimize_shift(const EnergyModel& model, const SymMat3& c, Mat3 a,
                               const HullSettings& settings) {
  LocalMin result;
  auto objective = [&](const Mat3& m) {
    return model.energy(c + SymMat3::symmetrized(m * transpose(m)));
  };
  double value = objective(a);
  double alpha = 1.0;
  for (int it = 0; it < settings.max_iterations; ++it) {
    const SymMat3 shifted = c + SymMat3::symmetrized(a * transpose(a));
    const Mat3 grad = model.s2(shifted).to_mat() * a;
    const double gnorm = frobenius_norm(grad);
    if (gnorm <= settings.tol * (1.0 + std::abs(value))) {
      result.converged = true;
      break;
    }
    if (frobenius_norm(a) > settings.shift_norm_cap) break;  // unattained inf

    bool stepped = false;
    double step = std::min(2.0 * alpha, 1e3 / (1.0 + gnorm));
    for (int halvings = 0; halvings < 60; ++halvings) {
      const Mat3 trial = a - step * grad;
      const double trial_value = objective(trial);
      if (trial_value <= value - 1e-4 * step * gnorm * gnorm) {
        a = trial;
        value = trial_value;
        alpha = step;
        stepped = true;
        break;
      }
      step *= 0.5;
    }
    if (!stepped) {
      // no descent direction left at floating-point resolution
      result.converged = gnorm <= 1e-6 * (1.0 + std::abs(value));
      break;
    }
  }
  result.a = a;
  result.value = value;
  return result;
}

inline std::vector<Mat3> shift_starts(const SymMat3& c, const HullSettings& settings) {
  std::vector<Mat3> starts;
  starts.push_back(Mat3::zero());
  const double r = frobenius_norm(c - SymMat3::identity());
  for (int i = 0; i < 3 && static_cast<int>(starts.size()) < settings.starts; ++i) {
    Mat3 d = Mat3::zero();
    d(i, i) = std::sqrt(r);
    starts.push_back(d);
  }
  for (int i = 0; i < 3 && static_cast<int>(starts.size()) < settings.starts; ++i) {
    Mat3 d = Mat3::zero();
    d(i, i) = std::sqrt(0.5 * r);
    starts.push_back(d);
  }
  Rng rng(settings.seed);
  const double scale = std::sqrt(r + 0.1);
  while (static_cast<int>(starts.size()) < settings.starts) {
    Mat3 m;
    for (int k = 0; k < 9; ++k) m.m[static_cast<std::size_t>(k)] = scale * rng.uniform(-1.0, 1.0);
    starts.push_back(m);
  }
  return starts;
}

}  // namespace detail

inline HullResult qw_evaluate(const EnergyModel& model, const Mat3& f,
                              const ConvexityReport& evidence,
                              const HullSettings& settings = {}) {
  if (evidence.verdict != Verdict::Convex)
    throw NotConvexEvidence("quasiconvex hull formula requires convexity in C evidence");
  const SymMat3 c = right_cauchy_green(f);

  HullResult result;
  result.w_value = model.energy(c);
  result.qw_value = std::numeric_limits<double>::infinity();

  const std::vector<Mat3> starts = detail::shift_starts(c, settings);
  result.starts_used = static_cast<int>(starts.size());
  for (const Mat3& start : starts) {
    const detail::LocalMin local = detail::minimize_shift(model, c, start, settings);
    if (local.value < result.qw_value) {
      result.qw_value = local.value;
      result.argmin_shift = SymMat3::symmetrized(local.a * transpose(local.a));
      result.converged = local.converged;
    }
  }
  result.gap = result.w_value - result.qw_value;
  return result;
}

/// KKT diagnostics on the PSD cone at the returned shift: along active
/// eigendirections (positive eigenvalue) of S the stress <S2(C+S), q q^T> must
/// vanish; along null directions it must be nonnegative.
struct ConeStationarity {
  double max_abs_active = 0.0;
  double min_null = std::numeric_limits<double>::infinity();
};

inline ConeStationarity cone_stationarity(const EnergyModel& model, const Mat3& f,
                                          const SymMat3& shift) {
  const SymMat3 c = right_cauchy_green(f);
  const SymMat3 s2 = model.s2(c + shift);
  const SpectralDecomp d = spectral(shift);
  const double active_threshold = 1e-8 * (1.0 + frobenius_norm(shift));
  ConeStationarity out;
  for (int k = 0; k < 3; ++k) {
    const Vec3 q = d.eigenvector(k);
    const double g = inner(s2, SymMat3::symmetrized(outer(q, q)));
    if (d.eigenvalues[static_cast<std::size_t>(k)] > active_threshold) {
      out.max_abs_active = std::max(out.max_abs_active, std::abs(g));
    } else {
      out.min_null = std::min(out.min_null, g);
    }
  }
  return out;
}

/// One row of a relaxation sweep; failed points carry their error and the
/// sweep continues.
struct HullSweepRow {
  double t = 0.0;
  Mat3 f;
  double w = 0.0;
  double qw = 0.0;
  double gap = 0.0;
  bool converged = false;
  std::string error;
};

inline std::vector<HullSweepRow> hull_sweep(const EnergyModel& model,
                                            const std::vector<std::pair<double, Mat3>>& path,
                                            const ConvexityReport& evidence,
                                            const HullSettings& settings = {}) {
  std::vector<HullSweepRow> rows;
  rows.reserve(path.size());
  for (const auto& [t, f] : path) {
    HullSweepRow row;
    row.t = t;
    row.f = f;
    try {
      const HullResult r = qw_evaluate(model, f, evidence, settings);
      row.w = r.w_value;
      row.qw = r.qw_value;
      row.gap = r.gap;
      row.converged = r.converged;
    } catch (const NotConvexEvidence&) {
      throw;  // a sweep without valid evidence is a caller error, not a row error
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

/// Uniaxial path F(t) = diag(t, 1, 1) over a log grid.
inline std::vector<std::pair<double, Mat3>> uniaxial_path(double t_lo, double t_hi, int points,
                                                          int axis = 0) {
  std::vector<std::pair<double, Mat3>> path;
  for (double t : log_grid(t_lo, t_hi, points)) {
    Mat3 f = Mat3::identity();
    f(axis, axis) = t;
    path.emplace_back(t, f);
  }
  return path;
}

}  // namespace elastcert
