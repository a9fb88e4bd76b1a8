#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "elastcert/energy.hpp"
#include "elastcert/sampling.hpp"
#include "elastcert/spectral.hpp"
#include "elastcert/tensor.hpp"

namespace elastcert {

enum class Verdict { Convex, NotConvex, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Convex: return "convex";
    case Verdict::NotConvex: return "not_convex";
    default: return "inconclusive";
  }
}

/// Counterexample payload. Only the fields relevant to the producing scan are
/// set; `value` is the offending quantity and re-evaluating the witness must
/// reproduce it to 1e-10.
struct ConvexityWitness {
  double value = 0.0;
  std::optional<double> grid_point;
  std::optional<SymMat3> point_c;
  std::optional<SymMat3> point_c2;
  std::optional<SymMat3> direction_h;
  std::optional<Mat3> point_f;
  std::optional<Vec3> dir_a;
  std::optional<Vec3> dir_b;
};

/// Outcome of one convexity check. Sampling can prove NotConvex (it carries a
/// witness) but a positive verdict is only ever "no violation within budget";
/// the provenance string records which claim is being made.
struct ConvexityReport {
  std::string scan;
  Verdict verdict = Verdict::Inconclusive;
  std::string provenance;
  long samples_used = 0;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  double min_value = 0.0;
  std::optional<ConvexityWitness> witness;
};

/// Log-spaced grid, endpoints included. The default 61 points over
/// [1e-3, 1e3] span the compression blow-up regime.
inline std::vector<double> log_grid(double lo = 1e-3, double hi = 1e3, int points = 61) {
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(points));
  if (points == 1) {
    g.push_back(lo);
    return g;
  }
  const double step = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i) g.push_back(lo * std::exp(step * i));
  return g;
}

/// Convexity of C -> f(det C) on PSym(n): holds iff
///   f''(s) + (n-1)/(n s) f'(s) >= 0  and  f'(s) <= 0  on R_+.
/// Both conditions are evaluated on the given grid with a -1e-12 slack.
inline ConvexityReport det_convexity_check(const ScalarC2Function& f, int n,
                                           std::span<const double> grid,
                                           double tol = 1e-12) {
  ConvexityReport rep;
  rep.scan = "det_convexity";
  rep.tolerance = tol;
  rep.samples_used = static_cast<long>(grid.size());
  rep.provenance = "analytic conditions evaluated on sampled grid";
  if (grid.empty() || n < 2) {
    rep.verdict = Verdict::Inconclusive;
    rep.provenance = "empty grid";
    return rep;
  }

  double min_margin = std::numeric_limits<double>::infinity();
  std::optional<ConvexityWitness> witness;
  for (double s : grid) {
    const double cond_curv = f.ddf(s) + (n - 1) / (static_cast<double>(n) * s) * f.df(s);
    const double cond_slope = -f.df(s);  // must be >= 0
    const double margin = std::min(cond_curv, cond_slope);
    if (margin < min_margin) {
      min_margin = margin;
      if (margin < -tol) {
        ConvexityWitness w;
        w.grid_point = s;
        w.value = margin;
        witness = w;
      }
    }
  }
  rep.min_value = min_margin;
  if (witness) {
    rep.verdict = Verdict::NotConvex;
    rep.witness = witness;
  } else {
    rep.verdict = Verdict::Convex;
  }
  return rep;
}

/// Re-evaluation hooks used by reports and tests.
inline double hessian_witness_value(const EnergyModel& model, const SymMat3& c,
                                    const SymMat3& h) {
  return inner(model.hessian_apply(c, h), h);
}

inline double monotonicity_witness_value(const EnergyModel& model, const SymMat3& c1,
                                         const SymMat3& c2) {
  return inner(model.s2(c1) - model.s2(c2), c1 - c2);
}

/// Second derivative of t -> W(F + t V) at t = 0 via the chain rule:
///   D^2_F W(F)[V, V] = <S2(C), V^T V> + 4 D^2 What(C)[sym(F^T V), sym(F^T V)].
inline double f_hessian_quadratic_form(const EnergyModel& model, const Mat3& f,
                                       const Mat3& v) {
  const SymMat3 c = right_cauchy_green(f);
  const SymMat3 vtv = SymMat3::symmetrized(transpose(v) * v);
  const SymMat3 g = SymMat3::symmetrized(transpose(f) * v);
  return inner(model.s2(c), vtv) + 4.0 * inner(model.hessian_apply(c, g), g);
}

inline double legendre_hadamard_value(const EnergyModel& model, const Mat3& f,
                                      const Vec3& a, const Vec3& b) {
  return f_hessian_quadratic_form(model, f, outer(a, b));
}

/// Positive-semidefiniteness scan of the Kelvin C-Hessian over sampled PSym(3)
/// points. A violation needs lambda_min < -tol (1 + ||operator||) at some
/// sample; the witness stores the sample and the offending eigendirection.
inline ConvexityReport hessian_psd_scan(const EnergyModel& model, long sample_count,
                                        std::uint64_t seed, double tol = 1e-8,
                                        double spread = 1.5) {
  ConvexityReport rep;
  rep.scan = "hessian_psd";
  rep.tolerance = tol;
  rep.seed = seed;
  rep.samples_used = sample_count;
  if (sample_count < 1) {
    rep.verdict = Verdict::Inconclusive;
    rep.provenance = "empty sample budget";
    return rep;
  }

  double min_lambda = std::numeric_limits<double>::infinity();
  double worst_ratio = std::numeric_limits<double>::infinity();
  std::optional<ConvexityWitness> witness;
  for (long i = 0; i < sample_count; ++i) {
    Rng rng = Rng::for_index(seed, static_cast<std::uint64_t>(i));
    const SymMat3 c = sample_psym(rng, spread);
    const HessianKelvin hk = hessian_c(model, c);
    const EigResult<6> eig = eigen6(hk.matrix);
    const double lmin = eig.values[0];
    min_lambda = std::min(min_lambda, lmin);
    const double ratio = lmin / (1.0 + frobenius_norm(hk.matrix));
    if (ratio < worst_ratio) {
      worst_ratio = ratio;
      if (ratio < -tol) {
        KelvinVec6 v;
        for (int k = 0; k < 6; ++k) v[k] = eig.vec(k, 0);
        ConvexityWitness w;
        w.point_c = c;
        w.direction_h = kelvin_to_sym(v);
        w.value = lmin;
        witness = w;
      }
    }
  }
  rep.min_value = min_lambda;
  if (witness) {
    rep.verdict = Verdict::NotConvex;
    rep.witness = witness;
    rep.provenance = "sampled: negative Hessian eigenvalue witness";
  } else {
    rep.verdict = Verdict::Convex;
    rep.provenance = "sampled: no violation within budget (not a universal claim)";
  }
  return rep;
}

/// Monotonicity of S2 over sampled pairs: min of <S2(C1) - S2(C2), C1 - C2>,
/// which is nonnegative exactly when What is convex in C.
inline ConvexityReport s2_monotonicity_scan(const EnergyModel& model, long pair_count,
                                            std::uint64_t seed, double tol = 1e-8,
                                            double spread = 1.5) {
  ConvexityReport rep;
  rep.scan = "s2_monotonicity";
  rep.tolerance = tol;
  rep.seed = seed;
  rep.samples_used = pair_count;
  if (pair_count < 1) {
    rep.verdict = Verdict::Inconclusive;
    rep.provenance = "empty sample budget";
    return rep;
  }

  double min_inner = std::numeric_limits<double>::infinity();
  std::optional<ConvexityWitness> witness;
  for (long i = 0; i < pair_count; ++i) {
    Rng rng = Rng::for_index(seed, static_cast<std::uint64_t>(i));
    const SymMat3 c1 = sample_psym(rng, spread);
    const SymMat3 c2 = sample_psym(rng, spread);
    const double m = monotonicity_witness_value(model, c1, c2);
    if (m < min_inner) {
      min_inner = m;
      if (m < -tol) {
        ConvexityWitness w;
        w.point_c = c1;
        w.point_c2 = c2;
        w.value = m;
        witness = w;
      }
    }
  }
  rep.min_value = min_inner;
  if (witness) {
    rep.verdict = Verdict::NotConvex;
    rep.witness = witness;
    rep.provenance = "sampled: monotonicity violation witness";
  } else {
    rep.verdict = Verdict::Convex;
    rep.provenance = "sampled: no violation within budget (not a universal claim)";
  }
  return rep;
}

struct DirectionPair {
  Vec3 a, b;
};

/// 9 coordinate dyads plus `extra_pairs` pairs drawn from a deterministic
/// Fibonacci sequence on the sphere. Axis-aligned instabilities (the classical
/// Saint Venant-Kirchhoff one included) sit in the coordinate dyads.
inline std::vector<DirectionPair> default_direction_samples(int extra_pairs = 32) {
  std::vector<DirectionPair> dirs;
  dirs.reserve(static_cast<std::size_t>(9 + extra_pairs));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) dirs.push_back({Vec3::unit(i), Vec3::unit(j)});
  const int n = 2 * std::max(extra_pairs, 1);
  for (int k = 0; k < extra_pairs; ++k) {
    dirs.push_back({fibonacci_sphere_point(2 * k, n), fibonacci_sphere_point(2 * k + 1, n)});
  }
  return dirs;
}

/// Uniaxial stretches diag-placed along each axis over a log grid in
/// [t_lo, t_hi], plus `random_count` sampled orientation-preserving gradients.
inline std::vector<Mat3> lh_default_f_samples(int random_count, std::uint64_t seed,
                                              double t_lo = 0.1, double t_hi = 2.0,
                                              int t_points = 7) {
  std::vector<Mat3> fs;
  for (double t : log_grid(t_lo, t_hi, t_points)) {
    fs.push_back(Mat3::diag(t, 1.0, 1.0));
    fs.push_back(Mat3::diag(1.0, t, 1.0));
    fs.push_back(Mat3::diag(1.0, 1.0, t));
  }
  Rng rng(seed);
  for (int i = 0; i < random_count; ++i) fs.push_back(sample_deformation_gradient(rng));
  return fs;
}

/// Rank-one (Legendre-Hadamard) scan in F. Sampling cannot prove rank-one
/// convexity, so the positive outcome is Inconclusive ("no violation found
/// within budget"); a witness yields NotConvex. Zero directions are skipped.
inline ConvexityReport legendre_hadamard_scan(const EnergyModel& model,
                                              std::span<const Mat3> f_samples,
                                              std::span<const DirectionPair> directions,
                                              double tol = 1e-8) {
  ConvexityReport rep;
  rep.scan = "legendre_hadamard";
  rep.tolerance = tol;

  double min_value = std::numeric_limits<double>::infinity();
  std::optional<ConvexityWitness> witness;
  long used = 0;
  for (const Mat3& f : f_samples) {
    for (const DirectionPair& d : directions) {
      if (norm(d.a) < 1e-12 || norm(d.b) < 1e-12) continue;
      const double q = legendre_hadamard_value(model, f, d.a, d.b);
      ++used;
      if (q < min_value) {
        min_value = q;
        if (q < -tol) {
          ConvexityWitness w;
          w.point_f = f;
          w.dir_a = d.a;
          w.dir_b = d.b;
          w.value = q;
          witness = w;
        }
      }
    }
  }
  rep.samples_used = used;
  rep.min_value = used ? min_value : 0.0;
  if (witness) {
    rep.verdict = Verdict::NotConvex;
    rep.witness = witness;
    rep.provenance = "sampled: rank-one violation witness";
  } else if (used == 0) {
    rep.verdict = Verdict::Inconclusive;
    rep.provenance = "empty sample budget";
  } else {
    rep.verdict = Verdict::Inconclusive;
    rep.provenance = "no rank-one violation found within budget (sampling cannot certify)";
  }
  return rep;
}

/// Davis criterion for Valanis-Landel energies: W is convex in C exactly when
/// the stretch function wt is convex, tested by wt'' >= 0 on the grid.
inline ConvexityReport davis_check(const ScalarC2Function& wt, std::span<const double> grid,
                                   double tol = 1e-12) {
  ConvexityReport rep;
  rep.scan = "davis";
  rep.tolerance = tol;
  rep.samples_used = static_cast<long>(grid.size());
  rep.provenance = "analytic second-derivative condition on sampled grid";
  if (grid.empty()) {
    rep.verdict = Verdict::Inconclusive;
    rep.provenance = "empty grid";
    return rep;
  }

  double min_curv = std::numeric_limits<double>::infinity();
  std::optional<ConvexityWitness> witness;
  for (double s : grid) {
    const double curv = wt.ddf(s);
    if (curv < min_curv) {
      min_curv = curv;
      if (curv < -tol) {
        ConvexityWitness w;
        w.grid_point = s;
        w.value = curv;
        witness = w;
      }
    }
  }
  rep.min_value = min_curv;
  if (witness) {
    rep.verdict = Verdict::NotConvex;
    rep.witness = witness;
  } else {
    rep.verdict = Verdict::Convex;
  }
  return rep;
}

}  // namespace elastcert
