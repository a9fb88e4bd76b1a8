#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "elastcert/errors.hpp"
#include "elastcert/sampling.hpp"
#include "elastcert/spectral.hpp"
#include "elastcert/tensor.hpp"

namespace elastcert {

/// Scalar function on R_+ given as a (value, first, second derivative) triple.
/// No symbolic differentiation happens anywhere; the caller supplies all three.
struct ScalarC2Function {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> ddf;
};

inline ScalarC2Function neg_log_function() {
  return {"neg_log", [](double s) { return -std::log(s); },
          [](double s) { return -1.0 / s; }, [](double s) { return 1.0 / (s * s); }};
}

inline ScalarC2Function power_function(double p) {
  return {"pow(" + std::to_string(p) + ")",
          [p](double s) { return std::pow(s, p); },
          [p](double s) { return p * std::pow(s, p - 1.0); },
          [p](double s) { return p * (p - 1.0) * std::pow(s, p - 2.0); }};
}

inline ScalarC2Function zero_function() {
  return {"zero", [](double) { return 0.0; }, [](double) { return 0.0; },
          [](double) { return 0.0; }};
}

namespace detail {

inline void require_psym(const SymMat3& c) {
  if (det(c) <= 0.0) throw DomainError("matrix outside PSym(3): det C <= 0");
}

/// log det C via eigenvalues (sum of logs); accurate near the cone boundary.
inline double log_det_psym(const SymMat3& c) {
  const SpectralDecomp d = spectral(c);
  if (d.eigenvalues[0] <= 0.0) throw DomainError("matrix outside PSym(3): log det undefined");
  return std::log(d.eigenvalues[0]) + std::log(d.eigenvalues[1]) + std::log(d.eigenvalues[2]);
}

}  // namespace detail

/// Hyperelastic energy W(F) = Whast(C) expressed in the right Cauchy-Green tensor.
/// Implementations provide the energy, the second Piola-Kirchhoff stress
/// S2(C) = 2 D_C What(C), and the Hessian of What as a Riesz map:
/// <hessian_apply(C, H), K> = D^2 What(C)[H, K] for symmetric H, K.
class EnergyModel {
public:
  virtual ~EnergyModel() = default;

  virtual std::string name() const = 0;
  virtual std::vector<std::pair<std::string, double>> parameters() const = 0;

  virtual double energy(const SymMat3& c) const = 0;
  virtual SymMat3 s2(const SymMat3& c) const = 0;

  /// Default is a central finite difference of s2 (D s2 = 2 D^2 What), used when
  /// no analytic Hessian exists; has_analytic_hessian() tells callers which one
  /// they are getting.
  virtual SymMat3 hessian_apply(const SymMat3& c, const SymMat3& h) const {
    const double nh = frobenius_norm(h);
    if (nh == 0.0) return SymMat3::zero();
    const double t = 1e-6 * (1.0 + frobenius_norm(c)) / nh;
    SymMat3 cp = c, cm = c;
    for (int i = 0; i < 6; ++i) {
      cp.a[i] += t * h.a[i];
      cm.a[i] -= t * h.a[i];
    }
    const SymMat3 diff = s2(cp) - s2(cm);
    return (1.0 / (4.0 * t)) * diff;
  }

  virtual bool has_analytic_hessian() const { return false; }
  virtual bool claims_convex_in_c() const { return false; }
  virtual bool claims_polyconvex() const { return false; }
};

/// What(C) = alpha (tr C)^2 + beta tr(C^2) - log det C.
/// The constrained constructor enforces the stress-free relation 6a + 2b = 1,
/// so D_C What(I) = (6a + 2b - 1) I = 0.
class QuadLogModel : public EnergyModel {
public:
  QuadLogModel(double alpha, double beta) : alpha_(alpha), beta_(beta), constrained_(true) {
    if (!(alpha > 0.0) || !(beta > 0.0))
      throw std::invalid_argument("quad_log: alpha, beta must be positive");
    if (std::abs(6.0 * alpha + 2.0 * beta - 1.0) > 1e-12)
      throw std::invalid_argument("quad_log: stress-free constraint 6a + 2b = 1 violated");
  }

  static QuadLogModel unconstrained(double alpha, double beta) {
    QuadLogModel m(Unchecked{}, alpha, beta);
    return m;
  }

  std::string name() const override { return "quad_log"; }
  std::vector<std::pair<std::string, double>> parameters() const override {
    return {{"alpha", alpha_}, {"beta", beta_}};
  }

  double energy(const SymMat3& c) const override {
    const double t = trace(c);
    return alpha_ * t * t + beta_ * inner(c, c) - detail::log_det_psym(c);
  }

  // S2 = 2 (2a tr(C) I + 2b C - C^{-1})
  SymMat3 s2(const SymMat3& c) const override {
    detail::require_psym(c);
    const SymMat3 cinv = inverse(c);
    SymMat3 g = (2.0 * alpha_ * trace(c)) * SymMat3::identity() + (2.0 * beta_) * c;
    return 2.0 * (g - cinv);
  }

  // D^2 What [H, .] = 2a tr(H) I + 2b H + C^{-1} H C^{-1}
  SymMat3 hessian_apply(const SymMat3& c, const SymMat3& h) const override {
    detail::require_psym(c);
    const SymMat3 cinv = inverse(c);
    return (2.0 * alpha_ * trace(h)) * SymMat3::identity() + (2.0 * beta_) * h +
           congruence(cinv, h);
  }

  bool has_analytic_hessian() const override { return true; }
  bool claims_convex_in_c() const override { return constrained_; }
  bool claims_polyconvex() const override { return constrained_; }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

private:
  struct Unchecked {};
  QuadLogModel(Unchecked, double alpha, double beta)
      : alpha_(alpha), beta_(beta), constrained_(false) {}

  double alpha_;
  double beta_;
  bool constrained_;
};

/// What(C) = alpha tr C + beta tr(C^2) - log det C with stress-free relation
/// a + 2b = 1.
class TraceLogModel : public EnergyModel {
public:
  TraceLogModel(double alpha, double beta) : alpha_(alpha), beta_(beta), constrained_(true) {
    if (!(alpha > 0.0) || !(beta > 0.0))
      throw std::invalid_argument("trace_log: alpha, beta must be positive");
    if (std::abs(alpha + 2.0 * beta - 1.0) > 1e-12)
      throw std::invalid_argument("trace_log: stress-free constraint a + 2b = 1 violated");
  }

  static TraceLogModel unconstrained(double alpha, double beta) {
    return TraceLogModel(Unchecked{}, alpha, beta);
  }

  std::string name() const override { return "trace_log"; }
  std::vector<std::pair<std::string, double>> parameters() const override {
    return {{"alpha", alpha_}, {"beta", beta_}};
  }

  double energy(const SymMat3& c) const override {
    return alpha_ * trace(c) + beta_ * inner(c, c) - detail::log_det_psym(c);
  }

  SymMat3 s2(const SymMat3& c) const override {
    detail::require_psym(c);
    return 2.0 * (alpha_ * SymMat3::identity() + (2.0 * beta_) * c - inverse(c));
  }

  SymMat3 hessian_apply(const SymMat3& c, const SymMat3& h) const override {
    detail::require_psym(c);
    return (2.0 * beta_) * h + congruence(inverse(c), h);
  }

  bool has_analytic_hessian() const override { return true; }
  bool claims_convex_in_c() const override { return constrained_; }
  bool claims_polyconvex() const override { return constrained_; }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

private:
  struct Unchecked {};
  TraceLogModel(Unchecked, double alpha, double beta)
      : alpha_(alpha), beta_(beta), constrained_(false) {}

  double alpha_;
  double beta_;
  bool constrained_;
};

/// Compressible Neo-Hooke member What(C) = mu (alpha (tr C)^2 + beta tr C - log det C).
/// Stress-free reference requires D_C What(I) = mu (6a + b - 1) I = 0, i.e. 6a + b = 1.
class NeoHookeModel : public EnergyModel {
public:
  NeoHookeModel(double mu, double alpha, double beta) : mu_(mu), alpha_(alpha), beta_(beta) {
    if (!(mu > 0.0)) throw std::invalid_argument("neo_hooke: mu must be positive");
    if (!(alpha > 0.0)) throw std::invalid_argument("neo_hooke: alpha must be positive");
    if (std::abs(6.0 * alpha + beta - 1.0) > 1e-12)
      throw std::invalid_argument("neo_hooke: stress-free constraint 6a + b = 1 violated");
  }

  std::string name() const override { return "neo_hooke"; }
  std::vector<std::pair<std::string, double>> parameters() const override {
    return {{"mu", mu_}, {"alpha", alpha_}, {"beta", beta_}};
  }

  double energy(const SymMat3& c) const override {
    const double t = trace(c);
    return mu_ * (alpha_ * t * t + beta_ * t - detail::log_det_psym(c));
  }

  SymMat3 s2(const SymMat3& c) const override {
    detail::require_psym(c);
    const SymMat3 g =
        (2.0 * alpha_ * trace(c) + beta_) * SymMat3::identity() - inverse(c);
    return (2.0 * mu_) * g;
  }

  SymMat3 hessian_apply(const SymMat3& c, const SymMat3& h) const override {
    detail::require_psym(c);
    return mu_ * ((2.0 * alpha_ * trace(h)) * SymMat3::identity() +
                  congruence(inverse(c), h));
  }

  bool has_analytic_hessian() const override { return true; }
  bool claims_convex_in_c() const override { return true; }

  double mu() const { return mu_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

private:
  double mu_;
  double alpha_;
  double beta_;
};

/// What(C) = (mu/4) ||C - I||^2 + (lambda/8) tr(C - I)^2. Convex in C exactly
/// when mu > 0 and 3 lambda + 2 mu > 0; no constraint is enforced at
/// construction, the convexity verdict comes from the scans.
class SaintVenantKirchhoffModel : public EnergyModel {
public:
  SaintVenantKirchhoffModel(double mu, double lambda) : mu_(mu), lambda_(lambda) {}

  std::string name() const override { return "svk"; }
  std::vector<std::pair<std::string, double>> parameters() const override {
    return {{"mu", mu_}, {"lambda", lambda_}};
  }

  double energy(const SymMat3& c) const override {
    const SymMat3 e = c - SymMat3::identity();
    const double t = trace(e);
    return 0.25 * mu_ * inner(e, e) + 0.125 * lambda_ * t * t;
  }

  // S2 = mu (C - I) + (lambda/2) tr(C - I) I
  SymMat3 s2(const SymMat3& c) const override {
    const SymMat3 e = c - SymMat3::identity();
    return mu_ * e + (0.5 * lambda_ * trace(e)) * SymMat3::identity();
  }

  // Constant operator: D^2 What [H, .] = (mu/2) H + (lambda/4) tr(H) I
  SymMat3 hessian_apply(const SymMat3&, const SymMat3& h) const override {
    return (0.5 * mu_) * h + (0.25 * lambda_ * trace(h)) * SymMat3::identity();
  }

  bool has_analytic_hessian() const override { return true; }
  bool claims_convex_in_c() const override { return mu_ > 0.0 && 3.0 * lambda_ + 2.0 * mu_ > 0.0; }

  double mu() const { return mu_; }
  double lambda() const { return lambda_; }

private:
  double mu_;
  double lambda_;
};

/// What(C) = f(det C) for a caller-supplied scalar triple.
class DetFunctionModel : public EnergyModel {
public:
  explicit DetFunctionModel(ScalarC2Function f) : f_(std::move(f)) {}

  std::string name() const override { return "det_function(" + f_.name + ")"; }
  std::vector<std::pair<std::string, double>> parameters() const override { return {}; }

  double energy(const SymMat3& c) const override {
    detail::require_psym(c);
    return f_.f(det(c));
  }

  // S2 = 2 f'(s) s C^{-1} with s = det C
  SymMat3 s2(const SymMat3& c) const override {
    detail::require_psym(c);
    const double s = det(c);
    return (2.0 * f_.df(s) * s) * inverse(c);
  }

  // D^2 [f(det C)](H, .) = (f'' s^2 + f' s) <C^{-1}, H> C^{-1} - f' s C^{-1} H C^{-1}
  SymMat3 hessian_apply(const SymMat3& c, const SymMat3& h) const override {
    detail::require_psym(c);
    const double s = det(c);
    const SymMat3 cinv = inverse(c);
    const double a = (f_.ddf(s) * s + f_.df(s)) * s;
    return (a * inner(cinv, h)) * cinv - (f_.df(s) * s) * congruence(cinv, h);
  }

  bool has_analytic_hessian() const override { return true; }

  const ScalarC2Function& scalar_function() const { return f_; }

private:
  ScalarC2Function f_;
};

/// Valanis-Landel energy: W(F) = sum_i wt(c_i) + g(det C), where c_i are the
/// eigenvalues of C (the squared singular values of F). The spectral Hessian
/// uses divided differences of wt' with a symmetric limit at near-degenerate
/// eigenvalue pairs.
class ValanisLandelModel : public EnergyModel {
public:
  explicit ValanisLandelModel(ScalarC2Function wt, ScalarC2Function g = zero_function())
      : wt_(std::move(wt)), g_(std::move(g)) {}

  std::string name() const override { return "valanis_landel(" + wt_.name + "," + g_.name + ")"; }
  std::vector<std::pair<std::string, double>> parameters() const override { return {}; }

  double energy(const SymMat3& c) const override {
    const SpectralDecomp d = eig_psym(c);
    double w = 0.0;
    for (double ci : d.eigenvalues) w += wt_.f(ci);
    return w + g_.f(d.eigenvalues[0] * d.eigenvalues[1] * d.eigenvalues[2]);
  }

  SymMat3 s2(const SymMat3& c) const override {
    const SpectralDecomp d = eig_psym(c);
    SymMat3 grad = SymMat3::zero();
    for (int k = 0; k < 3; ++k) {
      const Vec3 q = d.eigenvector(k);
      grad = grad + wt_.df(d.eigenvalues[k]) * SymMat3::symmetrized(outer(q, q));
    }
    const double s = d.eigenvalues[0] * d.eigenvalues[1] * d.eigenvalues[2];
    grad = grad + (g_.df(s) * s) * inverse(c);
    return 2.0 * grad;
  }

  SymMat3 hessian_apply(const SymMat3& c, const SymMat3& h) const override {
    const SpectralDecomp d = eig_psym(c);
    const Mat3 q = d.eigenvectors;
    const Mat3 ht = transpose(q) * h.to_mat() * q;

    // Daleckii-Krein: diagonal entries take wt'', off-diagonals the divided
    // difference of wt'; pairs closer than a relative threshold use the mean
    // of the endpoint second derivatives.
    Mat3 gt;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double ci = d.eigenvalues[i], cj = d.eigenvalues[j];
        double gamma;
        if (std::abs(ci - cj) <= 1e-7 * (1.0 + std::abs(ci) + std::abs(cj))) {
          gamma = 0.5 * (wt_.ddf(ci) + wt_.ddf(cj));
        } else {
          gamma = (wt_.df(ci) - wt_.df(cj)) / (ci - cj);
        }
        gt(i, j) = gamma * ht(i, j);
      }
    }
    SymMat3 spec_part = SymMat3::symmetrized(q * gt * transpose(q));

    const double s = d.eigenvalues[0] * d.eigenvalues[1] * d.eigenvalues[2];
    const SymMat3 cinv = inverse(c);
    const double a = (g_.ddf(s) * s + g_.df(s)) * s;
    const SymMat3 det_part =
        (a * inner(cinv, h)) * cinv - (g_.df(s) * s) * congruence(cinv, h);
    return spec_part + det_part;
  }

  bool has_analytic_hessian() const override { return true; }

  const ScalarC2Function& stretch_function() const { return wt_; }
  const ScalarC2Function& det_function() const { return g_; }

private:
  static SpectralDecomp eig_psym(const SymMat3& c) {
    const SpectralDecomp d = spectral(c);
    if (d.eigenvalues[0] <= 0.0)
      throw DomainError("matrix outside PSym(3): Valanis-Landel energy undefined");
    return d;
  }

  ScalarC2Function wt_;
  ScalarC2Function g_;
};

/// First Piola-Kirchhoff stress S1(F) = F S2(F^T F); generally non-symmetric.
inline Mat3 s1(const EnergyModel& model, const Mat3& f) {
  const SymMat3 c = right_cauchy_green(f);
  return f * model.s2(c).to_mat();
}

/// W(F) = What(F^T F); the frame-indifferent route every F-space evaluation takes.
inline double energy_from_gradient(const EnergyModel& model, const Mat3& f) {
  return model.energy(right_cauchy_green(f));
}

/// The C-Hessian as a symmetric 6x6 operator in Kelvin coordinates; eigenvalues
/// of the matrix equal the spectrum of the quadratic form H -> D^2 What(C)[H,H].
struct HessianKelvin {
  Mat6 matrix;
  bool analytic = true;  // false when the finite-difference fallback produced it
};

inline HessianKelvin hessian_c(const EnergyModel& model, const SymMat3& c) {
  HessianKelvin h;
  h.analytic = model.has_analytic_hessian();
  for (int j = 0; j < 6; ++j) {
    const KelvinVec6 col = sym_to_kelvin(model.hessian_apply(c, kelvin_basis(j)));
    for (int i = 0; i < 6; ++i) h.matrix(i, j) = col[i];
  }
  return h;
}

/// Quadratic form D^2 What(C)[H, H].
inline double hessian_quadratic_form(const EnergyModel& model, const SymMat3& c,
                                     const SymMat3& h) {
  return inner(model.hessian_apply(c, h), h);
}

/// Coefficients of the small-strain expansion of the Neo-Hooke member:
/// shear modulus mu, volumetric coefficient mu (2a + 1/3), and the induced
/// Poisson coefficient nu = (1/2) 4a / (4a + 1), always inside (0, 1/2).
struct LinearizedResponse {
  double shear_modulus = 0.0;
  double bulk_coefficient = 0.0;
  double poisson = 0.0;
};

inline LinearizedResponse linearized_response(const NeoHookeModel& model) {
  LinearizedResponse r;
  r.shear_modulus = model.mu();
  r.bulk_coefficient = model.mu() * (2.0 * model.alpha() + 1.0 / 3.0);
  r.poisson = 0.5 * (4.0 * model.alpha()) / (4.0 * model.alpha() + 1.0);
  return r;
}

/// Central finite-difference cross-check of the analytic derivatives:
/// s2/2 against the gradient of energy(), and hessian_apply against the
/// directional derivative of s2. The step shrinks with the distance to the
/// PSym boundary so log-det curvature stays resolvable.
struct DerivativeReport {
  double grad_rel_err = 0.0;
  double hess_rel_err = 0.0;
  bool hessian_analytic = true;
};

inline DerivativeReport verify_derivatives(const EnergyModel& model, const SymMat3& c,
                                           double h_base) {
  const SpectralDecomp d = spectral(c);
  if (d.eigenvalues[0] <= 0.0) throw DomainError("verify_derivatives: C outside PSym(3)");
  const double step = h_base * std::min(1.0 + frobenius_norm(c), d.eigenvalues[0]);
  if (d.eigenvalues[0] - step <= 0.0)
    throw DomainError("verify_derivatives: perturbation exits PSym(3)");

  DerivativeReport rep;
  rep.hessian_analytic = model.has_analytic_hessian();
  const KelvinVec6 grad = sym_to_kelvin(0.5 * model.s2(c));
  for (int j = 0; j < 6; ++j) {
    const SymMat3 e = kelvin_basis(j);
    const SymMat3 cp = c + step * e;
    const SymMat3 cm = c - step * e;

    const double fd_grad = (model.energy(cp) - model.energy(cm)) / (2.0 * step);
    const double ge = std::abs(fd_grad - grad[j]) / (1.0 + std::abs(grad[j]));
    rep.grad_rel_err = std::max(rep.grad_rel_err, ge);

    const SymMat3 fd_col = (1.0 / (4.0 * step)) * (model.s2(cp) - model.s2(cm));
    const SymMat3 an_col = model.hessian_apply(c, e);
    const double he =
        frobenius_norm(fd_col - an_col) / (1.0 + frobenius_norm(an_col));
    rep.hess_rel_err = std::max(rep.hess_rel_err, he);
  }
  return rep;
}

}  // namespace elastcert
