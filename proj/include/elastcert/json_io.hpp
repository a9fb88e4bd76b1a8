#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "elastcert/certify.hpp"
#include "elastcert/convexity.hpp"
#include "elastcert/energy.hpp"
#include "elastcert/hull.hpp"
#include "elastcert/solver.hpp"

namespace elastcert {

/// All numeric output carries 17 significant digits: values round-trip
/// exactly and reruns with identical seeds produce byte-identical files.
inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Minimal streaming JSON writer with insertion-ordered keys.
class JsonWriter {
public:
  JsonWriter& begin_object() {
    separator();
    out_ += '{';
    fresh_ = true;
    return *this;
  }
  JsonWriter& end_object() {
    out_ += '}';
    fresh_ = false;
    return *this;
  }
  JsonWriter& begin_array() {
    separator();
    out_ += '[';
    fresh_ = true;
    return *this;
  }
  JsonWriter& end_array() {
    out_ += ']';
    fresh_ = false;
    return *this;
  }
  JsonWriter& key(std::string_view k) {
    separator();
    append_string(k);
    out_ += ':';
    fresh_ = true;
    return *this;
  }
  JsonWriter& value(double v) {
    separator();
    out_ += format_double(v);
    return *this;
  }
  JsonWriter& value(long v) {
    separator();
    out_ += std::to_string(v);
    return *this;
  }
  JsonWriter& value(unsigned long long v) {
    separator();
    out_ += std::to_string(v);
    return *this;
  }
  JsonWriter& value(bool v) {
    separator();
    out_ += v ? "true" : "false";
    return *this;
  }
  JsonWriter& value(std::string_view v) {
    separator();
    append_string(v);
    return *this;
  }
  JsonWriter& null() {
    separator();
    out_ += "null";
    return *this;
  }

  const std::string& str() const { return out_; }

private:
  void separator() {
    if (!fresh_ && !out_.empty() && out_.back() != '{' && out_.back() != '[' &&
        out_.back() != ':')
      out_ += ',';
    fresh_ = false;
  }
  void append_string(std::string_view s) {
    out_ += '"';
    for (char c : s) {
      switch (c) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\n': out_ += "\\n"; break;
        case '\t': out_ += "\\t"; break;
        default: out_ += c;
      }
    }
    out_ += '"';
  }

  std::string out_;
  bool fresh_ = true;
};

namespace detail {

inline void write_mat3(JsonWriter& w, const Mat3& m) {
  w.begin_array();
  for (int i = 0; i < 9; ++i) w.value(m.m[static_cast<std::size_t>(i)]);
  w.end_array();
}

inline void write_sym3(JsonWriter& w, const SymMat3& s) { write_mat3(w, s.to_mat()); }

inline void write_vec3(JsonWriter& w, const Vec3& v) {
  w.begin_array();
  for (int i = 0; i < 3; ++i) w.value(v[i]);
  w.end_array();
}

inline void write_witness(JsonWriter& w, const ConvexityWitness& wit) {
  w.begin_object();
  w.key("value").value(wit.value);
  if (wit.grid_point) w.key("grid_point").value(*wit.grid_point);
  if (wit.point_c) {
    w.key("c");
    write_sym3(w, *wit.point_c);
  }
  if (wit.point_c2) {
    w.key("c2");
    write_sym3(w, *wit.point_c2);
  }
  if (wit.direction_h) {
    w.key("direction_h");
    write_sym3(w, *wit.direction_h);
  }
  if (wit.point_f) {
    w.key("f");
    write_mat3(w, *wit.point_f);
  }
  if (wit.dir_a) {
    w.key("a");
    write_vec3(w, *wit.dir_a);
  }
  if (wit.dir_b) {
    w.key("b");
    write_vec3(w, *wit.dir_b);
  }
  w.end_object();
}

}  // namespace detail

inline void write_convexity_report(JsonWriter& w, const ConvexityReport& rep) {
  w.begin_object();
  w.key("scan").value(std::string_view(rep.scan));
  w.key("verdict").value(std::string_view(to_string(rep.verdict)));
  w.key("provenance").value(std::string_view(rep.provenance));
  w.key("samples_used").value(static_cast<long>(rep.samples_used));
  w.key("tolerance").value(rep.tolerance);
  w.key("seed").value(static_cast<unsigned long long>(rep.seed));
  w.key("min_value").value(rep.min_value);
  w.key("witness");
  if (rep.witness) {
    detail::write_witness(w, *rep.witness);
  } else {
    w.null();
  }
  w.end_object();
}

inline void write_model_info(JsonWriter& w, const EnergyModel& model) {
  w.begin_object();
  w.key("name").value(std::string_view(model.name()));
  w.key("parameters").begin_object();
  for (const auto& [k, v] : model.parameters()) w.key(k).value(v);
  w.end_object();
  w.key("claims_convex_in_c").value(model.claims_convex_in_c());
  w.key("claims_polyconvex").value(model.claims_polyconvex());
  w.key("has_analytic_hessian").value(model.has_analytic_hessian());
  w.end_object();
}

inline void write_certificate(JsonWriter& w, const Certificate& cert) {
  w.begin_object();
  w.key("status").value(std::string_view(to_string(cert.status)));
  w.key("failing_gate");
  if (cert.failing_gate.empty()) {
    w.null();
  } else {
    w.value(std::string_view(cert.failing_gate));
  }
  w.key("residual_norm").value(cert.residual_norm);
  w.key("min_s2_eigenvalue").value(cert.min_s2_eigenvalue);
  w.key("min_det_f").value(cert.min_det_f);
  w.key("tolerances").begin_object();
  w.key("residual").value(cert.tol_residual);
  w.key("pd").value(cert.tol_pd);
  w.key("det_floor").value(cert.det_floor);
  w.end_object();
  w.key("pd_scope").value(std::string_view(cert.pd_scope));
  w.key("convexity_evidence");
  write_convexity_report(w, cert.convexity_evidence);
  w.end_object();
}

inline void write_gap_report(JsonWriter& w, const GapReport& rep) {
  w.begin_object();
  w.key("min_gap_minus_bound").value(rep.min_gap_minus_bound);
  w.key("min_bound").value(rep.min_bound);
  w.key("perturbations").value(static_cast<long>(rep.perturbations));
  w.key("rescales").value(static_cast<long>(rep.rescales));
  w.key("base_energy").value(rep.base_energy);
  w.end_object();
}

inline void write_solve_summary(JsonWriter& w, const SolveResult& res) {
  w.begin_object();
  w.key("converged").value(res.converged);
  w.key("iterations").value(static_cast<long>(res.iterations));
  w.key("residual_norm").value(res.residual_norm);
  w.key("initial_residual").value(res.initial_residual);
  w.key("energy").value(res.energy);
  w.key("used_gradient_fallback").value(res.used_gradient_fallback);
  w.end_object();
}

inline void write_linearized_response(JsonWriter& w, const LinearizedResponse& r) {
  w.begin_object();
  w.key("shear_modulus").value(r.shear_modulus);
  w.key("bulk_coefficient").value(r.bulk_coefficient);
  w.key("poisson").value(r.poisson);
  w.end_object();
}

/// node index, reference coordinates, deformed values; 17 significant digits.
inline std::string field_to_csv(const DeformationField& field) {
  std::string csv = "node,x,y,z,phi_x,phi_y,phi_z\n";
  for (long n = 0; n < field.mesh.node_count(); ++n) {
    const Vec3 x = field.mesh.node_position(n);
    const Vec3& v = field.values[static_cast<std::size_t>(n)];
    csv += std::to_string(n);
    for (int k = 0; k < 3; ++k) csv += "," + format_double(x[k]);
    for (int k = 0; k < 3; ++k) csv += "," + format_double(v[k]);
    csv += '\n';
  }
  return csv;
}

inline std::string sweep_to_csv(const std::vector<HullSweepRow>& rows) {
  std::string csv = "t,F11,F12,F13,F21,F22,F23,F31,F32,F33,W,QW,gap,converged\n";
  for (const auto& row : rows) {
    csv += format_double(row.t);
    for (int i = 0; i < 9; ++i) csv += "," + format_double(row.f.m[static_cast<std::size_t>(i)]);
    if (row.error.empty()) {
      csv += "," + format_double(row.w) + "," + format_double(row.qw) + "," +
             format_double(row.gap) + "," + (row.converged ? "1" : "0");
    } else {
      csv += ",error,error,error,0";
    }
    csv += '\n';
  }
  return csv;
}

}  // namespace elastcert
