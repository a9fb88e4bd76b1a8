#pragma once

#include <stdexcept>
#include <string>

namespace elastcert {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Deformation gradient numerically singular (|det F| below scale-relative floor).
class SingularGradient : public Error {
public:
  using Error::Error;
};

/// An iterative kernel exhausted its iteration budget.
class NoConvergence : public Error {
public:
  using Error::Error;
};

/// Input left the mathematical domain of an operation (e.g. det C <= 0 under log det).
class DomainError : public Error {
public:
  using Error::Error;
};

/// A deformation field violates det F > 0 at some quadrature point.
class InadmissibleField : public Error {
public:
  InadmissibleField(const std::string& what, int cell, int qp, double det_f)
      : Error(what), cell(cell), qp(qp), det_f(det_f) {}
  int cell = -1;
  int qp = -1;
  double det_f = 0.0;
};

/// Affine extension of the Dirichlet data is already inadmissible.
class InadmissibleBoundary : public Error {
public:
  using Error::Error;
};

/// A convexity report passed as evidence does not certify convexity.
class NotConvexEvidence : public Error {
public:
  using Error::Error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace elastcert
