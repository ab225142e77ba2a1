#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace kaczeta {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Invalid parameter or argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

// Requested enumeration exceeds the configured 2^n cap.
class CapExceeded : public Error {
public:
  using Error::Error;
};

// (beta, z) outside the convergence domain of the zeta power series.
class ConvergenceDomain : public Error {
public:
  using Error::Error;
};

class QuadratureFailure : public Error {
public:
  using Error::Error;
};

class EigensolveFailure : public Error {
public:
  using Error::Error;
};

// A denominator Fredholm determinant vanished within tolerance.
class PoleAt : public Error {
public:
  PoleAt(double beta_, std::complex<double> z_, std::vector<int> alpha_)
      : Error("zeta pole: denominator determinant vanishes"),
        beta(beta_), z(z_), alpha(std::move(alpha_)) {}

  double beta;
  std::complex<double> z;
  std::vector<int> alpha;
};

} // namespace kaczeta
