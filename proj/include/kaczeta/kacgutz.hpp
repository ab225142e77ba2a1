#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "kaczeta/model.hpp"
#include "kaczeta/quadrature.hpp"
#include "kaczeta/ruelle.hpp"
#include "kaczeta/specialfns.hpp"

namespace kaczeta {

enum class Parity { even, odd, both };

inline const char* to_string(Parity p) {
  switch (p) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    default: return "both";
  }
}

// Graded-lexicographically ordered multi-indices with |alpha| <= N,
// optionally restricted to one parity of |alpha|.
struct TruncatedBasis {
  int m = 1;
  int N = 0;
  Parity parity = Parity::both;
  std::vector<MultiIndex> indices;

  int size() const { return static_cast<int>(indices.size()); }
};

inline TruncatedBasis enumerate_basis(int m, int N, Parity parity = Parity::both) {
  if (m < 1) throw DomainError("enumerate_basis: m must be >= 1");
  if (N < 0) throw DomainError("enumerate_basis: N must be nonnegative");
  TruncatedBasis b;
  b.m = m;
  b.N = N;
  b.parity = parity;
  for_each_multi_index(m, N, [&](const std::vector<int>& a) {
    int deg = 0;
    for (int v : a) deg += v;
    if (parity == Parity::even && deg % 2 != 0) return;
    if (parity == Parity::odd && deg % 2 != 1) return;
    b.indices.push_back(MultiIndex{a});
  });
  return b;
}

// Matrix element of the modified Kac-Gutzwiller operator in the Hermite basis:
//   G_{alpha,delta} = (1+(-1)^{|mu|}) lambda^alpha (beta J)^{mu/2}
//                     sqrt(n!/M!) prod_i L_{n_i}^{(mu_i)}(-beta J_i)
// with mu_i = |alpha_i - delta_i|, M_i = max, n_i = min. Entries are entire in
// beta: only |mu| even survives, and for beta < 0 the (beta J)^{mu/2} factor
// contributes the sign (-1)^{|mu|/2}. Everything runs in log space.
namespace detail {

inline double g_element(const ModelParams& p, double beta, const MultiIndex& a,
                        const MultiIndex& d, bool symmetrized) {
  if (a.dim() != p.m || d.dim() != p.m)
    throw DomainError("matrix_element: multi-index dimension mismatch");
  int abs_mu = 0;
  for (int i = 0; i < p.m; ++i) abs_mu += std::abs(a[i] - d[i]);
  if (abs_mu % 2 != 0) return 0.0;
  if (beta == 0.0) {
    if (!(a == d)) return 0.0;
    return 2.0 * lambda_pow(p.lambda, a); // both conventions agree on the diagonal
  }
  double sign = (beta < 0.0 && (abs_mu / 2) % 2 != 0) ? -1.0 : 1.0;
  double logmag = std::log(2.0);
  const double abs_beta = std::abs(beta);
  for (int i = 0; i < p.m; ++i) {
    const int mu = std::abs(a[i] - d[i]);
    const int M = std::max(a[i], d[i]);
    const int nn = std::min(a[i], d[i]);
    const double lam_exp = symmetrized ? 0.5 * (a[i] + d[i]) : double(a[i]);
    logmag += lam_exp * std::log(p.lambda[i]);
    if (mu > 0) logmag += 0.5 * mu * std::log(abs_beta * p.J[i]);
    logmag += 0.5 * (log_factorial(nn) - log_factorial(M));
    const ScaledValue L = laguerre_scaled(nn, mu, -beta * p.J[i]);
    if (L.sign == 0.0) return 0.0;
    sign *= L.sign;
    logmag += L.log_abs;
  }
  return sign * std::exp(logmag);
}

} // namespace detail

inline double matrix_element(const ModelParams& p, double beta, const MultiIndex& a,
                             const MultiIndex& d) {
  return detail::g_element(p, beta, a, d, false);
}

// lambda^{(alpha+delta)/2} variant; symmetric in (alpha, delta) and similar to
// the raw matrix through D = diag(lambda^{alpha/2}).
inline double matrix_element_sym(const ModelParams& p, double beta, const MultiIndex& a,
                                 const MultiIndex& d) {
  return detail::g_element(p, beta, a, d, true);
}

struct GMatrix {
  TruncatedBasis basis;
  Eigen::MatrixXd entries;
  double beta = 0.0;
  ModelParams params;
};

// Debug dump as a JSON array-of-rows; not a stability-guaranteed format.
inline std::string gmatrix_to_json(const GMatrix& g) {
  std::string out = "{\"m\":" + std::to_string(g.basis.m) +
                    ",\"N\":" + std::to_string(g.basis.N) + ",\"beta\":";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", g.beta);
  out += buf;
  out += ",\"rows\":[";
  for (int r = 0; r < g.entries.rows(); ++r) {
    out += r ? ",[" : "[";
    for (int c = 0; c < g.entries.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", g.entries(r, c));
      if (c) out += ',';
      out += buf;
    }
    out += ']';
  }
  out += "]}";
  return out;
}

inline GMatrix assemble_matrix(const ModelParams& p, double beta,
                               const TruncatedBasis& basis) {
  if (basis.m != p.m) throw DomainError("assemble_matrix: basis dimension mismatch");
  GMatrix g;
  g.basis = basis;
  g.beta = beta;
  g.params = p;
  const int n = basis.size();
  g.entries.resize(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      g.entries(r, c) = matrix_element(p, beta, basis.indices[r], basis.indices[c]);
  return g;
}

inline Eigen::MatrixXd assemble_symmetrized(const ModelParams& p, double beta,
                                            const TruncatedBasis& basis) {
  if (basis.m != p.m) throw DomainError("assemble_symmetrized: basis dimension mismatch");
  const int n = basis.size();
  Eigen::MatrixXd S(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = r; c < n; ++c) {
      const double v = matrix_element_sym(p, beta, basis.indices[r], basis.indices[c]);
      S(r, c) = v;
      S(c, r) = v;
    }
  }
  return S;
}

// trace G_beta = 2 exp(sum beta J_l lambda_l/(1-lambda_l)) / prod (1-lambda_l);
// same closed form as trace L_beta.
inline double gtrace_closed(const ModelParams& p, double beta) {
  double expo = 0.0, det = 1.0;
  for (int l = 0; l < p.m; ++l) {
    expo += beta * p.J[l] * p.lambda[l] / (1.0 - p.lambda[l]);
    det *= 1.0 - p.lambda[l];
  }
  return 2.0 * std::exp(expo) / det;
}

// Partial diagonal sums 2 sum_{|alpha|<=N} lambda^alpha Phi(-alpha, 1; -beta J),
// evaluated through the hypergeometric series route.
inline double gtrace_partial_sum(const ModelParams& p, double beta, int N) {
  double sum = 0.0;
  for_each_multi_index(p.m, N, [&](const std::vector<int>& a) {
    double t = 2.0;
    for (int l = 0; l < p.m; ++l)
      t *= pow_int(p.lambda[l], a[l]) * confluent_phi(a[l], 0, -beta * p.J[l]);
    sum += t;
  });
  return sum;
}

// Mehler-type kernel K~(xi, eta) = 2 prod (4 pi sinh gamma)^{-1/2} exp(-...).
inline double kernel_Ktilde(const ModelParams& p, const std::vector<double>& xi,
                            const std::vector<double>& eta) {
  if (static_cast<int>(xi.size()) != p.m || static_cast<int>(eta.size()) != p.m)
    throw DomainError("kernel_Ktilde: dimension mismatch");
  double pref = 2.0, expo = 0.0;
  for (int l = 0; l < p.m; ++l) {
    const double sh = std::sinh(p.gamma[l]);
    pref /= std::sqrt(4.0 * kPi * sh);
    expo += (xi[l] * xi[l] + eta[l] * eta[l]) * std::tanh(0.5 * p.gamma[l]) +
            (xi[l] - eta[l]) * (xi[l] - eta[l]) / sh;
  }
  return pref * std::exp(-0.25 * expo);
}

// Kac-Gutzwiller kernel K_beta = (cosh(R.xi) cosh(R.eta))^{1/2} K~(xi, eta),
// R_l = sqrt(beta J_l); needs beta >= 0.
inline double kernel_K(const ModelParams& p, double beta, const std::vector<double>& xi,
                       const std::vector<double>& eta) {
  if (beta < 0.0) throw DomainError("kernel_K: beta must be nonnegative");
  if (static_cast<int>(xi.size()) != p.m || static_cast<int>(eta.size()) != p.m)
    throw DomainError("kernel_K: dimension mismatch");
  double rx = 0.0, re = 0.0;
  for (int l = 0; l < p.m; ++l) {
    const double R = std::sqrt(beta * p.J[l]);
    rx += R * xi[l];
    re += R * eta[l];
  }
  return std::sqrt(std::cosh(rx) * std::cosh(re)) * kernel_Ktilde(p, xi, eta);
}

// Circulant tridiagonal-with-corners inverse matrix B of the Kac A-matrix.
struct BMatrixResult {
  Eigen::MatrixXd B;
  double det_numeric = 0.0;  // by LU
  double det_closed = 0.0;   // 4 sinh^2(n gamma/2) / (2 betaJ sinh gamma)^n
  double min_eigenvalue = 0.0;
  bool positive_definite = false;
};

inline BMatrixResult kac_B_matrix(double betaJ, double gamma, int n) {
  if (n < 2) throw DomainError("kac_B_matrix: n must be >= 2");
  if (!(betaJ > 0.0) || !(gamma > 0.0))
    throw DomainError("kac_B_matrix: betaJ and gamma must be positive");
  const double sh = std::sinh(gamma);
  const double scale = 1.0 / (betaJ * sh);
  BMatrixResult r;
  r.B = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) r.B(i, i) = scale * std::cosh(gamma);
  if (n == 2) {
    // neighbor and wrap-around contributions coincide and add
    r.B(0, 1) = r.B(1, 0) = -scale;
  } else {
    for (int i = 0; i + 1 < n; ++i) r.B(i, i + 1) = r.B(i + 1, i) = -0.5 * scale;
    r.B(0, n - 1) = r.B(n - 1, 0) = -0.5 * scale;
  }
  r.det_numeric = Eigen::PartialPivLU<Eigen::MatrixXd>(r.B).determinant();
  const double s2 = std::sinh(0.5 * n * gamma);
  r.det_closed = 4.0 * s2 * s2 / std::pow(2.0 * betaJ * sh, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.B, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw EigensolveFailure("kac_B_matrix: eigensolve failed");
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  r.positive_definite = r.min_eigenvalue > 0.0;
  return r;
}

// The Kac A-matrix itself, A_ij = betaJ sum_k exp(-gamma |i-j+nk|); B = A^{-1}.
inline Eigen::MatrixXd kac_A_matrix(double betaJ, double gamma, int n) {
  if (n < 2) throw DomainError("kac_A_matrix: n must be >= 2");
  Eigen::MatrixXd A(n, n);
  const double q = std::exp(-gamma * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double d = std::abs(i - j);
      A(i, j) = betaJ * (std::exp(-gamma * d) +
                         2.0 * std::cosh(gamma * d) * q / (1.0 - q));
    }
  return A;
}

// Both sides of the cyclic quadratic-form identity
//   coth(g) sum x_i^2 - sum x_i x_{i-1} / sinh(g)
//     = (1/2) (tanh(g/2) sum (x_i^2 + x_{i-1}^2) + sum (x_i - x_{i-1})^2 / sinh(g)).
inline std::pair<double, double> form_identity_sides(double gamma,
                                                     const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  const double sh = std::sinh(gamma);
  double lhs = 0.0, rhs = 0.0;
  for (int i = 0; i < n; ++i) {
    const double xi = x[i];
    const double xm = x[(i - 1 + n) % n];
    lhs += std::cosh(gamma) / sh * xi * xi - xi * xm / sh;
    rhs += 0.5 * (std::tanh(0.5 * gamma) * (xi * xi + xm * xm) +
                  (xi - xm) * (xi - xm) / sh);
  }
  return {lhs, rhs};
}

// Cramer's Gaussian identity: e^{x.Ax/2} vs
// (2 pi)^{-n/2} (det B)^{1/2} int e^{x.z} e^{-z.Bz/2} dz with B = A^{-1}, n <= 2.
struct GaussianIdentityResult {
  double lhs = 0.0;
  double rhs = 0.0;
};

inline GaussianIdentityResult gaussian_identity_check(const Eigen::MatrixXd& A,
                                                      const Eigen::VectorXd& x,
                                                      double tol = 1e-6) {
  const int n = static_cast<int>(A.rows());
  if (n < 1 || n > 2 || A.cols() != n || x.size() != n)
    throw DomainError("gaussian_identity_check: need square A with n <= 2");
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * A.cwiseAbs().maxCoeff())
    throw DomainError("gaussian_identity_check: A must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw DomainError("gaussian_identity_check: A must be positive definite");

  GaussianIdentityResult r;
  r.lhs = std::exp(0.5 * x.dot(A * x));

  const Eigen::MatrixXd B = A.inverse();
  const double detB = Eigen::PartialPivLU<Eigen::MatrixXd>(B).determinant();
  const Eigen::VectorXd peak = A * x; // stationary point of x.z - z.Bz/2
  const double spread = 14.0 * std::sqrt(es.eigenvalues().maxCoeff());

  const double inner_tol = 1e-10 * r.lhs;
  double err = 0.0;
  double integral = 0.0;
  if (n == 1) {
    auto f = [&](double z) { return std::exp(x(0) * z - 0.5 * B(0, 0) * z * z); };
    auto q = adaptive_simpson<double>(f, peak(0) - spread, peak(0) + spread, inner_tol);
    integral = q.value;
    err = q.error_estimate;
  } else {
    auto outer = [&](double z0) {
      auto f = [&](double z1) {
        const double quad = B(0, 0) * z0 * z0 + 2.0 * B(0, 1) * z0 * z1 + B(1, 1) * z1 * z1;
        return std::exp(x(0) * z0 + x(1) * z1 - 0.5 * quad);
      };
      auto q = adaptive_simpson<double>(f, peak(1) - spread, peak(1) + spread, inner_tol);
      return q.value;
    };
    auto q = adaptive_simpson<double>(outer, peak(0) - spread, peak(0) + spread, inner_tol);
    integral = q.value;
    err = q.error_estimate;
  }
  r.rhs = std::pow(2.0 * kPi, -0.5 * n) * std::sqrt(detB) * integral;
  (void)err;
  if (!std::isfinite(r.rhs) || std::abs(r.lhs - r.rhs) > tol * std::abs(r.lhs))
    throw QuadratureFailure("gaussian_identity_check: quadrature tolerance unmet");
  return r;
}

} // namespace kaczeta
