#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "kaczeta/kacgutz.hpp"
#include "kaczeta/model.hpp"
#include "kaczeta/ruelle.hpp"

namespace kaczeta {

// Real eigenvalues of the truncated operator with parity labels.
struct SpectralResult {
  std::vector<double> eigenvalues; // descending
  std::vector<Parity> parities;    // even/odd, aligned with eigenvalues
  int N = 0;
  double tail_gap = 0.0; // max eigenvalue movement between degrees N-2 and N
};

namespace detail {

struct LabeledSpectrum {
  std::vector<double> values;
  std::vector<Parity> parities;
};

inline Eigen::VectorXd block_eigenvalues(const ModelParams& p, double beta,
                                         const TruncatedBasis& basis) {
  if (basis.size() == 0) return Eigen::VectorXd();
  if (beta == 0.0) { // exact diagonal degeneration
    Eigen::VectorXd v(basis.size());
    for (int i = 0; i < basis.size(); ++i)
      v(i) = 2.0 * lambda_pow(p.lambda, basis.indices[i]);
    std::sort(v.data(), v.data() + v.size());
    return v;
  }
  const Eigen::MatrixXd S = assemble_symmetrized(p, beta, basis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw EigensolveFailure("block_eigenvalues: symmetric eigensolve failed");
  return es.eigenvalues();
}

inline LabeledSpectrum merged_spectrum(const ModelParams& p, double beta, int N) {
  LabeledSpectrum out;
  for (Parity par : {Parity::even, Parity::odd}) {
    const TruncatedBasis b = enumerate_basis(p.m, N, par);
    const Eigen::VectorXd v = block_eigenvalues(p, beta, b);
    for (int i = 0; i < v.size(); ++i) {
      out.values.push_back(v(i));
      out.parities.push_back(par);
    }
  }
  std::vector<int> order(out.values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return out.values[a] > out.values[b]; });
  LabeledSpectrum sorted;
  sorted.values.reserve(order.size());
  for (int i : order) {
    sorted.values.push_back(out.values[i]);
    sorted.parities.push_back(out.parities[i]);
  }
  return sorted;
}

} // namespace detail

// Spectrum of the truncated operator via the symmetric similar matrix
// S = diag(lambda^{-alpha/2}) G diag(lambda^{alpha/2}), parity blocks solved
// separately.  Real by construction for real beta.
inline SpectralResult eigenvalues(const ModelParams& p, double beta, int N) {
  if (N < 2) throw DomainError("eigenvalues: truncation degree must be >= 2");
  detail::LabeledSpectrum fine = detail::merged_spectrum(p, beta, N);
  detail::LabeledSpectrum coarse = detail::merged_spectrum(p, beta, N - 2);
  SpectralResult r;
  r.eigenvalues = std::move(fine.values);
  r.parities = std::move(fine.parities);
  r.N = N;
  r.tail_gap = 0.0;
  for (std::size_t k = 0; k < coarse.values.size(); ++k)
    r.tail_gap = std::max(r.tail_gap, std::abs(r.eigenvalues[k] - coarse.values[k]));
  return r;
}

// Symmetric solve with eigenvectors, for eigenfunction reconstruction.
struct EigenSystem {
  TruncatedBasis basis;
  std::vector<double> values;  // descending
  Eigen::MatrixXd vectors;     // columns aligned with values
};

inline EigenSystem eigen_system(const ModelParams& p, double beta,
                                const TruncatedBasis& basis) {
  EigenSystem sys;
  sys.basis = basis;
  const Eigen::MatrixXd S = assemble_symmetrized(p, beta, basis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success)
    throw EigensolveFailure("eigen_system: symmetric eigensolve failed");
  const int n = basis.size();
  sys.values.resize(n);
  sys.vectors.resize(n, n);
  for (int i = 0; i < n; ++i) { // Eigen returns ascending
    sys.values[i] = es.eigenvalues()(n - 1 - i);
    sys.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return sys;
}

// Eigenvalues of the raw (nonsymmetric) truncated matrix, used to check that
// reality is not an artifact of the symmetrized solve.
inline std::vector<Complex> eigenvalues_nonsymmetric(const ModelParams& p, double beta,
                                                     const TruncatedBasis& basis) {
  const GMatrix g = assemble_matrix(p, beta, basis);
  Eigen::EigenSolver<Eigen::MatrixXd> es(g.entries, false);
  if (es.info() != Eigen::Success)
    throw EigensolveFailure("eigenvalues_nonsymmetric: eigensolve failed");
  std::vector<Complex> out(es.eigenvalues().size());
  for (int i = 0; i < es.eigenvalues().size(); ++i) out[i] = es.eigenvalues()(i);
  return out;
}

// det(1 - z * scale * A) truncated to the computed eigenvalues.
inline Complex fredholm_det(const SpectralResult& spec, Complex z, double scale) {
  Complex prod = 1.0;
  for (double rho : spec.eigenvalues) prod *= 1.0 - z * scale * rho;
  return prod;
}

struct ZetaFactor {
  std::vector<int> alpha;  // in {0,1}^m
  Complex det;             // det(1 - z lambda^alpha L_beta) at degree N
  Complex det_coarse;      // same at degree N-4
  bool converged = true;   // |det - det_coarse| <= 1e-6 max(1,|det|)
};

// zeta_R(z, beta) in factored form.
struct ZetaValue {
  Complex z;
  double beta = 0.0;
  Complex value;
  std::vector<ZetaFactor> factors;
  int N = 0;
};

inline ZetaValue zeta(const ModelParams& p, double beta, Complex z, int N) {
  const SpectralResult fine = eigenvalues(p, beta, N);
  const SpectralResult coarse = eigenvalues(p, beta, std::max(2, N - 4));
  ZetaValue out;
  out.z = z;
  out.beta = beta;
  out.N = N;
  out.value = 1.0;
  for (int t = 0; t < (1 << p.m); ++t) {
    ZetaFactor f;
    f.alpha.resize(p.m);
    int deg = 0;
    double scale = 1.0;
    for (int l = 0; l < p.m; ++l) {
      f.alpha[l] = (t >> l) & 1;
      deg += f.alpha[l];
      if (f.alpha[l]) scale *= p.lambda[l];
    }
    const bool denominator = deg % 2 == 0; // exponent (-1)^{|alpha|+1}
    if (denominator) {
      for (double rho : fine.eigenvalues) {
        const Complex factor = 1.0 - z * scale * rho;
        if (std::abs(factor) < 1e-10 * (1.0 + std::abs(z * scale * rho)))
          throw PoleAt(beta, z, f.alpha);
      }
    }
    f.det = fredholm_det(fine, z, scale);
    f.det_coarse = fredholm_det(coarse, z, scale);
    f.converged = std::abs(f.det - f.det_coarse) <=
                  1e-6 * std::max(1.0, std::abs(f.det));
    if (denominator)
      out.value /= f.det;
    else
      out.value *= f.det;
    out.factors.push_back(std::move(f));
  }
  return out;
}

// Truncated defining series exp(sum_{n<=n_terms} z^n/n Z_n(beta)), with Z_n from
// the brute-force oracle; independent cross-check of the determinant route.
inline Complex zeta_series_partial(const ModelParams& p, double beta, Complex z,
                                   int n_terms, int n_max = -1, int threads = 1) {
  double c = 0.0;
  for (int l = 0; l < p.m; ++l) c += p.J[l] * p.lambda[l] / (1.0 - p.lambda[l]);
  if (!(std::abs(z) * 2.0 * std::exp(std::abs(beta) * c) < 1.0))
    throw ConvergenceDomain("zeta_series_partial: |z| 2 e^{|beta| c} must be < 1");
  if (n_terms < 0) throw DomainError("zeta_series_partial: n_terms must be >= 0");
  Complex sum = 0.0;
  Complex zn = 1.0;
  for (int n = 1; n <= n_terms; ++n) {
    zn *= z;
    const double Zn = beta == 0.0
                          ? std::ldexp(1.0, n) // every Boltzmann factor is 1
                          : partition_function_bruteforce(p, beta, n, n_max, threads);
    sum += zn / static_cast<double>(n) * Zn;
  }
  return std::exp(sum);
}

enum class RootKind { zero, pole };

struct FactorRoot {
  double beta_star = 0.0;
  std::vector<int> alpha;
  RootKind kind = RootKind::zero;
  double det_value = 0.0;
};

// Bracket sign changes of d_alpha(beta) = det(1 - z lambda^alpha L_beta) on a
// beta grid and bisect to width 1e-10.  Roots of distinct factors are reported
// separately; cancellation between factors is the caller's concern.
inline std::vector<FactorRoot> find_real_zeros_poles(const ModelParams& p, double z,
                                                     double beta_lo, double beta_hi,
                                                     int N, double grid_step) {
  if (!(grid_step > 0.0)) throw DomainError("find_real_zeros_poles: grid_step must be > 0");
  if (beta_hi < beta_lo) throw DomainError("find_real_zeros_poles: empty range");

  const int nfac = 1 << p.m;
  auto dets = [&](double beta) {
    const SpectralResult spec = eigenvalues(p, beta, N);
    std::vector<double> d(nfac);
    for (int t = 0; t < nfac; ++t) {
      double scale = 1.0;
      for (int l = 0; l < p.m; ++l)
        if ((t >> l) & 1) scale *= p.lambda[l];
      d[t] = fredholm_det(spec, z, scale).real();
    }
    return d;
  };

  std::vector<double> grid;
  for (double b = beta_lo; b <= beta_hi + 1e-12; b += grid_step) grid.push_back(b);
  if (grid.empty()) return {};

  std::vector<std::vector<double>> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = dets(grid[i]);

  std::vector<FactorRoot> roots;
  for (int t = 0; t < nfac; ++t) {
    std::vector<int> alpha(p.m);
    int deg = 0;
    for (int l = 0; l < p.m; ++l) {
      alpha[l] = (t >> l) & 1;
      deg += alpha[l];
    }
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      double a = grid[i], b = grid[i + 1];
      double fa = vals[i][t], fb = vals[i + 1][t];
      if (fa == 0.0) fa = -std::copysign(1e-300, fb);
      if (!(fa < 0.0) == !(fb < 0.0)) continue; // no sign change
      while (b - a > 1e-10) {
        const double mid = 0.5 * (a + b);
        const double fm = dets(mid)[t];
        if ((fm < 0.0) == (fa < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      FactorRoot r;
      r.beta_star = 0.5 * (a + b);
      r.alpha = alpha;
      r.kind = deg % 2 == 0 ? RootKind::pole : RootKind::zero;
      r.det_value = dets(r.beta_star)[t];
      roots.push_back(std::move(r));
    }
  }
  std::sort(roots.begin(), roots.end(), [](const FactorRoot& a, const FactorRoot& b) {
    return a.beta_star != b.beta_star ? a.beta_star < b.beta_star : a.alpha < b.alpha;
  });
  return roots;
}

enum class Direction { plus_inf, minus_inf };

// Leading-order eigenvalue prediction for |beta| -> infinity, lambda_l < 1/2.
// The minus_inf branch follows the proof's exp(-beta J.(1+Lambda)^{-1} lambda)
// form, not the statement's.
inline double asymptotic_prediction(const ModelParams& p, const MultiIndex& alpha,
                                    double beta, Direction dir, Parity parity) {
  if (parity == Parity::both)
    throw DomainError("asymptotic_prediction: parity must be even or odd");
  for (double l : p.lambda)
    if (!(l < 0.5)) throw DomainError("asymptotic_prediction: requires lambda_l < 1/2");
  if (alpha.dim() != p.m) throw DomainError("asymptotic_prediction: dimension mismatch");
  double arg = 0.0;
  for (int l = 0; l < p.m; ++l) {
    if (dir == Direction::plus_inf)
      arg += beta * p.J[l] * p.lambda[l] / (1.0 - p.lambda[l]);
    else
      arg += -beta * p.J[l] * p.lambda[l] / (1.0 + p.lambda[l]);
  }
  double sign = 1.0;
  if (dir == Direction::minus_inf) {
    const int k = total_degree(alpha) + (parity == Parity::odd ? 1 : 0);
    sign = k % 2 == 0 ? 1.0 : -1.0;
  }
  return sign * lambda_pow(p.lambda, alpha) * std::exp(arg);
}

// Multiplicity of eigenvalues within rel_tol of target.
inline int degeneracy_count(const SpectralResult& spec, double target, double rel_tol) {
  if (!(rel_tol > 0.0)) throw DomainError("degeneracy_count: rel_tol must be > 0");
  int n = 0;
  for (double rho : spec.eigenvalues)
    if (std::abs(rho - target) <= rel_tol * std::abs(target)) ++n;
  return n;
}

// Both sides of the binomial identity
//   sum_k C(m,2k) C(m-2k+r, l) = sum_k C(m,2k+1) C(m-2k+r-1, l).
inline std::pair<long long, long long> binom_identity_check(int m, int r, int l) {
  if (m < 2 || r < 0 || l < 0 || l > m - 1)
    throw DomainError("binom_identity_check: need m >= 2, r >= 0, 0 <= l <= m-1");
  long long lhs = 0, rhs = 0;
  for (int k = 0; 2 * k <= m; ++k) lhs += binomial(m, 2 * k) * binomial(m - 2 * k + r, l);
  for (int k = 0; 2 * k + 1 <= m; ++k)
    rhs += binomial(m, 2 * k + 1) * binomial(m - 2 * k + r - 1, l);
  return {lhs, rhs};
}

namespace detail {

inline double powi_signed(double x, long long e) {
  double r = 1.0, b = x;
  for (long long k = e; k > 0; k >>= 1) {
    if (k & 1) r *= b;
    b *= b;
  }
  return r;
}

} // namespace detail

// Truncated product over the lambda=1/2 eigenfamily contributions versus the
// closed reduction (1 - lambda0 rho1)/(1 - rho1), rho1 = e^{beta sum J}.
inline std::pair<double, double> half_reduction_check(const ModelParams& p, double beta,
                                                      int r_max) {
  for (double l : p.lambda)
    if (std::abs(l - 0.5) > 1e-14)
      throw DomainError("half_reduction_check: requires lambda_l = 1/2");
  if (r_max < 0) throw DomainError("half_reduction_check: r_max must be >= 0");
  double Jsum = 0.0;
  for (double j : p.J) Jsum += j;
  const double rho1 = std::exp(beta * Jsum);
  if (std::abs(1.0 - rho1) < 1e-12) throw PoleAt(beta, 1.0, {});
  const double lam0 = 0.5;

  double num = 1.0, den = 1.0;
  for (int k = 0; k <= p.m; ++k) {
    for (int r = 0; r <= r_max; ++r) {
      const long long e = binomial(p.m, k) * dim_translation_invariant(p.m, r);
      if (e == 0) continue;
      const double t = detail::powi_signed(1.0 - pow_int(lam0, k + r) * rho1, e);
      if (k % 2 == 1)
        num *= t; // exponent (-1)^{k+1} = +1
      else
        den *= t;
    }
  }
  const double product = num / den;
  const double closed = (1.0 - lam0 * rho1) / (1.0 - rho1);
  return {product, closed};
}

namespace detail {

inline Complex cpow_int(Complex x, int n) {
  Complex r = 1.0, b = x;
  for (int k = n; k > 0; k >>= 1) {
    if (k & 1) r *= b;
    b *= b;
  }
  return r;
}

} // namespace detail

// Polynomial eigenfunction candidate of L_beta from a symmetric-solve
// eigenvector: F(z) = sum_alpha lambda^{-alpha/2} v_alpha zeta_alpha(A0^{-1} z)
// with zeta_alpha(w) = sqrt(pi^{|alpha|}/alpha!) w^alpha and
// (A0^{-1})_ii = sqrt(beta J_i / pi).
inline EntireFunctionSample reconstruct_eigenfunction(const ModelParams& p, double beta,
                                                      const TruncatedBasis& basis,
                                                      const Eigen::VectorXd& v) {
  if (!(beta > 0.0)) throw DomainError("reconstruct_eigenfunction: beta must be positive");
  if (v.size() != basis.size())
    throw DomainError("reconstruct_eigenfunction: eigenvector length mismatch");

  struct Term {
    double coeff;
    MultiIndex alpha;
  };
  auto terms = std::make_shared<std::vector<Term>>();
  for (int j = 0; j < basis.size(); ++j) {
    const MultiIndex& a = basis.indices[j];
    double logl = 0.0;
    for (int i = 0; i < p.m; ++i) logl += a[i] * std::log(p.lambda[i]);
    const double unscale = std::exp(-0.5 * logl); // lambda^{-alpha/2}
    const double zcoef =
        std::exp(0.5 * (total_degree(a) * std::log(kPi) - log_factorial(a)));
    terms->push_back({v(j) * unscale * zcoef, a});
  }
  std::vector<double> a0inv(p.m);
  for (int i = 0; i < p.m; ++i) a0inv[i] = std::sqrt(beta * p.J[i] / kPi);

  auto evaluator = [terms, a0inv, m = p.m](const CVec& z) {
    Complex sum = 0.0;
    for (const auto& t : *terms) {
      Complex mono = t.coeff;
      for (int i = 0; i < m; ++i) mono *= detail::cpow_int(a0inv[i] * z[i], t.alpha[i]);
      sum += mono;
    }
    return sum;
  };
  return make_function_sample(p, evaluator);
}

// Segal-Bargmann transform (Bf)(z) = 2^{m/4} int f(x) e^{2 pi x.z - pi x^2 - pi z^2/2} dx
// by adaptive quadrature, m <= 2.  f must decay like a Gaussian.
inline Complex bargmann_quadrature(const std::function<double(const std::vector<double>&)>& f,
                                   const CVec& z, double tol = 1e-8) {
  const int m = static_cast<int>(z.size());
  if (m < 1 || m > 2) throw DomainError("bargmann_quadrature: m must be 1 or 2");

  Complex zsq = 0.0;
  double remax = 0.0;
  for (const Complex& zi : z) {
    zsq += zi * zi;
    remax = std::max(remax, std::abs(zi.real()));
  }
  const double L = 8.0 + remax;
  const double inner_tol = tol * 1e-2;

  QuadResult<Complex> q{};
  if (m == 1) {
    auto g = [&](double x) {
      return f({x}) * std::exp(Complex(2.0 * kPi * x) * z[0] - Complex(kPi * x * x));
    };
    q = adaptive_simpson<Complex>(g, -L, L, inner_tol);
  } else {
    auto outer = [&](double x0) {
      auto g = [&](double x1) {
        const Complex dot = Complex(2.0 * kPi) * (x0 * z[0] + x1 * z[1]);
        return f({x0, x1}) * std::exp(dot - Complex(kPi * (x0 * x0 + x1 * x1)));
      };
      return adaptive_simpson<Complex>(g, -L, L, inner_tol).value;
    };
    q = adaptive_simpson<Complex>(outer, -L, L, inner_tol);
  }
  if (!(q.error_estimate <= tol))
    throw QuadratureFailure("bargmann_quadrature: error estimate above tolerance");
  return std::pow(2.0, 0.25 * m) * std::exp(Complex(-0.5 * kPi) * zsq) * q.value;
}

// trace(M^k) by repeated multiplication.
inline double matrix_trace_power(const Eigen::MatrixXd& M, int k) {
  if (k < 1) throw DomainError("matrix_trace_power: k must be >= 1");
  if (k == 1) return M.trace();
  Eigen::MatrixXd P = M;
  for (int i = 2; i <= k; ++i) P = P * M;
  return P.trace();
}

} // namespace kaczeta
