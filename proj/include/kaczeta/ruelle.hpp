#pragma once

#include <bit>
#include <complex>
#include <functional>
#include <random>
#include <thread>
#include <vector>

#include "kaczeta/model.hpp"
#include "kaczeta/specialfns.hpp"

namespace kaczeta {

using Complex = std::complex<double>;
using CVec = std::vector<Complex>;

// psi(z) = scale * z + shift with |scale_ll| < 1, so psi has a unique fixed point.
struct AffineContraction {
  std::vector<double> scale;
  std::vector<double> shift;
};

inline std::vector<double> fixed_point(const AffineContraction& psi) {
  if (psi.scale.size() != psi.shift.size())
    throw DomainError("fixed_point: scale/shift dimension mismatch");
  std::vector<double> z(psi.scale.size());
  for (std::size_t l = 0; l < z.size(); ++l) {
    if (!(std::abs(psi.scale[l]) < 1.0))
      throw DomainError("fixed_point: contraction requires |scale| < 1");
    z[l] = psi.shift[l] / (1.0 - psi.scale[l]);
  }
  return z;
}

// Trace of g -> phi * (g o psi) on B(D): phi(z_fix) / prod_l (1 - scale_ll).
inline Complex atiyah_bott_trace(Complex phi_at_fix, const std::vector<double>& scale) {
  double det = 1.0;
  for (double s : scale) {
    if (!(std::abs(s) < 1.0))
      throw DomainError("atiyah_bott_trace: contraction requires |scale| < 1");
    det *= 1.0 - s;
  }
  return phi_at_fix / det;
}

template <class Phi>
inline Complex atiyah_bott_trace(const Phi& phi, const AffineContraction& psi) {
  const std::vector<double> zf = fixed_point(psi);
  CVec z(zf.size());
  for (std::size_t l = 0; l < zf.size(); ++l) z[l] = zf[l];
  return atiyah_bott_trace(phi(z), psi.scale);
}

// Black-box entire function with its polydisc and a fixed residual sample set.
struct EntireFunctionSample {
  int m = 1;
  std::vector<double> radius; // polydisc radii R_l, must exceed lambda_l/(1-lambda_l)
  std::function<Complex(const CVec&)> evaluator;
  std::vector<CVec> sample_points;
  bool serial = false; // evaluator unsafe for concurrent calls
};

// 32 deterministic complex sample points, coordinate modulus <= 0.9 min_l lambda_l/(1-lambda_l).
inline std::vector<CVec> default_sample_points(const ModelParams& p, int count = 32,
                                               std::uint64_t seed = 42) {
  double rmin = 1e300;
  for (int l = 0; l < p.m; ++l)
    rmin = std::min(rmin, p.lambda[l] / (1.0 - p.lambda[l]));
  const double radius = 0.9 * rmin;
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<CVec> pts(count);
  for (auto& z : pts) {
    z.resize(p.m);
    for (int l = 0; l < p.m; ++l) {
      const double r = radius * std::sqrt(uniform());
      const double t = 2.0 * kPi * uniform();
      z[l] = Complex(r * std::cos(t), r * std::sin(t));
    }
  }
  return pts;
}

// Default polydisc radius: R_l = 1.25 lambda_l/(1-lambda_l) exceeds the
// admissibility bound strictly, and the Ruelle image map keeps the closed disc
// inside it: lambda (R + 1) = R (1 + 0.25 lambda) / 1.25 < R.
inline EntireFunctionSample make_function_sample(
    const ModelParams& p, std::function<Complex(const CVec&)> evaluator) {
  EntireFunctionSample f;
  f.m = p.m;
  f.radius.resize(p.m);
  for (int l = 0; l < p.m; ++l) f.radius[l] = 1.25 * p.lambda[l] / (1.0 - p.lambda[l]);
  f.evaluator = std::move(evaluator);
  f.sample_points = default_sample_points(p);
  return f;
}

// (L_beta F)(z) = e^{beta J.z} F(Lambda z + lambda) + e^{-beta J.z} F(Lambda z - lambda).
inline Complex apply_ruelle(const ModelParams& p, Complex beta,
                            const EntireFunctionSample& F, const CVec& z) {
  if (static_cast<int>(z.size()) != p.m || F.m != p.m)
    throw DomainError("apply_ruelle: dimension mismatch");
  const double slack = 1e-12;
  CVec zp(p.m), zm(p.m);
  Complex jz = 0.0;
  for (int l = 0; l < p.m; ++l) {
    if (std::abs(z[l]) > F.radius[l] * (1.0 + slack))
      throw DomainError("apply_ruelle: point outside the declared polydisc");
    zp[l] = p.lambda[l] * z[l] + p.lambda[l];
    zm[l] = p.lambda[l] * z[l] - p.lambda[l];
    if (std::abs(zp[l]) > F.radius[l] * (1.0 + slack) ||
        std::abs(zm[l]) > F.radius[l] * (1.0 + slack))
      throw DomainError("apply_ruelle: shifted point leaves the polydisc");
    jz += p.J[l] * z[l];
  }
  return std::exp(beta * jz) * F.evaluator(zp) + std::exp(-beta * jz) * F.evaluator(zm);
}

// max over sample points of |rho F(z) - (L_beta F)(z)| / (1 + |rho F(z)|).
inline double ruelle_residual(const ModelParams& p, Complex beta,
                              const EntireFunctionSample& F, Complex rho) {
  if (F.sample_points.empty())
    throw DomainError("ruelle_residual: empty sample set");
  double worst = 0.0;
  for (const auto& z : F.sample_points) {
    const Complex want = rho * F.evaluator(z);
    const Complex got = apply_ruelle(p, beta, F, z);
    worst = std::max(worst, std::abs(want - got) / (1.0 + std::abs(want)));
  }
  return worst;
}

// sigma(L_0) = {2 lambda^alpha : |alpha| <= N}, descending.
inline std::vector<double> spectrum_beta0(const ModelParams& p, int N) {
  if (N < 0) throw DomainError("spectrum_beta0: N must be nonnegative");
  std::vector<double> out;
  for_each_multi_index(p.m, N, [&](const std::vector<int>& a) {
    out.push_back(2.0 * lambda_pow(p.lambda, MultiIndex{a}));
  });
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

namespace detail {

struct KahanC {
  Kahan re, im;
  void add(Complex v) {
    re.add(v.real());
    im.add(v.imag());
  }
  Complex sum() const { return {re.s, im.s}; }
};

// Gray-code walk over F^n maintaining cyclic correlations C_i = sum_k s_k s_{k+i}.
class GrayCorrelations {
public:
  GrayCorrelations(int n, std::uint64_t start) : n_(n), s_(n), C_(n, 0) {
    const std::uint64_t g = start ^ (start >> 1);
    for (int k = 0; k < n_; ++k) s_[k] = (g >> k) & 1 ? -1 : 1;
    for (int i = 1; i < n_; ++i)
      for (int k = 0; k < n_; ++k) C_[i] += s_[k] * s_[(k + i) % n_];
    C_[0] = n_; // stands for C_n = n
  }

  // advance from configuration index cfg-1 to cfg
  void step(std::uint64_t cfg) {
    const int j = std::countr_zero(cfg);
    for (int i = 1; i < n_; ++i)
      C_[i] -= 2 * s_[j] * (s_[(j + i) % n_] + s_[(j - i + n_) % n_]);
    s_[j] = -s_[j];
  }

  // sum_{i=1}^{n} lambda^i C_i
  double weighted(const std::vector<double>& lampow) const {
    double e = lampow[n_] * C_[0];
    for (int i = 1; i < n_; ++i) e += lampow[i] * C_[i];
    return e;
  }

private:
  int n_;
  std::vector<int> s_;
  std::vector<int> C_;
};

} // namespace detail

// trace L_beta^n = (prod_l (1-lambda_l^n))^{-1} sum_{sigma in F^n}
//   exp(beta sum_l J_l/(1-lambda_l^n) sum_{k,i} s_k s_{k+i} lambda_l^i),
// enumerated in Gray-code order with compensated accumulation.
inline Complex ruelle_trace_power(const ModelParams& p, Complex beta, int n,
                                  int n_max = -1, int threads = 1) {
  if (n_max < 0) n_max = period_cap();
  check_period(n, n_max);
  const std::uint64_t total = std::uint64_t{1} << n;

  std::vector<std::vector<double>> lampow(p.m, std::vector<double>(n + 1));
  std::vector<double> pref(p.m);
  double det = 1.0;
  for (int l = 0; l < p.m; ++l) {
    lampow[l][0] = 1.0;
    for (int i = 1; i <= n; ++i) lampow[l][i] = lampow[l][i - 1] * p.lambda[l];
    pref[l] = p.J[l] / (1.0 - lampow[l][n]);
    det *= 1.0 - lampow[l][n];
  }

  auto worker = [&](std::uint64_t lo, std::uint64_t hi) {
    detail::KahanC sum;
    detail::GrayCorrelations corr(n, lo);
    for (std::uint64_t cfg = lo; cfg < hi; ++cfg) {
      if (cfg != lo) corr.step(cfg);
      double expo_re = 0.0;
      for (int l = 0; l < p.m; ++l) expo_re += pref[l] * corr.weighted(lampow[l]);
      sum.add(std::exp(beta * expo_re));
    }
    return sum.sum();
  };

  Complex acc;
  if (threads <= 1 || total < 4096) {
    acc = worker(0, total);
  } else {
    const int T = std::min<int>(threads, 64);
    std::vector<Complex> partial(T);
    std::vector<std::thread> pool;
    for (int t = 0; t < T; ++t) {
      std::uint64_t lo = total / T * t;
      std::uint64_t hi = (t == T - 1) ? total : total / T * (t + 1);
      pool.emplace_back([&, t, lo, hi] { partial[t] = worker(lo, hi); });
    }
    for (auto& th : pool) th.join();
    detail::KahanC sum;
    for (Complex v : partial) sum.add(v);
    acc = sum.sum();
  }
  return acc / det;
}

// trace L_beta = 2 exp(sum_l beta J_l lambda_l/(1-lambda_l)) / prod_l (1-lambda_l).
inline Complex ruelle_trace_closed(const ModelParams& p, Complex beta) {
  Complex expo = 0.0;
  double det = 1.0;
  for (int l = 0; l < p.m; ++l) {
    expo += beta * p.J[l] * p.lambda[l] / (1.0 - p.lambda[l]);
    det *= 1.0 - p.lambda[l];
  }
  return 2.0 * std::exp(expo) / det;
}

} // namespace kaczeta
