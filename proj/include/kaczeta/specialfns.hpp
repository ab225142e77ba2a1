#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "kaczeta/errors.hpp"
#include "kaczeta/model.hpp"

namespace kaczeta {

inline constexpr double kPi = 3.14159265358979323846;
inline const double kSqrtPi = std::sqrt(kPi);

// Element of N_0^m indexing the Hermite/Fock basis.
struct MultiIndex {
  std::vector<int> entries;

  int dim() const { return static_cast<int>(entries.size()); }
  int operator[](int i) const { return entries[i]; }
  bool operator==(const MultiIndex& o) const { return entries == o.entries; }
};

inline int total_degree(const MultiIndex& a) {
  return std::accumulate(a.entries.begin(), a.entries.end(), 0);
}

// ln(n!) through a cumulative table (long double accumulation), lgamma beyond.
inline double log_factorial(int n) {
  if (n < 0) throw DomainError("log_factorial: n must be nonnegative");
  static const std::vector<double> table = [] {
    std::vector<double> t(4096);
    long double acc = 0.0L;
    t[0] = 0.0;
    for (std::size_t k = 1; k < t.size(); ++k) {
      acc += std::log(static_cast<long double>(k));
      t[k] = static_cast<double>(acc);
    }
    return t;
  }();
  if (static_cast<std::size_t>(n) < table.size()) return table[n];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

inline double log_factorial(const MultiIndex& a) {
  double s = 0.0;
  for (int e : a.entries) s += log_factorial(e);
  return s;
}

// x^n by repeated squaring; used everywhere lambda^alpha must be reproducible.
inline double pow_int(double x, int n) {
  double r = 1.0, b = x;
  for (int k = n; k > 0; k >>= 1) {
    if (k & 1) r *= b;
    b *= b;
  }
  return r;
}

inline double lambda_pow(const std::vector<double>& lambda, const MultiIndex& a) {
  double r = 1.0;
  for (int i = 0; i < a.dim(); ++i) r *= pow_int(lambda[i], a[i]);
  return r;
}

// Exact binomial for the small arguments used here (fits in long long).
inline long long binomial(long long n, long long k) {
  if (k < 0 || k > n || n < 0) return 0;
  k = std::min(k, n - k);
  long long r = 1;
  for (long long i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
  }
  return r;
}

// Dimension of translation-invariant homogeneous polynomials of degree n in m
// variables: C(m+n-2, n) for m >= 2, [n == 0] for m = 1.
inline long long dim_translation_invariant(int m, int n) {
  if (m >= 2) return binomial(m + n - 2, n);
  return n == 0 ? 1 : 0;
}

// Visit every alpha in N_0^m with |alpha| <= N in graded lexicographic order.
template <class Fn>
inline void for_each_multi_index(int m, int N, Fn&& fn) {
  std::vector<int> a(m, 0);
  auto rec = [&](auto&& self, int pos, int rem) -> void {
    if (pos == m - 1) {
      a[pos] = rem;
      fn(a);
      return;
    }
    for (int v = rem; v >= 0; --v) {
      a[pos] = v;
      self(self, pos + 1, rem - v);
    }
  };
  for (int d = 0; d <= N; ++d) rec(rec, 0, d);
}

// Orthonormal Hermite functions on R, h_0(x) = 2^{1/4} e^{-pi x^2},
// h_{n+1} = (2 sqrt(pi) x / sqrt(n+1)) h_n - sqrt(n/(n+1)) h_{n-1}.
inline double hermite1(int n, double x) {
  if (n < 0) throw DomainError("hermite1: n must be nonnegative");
  double h0 = std::pow(2.0, 0.25) * std::exp(-kPi * x * x);
  if (n == 0) return h0;
  double h1 = 2.0 * kSqrtPi * x * h0;
  for (int k = 1; k < n; ++k) {
    double h2 = (2.0 * kSqrtPi * x / std::sqrt(k + 1.0)) * h1 -
                std::sqrt(k / (k + 1.0)) * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

// Product-structure Hermite function on R^m.
inline double hermite(const MultiIndex& alpha, const std::vector<double>& x) {
  if (alpha.dim() != static_cast<int>(x.size()))
    throw DomainError("hermite: dimension mismatch");
  double r = 1.0;
  for (int i = 0; i < alpha.dim(); ++i) r *= hermite1(alpha[i], x[i]);
  return r;
}

// Associated Laguerre polynomial L_n^{(mu)}(x), forward recurrence.
inline double laguerre(int n, int mu, double x) {
  if (n < 0 || mu < 0) throw DomainError("laguerre: negative index");
  double p0 = 1.0;
  if (n == 0) return p0;
  double p1 = mu + 1.0 - x;
  for (int k = 1; k < n; ++k) {
    double p2 = ((2.0 * k + mu + 1.0 - x) * p1 - (k + mu) * p0) / (k + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

// value = sign * exp(log_abs); sign in {-1, 0, +1}.
struct ScaledValue {
  double sign;
  double log_abs;
};

// L_n^{(mu)}(x) with overflow-safe rescaling, for log-space matrix elements.
inline ScaledValue laguerre_scaled(int n, int mu, double x) {
  if (n < 0 || mu < 0) throw DomainError("laguerre_scaled: negative index");
  auto pack = [](double v, double logscale) -> ScaledValue {
    if (v == 0.0) return {0.0, -std::numeric_limits<double>::infinity()};
    return {v > 0 ? 1.0 : -1.0, std::log(std::abs(v)) + logscale};
  };
  double p0 = 1.0;
  double logscale = 0.0;
  if (n == 0) return pack(p0, logscale);
  double p1 = mu + 1.0 - x;
  for (int k = 1; k < n; ++k) {
    double p2 = ((2.0 * k + mu + 1.0 - x) * p1 - (k + mu) * p0) / (k + 1.0);
    p0 = p1;
    p1 = p2;
    double a = std::max(std::abs(p0), std::abs(p1));
    if (a > 1e250) {
      p0 /= a;
      p1 /= a;
      logscale += std::log(a);
    }
  }
  return pack(p1, logscale);
}

// Confluent hypergeometric Phi(-n, mu+1; x), polynomial case, by its
// truncated series. Kept independent of the Laguerre recurrence on purpose.
inline double confluent_phi(int n, int mu, double x) {
  if (n < 0 || mu < 0) throw DomainError("confluent_phi: polynomial case requires n, mu >= 0");
  double term = 1.0, sum = 1.0;
  for (int k = 0; k < n; ++k) {
    term *= static_cast<double>(-(n - k)) / ((mu + 1.0 + k) * (k + 1.0)) * x;
    sum += term;
  }
  return sum;
}

// Closed Mehler kernel sum_alpha lambda^alpha h_alpha(x) h_alpha(y) with
// xi = 2 sqrt(pi) x, eta = 2 sqrt(pi) y.
inline double mehler_kernel(const std::vector<double>& lambda,
                            const std::vector<double>& gamma,
                            const std::vector<double>& x,
                            const std::vector<double>& y) {
  const int m = static_cast<int>(lambda.size());
  double pref = 1.0, expo = 0.0;
  for (int l = 0; l < m; ++l) {
    const double sh = std::sinh(gamma[l]);
    pref *= 1.0 / std::sqrt(lambda[l] * sh);
    const double xi = 2.0 * kSqrtPi * x[l];
    const double eta = 2.0 * kSqrtPi * y[l];
    expo += (xi * xi + eta * eta) * std::tanh(0.5 * gamma[l]) +
            (xi - eta) * (xi - eta) / sh;
  }
  return pref * std::exp(-0.25 * expo);
}

inline double mehler_kernel(const ModelParams& p, const std::vector<double>& x,
                            const std::vector<double>& y) {
  if (static_cast<int>(x.size()) != p.m || static_cast<int>(y.size()) != p.m)
    throw DomainError("mehler_kernel: dimension mismatch");
  return mehler_kernel(p.lambda, p.gamma, x, y);
}

// Partial Mehler sum over |alpha| <= N.
inline double mehler_partial_sum(const std::vector<double>& lambda,
                                 const std::vector<double>& x,
                                 const std::vector<double>& y, int N) {
  if (N < 0) throw DomainError("mehler_partial_sum: N must be nonnegative");
  const int m = static_cast<int>(lambda.size());
  std::vector<std::vector<double>> hx(m), hy(m);
  for (int l = 0; l < m; ++l) {
    hx[l].resize(N + 1);
    hy[l].resize(N + 1);
    for (int k = 0; k <= N; ++k) {
      hx[l][k] = hermite1(k, x[l]);
      hy[l][k] = hermite1(k, y[l]);
    }
  }
  double sum = 0.0;
  for_each_multi_index(m, N, [&](const std::vector<int>& a) {
    double t = 1.0;
    for (int l = 0; l < m; ++l) t *= pow_int(lambda[l], a[l]) * hx[l][a[l]] * hy[l][a[l]];
    sum += t;
  });
  return sum;
}

inline double mehler_partial_sum(const ModelParams& p, const std::vector<double>& x,
                                 const std::vector<double>& y, int N) {
  if (static_cast<int>(x.size()) != p.m || static_cast<int>(y.size()) != p.m)
    throw DomainError("mehler_partial_sum: dimension mismatch");
  return mehler_partial_sum(p.lambda, x, y, N);
}

} // namespace kaczeta
