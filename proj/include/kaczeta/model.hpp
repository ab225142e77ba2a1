#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "kaczeta/errors.hpp"

namespace kaczeta {

// Kac-Baker interaction: m exponentially decaying channels J_l lambda_l^{|i-j|}.
struct ModelParams {
  int m = 0;
  std::vector<double> lambda;
  std::vector<double> J;
  std::vector<double> gamma; // gamma_l = -log(lambda_l)
};

inline ModelParams validate_params(const std::vector<double>& lambda,
                                   const std::vector<double>& J) {
  if (lambda.empty() || lambda.size() != J.size())
    throw DomainError("validate_params: lambda and J must be nonempty and of equal length");
  ModelParams p;
  p.m = static_cast<int>(lambda.size());
  p.lambda = lambda;
  p.J = J;
  p.gamma.resize(p.m);
  for (int l = 0; l < p.m; ++l) {
    if (!(lambda[l] > 0.0 && lambda[l] < 1.0))
      throw DomainError("validate_params: lambda_" + std::to_string(l + 1) +
                        " must lie strictly in (0,1)");
    if (!(J[l] > 0.0))
      throw DomainError("validate_params: J_" + std::to_string(l + 1) + " must be positive");
    p.gamma[l] = -std::log(lambda[l]);
  }
  return p;
}

// One period of a configuration in {+1,-1}^Z periodic with period n.
struct SpinConfig {
  std::vector<int> spins;

  int n() const { return static_cast<int>(spins.size()); }
};

inline void check_config(const SpinConfig& c) {
  if (c.n() < 1) throw DomainError("SpinConfig: period must be >= 1");
  for (int s : c.spins)
    if (s != 1 && s != -1) throw DomainError("SpinConfig: spins must be +1 or -1");
}

// Enumeration cap; KACZETA_MAX_N overrides the default of 24.
inline int period_cap() {
  if (const char* s = std::getenv("KACZETA_MAX_N")) {
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end != s && v >= 1 && v <= 62) return static_cast<int>(v);
  }
  return 24;
}

inline void check_period(int n, int n_max) {
  if (n < 1) throw DomainError("period n must be >= 1");
  if (n > n_max)
    throw CapExceeded("period n = " + std::to_string(n) + " exceeds cap " +
                      std::to_string(n_max));
}

// Interaction energy of a periodic configuration in the closed periodic form
// U_n = -sum_l J_l/(1-lambda_l^n) sum_{k=0}^{n-1} sum_{i=1}^{n} s_k s_{k+i} lambda_l^i.
inline double periodic_energy(const ModelParams& p, const SpinConfig& c) {
  check_config(c);
  const int n = c.n();
  double U = 0.0;
  for (int l = 0; l < p.m; ++l) {
    const double lam = p.lambda[l];
    double corr = 0.0;
    for (int k = 0; k < n; ++k) {
      double lp = 1.0;
      for (int i = 1; i <= n; ++i) {
        lp *= lam;
        corr += c.spins[k] * c.spins[(k + i) % n] * lp;
      }
    }
    U -= p.J[l] / (1.0 - std::pow(lam, n)) * corr;
  }
  return U;
}

namespace detail {

struct Kahan {
  double s = 0.0, c = 0.0;
  void add(double x) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
};

// sum_{k=0}^{n-1} s_k sum_{i=1}^{n} s_{k+i} lambda^i for one channel, O(n)
// via T_{k-1} = lambda s_k + lambda T_k - s_k lambda^{n+1}.
inline double config_correlation(const std::vector<int>& s, double lam, int n) {
  const double lam_np1 = std::pow(lam, n + 1);
  double T = 0.0, lp = 1.0;
  for (int i = 1; i <= n; ++i) { // T_{n-1}
    lp *= lam;
    T += s[(n - 1 + i) % n] * lp;
  }
  double acc = s[n - 1] * T;
  for (int k = n - 1; k >= 1; --k) {
    T = lam * s[k] + lam * T - s[k] * lam_np1;
    acc += s[k - 1] * T;
  }
  return acc;
}

} // namespace detail

// Z_n(beta) = sum over all 2^n period-n configurations of exp(-beta U_n),
// plain binary enumeration with Kahan accumulation.
inline double partition_function_bruteforce(const ModelParams& p, double beta, int n,
                                            int n_max = -1, int threads = 1) {
  if (n_max < 0) n_max = period_cap();
  check_period(n, n_max);
  const std::uint64_t total = std::uint64_t{1} << n;
  std::vector<double> pref(p.m);
  for (int l = 0; l < p.m; ++l) pref[l] = p.J[l] / (1.0 - std::pow(p.lambda[l], n));

  auto worker = [&](std::uint64_t lo, std::uint64_t hi) {
    detail::Kahan sum;
    std::vector<int> s(n);
    for (std::uint64_t cfg = lo; cfg < hi; ++cfg) {
      for (int k = 0; k < n; ++k) s[k] = (cfg >> k) & 1 ? -1 : 1;
      double expo = 0.0;
      for (int l = 0; l < p.m; ++l)
        expo += pref[l] * detail::config_correlation(s, p.lambda[l], n);
      sum.add(std::exp(beta * expo)); // exp(-beta U_n)
    }
    return sum.s;
  };

  if (threads <= 1 || total < 4096) return worker(0, total);

  const int T = std::min<int>(threads, 64);
  std::vector<double> partial(T, 0.0);
  std::vector<std::thread> pool;
  for (int t = 0; t < T; ++t) {
    std::uint64_t lo = total / T * t;
    std::uint64_t hi = (t == T - 1) ? total : total / T * (t + 1);
    pool.emplace_back([&, t, lo, hi] { partial[t] = worker(lo, hi); });
  }
  for (auto& th : pool) th.join();
  detail::Kahan sum;
  for (double v : partial) sum.add(v); // fixed combine order
  return sum.s;
}

} // namespace kaczeta
