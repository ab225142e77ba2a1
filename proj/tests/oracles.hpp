#pragma once

// Test-only oracles, kept independent of the library implementation paths
// they are used to validate.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "kaczeta/model.hpp"

namespace oracles {

// Gauss-Hermite rule for int e^{-t^2} g(t) dt.  Nodes from the Golub-Welsch
// Jacobi matrix polished by one Newton step; weights from the orthonormal
// Hermite functions, w_i = e^{-t_i^2} / (n psi_{n-1}(t_i)^2), which stays
// relatively accurate where the eigenvector-based weights underflow.
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussHermite(int n) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
      const double b = std::sqrt(0.5 * k);
      J(k - 1, k) = b;
      J(k, k - 1) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J, Eigen::EigenvaluesOnly);
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
      double t = es.eigenvalues()(i);
      for (int it = 0; it < 2; ++it) {
        const auto [pn, pnm1] = psi_pair(n, t);
        const double deriv = std::sqrt(2.0 * n) * pnm1 - t * pn;
        if (deriv != 0.0) t -= pn / deriv;
      }
      nodes[i] = t;
      const auto [pn, pnm1] = psi_pair(n, t);
      (void)pn;
      weights[i] = std::exp(-t * t) / (n * pnm1 * pnm1);
    }
  }

private:
  // orthonormal Hermite functions psi_k w.r.t. weight e^{-t^2}
  static std::pair<double, double> psi_pair(int n, double t) {
    double p0 = std::pow(kaczeta::kPi, -0.25) * std::exp(-0.5 * t * t);
    double p1 = std::sqrt(2.0) * t * p0;
    for (int k = 1; k < n; ++k) {
      const double p2 = t * std::sqrt(2.0 / (k + 1.0)) * p1 -
                        std::sqrt(k / (k + 1.0)) * p0;
      p0 = p1;
      p1 = p2;
    }
    return {p1, p0}; // psi_n, psi_{n-1}
  }
};

// int h_a(x) h_b(x) dx with x = t / sqrt(2 pi); the integrand is a polynomial
// times e^{-2 pi x^2}, so a 128-point rule is exact up to roundoff for a+b <= 255.
inline double hermite_inner_product(int a, int b, const GaussHermite& gh) {
  const double s = std::sqrt(2.0 * kaczeta::kPi);
  double sum = 0.0;
  for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
    const double t = gh.nodes[i];
    const double x = t / s;
    sum += gh.weights[i] * kaczeta::hermite1(a, x) * kaczeta::hermite1(b, x) *
           std::exp(t * t);
  }
  return sum / s;
}

// Z_n by the definition: plain loop over all configurations, energy from
// periodic_energy, naive summation.
inline double partition_direct(const kaczeta::ModelParams& p, double beta, int n) {
  double sum = 0.0;
  for (std::uint64_t cfg = 0; cfg < (std::uint64_t{1} << n); ++cfg) {
    kaczeta::SpinConfig c;
    c.spins.resize(n);
    for (int k = 0; k < n; ++k) c.spins[k] = (cfg >> k) & 1 ? -1 : 1;
    sum += std::exp(-beta * kaczeta::periodic_energy(p, c));
  }
  return sum;
}

// Associated Laguerre by its explicit series sum_k (-1)^k C(n+mu, n-k) x^k / k!.
inline double laguerre_series(int n, int mu, double x) {
  double sum = 0.0;
  for (int k = 0; k <= n; ++k) {
    double c = 1.0;
    for (int j = 1; j <= n - k; ++j) c *= (mu + k + j) / static_cast<double>(j);
    double xk = 1.0, kfac = 1.0;
    for (int j = 1; j <= k; ++j) {
      xk *= x;
      kfac *= j;
    }
    sum += (k % 2 == 0 ? 1.0 : -1.0) * c * xk / kfac;
  }
  return sum;
}

} // namespace oracles
