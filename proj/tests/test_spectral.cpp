#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "kaczeta/kaczeta.hpp"
#include "oracles.hpp"

using namespace kaczeta;

TEST_CASE("beta = 0 spectrum equals the diagonal values exactly") {
  auto p = validate_params({0.5}, {1.0});
  auto s = eigenvalues(p, 0.0, 6);
  const std::vector<double> want = {2.0, 1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125};
  CHECK(s.eigenvalues == want);
  CHECK(s.eigenvalues == spectrum_beta0(p, 6));
  CHECK(s.parities[0] == Parity::even);
  CHECK(s.parities[1] == Parity::odd);

  auto p2 = validate_params({0.3, 0.5}, {1.0, 2.0});
  CHECK(eigenvalues(p2, 0.0, 8).eigenvalues == spectrum_beta0(p2, 8));
  CHECK_THROWS_AS(eigenvalues(p, 0.0, 1), DomainError);
}

TEST_CASE("lambda = 1/2 spectrum contains e^beta") {
  auto p = validate_params({0.5}, {1.0});
  auto s = eigenvalues(p, 1.0, 60);
  double best = 1e300;
  Parity par = Parity::even;
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
    if (std::abs(s.eigenvalues[i] - std::exp(1.0)) < best) {
      best = std::abs(s.eigenvalues[i] - std::exp(1.0));
      par = s.parities[i];
    }
  CHECK(best < 1e-8);
  CHECK(par == Parity::odd); // the sinh family is odd
  CHECK(s.tail_gap < 1e-10);
}

TEST_CASE("nonnegativity for beta >= 0") {
  for (double beta : {0.0, 0.5, 1.0, 2.0}) {
    auto p = validate_params({0.5}, {1.0});
    auto s = eigenvalues(p, beta, 40);
    Eigen::MatrixXd S = assemble_symmetrized(p, beta, enumerate_basis(1, 40));
    CHECK(s.eigenvalues.back() >= -1e-10 * S.norm());
    auto p2 = validate_params({0.3, 0.5}, {1.0, 2.0});
    auto s2 = eigenvalues(p2, beta, 12);
    Eigen::MatrixXd S2 = assemble_symmetrized(p2, beta, enumerate_basis(2, 12));
    CHECK(s2.eigenvalues.back() >= -1e-10 * S2.norm());
  }
}

TEST_CASE("parity blocks merged equal the full-matrix spectrum") {
  auto p = validate_params({0.4, 0.6}, {1.0, 0.5});
  const double beta = 1.3;
  auto s = eigenvalues(p, beta, 8);
  Eigen::MatrixXd S = assemble_symmetrized(p, beta, enumerate_basis(2, 8));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  REQUIRE(es.eigenvalues().size() == static_cast<int>(s.eigenvalues.size()));
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double full = es.eigenvalues()(es.eigenvalues().size() - 1 - i);
    CHECK(std::abs(full - s.eigenvalues[i]) < 1e-10 * std::max(1.0, std::abs(full)));
  }
}

TEST_CASE("truncation stability of the leading eigenvalues") {
  auto p = validate_params({0.5}, {1.0});
  auto a = eigenvalues(p, 1.0, 60);
  auto b = eigenvalues(p, 1.0, 64);
  for (int k = 0; k < 5; ++k)
    CHECK(std::abs(a.eigenvalues[k] - b.eigenvalues[k]) <=
          1e-9 * std::abs(b.eigenvalues[k]));

  auto p2 = validate_params({0.3, 0.5}, {1.0, 1.0});
  auto a2 = eigenvalues(p2, 0.5, 24);
  auto b2 = eigenvalues(p2, 0.5, 28);
  for (int k = 0; k < 5; ++k)
    CHECK(std::abs(a2.eigenvalues[k] - b2.eigenvalues[k]) <=
          1e-9 * std::abs(b2.eigenvalues[k]));
}

TEST_CASE("raw nonsymmetric solve has (numerically) real spectrum") {
  auto p = validate_params({0.5}, {1.0});
  for (double beta : {-2.0, -1.0, 1.0, 2.0}) {
    auto basis = enumerate_basis(1, 40);
    auto g = assemble_matrix(p, beta, basis);
    auto ev = eigenvalues_nonsymmetric(p, beta, basis);
    double worst = 0.0;
    for (auto& v : ev) worst = std::max(worst, std::abs(v.imag()));
    CHECK(worst < 1e-8 * g.entries.norm());
  }
}

TEST_CASE("fredholm determinant basics") {
  auto p = validate_params({0.5}, {1.0});
  auto s = eigenvalues(p, 0.7, 40);
  CHECK(fredholm_det(s, 0.0, 1.0) == Complex(1.0));

  // beta = 0 with 60 exact factors as the oracle
  auto s0 = eigenvalues(p, 0.0, 40);
  Complex want = 1.0;
  for (int k = 0; k <= 40; ++k) want *= 1.0 - 0.8 * pow_int(0.5, k);
  const Complex got = fredholm_det(s0, 0.4, 1.0);
  CHECK(std::abs(got - want) < 1e-12 * std::abs(want));

  // scale = lambda reindexes the product
  const Complex a = fredholm_det(s0, 0.4, 0.5);
  const Complex b = fredholm_det(s0, 0.2, 1.0);
  // products differ only by the dropped top factor at the truncation edge
  CHECK(std::abs(a - b / (1.0 - 0.2 * s0.eigenvalues.back() * 0.5)) <
        1e-10 * std::abs(a) + 1e-12);
}

TEST_CASE("zeta at beta = 0 matches 1/(1-2z)") {
  auto p1 = validate_params({0.5}, {1.0});
  auto p2 = validate_params({0.3, 0.5}, {1.0, 2.0});
  for (Complex z : {Complex(0.25), Complex(-0.5), Complex(0.1, 0.1)}) {
    const Complex want = 1.0 / (1.0 - 2.0 * z);
    CHECK(std::abs(zeta(p1, 0.0, z, 40).value - want) < 1e-8);
    CHECK(std::abs(zeta(p2, 0.0, z, 34).value - want) < 1e-8);
  }
  CHECK(std::abs(zeta(p1, 0.0, Complex(0.0), 40).value - 1.0) < 1e-14);
  // all factors retained, and the value is their alternating product
  auto zv = zeta(p2, 0.7, Complex(0.2), 12);
  CHECK(zv.factors.size() == 4);
  Complex prod = 1.0;
  for (const auto& f : zv.factors) {
    int deg = 0;
    for (int a : f.alpha) deg += a;
    if (deg % 2 == 1)
      prod *= f.det;
    else
      prod /= f.det;
  }
  CHECK(std::abs(prod - zv.value) < 1e-13 * std::abs(zv.value));
}

TEST_CASE("zeta pole detection") {
  auto p = validate_params({0.5}, {1.0});
  // at beta = 0 the alpha = 0 determinant vanishes at z = 1/2 (eigenvalue 2)
  CHECK_THROWS_AS(zeta(p, 0.0, Complex(0.5), 40), PoleAt);
}

TEST_CASE("zeta series cross-check") {
  auto p = validate_params({0.5}, {1.0});
  CHECK(std::abs(zeta_series_partial(p, 0.0, Complex(0.25), 30) - 2.0) < 1e-8);
  CHECK(zeta_series_partial(p, 0.5, Complex(0.0), 10) == Complex(1.0));
  CHECK_THROWS_AS(zeta_series_partial(p, 2.0, Complex(0.4), 10), ConvergenceDomain);

  const Complex a = zeta(p, 0.3, Complex(0.1), 40).value;
  const Complex b = zeta_series_partial(p, 0.3, Complex(0.1), 16);
  CHECK(std::abs(a - b) < 1e-6 * std::abs(a));
}

TEST_CASE("real zero/pole location") {
  // m = 1: the lambda = 1/2 family rho_1 = e^beta puts the exact log-2 root in
  // the numerator factor det(1 - lambda L); the alpha = 0 factor has its own
  // roots where deeper branches cross 1, away from log 2.
  auto p = validate_params({0.5}, {1.0});
  auto roots = find_real_zeros_poles(p, 1.0, 0.2, 1.2, 60, 0.05);
  bool found = false;
  for (const auto& r : roots)
    if (r.alpha == std::vector<int>{1} &&
        std::abs(r.beta_star - std::log(2.0)) < 1e-8) {
      CHECK(r.kind == RootKind::zero);
      found = true;
    }
  CHECK(found);
  for (const auto& r : roots)
    if (r.alpha == std::vector<int>{0})
      CHECK(std::abs(r.beta_star - std::log(2.0)) > 1e-2);

  // J = sum J_l = 1 governs the trivial zero for m = 2
  auto p2 = validate_params({0.5, 0.5}, {0.6, 0.4});
  auto roots2 = find_real_zeros_poles(p2, 1.0, 0.5, 0.9, 14, 0.05);
  bool found2 = false;
  for (const auto& r : roots2)
    if (r.alpha == std::vector<int>{0, 0} && std::abs(r.beta_star - std::log(2.0)) < 1e-8)
      found2 = true;
  CHECK(found2);

  // a range where every lambda^alpha rho_k stays below 1
  auto quiet = find_real_zeros_poles(p, 1.0, -0.4, -0.2, 40, 0.05);
  CHECK(quiet.empty());
  CHECK_THROWS_AS(find_real_zeros_poles(p, 1.0, 0.0, 1.0, 40, 0.0), DomainError);
}

TEST_CASE("asymptotic prediction values") {
  auto p = validate_params({0.4}, {1.0});
  CHECK(asymptotic_prediction(p, MultiIndex{{0}}, 10.0, Direction::plus_inf, Parity::even) ==
        doctest::Approx(std::exp(20.0 / 3.0)).epsilon(1e-13));
  CHECK(asymptotic_prediction(p, MultiIndex{{0}}, -10.0, Direction::minus_inf, Parity::even) ==
        doctest::Approx(std::exp(20.0 / 7.0)).epsilon(1e-13));
  CHECK(asymptotic_prediction(p, MultiIndex{{1}}, -10.0, Direction::minus_inf, Parity::even) ==
        doctest::Approx(-0.4 * std::exp(20.0 / 7.0)).epsilon(1e-13));
  CHECK(asymptotic_prediction(p, MultiIndex{{0}}, -10.0, Direction::minus_inf, Parity::odd) ==
        doctest::Approx(-std::exp(20.0 / 7.0)).epsilon(1e-13));
  auto bad = validate_params({0.5}, {1.0});
  CHECK_THROWS_AS(
      asymptotic_prediction(bad, MultiIndex{{0}}, 5.0, Direction::plus_inf, Parity::even),
      DomainError);
}

TEST_CASE("asymptotic ratio improves with beta") {
  auto p = validate_params({0.4}, {1.0});
  double prev_even = 1e9, prev_odd = 1e9;
  for (double beta : {5.0, 10.0, 20.0}) {
    auto s = eigen_system(p, beta, enumerate_basis(1, 80, Parity::even));
    const double pred =
        asymptotic_prediction(p, MultiIndex{{0}}, beta, Direction::plus_inf, Parity::even);
    const double dev = std::abs(s.values[0] / pred - 1.0);
    CHECK(dev < prev_even);
    prev_even = dev;

    auto so = eigen_system(p, beta, enumerate_basis(1, 80, Parity::odd));
    const double predo =
        asymptotic_prediction(p, MultiIndex{{0}}, beta, Direction::plus_inf, Parity::odd);
    const double devo = std::abs(so.values[0] / predo - 1.0);
    CHECK(devo < prev_odd);
    prev_odd = devo;
  }
}

TEST_CASE("degeneracy counts at lambda = 1/2") {
  auto p2 = validate_params({0.5, 0.5}, {1.0, 1.0});
  auto s2 = eigenvalues(p2, 1.0, 24);
  const double e2 = std::exp(2.0);
  CHECK(degeneracy_count(s2, e2 / 4.0, 1e-6) == 1); // n = 2: C(2,2) = 1

  auto p3 = validate_params({0.5, 0.5, 0.5}, {0.5, 0.3, 0.2});
  auto s3 = eigenvalues(p3, 1.0, 16);
  const double e3 = std::exp(1.0); // sum J = 1
  CHECK(degeneracy_count(s3, e3 / 4.0, 1e-6) == 3); // n = 2: C(3,2) = 3
  CHECK(degeneracy_count(s3, 1234.5, 1e-6) == 0);
  CHECK_THROWS_AS(degeneracy_count(s3, 1.0, 0.0), DomainError);
}

TEST_CASE("binomial identity") {
  CHECK(binom_identity_check(2, 0, 1) == std::pair<long long, long long>{2, 2});
  CHECK(binom_identity_check(2, 3, 1) == std::pair<long long, long long>{8, 8});
  auto [l, r] = binom_identity_check(5, 4, 3);
  CHECK(l == r);
  CHECK_THROWS_AS(binom_identity_check(1, 0, 0), DomainError);
  CHECK_THROWS_AS(binom_identity_check(3, -1, 0), DomainError);
  CHECK_THROWS_AS(binom_identity_check(3, 0, 3), DomainError);
}

TEST_CASE("half-lambda reduction of the zeta factors") {
  // rho_1 = 1/2
  auto p2 = validate_params({0.5, 0.5}, {1.0, 1.0});
  const double beta = std::log(0.5) / 2.0;
  auto [prod, closed] = half_reduction_check(p2, beta, 40);
  CHECK(closed == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(std::abs(prod - closed) < 1e-10);

  // rho_1 -> 0 proxy: both sides approach 1
  const double beta_small = std::log(1e-8) / 2.0;
  auto [prod0, closed0] = half_reduction_check(p2, beta_small, 40);
  CHECK(prod0 == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(closed0 == doctest::Approx(1.0).epsilon(1e-7));

  auto p3 = validate_params({0.5, 0.5, 0.5}, {0.4, 0.3, 0.3});
  const double beta3 = std::log(0.3);
  auto [prod3, closed3] = half_reduction_check(p3, beta3, 60);
  CHECK(std::abs(prod3 - closed3) < 1e-10);

  CHECK_THROWS_AS(half_reduction_check(p2, 0.0, 10), PoleAt);
  auto pbad = validate_params({0.4, 0.5}, {1.0, 1.0});
  CHECK_THROWS_AS(half_reduction_check(pbad, 1.0, 10), DomainError);
}

TEST_CASE("eigenfunction reconstruction") {
  auto p = validate_params({0.5}, {1.0});
  auto basis = enumerate_basis(1, 40, Parity::odd);
  auto sys = eigen_system(p, 1.0, basis);
  auto F = reconstruct_eigenfunction(p, 1.0, basis, sys.vectors.col(0));
  const double res40 = ruelle_residual(p, 1.0, F, std::exp(1.0));
  CHECK(res40 < 1e-6);

  auto basis20 = enumerate_basis(1, 20, Parity::odd);
  auto sys20 = eigen_system(p, 1.0, basis20);
  auto F20 = reconstruct_eigenfunction(p, 1.0, basis20, sys20.vectors.col(0));
  CHECK(res40 < ruelle_residual(p, 1.0, F20, std::exp(1.0)));

  // parity of the reconstruction follows the block
  for (const auto& z : F.sample_points) {
    CVec mz = {-z[0]};
    CHECK(std::abs(F.evaluator(mz) + F.evaluator(z)) < 1e-12);
  }

  CHECK_THROWS_AS(reconstruct_eigenfunction(p, 0.0, basis, sys.vectors.col(0)),
                  DomainError);
  CHECK_THROWS_AS(reconstruct_eigenfunction(p, -1.0, basis, sys.vectors.col(0)),
                  DomainError);
}

TEST_CASE("bargmann transform of hermite functions") {
  auto h = [](int n) {
    return [n](const std::vector<double>& x) { return hermite1(n, x[0]); };
  };
  for (Complex z : {Complex(0.0), Complex(0.5), Complex(0.3, 0.2)}) {
    CHECK(std::abs(bargmann_quadrature(h(0), {z}) - 1.0) < 1e-8);
    CHECK(std::abs(bargmann_quadrature(h(1), {z}) - kSqrtPi * z) < 1e-8);
    const Complex zeta2 = std::sqrt(kPi * kPi / 2.0) * z * z;
    CHECK(std::abs(bargmann_quadrature(h(2), {z}) - zeta2) < 1e-8);
  }
  CHECK(std::abs(bargmann_quadrature(h(2), {Complex(0.0)})) < 1e-10);
  CHECK_THROWS_AS(bargmann_quadrature(h(0), {Complex(0.0), Complex(0.0), Complex(0.0)}),
                  DomainError);

  // m = 2 product case
  auto h00 = [](const std::vector<double>& x) {
    return hermite1(0, x[0]) * hermite1(1, x[1]);
  };
  const Complex z0(0.2), z1(-0.4, 0.1);
  CHECK(std::abs(bargmann_quadrature(h00, {z0, z1}) - kSqrtPi * z1) < 1e-7);
}

TEST_CASE("matrix trace powers converge to partition data") {
  auto p = validate_params({0.5}, {1.0});
  const double beta = 1.0;
  Eigen::MatrixXd S = assemble_symmetrized(p, beta, enumerate_basis(1, 60));
  for (int n : {1, 2, 3}) {
    const double Zn = partition_function_bruteforce(p, beta, n);
    const double det = 1.0 - std::pow(0.5, n);
    CHECK(std::abs(det * matrix_trace_power(S, n) - Zn) < 1e-6 * Zn);
  }
}
