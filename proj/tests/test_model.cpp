#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "kaczeta/kaczeta.hpp"
#include "oracles.hpp"

using namespace kaczeta;

TEST_CASE("validate_params") {
  auto p = validate_params({0.5}, {1.0});
  CHECK(p.m == 1);
  CHECK(p.gamma[0] == doctest::Approx(std::log(2.0)).epsilon(1e-15));

  auto p2 = validate_params({0.3, 0.5}, {1.0, 2.0});
  CHECK(p2.m == 2);

  CHECK_THROWS_AS(validate_params({1.0}, {1.0}), DomainError);
  CHECK_THROWS_AS(validate_params({0.0}, {1.0}), DomainError);
  CHECK_THROWS_AS(validate_params({-0.2}, {1.0}), DomainError);
  CHECK_THROWS_AS(validate_params({0.5}, {0.0}), DomainError);
  CHECK_THROWS_AS(validate_params({0.5}, {-1.0}), DomainError);
  CHECK_THROWS_AS(validate_params({}, {}), DomainError);
  CHECK_THROWS_AS(validate_params({0.5, 0.2}, {1.0}), DomainError);
}

TEST_CASE("periodic energy hand values") {
  auto p = validate_params({0.5}, {1.0});
  CHECK(periodic_energy(p, {{1, 1}}) == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(periodic_energy(p, {{1, -1}}) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK_THROWS_AS(periodic_energy(p, {{1, 0}}), DomainError);
  CHECK_THROWS_AS(periodic_energy(p, {{}}), DomainError);
}

TEST_CASE("periodic energy symmetries") {
  auto p = validate_params({0.3, 0.6}, {1.0, 0.5});
  for (std::uint64_t cfg = 0; cfg < 64; ++cfg) {
    SpinConfig c;
    c.spins.resize(6);
    for (int k = 0; k < 6; ++k) c.spins[k] = (cfg >> k) & 1 ? -1 : 1;
    const double u = periodic_energy(p, c);
    SpinConfig flipped = c;
    for (int& s : flipped.spins) s = -s;
    CHECK(periodic_energy(p, flipped) == doctest::Approx(u).epsilon(1e-13));
  }
}

TEST_CASE("rotation invariance, exhaustive") {
  auto p = validate_params({0.45, 0.8}, {1.2, 0.7});
  for (int n : {1, 2, 3, 5, 10}) {
    for (std::uint64_t cfg = 0; cfg < (std::uint64_t{1} << n); ++cfg) {
      SpinConfig c;
      c.spins.resize(n);
      for (int k = 0; k < n; ++k) c.spins[k] = (cfg >> k) & 1 ? -1 : 1;
      const double u = periodic_energy(p, c);
      for (int r = 1; r < n; ++r) {
        SpinConfig rot;
        rot.spins.resize(n);
        for (int k = 0; k < n; ++k) rot.spins[k] = c.spins[(k + r) % n];
        CHECK(periodic_energy(p, rot) == doctest::Approx(u).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("energy bound") {
  auto p = validate_params({0.5, 0.25}, {1.0, 2.0});
  double c = 0.0;
  for (int l = 0; l < p.m; ++l) c += p.J[l] * p.lambda[l] / (1.0 - p.lambda[l]);
  for (int n : {1, 3, 7}) {
    for (std::uint64_t cfg = 0; cfg < (std::uint64_t{1} << n); ++cfg) {
      SpinConfig cc;
      cc.spins.resize(n);
      for (int k = 0; k < n; ++k) cc.spins[k] = (cfg >> k) & 1 ? -1 : 1;
      CHECK(std::abs(periodic_energy(p, cc)) <= n * c * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("partition function basics") {
  auto p = validate_params({0.5}, {1.0});
  CHECK(partition_function_bruteforce(p, 0.0, 3) == 8.0);
  auto p3 = validate_params({0.3, 0.5, 0.7}, {1.0, 0.5, 0.25});
  for (int n = 1; n <= 12; ++n)
    CHECK(partition_function_bruteforce(p3, 0.0, n) == std::ldexp(1.0, n));
  // Per_1 closed form: 2 exp(beta J lambda / (1-lambda))
  CHECK(partition_function_bruteforce(p, 1.0, 1) ==
        doctest::Approx(2.0 * std::exp(1.0)).epsilon(1e-14));
  CHECK(partition_function_bruteforce(p, -2.0, 5) > 0.0);
}

TEST_CASE("partition function equals the direct definition") {
  auto p1 = validate_params({0.5}, {1.0});
  auto p2 = validate_params({0.3, 0.5}, {1.0, 2.0});
  for (const auto& p : {p1, p2})
    for (double beta : {-1.0, 0.5, 2.0})
      for (int n : {1, 2, 3, 5, 8, 12}) {
        const double want = oracles::partition_direct(p, beta, n);
        CHECK(partition_function_bruteforce(p, beta, n) ==
              doctest::Approx(want).epsilon(1e-13));
      }
}

TEST_CASE("channel relabeling invariance") {
  auto pa = validate_params({0.3, 0.5}, {1.0, 2.0});
  auto pb = validate_params({0.5, 0.3}, {2.0, 1.0});
  for (double beta : {-1.5, 0.7})
    for (int n : {1, 4, 9})
      CHECK(partition_function_bruteforce(pa, beta, n) ==
            doctest::Approx(partition_function_bruteforce(pb, beta, n)).epsilon(1e-13));
}

TEST_CASE("enumeration cap") {
  auto p = validate_params({0.5}, {1.0});
  CHECK_THROWS_AS(partition_function_bruteforce(p, 0.0, 25), CapExceeded);
  CHECK_THROWS_AS(partition_function_bruteforce(p, 0.0, 15, 10), CapExceeded);
  CHECK_THROWS_AS(partition_function_bruteforce(p, 0.0, 0), DomainError);
  CHECK(partition_function_bruteforce(p, 0.0, 15, 15) == std::ldexp(1.0, 15));
}

TEST_CASE("threaded partition matches sequential") {
  auto p = validate_params({0.4, 0.6}, {1.0, 0.8});
  for (int n : {13, 14}) {
    const double seq = partition_function_bruteforce(p, 0.9, n, -1, 1);
    const double par = partition_function_bruteforce(p, 0.9, n, -1, 4);
    CHECK(par == doctest::Approx(seq).epsilon(1e-13));
  }
}
