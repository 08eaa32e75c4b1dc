#include <cmath>

#include <doctest.h>

#include "dynspec/errors.hpp"
#include "dynspec/spectral.hpp"
#include "dynspec/tentropy.hpp"
#include "helpers.hpp"

using namespace dynspec;
using namespace dynspec::testing;

namespace {

PartitionOfUnity random_soft_partition(Rng& rng, int n_states, int k) {
  std::uniform_real_distribution<double> ud(0.01, 1.0);
  std::vector<Vec> fns(k, Vec(n_states, 0.0));
  for (int x = 0; x < n_states; ++x) {
    double s = 0.0;
    for (int i = 0; i < k; ++i) {
      fns[i][x] = ud(rng);
      s += fns[i][x];
    }
    for (int i = 0; i < k; ++i) fns[i][x] /= s;
  }
  return PartitionOfUnity(std::move(fns));
}

}  // namespace

TEST_CASE("partition of unity validation") {
  CHECK_NOTHROW(PartitionOfUnity({Vec{0.3, 1.0}, Vec{0.7, 0.0}}));
  CHECK_THROWS_AS(PartitionOfUnity({Vec{0.3, 1.0}, Vec{0.6, 0.0}}), DomainError);
  CHECK_THROWS_AS(PartitionOfUnity({Vec{1.3, 1.0}, Vec{-0.3, 0.0}}), DomainError);
}

TEST_CASE("inner_measure_opt") {
  SUBCASE("identity: m_opt = mu, value 0") {
    const Mat id = Mat::identity(3);
    const Measure mu(Vec{0.2, 0.5, 0.3});
    const InnerOptResult r = inner_measure_opt(id, mu);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(0.0).epsilon(1e-10));
    for (int i = 0; i < 3; ++i) CHECK(r.m_opt[i] == doctest::Approx(mu[i]).epsilon(1e-6));
  }
  SUBCASE("fixed point with weight c: value ln c") {
    const TransferMatrix a = build_pf_operator(FiniteMapSystem(2, {0, 0}), Vec{2.0, 1.0});
    const InnerOptResult r = inner_measure_opt(a.entries(), Measure(Vec{1.0, 0.0}));
    CHECK(r.value == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  }
  SUBCASE("2-cycle matches the grid oracle") {
    const double av = 0.8, bv = 2.7;
    Mat m(2, 2);
    m(0, 1) = bv;
    m(1, 0) = av;
    const Measure mu(Vec{0.5, 0.5});
    const InnerOptResult r = inner_measure_opt(m, mu);
    CHECK(r.value == doctest::Approx((std::log(av) + std::log(bv)) / 2.0).epsilon(1e-8));
    CHECK(r.value == doctest::Approx(inner_opt_grid_oracle(m, mu, 2000)).epsilon(1e-5));
  }
  SUBCASE("null column under supp mu throws") {
    Mat m(2, 2);
    m(0, 0) = 1.0;
    CHECK_THROWS_AS(inner_measure_opt(m, Measure(Vec{0.0, 1.0})), NullColumn);
  }
  SUBCASE("KKT residual small on random instances") {
    Rng rng(42);
    for (int trial = 0; trial < 50; ++trial) {
      const FiniteMapSystem sys = random_system(rng, 6);
      const TransferMatrix a = build_pf_operator(sys, random_psi(rng, sys.n_states()));
      const Measure mu = random_hull_point(rng, sys);
      const InnerOptResult r = inner_measure_opt(a.entries(), mu);
      CHECK(r.kkt_residual <= 1e-6);
      CHECK(r.converged);
    }
  }
}

TEST_CASE("tau_n_partition") {
  const TransferMatrix a = build_pf_operator(FiniteMapSystem(2, {1, 0}), Vec{0.9, 3.0});
  const Measure mu(Vec{0.5, 0.5});

  SUBCASE("trivial partition gives ln||A^n 1||_inf") {
    const PartitionOfUnity triv({Vec{1.0, 1.0}});
    const ExtReal v = tau_n_partition(a, mu, triv, 2);
    Vec ones{1.0, 1.0};
    Vec v2 = mat_apply(matpow(a.entries(), 2), ones);
    CHECK(v.value() == doctest::Approx(std::log(sup_norm(v2))).epsilon(1e-9));
  }
  SUBCASE("point partition equals tau_n") {
    const PartitionOfUnity pts = PartitionOfUnity::point_partition(2);
    for (int n = 1; n <= 4; ++n)
      CHECK(tau_n_partition(a, mu, pts, n).value() ==
            doctest::Approx(tau_n(a, mu, n).value()).epsilon(1e-10));
  }
  SUBCASE("null-column clause gives -inf") {
    const TransferMatrix nil = TransferMatrix(FiniteMapSystem(2, {1, 0}), [] {
      Mat m(2, 2);
      m(1, 0) = 3.0;
      return m;
    }());
    CHECK(tau_n_partition(nil, Measure(Vec{0.5, 0.5}), PartitionOfUnity::point_partition(2), 2)
              .is_neg_inf());
  }
}

TEST_CASE("point-partition minimality against random soft partitions") {
  Rng rng(4242);
  int trials = 0;
  while (trials < 200) {
    const FiniteMapSystem sys = random_system(rng, 6);
    const TransferMatrix a = build_pf_operator(sys, random_psi(rng, sys.n_states()));
    const Measure mu = random_hull_point(rng, sys);
    std::uniform_int_distribution<int> kd(2, sys.n_states() + 2);
    std::uniform_int_distribution<int> nd(1, 4);
    const PartitionOfUnity d = random_soft_partition(rng, sys.n_states(), kd(rng));
    const int n = nd(rng);
    const ExtReal soft = tau_n_partition(a, mu, d, n);
    const ExtReal point = tau_n(a, mu, n);
    REQUIRE_FALSE(point.is_neg_inf());
    CHECK(soft.value() >= point.value() - 1e-10);
    ++trials;
  }
}

TEST_CASE("tau_n") {
  SUBCASE("identity is 0") {
    const TransferMatrix a = build_pf_operator(FiniteMapSystem(3, {0, 1, 2}), Vec{1.0, 1.0, 1.0});
    const Measure mu(Vec{0.3, 0.3, 0.4});
    for (int n = 1; n <= 4; ++n) CHECK(tau_n(a, mu, n).value() == doctest::Approx(0.0));
  }
  SUBCASE("nilpotent is -inf") {
    Mat m(2, 2);
    m(1, 0) = 3.0;
    const TransferMatrix a(FiniteMapSystem(2, {1, 0}), m);
    CHECK(tau_n(a, Measure(Vec{0.5, 0.5}), 2).is_neg_inf());
  }
  SUBCASE("2-cycle closed form, brute-force verified") {
    const double av = 1.7, bv = 0.4;
    Mat m(2, 2);
    m(0, 1) = bv;
    m(1, 0) = av;
    const TransferMatrix a(FiniteMapSystem(2, {1, 0}), m);
    const Measure mu(Vec{0.5, 0.5});
    const double per_step = (std::log(av) + std::log(bv)) / 2.0;
    for (int n = 1; n <= 3; ++n) {
      CHECK(tau_n(a, mu, n).value() == doctest::Approx(n * per_step).epsilon(1e-8));
      CHECK(tau_n(a, mu, n).value() ==
            doctest::Approx(inner_opt_grid_oracle(matpow(m, n), mu, 2000)).epsilon(1e-5));
    }
  }
}

TEST_CASE("t_entropy") {
  SUBCASE("periodic orbit measures give the cycle average of ln psi") {
    Rng rng(8);
    for (int trial = 0; trial < 30; ++trial) {
      const FiniteMapSystem sys = random_system(rng);
      const Vec psi = random_psi(rng, sys.n_states());
      const TransferMatrix a = build_pf_operator(sys, psi);
      for (const auto& nu : ergodic_measures(sys)) {
        const TauResult t = t_entropy(a, nu, 16);
        const ExtReal oracle = tau_affine_oracle(psi, nu);
        CHECK(t.value.value() == doctest::Approx(oracle.value()).epsilon(1e-8));
      }
    }
  }
  SUBCASE("invertible conditional expectation has tau = 0") {
    const TransferMatrix a =
        build_pf_operator(FiniteMapSystem(3, {1, 2, 0}), Vec{1.0, 1.0, 1.0});
    const Measure mu(Vec{1.0 / 3, 1.0 / 3, 1.0 / 3});
    CHECK(t_entropy(a, mu, 12).value.value() == doctest::Approx(0.0).epsilon(1e-10));
  }
  SUBCASE("upper bound tau <= lambda(0)") {
    Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
      const FiniteMapSystem sys = random_system(rng);
      const TransferMatrix a = build_pf_operator(sys, random_psi(rng, sys.n_states()));
      const Measure mu = random_hull_point(rng, sys);
      const TauResult t = t_entropy(a, mu, 12);
      const double lam0 = spectral_potential(a, Potential(Vec(sys.n_states(), 0.0))).lambda.value();
      if (!t.value.is_neg_inf()) CHECK(t.value.value() <= lam0 + 1e-8);
    }
  }
}

TEST_CASE("subadditivity of tau_n for invariant measures") {
  Rng rng(13);
  for (int trial = 0; trial < 60; ++trial) {
    const FiniteMapSystem sys = random_system(rng, 6);
    const TransferMatrix a = build_pf_operator(sys, random_psi(rng, sys.n_states()));
    const Measure mu = random_hull_point(rng, sys);
    std::vector<double> tn;
    for (int n = 1; n <= 8; ++n) tn.push_back(tau_n(a, mu, n).value());
    for (int n = 1; n <= 7; ++n)
      for (int k = 1; n + k <= 8; ++k)
        CHECK(tn[n + k - 1] <= tn[n - 1] + tn[k - 1] + 1e-8);
  }
}

TEST_CASE("concavity of tau on invariant segments") {
  Rng rng(14);
  for (int trial = 0; trial < 40; ++trial) {
    const FiniteMapSystem sys = random_system(rng, 6);
    const TransferMatrix a = build_pf_operator(sys, random_psi(rng, sys.n_states()));
    const Measure mu1 = random_hull_point(rng, sys);
    const Measure mu2 = random_hull_point(rng, sys);
    std::uniform_real_distribution<double> td(0.0, 1.0);
    const double t = td(rng);
    Vec mix(sys.n_states());
    for (int i = 0; i < sys.n_states(); ++i) mix[i] = t * mu1[i] + (1.0 - t) * mu2[i];
    const double v1 = t_entropy(a, mu1, 12).value.value();
    const double v2 = t_entropy(a, mu2, 12).value.value();
    const double vm = t_entropy(a, Measure(mix), 12).value.value();
    CHECK(vm >= t * v1 + (1.0 - t) * v2 - 1e-6);
  }
}

TEST_CASE("lower estimate lambda(phi) >= mu(phi) + tau(mu)") {
  Rng rng(15);
  for (int trial = 0; trial < 80; ++trial) {
    const FiniteMapSystem sys = random_system(rng, 6);
    const TransferMatrix a = build_pf_operator(sys, random_psi(rng, sys.n_states()));
    const Measure mu = random_hull_point(rng, sys);
    const Vec phi = random_phi(rng, sys.n_states());
    const double lam = spectral_potential(a, Potential(phi)).lambda.value();
    const TauResult t = t_entropy(a, mu, 12);
    if (!t.value.is_neg_inf())
      CHECK(lam >= mu.integrate(phi) + t.value.value() - 1e-8);
  }
}
