#include <cmath>

#include <doctest.h>

#include "dynspec/lpshift.hpp"
#include "dynspec/spectral.hpp"
#include "helpers.hpp"

using namespace dynspec;
using namespace dynspec::testing;

namespace {

FiniteMeasureSystem random_measure_system(Rng& rng, int max_states = 8) {
  std::uniform_int_distribution<int> nd(2, max_states);
  const int n = nd(rng);
  std::uniform_int_distribution<int> sd(0, n - 1);
  std::uniform_real_distribution<double> md(0.2, 2.0);
  std::vector<int> beta(n);
  Vec m(n);
  for (int i = 0; i < n; ++i) {
    beta[i] = sd(rng);
    m[i] = md(rng);
  }
  return FiniteMeasureSystem(std::move(m), std::move(beta));
}

}  // namespace

TEST_CASE("transfer_from_measure") {
  SUBCASE("identity beta gives the identity operator") {
    const FiniteMeasureSystem sys(Vec{0.3, 0.7}, {0, 1});
    const TransferMatrix a = transfer_from_measure(sys);
    CHECK(a.entries()(0, 0) == doctest::Approx(1.0));
    CHECK(a.entries()(1, 1) == doctest::Approx(1.0));
    CHECK(a.entries()(0, 1) == 0.0);
  }
  SUBCASE("swap with uniform mass is the permutation matrix, A1 = 1") {
    const FiniteMeasureSystem sys(Vec{0.5, 0.5}, {1, 0});
    const TransferMatrix a = transfer_from_measure(sys);
    CHECK(a.entries()(0, 1) == doctest::Approx(1.0));
    CHECK(a.entries()(1, 0) == doctest::Approx(1.0));
    const Vec ones{1.0, 1.0};
    const Vec a1 = mat_apply(a.entries(), ones);
    CHECK(a1[0] == doctest::Approx(1.0));
    CHECK(a1[1] == doctest::Approx(1.0));
  }
  SUBCASE("constant beta: Radon-Nikodym rows, A1 = density") {
    const FiniteMeasureSystem sys(Vec{0.5, 0.5}, {0, 0});
    const TransferMatrix a = transfer_from_measure(sys);
    CHECK(a.entries()(0, 0) == doctest::Approx(1.0));
    CHECK(a.entries()(0, 1) == doctest::Approx(1.0));
    CHECK(a.entries()(1, 0) == 0.0);
    CHECK(a.entries()(1, 1) == 0.0);
    const Vec ones{1.0, 1.0};
    const Vec a1 = mat_apply(a.entries(), ones);
    CHECK(a1[0] == doctest::Approx(2.0));
    CHECK(a1[1] == doctest::Approx(0.0));
  }
  SUBCASE("outputs satisfy the homological identity") {
    Rng rng(71);
    for (int trial = 0; trial < 50; ++trial)
      CHECK(check_homological_identity(transfer_from_measure(random_measure_system(rng))));
  }
}

TEST_CASE("lp_power_norm") {
  SUBCASE("psi = 1 on a measure-preserving map gives norm 1") {
    const FiniteMeasureSystem sys(Vec{1.0 / 3, 1.0 / 3, 1.0 / 3}, {1, 2, 0});
    const WeightedShift ws(sys, Vec{1.0, 1.0, 1.0}, 2.0);
    for (int n = 1; n <= 6; ++n) CHECK(lp_power_norm(ws, n) == doctest::Approx(1.0));
  }
  SUBCASE("invertible beta: norm is the max orbit product, any p") {
    const std::vector<int> beta{1, 2, 0};
    const Vec psi{0.5, 3.0, 1.5};
    const FiniteMeasureSystem sys(Vec{1.0, 1.0, 1.0}, beta);
    for (double p : {1.0, 2.0, 7.0}) {
      const WeightedShift ws(sys, psi, p);
      for (int n = 1; n <= 5; ++n) {
        double best = 0.0;
        for (int y = 0; y < 3; ++y) {
          double prod = 1.0;
          int z = y;
          for (int i = 0; i < n; ++i) {
            prod *= psi[z];
            z = beta[z];
          }
          best = std::max(best, prod);
        }
        CHECK(lp_power_norm(ws, n) == doctest::Approx(best).epsilon(1e-12));
      }
    }
  }
  SUBCASE("constant beta, p = 1, n = 1 gives 2") {
    const FiniteMeasureSystem sys(Vec{0.5, 0.5}, {0, 0});
    CHECK(lp_power_norm(WeightedShift(sys, Vec{1.0, 1.0}, 1.0), 1) == doctest::Approx(2.0));
  }
  SUBCASE("fiber and transfer routes agree to 1e-10 relative (Eq 13.9)") {
    Rng rng(72);
    for (int trial = 0; trial < 100; ++trial) {
      const FiniteMeasureSystem sys = random_measure_system(rng, 6);
      std::uniform_real_distribution<double> pd(1.0, 4.0);
      const WeightedShift ws(sys, random_psi(rng, sys.n_points()), pd(rng));
      for (int n = 1; n <= 32; ++n) {
        const double a = lp_power_norm(ws, n);  // internally cross-checked
        const double b = lp_power_norm_via_transfer(ws, n);
        CHECK(std::abs(a - b) <= 1e-10 * std::max({a, b, 1.0}));
      }
    }
  }
}

TEST_CASE("lp_spectral_radius") {
  SUBCASE("invertible beta: log radius is the best cycle average of ln psi") {
    const FiniteMeasureSystem sys(Vec{0.4, 0.6, 1.0}, {1, 0, 2});
    const Vec psi{0.5, 3.0, 1.1};
    for (double p : {1.0, 2.0, 5.0}) {
      const LpRadiusResult r = lp_spectral_radius(WeightedShift(sys, psi, p), 8);
      const double oracle = std::max((std::log(0.5) + std::log(3.0)) / 2.0, std::log(1.1));
      CHECK(r.log_radius.value() == doctest::Approx(oracle).epsilon(1e-10));
      CHECK(std::abs(r.gap) <= 1e-3);
    }
  }
  SUBCASE("p = 1 equals ln r(A psi)") {
    Rng rng(73);
    for (int trial = 0; trial < 20; ++trial) {
      const FiniteMeasureSystem sys = random_measure_system(rng, 6);
      const Vec psi = random_psi(rng, sys.n_points());
      const LpRadiusResult r = lp_spectral_radius(WeightedShift(sys, psi, 1.0), 8);
      Mat b = transfer_from_measure(sys).entries();
      for (int x = 0; x < sys.n_points(); ++x)
        for (int y = 0; y < sys.n_points(); ++y) b(x, y) *= psi[y];
      CHECK(r.log_radius.value() ==
            doctest::Approx(spectral_analysis(b).lambda.value()).epsilon(1e-12));
    }
  }
  SUBCASE("p large: vp approaches the best cycle average of ln psi") {
    Rng rng(74);
    for (int trial = 0; trial < 10; ++trial) {
      const FiniteMeasureSystem sys = random_measure_system(rng, 6);
      const Vec psi = random_psi(rng, sys.n_points());
      const LpRadiusResult r = lp_spectral_radius(WeightedShift(sys, psi, 1000.0), 8);
      const ExtReal oracle =
          lambda_cycle_oracle(sys.map_system(), psi, Vec(sys.n_points(), 0.0));
      CHECK(std::abs(r.vp_value.value() - oracle.value()) <= 5e-3);
    }
  }
  SUBCASE("p-scaling identity") {
    Rng rng(75);
    for (int trial = 0; trial < 20; ++trial) {
      const FiniteMeasureSystem sys = random_measure_system(rng, 6);
      const Vec psi = random_psi(rng, sys.n_points());
      std::uniform_real_distribution<double> pd(1.0, 4.0);
      const double p = pd(rng);
      Vec psi_p(psi.size());
      for (size_t i = 0; i < psi.size(); ++i) psi_p[i] = std::pow(psi[i], p);
      const double lhs = lp_spectral_radius(WeightedShift(sys, psi, p), 6).log_radius.value();
      const double rhs =
          lp_spectral_radius(WeightedShift(sys, psi_p, 1.0), 6).log_radius.value() / p;
      CHECK(std::abs(lhs - rhs) <= 1e-10);
    }
  }
  SUBCASE("psi vanishing on every cycle: both sides -inf, reported not raised") {
    // 2-cycle {0,1} with psi zero on it; state 2 transient.
    const FiniteMeasureSystem sys(Vec{1.0, 1.0, 1.0}, {1, 0, 0});
    const LpRadiusResult r = lp_spectral_radius(WeightedShift(sys, Vec{0.0, 2.0, 3.0}, 2.0), 6);
    CHECK(r.log_radius.is_neg_inf());
    CHECK(r.vp_value.is_neg_inf());
    CHECK(r.gap == 0.0);
  }
  SUBCASE("psi with zeros off the cycles: VP holds with -inf conventions") {
    const FiniteMeasureSystem sys(Vec{1.0, 1.0, 1.0}, {1, 0, 0});
    const LpRadiusResult r = lp_spectral_radius(WeightedShift(sys, Vec{2.0, 0.5, 0.0}, 2.0), 8);
    CHECK_FALSE(r.log_radius.is_neg_inf());
    CHECK(std::abs(r.gap) <= 1e-3);
  }
}
