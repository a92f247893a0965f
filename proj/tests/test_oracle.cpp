#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "curvewire/oracle.hpp"
#include "curvewire/scattering.hpp"
#include "curvewire/units.hpp"

using namespace curvewire;
using Catch::Approx;

TEST_CASE("transfer matrix on a flat 50-site chain is fully transparent") {
  Chain chain;
  chain.lattice_constant = 1.0;
  chain.lead_hopping = 0.5;
  chain.onsite.assign(50, 1.0);
  chain.hopping.assign(49, 0.5);
  chain.length = 49.0;
  for (const double frac : {0.2, 1.0, 3.5}) {
    const auto res = oracle::transfer_matrix_smatrix(chain, frac * chain.lead_hopping);
    REQUIRE(std::abs(res.s.tl) == Approx(1.0).margin(1e-10));
    REQUIRE(std::abs(res.s.rl) < 1e-10);
    REQUIRE(res.s.unitarity_defect() < 1e-8);
    REQUIRE(res.method == oracle::Method::transfer_matrix);
  }
}

TEST_CASE("transfer matrix enforces its stability regime") {
  Chain chain;
  chain.lattice_constant = 1.0;
  chain.lead_hopping = 0.5;
  chain.onsite.assign(300, 1.0);
  chain.hopping.assign(299, 0.5);
  chain.length = 299.0;
  REQUIRE_THROWS_AS(oracle::transfer_matrix_smatrix(chain, 0.5), std::domain_error);
  chain.onsite.resize(100);
  chain.hopping.resize(99);
  REQUIRE_THROWS_AS(oracle::transfer_matrix_smatrix(chain, 0.01 * chain.lead_hopping),
                    std::domain_error);
  REQUIRE_THROWS_AS(oracle::transfer_matrix_smatrix(chain, 3.95 * chain.lead_hopping),
                    std::domain_error);
}

TEST_CASE("delta impurity transmission matches the closed form") {
  const double t0 = 0.5;
  Chain chain;
  chain.lattice_constant = 1.0;
  chain.lead_hopping = t0;
  chain.onsite.assign(151, 2.0 * t0);
  chain.hopping.assign(150, t0);
  chain.length = 150.0;
  const double v = 0.37 * t0;
  chain.onsite[75] += v;
  for (const double frac : {0.3, 1.0, 1.7, 3.0}) {
    const double e = frac * t0;
    const double t_wave = std::norm(solve_smatrix(chain, e).s.tl);
    const double t_transfer = std::norm(oracle::transfer_matrix_smatrix(chain, e).s.tl);
    const double ka = lead_momentum(e, t0, 1.0);
    const double closed = oracle::delta_impurity_transmission(v, t0, ka);
    REQUIRE(t_wave == Approx(closed).margin(1e-6));
    REQUIRE(t_transfer == Approx(closed).margin(1e-6));
  }
}

TEST_CASE("seeded random chains: the two solution routes coincide") {
  std::mt19937 rng(20240817u);
  std::uniform_int_distribution<std::size_t> size_pick(10, 200);
  std::uniform_real_distribution<double> onsite_jitter(-0.05, 0.05);
  std::uniform_real_distribution<double> hop_jitter(0.85, 1.0);
  std::uniform_real_distribution<double> energy_pick(0.15, 3.85);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    Chain chain;
    chain.lattice_constant = 1.0;
    chain.lead_hopping = 0.5;
    chain.onsite.resize(size_pick(rng));
    chain.hopping.resize(chain.onsite.size() - 1);
    chain.length = static_cast<double>(chain.hopping.size());
    for (auto& o : chain.onsite) o = 2.0 * chain.lead_hopping * (1.0 + onsite_jitter(rng));
    for (auto& h : chain.hopping) h = chain.lead_hopping * hop_jitter(rng);
    const double e = energy_pick(rng) * chain.lead_hopping;
    const SMatrixPoint pt = solve_smatrix(chain, e);
    const auto ref = oracle::transfer_matrix_smatrix(chain, e);
    worst = std::max({worst, std::abs(pt.s.rl - ref.s.rl), std::abs(pt.s.tl - ref.s.tl),
                      std::abs(pt.s.tr - ref.s.tr), std::abs(pt.s.rr - ref.s.rr)});
    REQUIRE(ref.s.unitarity_defect() < 1e-8);
  }
  REQUIRE(worst < 1e-8);
}

TEST_CASE("analytic square well: resonances, weak-well limit, frozen regression value") {
  const double mev = units::hartree_in_mev;
  // k2 w = n pi gives full transparency; n = 3 with w = 200 a0 and
  // |V| = 20 meV lands at a positive energy.
  const double w = 200.0;
  const double depth = units::mev_to_hartree(-20.0);
  const double k2 = 3.0 * std::numbers::pi / w;
  const double e_res = 0.5 * k2 * k2 + depth;  // E = k2^2/2 - |V|
  REQUIRE(e_res > 0.0);
  REQUIRE(oracle::analytic_square_well_transmission(e_res, depth, w) ==
          Approx(1.0).margin(1e-12));

  // Vanishing depth: transparent at every energy.
  REQUIRE(oracle::analytic_square_well_transmission(units::mev_to_hartree(7.0), -1e-15, w) ==
          Approx(1.0).margin(1e-9));

  // Frozen arbitrary-precision value at (E, V, w) = (10 meV, -20 meV, 200 a0).
  REQUIRE(oracle::analytic_square_well_transmission(10.0 / mev, -20.0 / mev, w) ==
          Approx(0.99962888930197673).epsilon(1e-12));
  // And the off-resonance companions used by the lattice comparison.
  REQUIRE(oracle::analytic_square_well_transmission(5.0 / mev, -20.0 / mev, w) ==
          Approx(0.68830662749717741).epsilon(1e-12));
  REQUIRE(oracle::analytic_square_well_transmission(20.0 / mev, -20.0 / mev, w) ==
          Approx(0.89113889257774803).epsilon(1e-12));
  REQUIRE(oracle::analytic_square_well_transmission(30.0 / mev, -20.0 / mev, w) ==
          Approx(0.98794272221262609).epsilon(1e-12));

  REQUIRE_THROWS_AS(oracle::analytic_square_well_transmission(0.1, 0.3, w),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(oracle::analytic_square_well_transmission(-0.1, -0.3, w),
                    std::invalid_argument);
}

TEST_CASE("square_well_chain weights partially covered edge cells") {
  const double depth = units::mev_to_hartree(-20.0);
  const Chain chain = oracle::square_well_chain(1000.0, 0.2, depth, 400.0, 600.0);
  const double t0 = chain.lead_hopping;
  // Sites at exactly 400 and 600 sit half inside the well.
  const std::size_t i_edge = 2000;
  REQUIRE(chain.onsite[i_edge] == Approx(2.0 * t0 + 0.5 * depth).epsilon(1e-12));
  REQUIRE(chain.onsite[i_edge + 500] == Approx(2.0 * t0 + depth).epsilon(1e-12));
  REQUIRE(chain.onsite[i_edge - 5] == Approx(2.0 * t0).epsilon(1e-12));
  REQUIRE_THROWS_AS(oracle::square_well_chain(1000.0, 0.2, depth, -5.0, 600.0),
                    std::invalid_argument);
}
