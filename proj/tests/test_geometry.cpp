#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "curvewire/geometry.hpp"
#include "curvewire/units.hpp"

using namespace curvewire;
using Catch::Approx;

namespace {

constexpr double kL = 1000.0;
const double kSigma = kL / (4.0 * std::numbers::pi);
constexpr double kA = 0.2 * kL;
constexpr double kX0 = 0.5 * kL;

Profile paper_single() { return Profile::single_gaussian(kL, kA, kX0, kSigma); }

}  // namespace

TEST_CASE("curvature of elementary configurations") {
  REQUIRE(curvature(0.0, 0.0) == 0.0);
  REQUIRE(curvature(0.0, 1.0) == 1.0);  // parabola vertex f = x^2/2
  const double peak_f2 = -kA / (kSigma * kSigma);
  REQUIRE(curvature(0.0, peak_f2) == Approx(kA / (kSigma * kSigma)).epsilon(1e-15));
  REQUIRE(curvature(0.0, peak_f2) == Approx(0.03158273408348595).epsilon(1e-12));
  // Curvature never goes negative.
  for (double f1 : {-2.0, -0.5, 0.0, 1.0})
    for (double f2 : {-3.0, -1e-5, 0.0, 2.0}) REQUIRE(curvature(f1, f2) >= 0.0);
}

TEST_CASE("effective mass grows with the slope and bottoms out at m0") {
  REQUIRE(effective_mass(0.0) == 1.0);
  REQUIRE(effective_mass(1.0) == 2.0);
  REQUIRE(effective_mass(0.0, 3.5) == 3.5);

  const Profile p = paper_single();
  // Peak of the dent: tangent parallel to the axis.
  REQUIRE(geometry_at(p, kX0).m_eff == Approx(1.0).margin(1e-12));
  // Inflection point: frozen analytic value of (1 + (A/sigma)^2 e^{-1}) m0.
  const double at_inflection = geometry_at(p, kX0 + kSigma).m_eff;
  REQUIRE(at_inflection == Approx(3.3237277130598150).epsilon(1e-12));
  // It is the global maximum along the wire.
  double global_max = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const double m = geometry_at(p, kL * i / 20000.0).m_eff;
    REQUIRE(m >= 1.0);
    global_max = std::max(global_max, m);
  }
  REQUIRE(global_max <= at_inflection + 1e-9);
  REQUIRE(global_max == Approx(at_inflection).epsilon(1e-6));
}

TEST_CASE("geometric potential is attractive and matches the frozen peak value") {
  REQUIRE(geometric_potential(0.0) == 0.0);
  for (double kappa : {1e-6, 0.01, 2.0}) REQUIRE(geometric_potential(kappa) < 0.0);

  const double v_peak = geometry_at(paper_single(), kX0).v_geo;
  REQUIRE(v_peak == Approx(-1.2468363652352312e-4).epsilon(1e-12));
  REQUIRE(units::hartree_to_mev(v_peak) == Approx(-3.3928145613252857).epsilon(1e-10));
}

TEST_CASE("effective potential: flat space, dent center, and inflection point") {
  REQUIRE(effective_potential(0.0, 0.0, 0.0) == 0.0);

  const Profile p = paper_single();
  const auto center = geometry_at(p, kX0);
  // With f1 = f3 = 0 both algebraic forms reduce to 3 v_geo.
  REQUIRE(center.v_eff == Approx(3.0 * center.v_geo).epsilon(1e-13));
  REQUIRE(effective_potential_product_form(center.f1, center.f2, center.f3) ==
          Approx(center.v_eff).epsilon(1e-13));

  // Frozen arbitrary-precision value at the inflection point (f2 = 0 there,
  // only the regular form applies).
  const auto inflection = geometry_at(p, kX0 + kSigma);
  REQUIRE(inflection.v_eff == Approx(1.6608258407215023e-5).epsilon(1e-10));
  REQUIRE(inflection.v_eff > 0.0);  // partly repulsive landscape
}

TEST_CASE("both printed forms of the effective potential agree off the zeros of f2") {
  const Profile p = paper_single();
  const double f2_floor = 1e-6 * kA / (kSigma * kSigma);
  int checked = 0;
  for (int i = 1; i < 4000; ++i) {
    const double x = kL * i / 4000.0;
    const auto pt = p.eval(x);
    if (std::abs(pt.f2) <= f2_floor) continue;
    const double regular = effective_potential(pt.f1, pt.f2, pt.f3);
    const double product = effective_potential_product_form(pt.f1, pt.f2, pt.f3);
    REQUIRE(product == Approx(regular).epsilon(1e-12));
    ++checked;
  }
  REQUIRE(checked > 3000);
}

TEST_CASE("alpha factor") {
  REQUIRE(alpha_factor(0.0) == 1.0);
  REQUIRE(alpha_factor(1.0) == Approx(std::pow(2.0, 0.25)).epsilon(1e-15));
  for (double f1 : {-3.0, -0.2, 0.4, 10.0}) REQUIRE(alpha_factor(f1) >= 1.0);

  // Asymptotic endpoints of the Gaussian dent: alpha returns to one.
  const Profile p = paper_single();
  REQUIRE(std::abs(geometry_at(p, 0.0).alpha - 1.0) < 1e-8);
  REQUIRE(std::abs(geometry_at(p, kL).alpha - 1.0) < 1e-8);
  REQUIRE(geometry_at(Profile::flat(kL), 321.0).alpha == 1.0);
}

TEST_CASE("geometry_grid covers the domain uniformly") {
  const auto grid = geometry_grid(paper_single(), 101);
  REQUIRE(grid.size() == 101);
  REQUIRE(grid.front().x == 0.0);
  REQUIRE(grid.back().x == Approx(kL));
  for (const auto& g : grid) {
    REQUIRE(g.m_eff >= 1.0);
    REQUIRE(g.v_geo <= 0.0);
    REQUIRE(g.alpha >= 1.0);
    REQUIRE(g.kappa >= 0.0);
  }
}

TEST_CASE("double-dent geometry converges to parity independence with separation") {
  // The even/odd effective potentials approach each other rapidly once the
  // dents stop overlapping; by s = 0.35 L the relative disagreement is
  // below 1e-3 (at s = 0.25 L it still sits at the 7e-3 level).
  const auto max_rel_diff = [&](double s) {
    const Profile even = Profile::double_gaussian(kL, kA, kX0, kSigma, s, Parity::even, 1.0);
    const Profile odd = Profile::double_gaussian(kL, kA, kX0, kSigma, s, Parity::odd, 1.0);
    double worst = 0.0, scale = 0.0;
    for (int i = 0; i <= 8000; ++i) {
      const double x = kL * i / 8000.0;
      const double ve = geometry_at(even, x).v_eff;
      const double vo = geometry_at(odd, x).v_eff;
      worst = std::max(worst, std::abs(ve - vo));
      scale = std::max(scale, std::abs(ve));
    }
    return worst / scale;
  };
  const double at_025 = max_rel_diff(0.25 * kL);
  const double at_030 = max_rel_diff(0.30 * kL);
  const double at_035 = max_rel_diff(0.35 * kL);
  REQUIRE(at_025 < 1e-2);
  REQUIRE(at_030 < at_025);
  REQUIRE(at_035 < at_030);
  REQUIRE(at_035 < 1e-3);
}
