#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "curvewire/numeric.hpp"

using namespace curvewire;
using Catch::Approx;

TEST_CASE("fd_weights reproduces the classic uniform stencils") {
  const double h = 0.25;
  std::vector<double> nodes;
  for (int i = -2; i <= 2; ++i) nodes.push_back(i * h);

  const auto w1 = numeric::fd_weights(0.0, nodes, 1);
  const double c1[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
  for (int i = 0; i < 5; ++i) REQUIRE(w1[i] == Approx(c1[i] / h).margin(1e-12));

  const auto w2 = numeric::fd_weights(0.0, nodes, 2);
  const double c2[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
  for (int i = 0; i < 5; ++i) REQUIRE(w2[i] == Approx(c2[i] / (h * h)).margin(1e-10));

  std::vector<double> nodes7;
  for (int i = -3; i <= 3; ++i) nodes7.push_back(i * h);
  const auto w3 = numeric::fd_weights(0.0, nodes7, 3);
  const double c3[7] = {1.0 / 8, -1.0, 13.0 / 8, 0.0, -13.0 / 8, 1.0, -1.0 / 8};
  for (int i = 0; i < 7; ++i) REQUIRE(w3[i] == Approx(c3[i] / (h * h * h)).margin(1e-9));
}

TEST_CASE("fd_weights differentiates smooth data to high order") {
  const double h = 0.05;
  std::vector<double> nodes;
  for (int i = -3; i <= 3; ++i) nodes.push_back(1.0 + i * h);
  const auto w = numeric::fd_weights(1.0, nodes, 3);
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) acc += w[i] * std::exp(nodes[i]);
  REQUIRE(acc == Approx(std::exp(1.0)).epsilon(1e-6));
}

TEST_CASE("adaptive Simpson hits analytic integrals") {
  const double v1 = numeric::adaptive_simpson([](double x) { return std::sin(x); }, 0.0,
                                              std::numbers::pi, 1e-12);
  REQUIRE(v1 == Approx(2.0).epsilon(1e-11));

  const double v2 =
      numeric::adaptive_simpson([](double x) { return std::exp(-x * x); }, -6.0, 6.0, 1e-11);
  REQUIRE(v2 == Approx(std::sqrt(std::numbers::pi)).epsilon(1e-10));

  REQUIRE(numeric::adaptive_simpson([](double) { return 1.0; }, 3.0, 3.0) == 0.0);
}

TEST_CASE("natural cubic spline interpolates and stays exact on straight data") {
  std::vector<double> x, y;
  for (int i = 0; i <= 20; ++i) {
    x.push_back(0.13 * i);
    y.push_back(2.5 * x.back() - 1.0);
  }
  numeric::CubicSpline line(x, y);
  REQUIRE(line(0.77) == Approx(2.5 * 0.77 - 1.0).epsilon(1e-13));

  // Dense smooth data: interpolation error scales like h^4 away from the ends.
  x.clear();
  y.clear();
  for (int i = 0; i <= 200; ++i) {
    x.push_back(i * 0.05);
    y.push_back(std::sin(x.back()));
  }
  numeric::CubicSpline s(x, y);
  double worst = 0.0;
  for (double t = 1.0; t < 9.0; t += 0.0137)
    worst = std::max(worst, std::abs(s(t) - std::sin(t)));
  REQUIRE(worst < 1e-6);
}

TEST_CASE("uniform Lagrange interpolation is exact on polynomials") {
  std::vector<double> ys;
  const double h = 0.3;
  auto poly = [](double x) { return ((x - 2.0) * x + 1.5) * x * x - 0.25 * x + 3.0; };
  for (int i = 0; i <= 40; ++i) ys.push_back(poly(i * h));
  for (double x : {0.11, 3.71, 11.03, 11.97}) {
    REQUIRE(numeric::lagrange_uniform(ys, h, x) == Approx(poly(x)).epsilon(1e-12));
  }
}

TEST_CASE("linear fit recovers an exact line and reports residuals") {
  std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> y;
  for (double v : x) y.push_back(-0.7 * v + 4.0);
  const auto fit = numeric::linear_fit(x, y);
  REQUIRE(fit.slope == Approx(-0.7).margin(1e-14));
  REQUIRE(fit.intercept == Approx(4.0).margin(1e-13));
  REQUIRE(fit.max_abs_residual < 1e-13);

  y[2] += 0.5;
  const auto fit2 = numeric::linear_fit(x, y);
  REQUIRE(fit2.max_abs_residual > 0.2);
}

TEST_CASE("golden section finds the maximum of a smooth bump") {
  auto f = [](double x) { return -(x - 1.234) * (x - 1.234) + 2.0; };
  const auto [x, v] = numeric::golden_section_maximize(f, 0.0, 3.0, 1e-12);
  REQUIRE(x == Approx(1.234).margin(1e-9));
  REQUIRE(v == Approx(2.0).margin(1e-15));
}
