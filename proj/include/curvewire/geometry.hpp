#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "curvewire/profile.hpp"

namespace curvewire {

/// Derived differential-geometric quantities at one position, atomic units.
struct GeometryField {
  double x;
  double f1, f2, f3;
  double kappa;   // curvature of the graph (x, f(x))
  double m_eff;   // position-dependent mass (1 + f1^2) m0
  double v_geo;   // curvature-induced attractive term, always <= 0
  double v_eff;   // scalar potential of the straightened wire equation
  double alpha;   // amplitude factor (1 + f1^2)^{1/4}
};

inline double curvature(double f1, double f2) {
  const double g = 1.0 + f1 * f1;
  return std::abs(f2) / (g * std::sqrt(g));
}

inline double effective_mass(double f1, double m0 = 1.0) {
  return (1.0 + f1 * f1) * m0;
}

inline double geometric_potential(double kappa, double m0 = 1.0) {
  return -kappa * kappa / (8.0 * m0);
}

/// Regular form of the effective potential; finite for every input, in
/// particular where f2 vanishes.
inline double effective_potential(double f1, double f2, double f3, double m0 = 1.0) {
  const double g = 1.0 + f1 * f1;
  const double num = 3.0 * (1.0 - f1 * f1) * f2 * f2 + 2.0 * g * f1 * f3;
  return -num / (8.0 * m0 * g * g * g);
}

/// Product form v_eff = [2(1+f1^2) f1 f3 / f2^2 + 3(1-f1^2)] v_geo. It
/// divides by f2^2, so it is kept for cross-checks only, never for
/// production evaluation.
inline double effective_potential_product_form(double f1, double f2, double f3,
                                               double m0 = 1.0) {
  const double g = 1.0 + f1 * f1;
  const double v_geo = geometric_potential(curvature(f1, f2), m0);
  return (2.0 * g * f1 * f3 / (f2 * f2) + 3.0 * (1.0 - f1 * f1)) * v_geo;
}

inline double alpha_factor(double f1) {
  return std::pow(1.0 + f1 * f1, 0.25);
}

inline GeometryField geometry_at(const Profile& profile, double x, double m0 = 1.0) {
  const ProfilePoint p = profile.eval(x);
  GeometryField g{};
  g.x = x;
  g.f1 = p.f1;
  g.f2 = p.f2;
  g.f3 = p.f3;
  g.kappa = curvature(p.f1, p.f2);
  g.m_eff = effective_mass(p.f1, m0);
  g.v_geo = geometric_potential(g.kappa, m0);
  g.v_eff = effective_potential(p.f1, p.f2, p.f3, m0);
  g.alpha = alpha_factor(p.f1);
  return g;
}

inline std::vector<GeometryField> geometry_grid(const Profile& profile, std::size_t n_nodes,
                                                double m0 = 1.0) {
  if (n_nodes < 2) throw std::invalid_argument("geometry_grid: need at least 2 nodes");
  std::vector<GeometryField> out;
  out.reserve(n_nodes);
  const double h = profile.length() / static_cast<double>(n_nodes - 1);
  for (std::size_t i = 0; i < n_nodes; ++i)
    out.push_back(geometry_at(profile, static_cast<double>(i) * h, m0));
  return out;
}

}  // namespace curvewire
