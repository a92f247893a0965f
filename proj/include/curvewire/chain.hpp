#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvewire/geometry.hpp"
#include "curvewire/profile.hpp"

namespace curvewire {

/// Nearest-neighbor tight-binding discretization of the effective wire
/// equation. Sites sit at x_i = i a for i = 0..N with N a = L; hoppings are
/// the (positive) mid-bond values t_eff(x_i + a/2). Immutable after build.
struct Chain {
  double lattice_constant = 0.0;
  double length = 0.0;
  double m0 = 1.0;
  double lead_hopping = 0.0;        // t0 = 1 / (2 m0 a^2)
  std::vector<double> onsite;       // n_sites values
  std::vector<double> hopping;      // n_sites - 1 mid-bond values

  std::size_t n_sites() const noexcept { return onsite.size(); }
  double band_maximum() const noexcept { return 4.0 * lead_hopping; }
};

/// Mid-bond hopping t_eff = t0 / (1 + f1^2); always in (0, t0].
inline double hopping_at(const Profile& profile, double x_mid, double t0) {
  const double f1 = profile.eval(x_mid).f1;
  return t0 / (1.0 + f1 * f1);
}

/// Onsite element v_eff(x_i) + 2 <t_eff>_i with the arithmetic mid-bond
/// average <t_eff>_i = [t_eff(x_i - a/2) + t_eff(x_i + a/2)] / 2. The two
/// half-bond positions are clamped into [0, L] at the boundary sites.
inline double onsite_at(const Profile& profile, double x_i, double a, double m0 = 1.0) {
  const double t0 = 1.0 / (2.0 * m0 * a * a);
  const double left = std::max(0.0, x_i - 0.5 * a);
  const double right = std::min(profile.length(), x_i + 0.5 * a);
  const ProfilePoint p = profile.eval(x_i);
  return effective_potential(p.f1, p.f2, p.f3, m0) + hopping_at(profile, left, t0) +
         hopping_at(profile, right, t0);
}

inline Chain build_chain(const Profile& profile, double a, double m0 = 1.0) {
  if (!(a > 0.0)) throw std::invalid_argument("build_chain: lattice constant must be > 0");
  const double length = profile.length();
  const long long bonds = std::llround(length / a);
  if (bonds < 100)
    throw std::invalid_argument("build_chain: resolution too coarse, need L/a >= 100 (got " +
                                std::to_string(bonds) + ")");
  // Snap the spacing so the sites span [0, L] exactly.
  const double h = length / static_cast<double>(bonds);
  const double t0 = 1.0 / (2.0 * m0 * h * h);

  for (const double edge : {0.0, length}) {
    const double slope = std::abs(profile.eval(edge).f1);
    if (slope >= profile.flatness_tol())
      throw std::invalid_argument(
          std::string("build_chain: profile is not flat at the ") +
          (edge == 0.0 ? "left" : "right") + " boundary (|f'| = " +
          std::to_string(slope) + "), cannot match leads");
  }

  Chain chain;
  chain.lattice_constant = h;
  chain.length = length;
  chain.m0 = m0;
  chain.lead_hopping = t0;
  const std::size_t n = static_cast<std::size_t>(bonds) + 1;
  chain.hopping.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    chain.hopping[i] = hopping_at(profile, (static_cast<double>(i) + 0.5) * h, t0);
  chain.onsite.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) * h;
    const ProfilePoint p = profile.eval(x);
    const double t_left = i == 0 ? hopping_at(profile, 0.0, t0) : chain.hopping[i - 1];
    const double t_right = i + 1 == n ? hopping_at(profile, length, t0) : chain.hopping[i];
    chain.onsite[i] = effective_potential(p.f1, p.f2, p.f3, m0) + t_left + t_right;
  }
  return chain;
}

}  // namespace curvewire
