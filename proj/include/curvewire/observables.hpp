#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "curvewire/scattering.hpp"
#include "curvewire/units.hpp"

namespace curvewire {

/// Left-incidence transmission and reflection coefficients (T, R) = (|S21|^2, |S11|^2).
inline std::pair<double, double> transmission_reflection(const SMatrixPoint& p) {
  return {std::norm(p.s.tl), std::norm(p.s.rl)};
}

/// Wrap a phase difference into (-pi, pi].
inline double wrap_phase(double d) {
  constexpr double pi = std::numbers::pi;
  while (d > pi) d -= 2.0 * pi;
  while (d <= -pi) d += 2.0 * pi;
  return d;
}

struct FriedelPhases {
  std::vector<double> phase;               // cumulatively unwrapped arg det S
  std::vector<std::size_t> suspect_gaps;   // intervals [i, i+1] whose wrapped
                                           // increment is too close to +-pi
};

/// Friedel phase arg det S(E), cumulatively unwrapped over an ordered grid.
/// The first element is the principal value in (-pi, pi]. Increments whose
/// magnitude reaches `jump_threshold` cannot be unwrapped reliably and are
/// reported for grid refinement.
inline FriedelPhases friedel_phase(std::span<const SMatrixPoint> points,
                                   double jump_threshold = 0.95 * std::numbers::pi) {
  FriedelPhases out;
  out.phase.reserve(points.size());
  double prev_arg = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double arg = std::arg(points[i].s.det());
    if (i == 0) {
      out.phase.push_back(arg);
    } else {
      const double step = wrap_phase(arg - prev_arg);
      if (std::abs(step) >= jump_threshold) out.suspect_gaps.push_back(i - 1);
      out.phase.push_back(out.phase.back() + step);
    }
    prev_arg = arg;
  }
  return out;
}

/// Classical traversal time sqrt(m0 / 2E) * D of a particle covering arc
/// length D at kinetic energy E.
inline double classical_delay(double energy, double arc_length, double m0 = 1.0) {
  if (!(energy > 0.0)) throw std::invalid_argument("classical_delay: energy must be > 0");
  if (!(arc_length > 0.0)) throw std::invalid_argument("classical_delay: arc length must be > 0");
  return std::sqrt(m0 / (2.0 * energy)) * arc_length;
}

/// Default finite-difference step of the delay stencil.
inline double default_delay_step(double energy) {
  return std::max(1e-4 * energy, units::mev_to_hartree(1e-4));
}

struct DelayResult {
  double tau_w = 0.0;
  bool converged = false;
  double step = 0.0;   // final finite-difference step
  int halvings = 0;
};

/// Wigner delay tau_W = (hbar / N) dPhi_F/dE with N = 2 from a three-point
/// stencil with local phase unwrapping; the step is halved until two
/// successive estimates agree to `rel_tol` (default 0.1%).
inline DelayResult wigner_delay(const Chain& chain, double energy,
                                double de, double rel_tol = 1e-3, int max_halvings = 8) {
  if (!(de > 0.0) || energy - de <= 0.0)
    throw std::invalid_argument("wigner_delay: need 0 < dE < E");
  const double phi0 = std::arg(solve_smatrix(chain, energy).s.det());
  const auto stencil = [&](double h) {
    const double phi_m = std::arg(solve_smatrix(chain, energy - h).s.det());
    const double phi_p = std::arg(solve_smatrix(chain, energy + h).s.det());
    const double rise = wrap_phase(phi0 - phi_m) + wrap_phase(phi_p - phi0);
    return rise / (4.0 * h);   // hbar = 1, N = 2
  };
  DelayResult res;
  res.step = de;
  double prev = stencil(de);
  for (res.halvings = 1; res.halvings <= max_halvings; ++res.halvings) {
    res.step *= 0.5;
    const double cur = stencil(res.step);
    if (std::abs(cur - prev) <= rel_tol * std::max(std::abs(cur), std::abs(prev))) {
      res.tau_w = cur;
      res.converged = true;
      return res;
    }
    prev = cur;
  }
  res.tau_w = prev;
  res.converged = false;
  return res;
}

/// Per-point diagnostic bits carried through to the CSV flag column.
enum SpectrumFlag : int {
  flag_ok = 0,
  flag_delay_not_converged = 1,
  flag_phase_gap = 2,
  flag_solver_failed = 4,
};

/// Energy-resolved scattering record on a sorted grid, atomic units.
struct Spectrum {
  std::vector<double> energy;
  std::vector<double> transmission;
  std::vector<double> reflection;
  std::vector<double> friedel;          // unwrapped, radians
  std::vector<double> wigner;           // atomic time
  std::vector<double> classical;        // atomic time
  std::vector<int> flags;

  std::string profile_descriptor;
  double lattice_constant = 0.0;
  double arc_length = 0.0;
  double m0 = 1.0;
  bool resolution_converged = true;

  std::size_t size() const noexcept { return energy.size(); }
};

}  // namespace curvewire
