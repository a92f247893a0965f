#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvewire/chain.hpp"

namespace curvewire {

using Complex = std::complex<double>;

/// Two-lead scattering matrix [[r_l, t_r], [t_l, r_r]] mapping incoming to
/// outgoing amplitudes, phase-referenced at the lead-system interfaces
/// x = 0 and x = L.
struct SMatrix {
  Complex rl{}, tr{}, tl{}, rr{};

  Complex det() const { return rl * rr - tr * tl; }

  /// Max-norm of S^dagger S - I.
  double unitarity_defect() const {
    const double d00 = std::abs(std::norm(rl) + std::norm(tl) - 1.0);
    const double d11 = std::abs(std::norm(tr) + std::norm(rr) - 1.0);
    const double off = std::abs(std::conj(rl) * tr + std::conj(tl) * rr);
    return std::max({d00, d11, off});
  }

  /// Max entry of |S - S^T|; zero for a reciprocal scatterer.
  double symmetry_defect() const { return std::abs(tr - tl); }
};

struct SMatrixPoint {
  double energy = 0.0;
  SMatrix s;
  double k = 0.0;             // lead momentum
  double unitarity_defect = 0.0;
};

/// Lead momentum from the lattice dispersion E = 2 t0 (1 - cos ka); requires
/// E strictly inside the propagating band (0, 4 t0).
inline double lead_momentum(double energy, double t0, double a) {
  if (!(energy > 0.0) || !(energy < 4.0 * t0))
    throw std::domain_error("lead_momentum: energy " + std::to_string(energy) +
                            " is evanescent, band is (0, " + std::to_string(4.0 * t0) + ")");
  return std::acos(1.0 - energy / (2.0 * t0)) / a;
}

/// Lead group velocity 2 t0 a sin(ka) (hbar = 1); positive inside the band.
inline double lead_group_velocity(double energy, double t0, double a) {
  const double ka = lead_momentum(energy, t0, a) * a;
  return 2.0 * t0 * a * std::sin(ka);
}

namespace scattering_detail {

struct SingularSystem : std::runtime_error {
  SingularSystem() : std::runtime_error("singular tridiagonal system") {}
};

/// Partial-pivoting LU solve of a complex tridiagonal system with two
/// right-hand sides. All spans are modified in place; `b0`/`b1` return the
/// solutions. `dl` couples row k+1 to column k, `du` row k to column k+1.
inline void solve_tridiagonal(std::vector<Complex>& dl, std::vector<Complex>& d,
                              std::vector<Complex>& du, std::vector<Complex>& du2,
                              std::vector<Complex>& b0, std::vector<Complex>& b1) {
  const std::size_t n = d.size();
  du2.assign(n >= 2 ? n - 2 : 0, Complex{});
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (std::abs(d[k]) >= std::abs(dl[k])) {
      if (d[k] == Complex{}) throw SingularSystem{};
      const Complex mult = dl[k] / d[k];
      d[k + 1] -= mult * du[k];
      b0[k + 1] -= mult * b0[k];
      b1[k + 1] -= mult * b1[k];
    } else {
      // Swap rows k and k+1, then eliminate.
      const Complex mult = d[k] / dl[k];
      d[k] = dl[k];
      const Complex tmp = d[k + 1];
      d[k + 1] = du[k] - mult * tmp;
      if (k + 2 < n) {
        du2[k] = du[k + 1];
        du[k + 1] = -mult * du2[k];
      }
      du[k] = tmp;
      std::swap(b0[k], b0[k + 1]);
      b0[k + 1] -= mult * b0[k];
      std::swap(b1[k], b1[k + 1]);
      b1[k + 1] -= mult * b1[k];
    }
  }
  if (d[n - 1] == Complex{}) throw SingularSystem{};
  b0[n - 1] /= d[n - 1];
  b1[n - 1] /= d[n - 1];
  if (n >= 2) {
    b0[n - 2] = (b0[n - 2] - du[n - 2] * b0[n - 1]) / d[n - 2];
    b1[n - 2] = (b1[n - 2] - du[n - 2] * b1[n - 1]) / d[n - 2];
  }
  for (std::size_t k = n; k-- > 2;) {
    const std::size_t i = k - 2;
    b0[i] = (b0[i] - du[i] * b0[i + 1] - du2[i] * b0[i + 2]) / d[i];
    b1[i] = (b1[i] - du[i] * b1[i + 1] - du2[i] * b1[i + 2]) / d[i];
  }
}

}  // namespace scattering_detail

/// Full 2x2 scattering matrix at one energy by wave-function matching: the
/// semi-infinite flat leads enter exactly through the self-energy
/// -t0 e^{ika} added to both boundary diagonal elements of (E I - H), and the
/// incoming plane wave appears as the boundary source 2 i t0 sin(ka).
/// O(n_sites) per energy; distinct energies may be solved concurrently.
inline SMatrixPoint solve_smatrix(const Chain& chain, double energy) {
  const std::size_t n = chain.n_sites();
  const double t0 = chain.lead_hopping;

  for (int attempt = 0; attempt < 3; ++attempt) {
    // A resonance pole hit exactly leaves the system singular; nudge off it.
    const double e = energy * (1.0 + static_cast<double>(attempt) * 1e-12);
    const double ka = lead_momentum(e, t0, chain.lattice_constant) * chain.lattice_constant;
    const Complex self_energy = -t0 * std::exp(Complex(0.0, ka));
    const Complex source(0.0, 2.0 * t0 * std::sin(ka));

    std::vector<Complex> d(n), dl(n - 1), du(n - 1), du2;
    for (std::size_t i = 0; i < n; ++i) d[i] = e - chain.onsite[i];
    d[0] -= self_energy;
    d[n - 1] -= self_energy;
    for (std::size_t i = 0; i + 1 < n; ++i) dl[i] = du[i] = chain.hopping[i];

    std::vector<Complex> left(n, Complex{}), right(n, Complex{});
    left[0] = source;      // unit wave incoming from the left lead
    right[n - 1] = source; // unit wave incoming from the right lead
    try {
      scattering_detail::solve_tridiagonal(dl, d, du, du2, left, right);
    } catch (const scattering_detail::SingularSystem&) {
      continue;
    }

    SMatrixPoint pt;
    pt.energy = e;
    pt.k = ka / chain.lattice_constant;
    pt.s.rl = left[0] - 1.0;
    pt.s.tl = left[n - 1];
    pt.s.tr = right[0];
    pt.s.rr = right[n - 1] - 1.0;
    pt.unitarity_defect = pt.s.unitarity_defect();
    return pt;
  }
  throw std::runtime_error("solve_smatrix: singular linear system persists at E = " +
                           std::to_string(energy));
}

}  // namespace curvewire
