#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "curvewire/chain.hpp"
#include "curvewire/scattering.hpp"

namespace curvewire::oracle {

enum class Method { transfer_matrix, analytic_well };

struct OracleResult {
  double energy = 0.0;
  SMatrix s;
  Method method = Method::transfer_matrix;
};

namespace oracle_detail {

/// Left-incidence (r, t) from the site-by-site 2x2 transfer-matrix product,
/// with the same interface phase referencing as the wave-matching solver.
inline std::pair<Complex, Complex> transfer_rt(const Chain& chain, double energy,
                                               bool reversed) {
  const std::size_t n = chain.n_sites();
  const double t0 = chain.lead_hopping;
  const double ka = lead_momentum(energy, t0, chain.lattice_constant) * chain.lattice_constant;

  const auto site = [&](std::size_t i) {
    return reversed ? chain.onsite[n - 1 - i] : chain.onsite[i];
  };
  const auto bond = [&](std::size_t i) {  // hopping between sites i and i+1
    return reversed ? chain.hopping[n - 2 - i] : chain.hopping[i];
  };

  Complex m00 = 1.0, m01 = 0.0, m10 = 0.0, m11 = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t_left = i == 0 ? t0 : bond(i - 1);
    const double t_right = i + 1 == n ? t0 : bond(i);
    const Complex p00 = (site(i) - energy) / t_right;
    const Complex p01 = -t_left / t_right;
    // P_i = [[p00, p01], [1, 0]] propagates (psi_i, psi_{i-1}) -> (psi_{i+1}, psi_i).
    const Complex n00 = p00 * m00 + p01 * m10;
    const Complex n01 = p00 * m01 + p01 * m11;
    m10 = m00;
    m11 = m01;
    m00 = n00;
    m01 = n01;
    if (std::abs(m00) > 1e12 || std::abs(m01) > 1e12)
      throw std::domain_error(
          "transfer_matrix_smatrix: product grows beyond conditioning limits "
          "(strongly localized chain); outside the oracle's validity regime");
  }

  const Complex e = std::exp(Complex(0.0, ka));
  const Complex r = (m00 + m01 / e - m10 * e - m11) / (m10 * e + m11 * e * e - m00 - m01 * e);
  const Complex t = m10 * (1.0 + r) + m11 * (1.0 / e + r * e);
  return {r, t};
}

}  // namespace oracle_detail

/// Reference S-matrix from the transfer-matrix product. Reserved for short
/// chains well inside the band, where the product stays conditioned.
inline OracleResult transfer_matrix_smatrix(const Chain& chain, double energy) {
  if (chain.n_sites() > 200)
    throw std::domain_error("transfer_matrix_smatrix: limited to chains of <= 200 sites (got " +
                            std::to_string(chain.n_sites()) + ")");
  const double t0 = chain.lead_hopping;
  if (!(energy >= 0.1 * t0) || !(energy <= 3.9 * t0))
    throw std::domain_error("transfer_matrix_smatrix: energy outside the stability regime "
                            "[0.1, 3.9] t0");
  OracleResult res;
  res.energy = energy;
  res.method = Method::transfer_matrix;
  const auto [rl, tl] = oracle_detail::transfer_rt(chain, energy, false);
  const auto [rr, tr] = oracle_detail::transfer_rt(chain, energy, true);
  res.s.rl = rl;
  res.s.tl = tl;
  res.s.rr = rr;
  res.s.tr = tr;
  return res;
}

/// Closed-form continuum transmission of a rectangular well of (negative)
/// depth and given width: T = [1 + V^2 sin^2(k2 w) / (4 E (E + |V|))]^{-1}.
inline double analytic_square_well_transmission(double energy, double depth, double width,
                                                double m0 = 1.0) {
  if (!(depth < 0.0)) throw std::invalid_argument("analytic_square_well_transmission: depth < 0");
  if (!(width > 0.0)) throw std::invalid_argument("analytic_square_well_transmission: width > 0");
  if (!(energy > 0.0)) throw std::invalid_argument("analytic_square_well_transmission: energy > 0");
  const double inside = energy - depth;  // E + |V|
  const double k2 = std::sqrt(2.0 * m0 * inside);
  const double s = std::sin(k2 * width);
  return 1.0 / (1.0 + depth * depth * s * s / (4.0 * energy * inside));
}

/// Closed-form lattice transmission through a single onsite impurity of
/// strength v: T = 1 / (1 + (v / (2 t0 sin ka))^2).
inline double delta_impurity_transmission(double v, double t0, double ka) {
  const double q = v / (2.0 * t0 * std::sin(ka));
  return 1.0 / (1.0 + q * q);
}

/// Flat chain with a rectangular well of given depth spanning
/// [well_lo, well_hi]; each site takes the depth weighted by how much of its
/// lattice cell the well covers, so edge sites on the boundary get half weight.
inline Chain square_well_chain(double length, double a, double depth, double well_lo,
                               double well_hi, double m0 = 1.0) {
  if (!(well_lo < well_hi) || well_lo < 0.0 || well_hi > length)
    throw std::invalid_argument("square_well_chain: well must lie inside [0, L]");
  Chain chain = build_chain(Profile::flat(length), a, m0);
  const double h = chain.lattice_constant;
  for (std::size_t i = 0; i < chain.n_sites(); ++i) {
    const double x = static_cast<double>(i) * h;
    const double lo = std::max(x - 0.5 * h, well_lo);
    const double hi = std::min(x + 0.5 * h, well_hi);
    if (hi > lo) chain.onsite[i] += depth * (hi - lo) / h;
  }
  return chain;
}

}  // namespace curvewire::oracle
