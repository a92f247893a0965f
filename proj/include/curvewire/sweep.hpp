#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "curvewire/chain.hpp"
#include "curvewire/numeric.hpp"
#include "curvewire/observables.hpp"
#include "curvewire/profile.hpp"
#include "curvewire/scattering.hpp"
#include "curvewire/units.hpp"

namespace curvewire {

namespace sweep_detail {

/// Deterministic worker pool: item i always lands in slot i, so results do
/// not depend on the number of workers.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(threads <= 0 ? 1 : static_cast<std::size_t>(threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace sweep_detail

enum class GridScale { log_spaced, linear };

struct RefinementLimits {
  int max_resolution_halvings = 6;
  int max_delay_halvings = 8;
  double phase_jump_floor = 0.0;     // minimum energy gap split during phase
                                     // refinement; <= 0 picks a default
  std::size_t max_phase_insertions = 2000;
};

/// Everything a spectral sweep needs. `lattice_constant <= 0` selects the
/// default resolution L/5000.
struct SweepConfig {
  Profile profile = Profile::flat(1000.0);
  double e_min = units::mev_to_hartree(0.5);
  double e_max = units::mev_to_hartree(120.0);
  int n_energies = 600;
  GridScale scale = GridScale::log_spaced;
  double lattice_constant = 0.0;
  bool auto_converge = false;
  double delay_de_rel = 1e-4;
  double delay_de_floor = units::mev_to_hartree(1e-4);
  RefinementLimits limits;
  double m0 = 1.0;

  double resolved_lattice_constant() const {
    return lattice_constant > 0.0 ? lattice_constant : profile.length() / 5000.0;
  }
  double delay_step(double energy) const {
    return std::max(delay_de_rel * energy, delay_de_floor);
  }
};

inline std::vector<double> energy_grid(const SweepConfig& cfg) {
  if (cfg.n_energies < 2) throw std::invalid_argument("energy grid needs n_energies >= 2");
  if (!(cfg.e_min > 0.0) || !(cfg.e_max > cfg.e_min))
    throw std::invalid_argument("energy grid needs 0 < e_min < e_max");
  std::vector<double> grid(static_cast<std::size_t>(cfg.n_energies));
  const std::size_t n = grid.size();
  if (cfg.scale == GridScale::log_spaced) {
    const double l0 = std::log(cfg.e_min);
    const double l1 = std::log(cfg.e_max);
    for (std::size_t i = 0; i < n; ++i)
      grid[i] = std::exp(l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(n - 1));
  } else {
    for (std::size_t i = 0; i < n; ++i)
      grid[i] = cfg.e_min + (cfg.e_max - cfg.e_min) * static_cast<double>(i) /
                                static_cast<double>(n - 1);
  }
  grid.front() = cfg.e_min;
  grid.back() = cfg.e_max;
  return grid;
}

namespace sweep_detail {

struct PointRecord {
  double energy = 0.0;
  SMatrixPoint sp;
  DelayResult delay;
  int flag = flag_ok;
  bool solver_ok = false;
};

inline PointRecord solve_point(const Chain& chain, const SweepConfig& cfg, double energy) {
  PointRecord rec;
  rec.energy = energy;
  try {
    rec.sp = solve_smatrix(chain, energy);
    rec.solver_ok = true;
    rec.delay = wigner_delay(chain, energy, cfg.delay_step(energy), 1e-3,
                             cfg.limits.max_delay_halvings);
    if (!rec.delay.converged) rec.flag |= flag_delay_not_converged;
  } catch (const std::exception&) {
    rec.flag |= flag_solver_failed;
  }
  return rec;
}

}  // namespace sweep_detail

/// Spectral sweep over the configured grid: per-energy S-matrix, T/R, the
/// cumulatively unwrapped Friedel phase (with automatic midpoint insertion
/// where the phase steps too fast to unwrap), Wigner and classical delays.
/// Deterministic for a fixed config regardless of the worker count; failures
/// annotate single points instead of aborting the sweep.
inline Spectrum run_spectrum(const SweepConfig& cfg, int threads = 1) {
  const Chain chain = build_chain(cfg.profile, cfg.resolved_lattice_constant(), cfg.m0);
  const double band = chain.band_maximum();
  if (!(cfg.e_max <= 0.5 * band))
    throw std::invalid_argument("e_max exceeds half the lead band " +
                                std::to_string(0.5 * band) + "; refine the lattice");
  if (!(cfg.e_min >= 1e-8 * band))
    throw std::invalid_argument("e_min is too close to the band bottom");

  std::vector<double> grid = energy_grid(cfg);
  std::vector<sweep_detail::PointRecord> records(grid.size());
  sweep_detail::parallel_for(grid.size(), threads, [&](std::size_t i) {
    records[i] = sweep_detail::solve_point(chain, cfg, grid[i]);
  });

  const double floor_gap = cfg.limits.phase_jump_floor > 0.0
                               ? cfg.limits.phase_jump_floor
                               : (cfg.e_max - cfg.e_min) /
                                     (static_cast<double>(cfg.n_energies) * 1024.0);
  constexpr double jump_threshold = 0.95 * std::numbers::pi;

  // The wrapped phase increment alone cannot reveal a jump past pi (it
  // aliases back into the principal branch), so each gap is also sized with
  // the phase slope dPhi/dE = 2 tau_W known at its endpoints.
  const auto suspect_gaps = [&](const std::vector<sweep_detail::PointRecord>& recs) {
    std::vector<SMatrixPoint> pts;
    pts.reserve(recs.size());
    for (const auto& r : recs) pts.push_back(r.sp);
    std::vector<bool> suspect(recs.size() > 0 ? recs.size() - 1 : 0, false);
    for (const std::size_t gap : friedel_phase(pts, jump_threshold).suspect_gaps)
      suspect[gap] = true;
    for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
      if (!recs[i].solver_ok || !recs[i + 1].solver_ok) continue;
      const double de = recs[i + 1].energy - recs[i].energy;
      const double predicted =
          (std::abs(recs[i].delay.tau_w) + std::abs(recs[i + 1].delay.tau_w)) * de;
      if (predicted >= jump_threshold) suspect[i] = true;
    }
    return suspect;
  };

  std::size_t inserted = 0;
  for (int pass = 0; pass < 64; ++pass) {
    const auto suspect = suspect_gaps(records);
    std::vector<double> midpoints;
    for (std::size_t i = 0; i < suspect.size(); ++i) {
      if (!suspect[i]) continue;
      const double lo = records[i].energy;
      const double hi = records[i + 1].energy;
      if (hi - lo <= floor_gap) continue;  // refined to the floor; flag below
      if (inserted + midpoints.size() >= cfg.limits.max_phase_insertions) break;
      midpoints.push_back(0.5 * (lo + hi));
    }
    if (midpoints.empty()) break;
    inserted += midpoints.size();
    std::vector<sweep_detail::PointRecord> fresh(midpoints.size());
    sweep_detail::parallel_for(midpoints.size(), threads, [&](std::size_t i) {
      fresh[i] = sweep_detail::solve_point(chain, cfg, midpoints[i]);
    });
    for (auto& r : fresh) records.push_back(std::move(r));
    std::sort(records.begin(), records.end(),
              [](const auto& a, const auto& b) { return a.energy < b.energy; });
  }

  const auto remaining = suspect_gaps(records);
  for (std::size_t i = 0; i < remaining.size(); ++i) {
    if (!remaining[i]) continue;
    records[i].flag |= flag_phase_gap;
    records[i + 1].flag |= flag_phase_gap;
  }
  std::vector<SMatrixPoint> pts;
  pts.reserve(records.size());
  for (const auto& r : records) pts.push_back(r.sp);
  const auto unwrapped = friedel_phase(pts, jump_threshold);

  Spectrum spec;
  spec.profile_descriptor = cfg.profile.descriptor();
  spec.lattice_constant = chain.lattice_constant;
  spec.arc_length = cfg.profile.arc_length(0.0, cfg.profile.length());
  spec.m0 = cfg.m0;
  const std::size_t n = records.size();
  spec.energy.resize(n);
  spec.transmission.resize(n);
  spec.reflection.resize(n);
  spec.friedel = unwrapped.phase;
  spec.wigner.resize(n);
  spec.classical.resize(n);
  spec.flags.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = records[i];
    spec.energy[i] = r.energy;
    if (r.solver_ok) {
      const auto [t, rf] = transmission_reflection(r.sp);
      spec.transmission[i] = t;
      spec.reflection[i] = rf;
      spec.wigner[i] = r.delay.tau_w;
    } else {
      spec.transmission[i] = std::nan("");
      spec.reflection[i] = std::nan("");
      spec.wigner[i] = std::nan("");
    }
    spec.classical[i] = classical_delay(r.energy, spec.arc_length, cfg.m0);
    spec.flags[i] = r.flag;
  }
  return spec;
}

/// Halve the lattice constant until the transmission changes by less than
/// 10^-4 pointwise on the base grid. Returns the final lattice constant and
/// the spectrum computed with it; `resolution_converged` reports whether the
/// tolerance was met within the halving budget.
inline std::pair<double, Spectrum> converge_resolution(const SweepConfig& cfg,
                                                       int threads = 1) {
  constexpr double tolerance = 1e-4;
  SweepConfig work = cfg;
  work.lattice_constant = cfg.resolved_lattice_constant();
  Spectrum prev = run_spectrum(work, threads);
  const std::vector<double> base = energy_grid(cfg);

  const auto value_at = [](const Spectrum& s, double e) {
    const auto it = std::lower_bound(s.energy.begin(), s.energy.end(), e);
    if (it == s.energy.end() || *it != e)
      throw std::logic_error("converge_resolution: base energy missing from spectrum");
    return s.transmission[static_cast<std::size_t>(it - s.energy.begin())];
  };

  for (int halving = 0; halving < cfg.limits.max_resolution_halvings; ++halving) {
    work.lattice_constant *= 0.5;
    Spectrum cur = run_spectrum(work, threads);
    double max_dt = 0.0;
    for (const double e : base)
      max_dt = std::max(max_dt, std::abs(value_at(cur, e) - value_at(prev, e)));
    prev = std::move(cur);
    if (max_dt < tolerance) {
      prev.resolution_converged = true;
      return {work.lattice_constant, std::move(prev)};
    }
  }
  prev.resolution_converged = false;
  return {work.lattice_constant, std::move(prev)};
}

struct HartmanRow {
  double stretch = 1.0;
  double arc_length = 0.0;
  double tau_w = 0.0;          // atomic time
  bool skipped = false;
  bool delay_converged = true;
  std::string note;
};

struct HartmanScan {
  std::vector<HartmanRow> rows;
  double e_probe = 0.0;
  double fit_slope = 0.0;              // d tau_W / d D, atomic units
  double fit_intercept = 0.0;
  double fit_max_residual = 0.0;
  std::size_t fitted_rows = 0;
};

/// Width scan at a fixed probe energy: rescale the profile by each stretch
/// factor, record (stretch, arc length, Wigner delay), and fit the delay as
/// an affine function of arc length. Rows whose stretched profile violates
/// boundary flatness are skipped with a diagnostic instead of aborting.
inline HartmanScan hartman_scan(const Profile& base_profile,
                                std::span<const double> stretch_factors, double e_probe,
                                const SweepConfig& numerics = {}, int threads = 1,
                                StretchMode mode = StretchMode::shape) {
  HartmanScan scan;
  scan.e_probe = e_probe;
  scan.rows.resize(stretch_factors.size());
  sweep_detail::parallel_for(stretch_factors.size(), threads, [&](std::size_t i) {
    HartmanRow& row = scan.rows[i];
    row.stretch = stretch_factors[i];
    try {
      const Profile stretched = base_profile.stretched(row.stretch, mode);
      const double a = numerics.lattice_constant > 0.0
                           ? numerics.lattice_constant
                           : stretched.length() / 5000.0;
      const Chain chain = build_chain(stretched, a, numerics.m0);
      const DelayResult delay = wigner_delay(chain, e_probe, numerics.delay_step(e_probe),
                                             1e-3, numerics.limits.max_delay_halvings);
      row.arc_length = stretched.arc_length(0.0, stretched.length());
      row.tau_w = delay.tau_w;
      row.delay_converged = delay.converged;
    } catch (const std::exception& ex) {
      row.skipped = true;
      row.note = ex.what();
    }
  });

  std::vector<double> ds, taus;
  for (const auto& row : scan.rows)
    if (!row.skipped) {
      ds.push_back(row.arc_length);
      taus.push_back(row.tau_w);
    }
  scan.fitted_rows = ds.size();
  if (ds.size() >= 2) {
    const auto [d_min, d_max] = std::minmax_element(ds.begin(), ds.end());
    if (*d_max - *d_min < 1e-9 * std::max(1.0, *d_max)) {
      // Undeformed wire: every stretch has the same arc length, the delay is
      // constant and the fitted line is horizontal.
      double mean = 0.0;
      for (const double t : taus) mean += t;
      mean /= static_cast<double>(taus.size());
      scan.fit_slope = 0.0;
      scan.fit_intercept = mean;
      for (const double t : taus)
        scan.fit_max_residual = std::max(scan.fit_max_residual, std::abs(t - mean));
    } else {
      const auto fit = numeric::linear_fit(ds, taus);
      scan.fit_slope = fit.slope;
      scan.fit_intercept = fit.intercept;
      scan.fit_max_residual = fit.max_abs_residual;
    }
  }
  return scan;
}

struct ResonancePeak {
  double energy = 0.0;
  double transmission = 0.0;
  std::size_t grid_index = 0;
};

/// Strict local maxima of T over the spectrum grid, optionally sharpened by a
/// golden-section search between the neighboring grid points; peaks below
/// `min_transmission` (after refinement) are dropped.
inline std::vector<ResonancePeak> find_transmission_peaks(const Chain& chain,
                                                          const Spectrum& spectrum,
                                                          double min_transmission = 0.0,
                                                          bool refine = true) {
  std::vector<ResonancePeak> peaks;
  const auto& t = spectrum.transmission;
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    if (!(t[i] > t[i - 1]) || !(t[i] >= t[i + 1])) continue;
    ResonancePeak peak{spectrum.energy[i], t[i], i};
    if (refine) {
      const auto transmission_of = [&](double e) {
        return transmission_reflection(solve_smatrix(chain, e)).first;
      };
      const auto [e_best, t_best] = numeric::golden_section_maximize(
          transmission_of, spectrum.energy[i - 1], spectrum.energy[i + 1],
          1e-13 * spectrum.energy[i]);
      if (t_best >= peak.transmission) {
        peak.energy = e_best;
        peak.transmission = t_best;
      }
    }
    if (peak.transmission >= min_transmission) peaks.push_back(peak);
  }
  return peaks;
}

}  // namespace curvewire
