#pragma once

namespace curvewire::units {

// Internal computations run in Hartree atomic units (hbar = m_e = a0 = 1);
// these constants only enter at the I/O boundary.
inline constexpr double hartree_in_mev = 27211.386;
inline constexpr double atomic_time_in_fs = 0.02418884;

constexpr double mev_to_hartree(double e_mev) { return e_mev / hartree_in_mev; }
constexpr double hartree_to_mev(double e_hartree) { return e_hartree * hartree_in_mev; }
constexpr double atomic_time_to_fs(double t) { return t * atomic_time_in_fs; }
constexpr double fs_to_atomic_time(double t_fs) { return t_fs / atomic_time_in_fs; }

}  // namespace curvewire::units
