#pragma once

// Unit conventions: dispersion math runs in Hartree atomic units, everything
// facing the drivers uses eV, Angstrom, fs and amu.

namespace vdwmech::units {

inline constexpr double kHartreeEv = 27.211386;
inline constexpr double kBohrAngstrom = 0.529177;

inline constexpr double kBoltzmannEv = 8.617333262e-5; // eV/K
// 1 eV/(Angstrom*amu) expressed in Angstrom/fs^2.
inline constexpr double kAccelerationUnit = 9.648533212e-3;
// 1 eV/Angstrom^3 in GPa.
inline constexpr double kEvPerA3ToGpa = 160.21766208;

inline constexpr double kPi = 3.14159265358979323846;

constexpr double angstrom_to_bohr(double x) { return x / kBohrAngstrom; }
constexpr double bohr_to_angstrom(double x) { return x * kBohrAngstrom; }
constexpr double hartree_to_ev(double e) { return e * kHartreeEv; }
constexpr double ev_to_hartree(double e) { return e / kHartreeEv; }

// Ha/Bohr -> eV/Angstrom
inline constexpr double kForceAuToEvA = kHartreeEv / kBohrAngstrom;

} // namespace vdwmech::units
