#pragma once

// Reference implementations written directly from the model definitions,
// independent of the library's evaluation paths.

#include <cmath>

#include "vdwmech/species.hpp"
#include "vdwmech/structure.hpp"

namespace oracle {

constexpr double kHa = 27.211386;     // eV
constexpr double kBohr = 0.529177;    // Angstrom
constexpr double kPi = 3.14159265358979323846;

/// Plain double loop over distinct pairs of a finite cluster, eV.
inline double pw_pair_sum(const vdwmech::AtomicStructure& s, const vdwmech::SpeciesTable& t,
                          double d = 20.0, double gamma = 0.94) {
  double e = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const auto& a = t.at(s.species(i));
      const auto& b = t.at(s.species(j));
      const double va = s.volume_ratios()[i], vb = s.volume_ratios()[j];
      const double c6a = a.c6_free * va * va, c6b = b.c6_free * vb * vb;
      const double aa = a.alpha0_free * va, ab = b.alpha0_free * vb;
      const double c6 = 2.0 * c6a * c6b / (ab / aa * c6a + aa / ab * c6b);
      const double sr = gamma * (a.rvdw_free * std::cbrt(va) + b.rvdw_free * std::cbrt(vb));
      const double r = (s.position(i) - s.position(j)).norm() / kBohr;
      const double f = 1.0 / (1.0 + std::exp(-d * (r / sr - 1.0)));
      e -= f * c6 / std::pow(r, 6);
    }
  return e * kHa;
}

/// Two identical oscillators at distance R (Angstrom) coupled by the
/// erf-screened dipole tensor. The 6x6 problem splits into the axial and
/// the two transverse channels, each with eigenvalues omega^2 (1 +- alpha t).
inline double mbd_two_body(const vdwmech::VdwSpeciesParams& p, double R_angstrom,
                           double beta = 1.0) {
  const double w = 4.0 * p.c6_free / (3.0 * p.alpha0_free * p.alpha0_free);
  const double alpha = p.alpha0_free;
  const double sigma = std::cbrt(std::sqrt(2.0 / (9.0 * kPi)) * alpha);
  const double s = beta * std::sqrt(2.0) * sigma;
  const double r = R_angstrom / kBohr;
  const double x = r / s;
  const double g = 2.0 / (std::sqrt(kPi) * s) * std::exp(-x * x);
  const double v1 = g / r - std::erf(x) / (r * r);                             // v'
  const double v2 = 2.0 * std::erf(x) / (r * r * r) - g * (2.0 / (s * s) + 2.0 / (r * r)); // v''
  const double t_axial = -v2, t_trans = -v1 / r;
  // sqrt(1+u) + sqrt(1-u) - 2 without cancellation.
  auto pair = [](double u) {
    const double a = std::sqrt(1.0 + u), b = std::sqrt(1.0 - u);
    return -2.0 * u * u / ((a + 1.0) * (b + 1.0) * (a + b));
  };
  const double e = 0.5 * w * (pair(alpha * t_axial) + 2.0 * pair(alpha * t_trans));
  return e * kHa;
}

} // namespace oracle
