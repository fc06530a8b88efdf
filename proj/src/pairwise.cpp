#include "vdwmech/pairwise.hpp"

#include <cmath>
#include <sstream>

#include "vdwmech/errors.hpp"
#include "vdwmech/harmonic.hpp"
#include "vdwmech/units.hpp"

namespace vdwmech {

void PwModelConfig::validate() const {
  if (!(d > 0.0)) throw InvalidInput("PW damping steepness d must be > 0");
  if (!(gamma > 0.0)) throw InvalidInput("PW radius scaling gamma must be > 0");
  if (cutoff && !(*cutoff > 0.0)) throw InvalidInput("PW cutoff must be > 0");
}

std::optional<double> PwModelConfig::effective_cutoff(std::size_t atom_count) const {
  if (cutoff) return cutoff;
  if (atom_count > 2000) return 40.0;
  return std::nullopt;
}

double fermi_damping(double r, double s_vdw, double d) {
  if (!(r >= 0.0) || !(s_vdw > 0.0) || !(d > 0.0))
    throw InvalidInput("fermi_damping requires r >= 0, s_vdw > 0, d > 0");
  return 1.0 / (1.0 + std::exp(-d * (r / s_vdw - 1.0)));
}

double combine_c6(const PerAtomVdwState& a, const PerAtomVdwState& b) {
  return 2.0 * a.c6_eff * b.c6_eff /
         ((b.alpha0_eff / a.alpha0_eff) * a.c6_eff + (a.alpha0_eff / b.alpha0_eff) * b.c6_eff);
}

PwResult pw_evaluate(const AtomicStructure& s, const std::vector<PerAtomVdwState>& states,
                     const PwModelConfig& cfg, const ImageSet& images, bool with_forces,
                     const BondedPairs* exclude) {
  cfg.validate();
  const std::size_t n = s.size();
  if (states.size() != n) throw InvalidInput("vdW state count does not match atom count");

  PwResult out;
  if (with_forces) out.forces.assign(n, Vec3::Zero());
  const auto cutoff = cfg.effective_cutoff(n);
  const double guard = s.overlap_guard();
  const double to_bohr = 1.0 / units::kBohrAngstrom;

  double energy = 0.0; // Hartree
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double c6 = combine_c6(states[i], states[j]);
      const double svdw = cfg.gamma * (states[i].rvdw_eff + states[j].rvdw_eff);
      for (std::size_t L = 0; L < images.size(); ++L) {
        if (i == j && L == 0) continue;
        if (exclude && exclude->contains(i, j, images.shifts[L])) continue;
        const Vec3 r = s.position(i) - s.position(j) - images.translations[L];
        const double r_a = r.norm();
        if (cutoff && r_a > *cutoff) continue;
        if (r_a < guard) {
          std::ostringstream os;
          os << "PW: atoms " << i << " and " << j << " at " << r_a << " A (overlap guard)";
          throw GeometryError(os.str());
        }
        const double R = r_a * to_bohr;
        const double ex = std::exp(-cfg.d * (R / svdw - 1.0));
        const double f = 1.0 / (1.0 + ex);
        const double R6 = std::pow(R, 6);
        // Self-image pairs appear once for +L and once for -L.
        const double w = (i == j) ? 0.5 : 1.0;
        energy -= w * f * c6 / R6;
        if (with_forces) {
          const double df = f * (1.0 - f) * cfg.d / svdw;
          const double dEdR = -c6 * (df / R6 - 6.0 * f / (R6 * R)); // Ha/Bohr
          const Vec3 g = (-dEdR * units::kForceAuToEvA / r_a) * r;
          out.virial -= w * g * r.transpose();
          if (i != j) {
            out.forces[i] += g;
            out.forces[j] -= g;
          }
        }
      }
    }
  }
  out.energy = units::hartree_to_ev(energy);
  return out;
}

double pw_energy(const AtomicStructure& s, const std::vector<PerAtomVdwState>& states,
                 const PwModelConfig& cfg, const ImageSet& images) {
  return pw_evaluate(s, states, cfg, images, false).energy;
}

std::vector<Vec3> pw_forces(const AtomicStructure& s, const std::vector<PerAtomVdwState>& states,
                            const PwModelConfig& cfg, const ImageSet& images) {
  return pw_evaluate(s, states, cfg, images, true).forces;
}

} // namespace vdwmech
