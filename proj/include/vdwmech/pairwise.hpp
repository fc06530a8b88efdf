#pragma once

#include <optional>
#include <vector>

#include "vdwmech/periodic.hpp"
#include "vdwmech/species.hpp"
#include "vdwmech/structure.hpp"

namespace vdwmech {

class BondedPairs;

/// Pairwise Tkatchenko-Scheffler settings.
struct PwModelConfig {
  double d = 20.0;              // damping steepness
  double gamma = 0.94;          // vdW radius scaling
  std::optional<double> cutoff; // Angstrom; unset = automatic (see effective_cutoff)

  void validate() const;
  /// Explicit cutoff if set; otherwise none below 2000 atoms and 40 A above.
  std::optional<double> effective_cutoff(std::size_t atom_count) const;
};

/// Fermi-type damping 1 / (1 + exp(-d (r/s_vdw - 1))). Lengths in any
/// consistent unit.
double fermi_damping(double r, double s_vdw, double d);

/// Combination rule for the heteronuclear C6 coefficient (Ha*Bohr^6).
double combine_c6(const PerAtomVdwState& a, const PerAtomVdwState& b);

/// -sum f_damp C6_ij / R_ij^6 over all distinct pairs and images, in eV.
double pw_energy(const AtomicStructure& s, const std::vector<PerAtomVdwState>& states,
                 const PwModelConfig& cfg, const ImageSet& images = ImageSet::zero_only());

/// Analytic -dE/dR_i in eV/Angstrom.
std::vector<Vec3> pw_forces(const AtomicStructure& s, const std::vector<PerAtomVdwState>& states,
                            const PwModelConfig& cfg,
                            const ImageSet& images = ImageSet::zero_only());

struct PwResult {
  double energy = 0.0;
  std::vector<Vec3> forces;
  Mat3 virial = Mat3::Zero(); // sum of dE/dr (x) r over pair images, eV
};

/// Energy, forces and virial from a single pair sweep. Pairs listed in
/// `exclude` are skipped.
PwResult pw_evaluate(const AtomicStructure& s, const std::vector<PerAtomVdwState>& states,
                     const PwModelConfig& cfg, const ImageSet& images, bool with_forces,
                     const BondedPairs* exclude = nullptr);

} // namespace vdwmech
