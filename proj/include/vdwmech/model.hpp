#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vdwmech/harmonic.hpp"
#include "vdwmech/mbd.hpp"
#include "vdwmech/pairwise.hpp"
#include "vdwmech/periodic.hpp"
#include "vdwmech/species.hpp"

namespace vdwmech {

enum class VdwKind { None, PW, MBD };

std::string to_string(VdwKind k);
VdwKind parse_vdw_kind(const std::string& s);

struct ModelEvaluation {
  double total = 0.0;     // eV
  double bonded = 0.0;    // harmonic terms, eV
  double repulsion = 0.0; // contact repulsion, eV
  double vdw = 0.0;       // eV
  std::vector<Vec3> forces; // eV/A, empty unless requested
  Mat3 virial = Mat3::Zero(); // dE/d(strain), eV; requested with forces
  double mbd_min_eigenvalue = 0.0; // Ha^2, MBD only
};

/// Short-range bonded part plus an optional dispersion correction. Total
/// energy is the plain sum of the components.
class CompositeModel {
public:
  std::optional<HarmonicTopology> bonded;
  std::optional<ContactRepulsion> repulsion;
  VdwKind vdw = VdwKind::None;
  PwModelConfig pw;
  MbdModelConfig mbd;
  std::shared_ptr<const SpeciesTable> species; // null: shipped table
  double periodic_vdw_radius = 15.0;           // A, PW image radius without a cutoff
  std::optional<std::array<int, 3>> pw_shells;  // frozen image shells
  std::optional<std::array<int, 3>> mbd_shells;
  // Pairs left to the bonded model; the dispersion term skips them.
  std::optional<BondedPairs> vdw_exclusions;

  /// Harmonic model with the topology detected on `s`, plus contact
  /// repulsion when requested.
  static CompositeModel build(const AtomicStructure& s, VdwKind vdw, bool with_bonded = true,
                              bool with_repulsion = false, const BondCutoffs& cutoffs =
                                                               BondCutoffs::defaults(),
                              const HarmonicConstants& constants = {});

  /// Excludes atom pairs within `max_bonds` bonds of the bonded topology
  /// from the dispersion term; 0 removes the exclusions.
  void exclude_bonded_vdw(std::size_t atom_count, int max_bonds);

  /// Throws InvalidInput if no component is active or a config is invalid.
  void validate() const;

  /// Fixes the periodic image shells to those implied by `s`, so that the
  /// energy stays a smooth function of the cell during a protocol.
  void freeze_images(const AtomicStructure& s);

  ImageSet pw_images(const AtomicStructure& s) const;
  ImageSet mbd_image_set(const AtomicStructure& s) const;

  ModelEvaluation evaluate(const AtomicStructure& s, bool with_forces) const;
  double energy(const AtomicStructure& s) const { return evaluate(s, false).total; }
  EnergyFunction energy_function() const;

  const SpeciesTable& species_table() const;
};

} // namespace vdwmech
