#include "vdwmech/model.hpp"

#include "vdwmech/errors.hpp"

namespace vdwmech {

std::string to_string(VdwKind k) {
  switch (k) {
  case VdwKind::None: return "none";
  case VdwKind::PW: return "pw";
  case VdwKind::MBD: return "mbd";
  }
  return "none";
}

VdwKind parse_vdw_kind(const std::string& s) {
  if (s == "none") return VdwKind::None;
  if (s == "pw" || s == "PW") return VdwKind::PW;
  if (s == "mbd" || s == "MBD") return VdwKind::MBD;
  throw InvalidInput("unknown vdW model '" + s + "' (expected none, pw or mbd)");
}

CompositeModel CompositeModel::build(const AtomicStructure& s, VdwKind vdw, bool with_bonded,
                                     bool with_repulsion, const BondCutoffs& cutoffs,
                                     const HarmonicConstants& constants) {
  CompositeModel m;
  m.vdw = vdw;
  if (with_bonded || with_repulsion) {
    HarmonicTopology topo = detect_topology(s, cutoffs, constants);
    if (with_repulsion) m.repulsion.emplace(s, topo);
    if (with_bonded) m.bonded = std::move(topo);
  }
  m.validate();
  return m;
}

void CompositeModel::exclude_bonded_vdw(std::size_t atom_count, int max_bonds) {
  if (max_bonds < 0) throw InvalidInput("vdW exclusion bond count must be >= 0");
  if (max_bonds == 0) {
    vdw_exclusions.reset();
    return;
  }
  if (!bonded) throw InvalidInput("vdW exclusions need a bonded topology");
  vdw_exclusions.emplace(atom_count, *bonded, max_bonds);
}

void CompositeModel::validate() const {
  if (!bonded && !repulsion && vdw == VdwKind::None)
    throw InvalidInput("model has no active energy component");
  pw.validate();
  mbd.validate();
  if (!(periodic_vdw_radius > 0.0)) throw InvalidInput("periodic vdW radius must be > 0");
}

const SpeciesTable& CompositeModel::species_table() const {
  return species ? *species : default_species_table();
}

ImageSet CompositeModel::pw_images(const AtomicStructure& s) const {
  if (!s.periodic()) return ImageSet::zero_only();
  if (pw_shells) return generate_images(*s.cell(), *pw_shells);
  return generate_images(*s.cell(),
                         shells_for_radius(*s.cell(), pw.cutoff.value_or(periodic_vdw_radius)));
}

ImageSet CompositeModel::mbd_image_set(const AtomicStructure& s) const {
  if (!s.periodic()) return ImageSet::zero_only();
  if (mbd_shells) return generate_images(*s.cell(), *mbd_shells);
  return mbd_images(s, mbd);
}

void CompositeModel::freeze_images(const AtomicStructure& s) {
  if (!s.periodic()) return;
  const CellTensor& cell = *s.cell();
  pw_shells = shells_for_radius(cell, pw.cutoff.value_or(periodic_vdw_radius));
  if (mbd.replica_radius)
    mbd_shells = shells_for_radius(cell, *mbd.replica_radius);
  else
    mbd_shells = std::array<int, 3>{mbd.replica_shells, mbd.replica_shells, mbd.replica_shells};
}

ModelEvaluation CompositeModel::evaluate(const AtomicStructure& s, bool with_forces) const {
  validate();
  ModelEvaluation out;
  const std::size_t n = s.size();
  if (with_forces) out.forces.assign(n, Vec3::Zero());
  auto add_forces = [&](const std::vector<Vec3>& f) {
    for (std::size_t i = 0; i < n; ++i) out.forces[i] += f[i];
  };

  if (bonded) {
    const HarmonicResult h = harmonic_evaluate(s, *bonded, with_forces);
    out.bonded = h.energy;
    if (with_forces) {
      add_forces(h.forces);
      out.virial += h.virial;
    }
  }
  if (repulsion) {
    const auto r = repulsion->evaluate(s, with_forces);
    out.repulsion = r.energy;
    if (with_forces) {
      add_forces(r.forces);
      out.virial += r.virial;
    }
  }
  if (vdw != VdwKind::None && n > 0) {
    const auto states = vdw_states(s, species_table());
    const BondedPairs* exclusions = vdw_exclusions ? &*vdw_exclusions : nullptr;
    if (vdw == VdwKind::PW) {
      const PwResult r = pw_evaluate(s, states, pw, pw_images(s), with_forces, exclusions);
      out.vdw = r.energy;
      if (with_forces) {
        add_forces(r.forces);
        out.virial += r.virial;
      }
    } else {
      const MbdResult r = mbd_evaluate(s, states, mbd, mbd_image_set(s), with_forces, exclusions);
      out.vdw = r.energy;
      out.mbd_min_eigenvalue = r.min_eigenvalue;
      if (with_forces) {
        add_forces(r.forces);
        out.virial += r.virial;
      }
    }
  }
  out.total = out.bonded + out.repulsion + out.vdw;
  return out;
}

EnergyFunction CompositeModel::energy_function() const {
  return [m = *this](const AtomicStructure& s) { return m.energy(s); };
}

} // namespace vdwmech
