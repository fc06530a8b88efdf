#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "vdwmech/structure.hpp"

namespace vdwmech {

// Term members index atoms in the structure; the shifts place periodic
// images, so the geometry of a term is R_i + T(shift_i) etc. Shifts are
// relative to the home copy of the first atom for bonds and of the vertex
// atom j for angles and dihedrals.

struct Bond {
  std::size_t i = 0, j = 0;
  LatticeShift sj{0, 0, 0};
  double r0 = 0.0; // Angstrom
};

struct Angle {
  std::size_t i = 0, j = 0, k = 0; // j is the vertex
  LatticeShift si{0, 0, 0}, sk{0, 0, 0};
  double theta0 = 0.0; // rad, (0, pi]
};

struct Dihedral {
  std::size_t i = 0, j = 0, k = 0, l = 0; // central bond j-k
  LatticeShift si{0, 0, 0}, sk{0, 0, 0}, sl{0, 0, 0};
  double phi0 = 0.0; // rad, (-pi, pi]
};

/// Force constants. k_theta and k_phi multiply squared angle deviations in
/// rad^2.
struct HarmonicConstants {
  double k_r = 35.0505;    // eV/A^2
  double k_theta = 6.6069; // eV/rad^2
  double k_phi = 0.5361;   // eV/rad^2
};

struct HarmonicTopology {
  std::vector<Bond> bonds;
  std::vector<Angle> angles;
  std::vector<Dihedral> dihedrals;
  HarmonicConstants constants;
  bool include_dihedrals = true;

  /// Throws InvalidInput when an index exceeds atom_count, a tuple repeats
  /// an atom copy, or a reference value is out of range.
  void validate(std::size_t atom_count) const;
};

/// Maximum bond length per unordered element pair; pairs not listed never
/// bond.
class BondCutoffs {
public:
  BondCutoffs() = default;
  /// C-C 1.8 A, C-H 1.3 A, no H-H bonds.
  static BondCutoffs defaults();

  void set(const std::string& a, const std::string& b, double length);
  std::optional<double> get(const std::string& a, const std::string& b) const;
  double max_length() const;
  const std::map<std::pair<std::string, std::string>, double>& entries() const { return m_; }

private:
  std::map<std::pair<std::string, std::string>, double> m_;
};

/// Bonds from the cutoff table (periodic images included), all bonded
/// triples and quadruples, with reference values measured on `s`.
/// Dihedrals whose inner angles are collinear are undefined and skipped.
/// Throws TopologyError if a C atom has more than 4 bonds or an H atom more
/// than 1, or if an atom bonds to its own periodic image.
HarmonicTopology detect_topology(const AtomicStructure& s,
                                 const BondCutoffs& cutoffs = BondCutoffs::defaults(),
                                 const HarmonicConstants& constants = {});

struct HarmonicResult {
  double energy = 0.0;
  double bond_energy = 0.0;
  double angle_energy = 0.0;
  double dihedral_energy = 0.0;
  std::vector<Vec3> forces; // eV/A, empty unless requested
  Mat3 virial = Mat3::Zero(); // sum over terms of dE/dx (x) x, eV
};

HarmonicResult harmonic_evaluate(const AtomicStructure& s, const HarmonicTopology& topo,
                                 bool with_forces);
double harmonic_energy(const AtomicStructure& s, const HarmonicTopology& topo);
std::vector<Vec3> harmonic_forces(const AtomicStructure& s, const HarmonicTopology& topo);

/// Angle at vertex b between a and c, via atan2(|u x v|, u.v).
double bond_angle(const Vec3& a, const Vec3& b, const Vec3& c);
/// Dihedral a-b-c-d in (-pi, pi]; throws GeometryError when an inner
/// angle is collinear.
double dihedral_angle(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);
/// x wrapped into (-pi, pi].
double wrap_angle(double x);

/// Line-oriented text form ("bond i j s0 s1 s2 r0", ...) for reproducibility.
void write_topology(std::ostream& out, const HarmonicTopology& topo);
HarmonicTopology read_topology(std::istream& in);

/// Atom-copy pairs (i, j + shift) joined by at most `max_bonds` bonds of a
/// topology, looked up in either order.
class BondedPairs {
public:
  BondedPairs() = default;
  BondedPairs(std::size_t atom_count, const HarmonicTopology& topo, int max_bonds);

  bool contains(std::size_t i, std::size_t j, const LatticeShift& shift) const;
  std::size_t size() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }
  int max_bonds() const { return max_bonds_; }

private:
  int max_bonds_ = 0;
  std::vector<std::array<long long, 5>> keys_; // sorted, i <= j
};

/// Born-Mayer contact repulsion A exp(-B r) between atoms separated by more
/// than three bonds, force-shifted to vanish smoothly at the cutoff. Used as
/// the short-range Pauli wall that the harmonic model lacks.
struct RepulsionParams {
  double a = 0.0; // eV
  double b = 0.0; // 1/A
};

class ContactRepulsion {
public:
  /// Carbon/hydrogen defaults: C-C 3626 eV, 3.60/A; H-H 115 eV, 3.74/A;
  /// C-H 380 eV, 3.67/A; cutoff 5 A.
  static std::map<std::pair<std::string, std::string>, RepulsionParams> default_params();

  ContactRepulsion(const AtomicStructure& s, const HarmonicTopology& topo,
                   std::map<std::pair<std::string, std::string>, RepulsionParams> params =
                       default_params(),
                   double cutoff = 5.0);

  struct Result {
    double energy = 0.0;
    std::vector<Vec3> forces;
    Mat3 virial = Mat3::Zero();
  };
  Result evaluate(const AtomicStructure& s, bool with_forces) const;

  double cutoff() const { return cutoff_; }
  bool excluded(std::size_t i, std::size_t j, const LatticeShift& shift) const {
    return excluded_.contains(i, j, shift);
  }

private:
  const RepulsionParams* lookup(const std::string& a, const std::string& b) const;

  std::map<std::pair<std::string, std::string>, RepulsionParams> params_;
  double cutoff_;
  std::size_t atom_count_;
  BondedPairs excluded_; // pairs within three bonds
};

} // namespace vdwmech
