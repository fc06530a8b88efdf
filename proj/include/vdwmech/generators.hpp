#pragma once

#include <vector>

#include "vdwmech/structure.hpp"

namespace vdwmech {

/// Two parallel carbon chains along x, the upper one at y = gap.
struct ChainSpec {
  int n_upper = 28;
  int n_lower = 28;
  double spacing = 1.2;     // A, C-C distance along the chain
  double gap = 8.0;         // A, y distance between the chains
  bool hydrogen_caps = true;
  double cap_length = 1.06; // A, C-H distance of the terminal caps

  void validate() const;
};

/// Atom indices of the parts of a chain pair.
struct ChainGroups {
  std::vector<std::size_t> upper;      // carbons
  std::vector<std::size_t> lower;      // carbons
  std::vector<std::size_t> upper_caps; // hydrogens
  std::vector<std::size_t> lower_caps;
};

/// Atom order: upper carbons, upper caps, lower carbons, lower caps. The
/// chains are centered on each other in x; caps sit on the chain axis
/// beyond the terminal carbons and are fully fixed.
AtomicStructure make_chain_pair(const ChainSpec& spec);
ChainGroups chain_groups(const ChainSpec& spec);

/// Single-wall nanotube from rolled graphene, axis along z.
struct CntSpec {
  int n = 8;
  int m = 8;
  int rings = 20;           // translational unit cells along the axis
  double bond_length = 1.42;
  bool fix_end_rings = true; // fix every atom of the first and last unit
  bool periodic_axis = false; // periodic cell along z instead of open ends

  void validate() const;
};

struct CntGeometry {
  double radius = 0.0;        // A
  double unit_length = 0.0;   // A, translational period
  double length = 0.0;        // A, rings * unit_length
  int atoms_per_unit = 0;
  std::vector<Vec3> unrolled; // (arc length, axial, 0) per atom, A
  std::vector<int> unit_index; // translational unit of each atom
};

AtomicStructure make_swcnt(const CntSpec& spec, CntGeometry* geometry = nullptr);

/// Radius |C_h| / (2 pi) for chiral indices (n, m).
double swcnt_radius(int n, int m, double bond_length);

/// Orthorhombic polyethylene with two zig-zag chains per cell in
/// herringbone setting. Chain axis along x (length c), a along y, b along z.
struct PeCrystalSpec {
  int nx = 1, ny = 1, nz = 1;
  double a = 7.40;  // A
  double b = 4.93;  // A
  double c = 2.54;  // A, chain repeat
  double cc_bond = 1.53;
  double ch_bond = 1.09;
  double hch_angle_deg = 108.0;
  double setting_angle_deg = 48.7; // zig-zag plane vs. the a axis

  void validate() const;
};

AtomicStructure make_pe_crystal(const PeCrystalSpec& spec);

} // namespace vdwmech
