#pragma once

#include <array>
#include <functional>
#include <vector>

#include "vdwmech/structure.hpp"

namespace vdwmech {

/// Lattice translations used for image summation. Always contains the zero
/// translation exactly once (at index 0) and is closed under negation.
struct ImageSet {
  std::vector<Vec3> translations;
  std::vector<LatticeShift> shifts;
  std::vector<int> shell_index; // max |component| of the integer shift

  std::size_t size() const { return translations.size(); }
  static ImageSet zero_only();
};

/// All integer combinations with max |index| <= shells along periodic
/// directions; non-periodic directions contribute only index 0.
ImageSet generate_images(const CellTensor& cell, int shells);
ImageSet generate_images(const CellTensor& cell, const std::array<int, 3>& shells);

/// Per-direction shell counts needed so every translation of length up to
/// `radius` is reachable (uses the perpendicular widths of the cell).
std::array<int, 3> shells_for_radius(const CellTensor& cell, double radius);

/// Convenience: zero-only for non-periodic structures.
ImageSet images_for(const AtomicStructure& s, int shells);

enum class StrainMode { FixedOthers, RelaxedOthers };
enum class StrainDelta { Length, Fraction };

/// Moves cell component U(a, b) by delta (Angstrom, or a fraction of the
/// current value) and remaps atoms affinely so their fractional coordinates
/// are preserved. RelaxedOthers marks every other periodic component as a
/// relaxation degree of freedom in the returned cell's relax mask
/// (`diagonal_only` restricts that to the diagonal).
AtomicStructure apply_cell_strain(const AtomicStructure& s, int a, int b, double delta,
                                  StrainMode mode, StrainDelta kind = StrainDelta::Length,
                                  bool diagonal_only = false);

/// Applies the deformation gradient F to the cell and all positions.
AtomicStructure deform(const AtomicStructure& s, const Mat3& F);

/// Symmetric cell stress in GPa with its principal decomposition.
struct StressTensor {
  Mat3 sigma = Mat3::Zero();
  Vec3 principal_values = Vec3::Zero(); // descending
  Mat3 principal_axes = Mat3::Identity(); // column k <-> principal_values[k]

  static StressTensor from_matrix(const Mat3& sigma);
  double norm() const { return sigma.norm(); }
};

using EnergyFunction = std::function<double(const AtomicStructure&)>;

/// sigma_ab = (1/V) dE/d(eps_ab) by central differences under symmetric
/// affine strain of size strain_step; 12 energy evaluations. Positive values
/// are tensile (energy rises on stretching).
StressTensor cell_stress(const AtomicStructure& s, const EnergyFunction& energy,
                         double strain_step = 1e-5);

/// dE/d(eps_ab) (eV) for one symmetric strain component.
double strain_derivative(const AtomicStructure& s, const EnergyFunction& energy, int a, int b,
                         double strain_step = 1e-5);

} // namespace vdwmech

namespace vdwmech {

/// One atom pair (i, j + shift) with separation vector R_j + T(shift) - R_i.
struct PairImage {
  std::size_t i = 0;
  std::size_t j = 0;
  LatticeShift shift{0, 0, 0};
  Vec3 r = Vec3::Zero(); // Angstrom
};

/// Every pair image with |r| <= radius. Pairs with i < j are listed for all
/// shifts; self-image pairs (i == j) are listed once per +/- shift pair.
/// Works for atoms outside the home cell.
std::vector<PairImage> pairs_within(const AtomicStructure& s, double radius);

} // namespace vdwmech
