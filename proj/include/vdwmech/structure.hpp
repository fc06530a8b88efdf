#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vdwmech {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Integer lattice translation (multiples of the three cell vectors).
using LatticeShift = std::array<int, 3>;

/// Per-atom Cartesian constraint; a fixed component is never moved by the
/// minimizer or the integrator.
struct FixMask {
  std::array<bool, 3> fixed{false, false, false};

  static FixMask free() { return {}; }
  static FixMask all() { return {{true, true, true}}; }
  bool any() const { return fixed[0] || fixed[1] || fixed[2]; }
  bool none() const { return !any(); }
  bool operator==(const FixMask&) const = default;
};

/// Simulation cell. Column k of vectors() is the k-th translation vector, so
/// component (a, b) is the a-th Cartesian component of lattice vector b.
class CellTensor {
public:
  using ComponentMask = std::array<std::array<bool, 3>, 3>;

  explicit CellTensor(const Mat3& vectors,
                      std::array<bool, 3> periodic = {true, true, true});

  const Mat3& vectors() const { return vectors_; }
  Vec3 vector(int k) const { return vectors_.col(k); }
  const std::array<bool, 3>& periodic() const { return periodic_; }
  bool is_periodic(int k) const { return periodic_[k]; }
  int periodic_count() const;
  bool fully_periodic() const { return periodic_count() == 3; }

  double volume() const { return vectors_.determinant(); }
  Vec3 to_fractional(const Vec3& r) const;
  Vec3 to_cartesian(const Vec3& f) const { return vectors_ * f; }
  Vec3 translation(const LatticeShift& n) const;

  /// Cell components a quasi-static driver is allowed to relax. Empty by
  /// default; set by apply_cell_strain in relaxed-others mode.
  const ComponentMask& relax_mask() const { return relax_mask_; }
  CellTensor with_relax_mask(const ComponentMask& mask) const;
  bool has_relaxed_components() const;

  bool operator==(const CellTensor& o) const;

private:
  Mat3 vectors_;
  std::array<bool, 3> periodic_;
  ComponentMask relax_mask_{};
};

/// Plain field bundle used to build an AtomicStructure. Empty optional
/// vectors are filled with defaults (element masses, free atoms, ratio 1).
struct StructureData {
  std::vector<Vec3> positions;
  std::vector<std::string> species;
  std::vector<double> masses;
  std::optional<CellTensor> cell;
  std::vector<FixMask> constraints;
  std::vector<double> volume_ratios;
  double overlap_guard = 0.1; // Angstrom
};

/// Validated, immutable atomistic configuration (positions in Angstrom,
/// masses in amu). Use the with_* members to derive modified copies.
class AtomicStructure {
public:
  AtomicStructure() = default;
  explicit AtomicStructure(StructureData data);
  AtomicStructure(std::vector<Vec3> positions, std::vector<std::string> species,
                  std::optional<CellTensor> cell = std::nullopt);

  std::size_t size() const { return d_.positions.size(); }
  bool empty() const { return d_.positions.empty(); }

  const std::vector<Vec3>& positions() const { return d_.positions; }
  const Vec3& position(std::size_t i) const { return d_.positions[i]; }
  const std::vector<std::string>& species() const { return d_.species; }
  const std::string& species(std::size_t i) const { return d_.species[i]; }
  const std::vector<double>& masses() const { return d_.masses; }
  const std::optional<CellTensor>& cell() const { return d_.cell; }
  bool periodic() const { return d_.cell && d_.cell->periodic_count() > 0; }
  const std::vector<FixMask>& constraints() const { return d_.constraints; }
  const std::vector<double>& volume_ratios() const { return d_.volume_ratios; }
  double overlap_guard() const { return d_.overlap_guard; }
  const StructureData& data() const { return d_; }

  std::size_t free_component_count() const;

  AtomicStructure with_positions(std::vector<Vec3> positions) const;
  /// Replaces the cell without touching Cartesian positions.
  AtomicStructure with_cell(std::optional<CellTensor> cell) const;
  AtomicStructure with_constraints(std::vector<FixMask> constraints) const;
  AtomicStructure with_volume_ratios(std::vector<double> ratios) const;

private:
  void validate();
  StructureData d_;
};

/// |R_i - (R_j + image)| in Angstrom.
double distance(const AtomicStructure& s, std::size_t i, std::size_t j,
                const Vec3& image = Vec3::Zero());

/// Standard atomic mass in amu; throws InvalidInput for unknown symbols.
double element_mass(const std::string& symbol);
bool is_known_element(const std::string& symbol);

} // namespace vdwmech
