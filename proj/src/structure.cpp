#include "vdwmech/structure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "vdwmech/errors.hpp"

namespace vdwmech {

namespace {

const std::map<std::string, double, std::less<>>& mass_table() {
  static const std::map<std::string, double, std::less<>> table = {
      {"H", 1.008},   {"He", 4.0026}, {"Li", 6.94},   {"Be", 9.0122},
      {"B", 10.81},   {"C", 12.011},  {"N", 14.007},  {"O", 15.999},
      {"F", 18.998},  {"Ne", 20.180}, {"Na", 22.990}, {"Mg", 24.305},
      {"Al", 26.982}, {"Si", 28.085}, {"P", 30.974},  {"S", 32.06},
      {"Cl", 35.45},  {"Ar", 39.948},
  };
  return table;
}

} // namespace

double element_mass(const std::string& symbol) {
  const auto& t = mass_table();
  auto it = t.find(symbol);
  if (it == t.end()) throw InvalidInput("unknown element '" + symbol + "'");
  return it->second;
}

bool is_known_element(const std::string& symbol) {
  return mass_table().count(symbol) > 0;
}

// ---------------------------------------------------------------------------

CellTensor::CellTensor(const Mat3& vectors, std::array<bool, 3> periodic)
    : vectors_(vectors), periodic_(periodic) {
  if (!vectors_.allFinite()) throw InvalidInput("cell tensor has non-finite entries");
  if (!(vectors_.determinant() > 0.0))
    throw InvalidInput("cell tensor must have a positive determinant");
}

int CellTensor::periodic_count() const {
  return int(periodic_[0]) + int(periodic_[1]) + int(periodic_[2]);
}

Vec3 CellTensor::to_fractional(const Vec3& r) const {
  return vectors_.partialPivLu().solve(r);
}

Vec3 CellTensor::translation(const LatticeShift& n) const {
  return vectors_.col(0) * n[0] + vectors_.col(1) * n[1] + vectors_.col(2) * n[2];
}

CellTensor CellTensor::with_relax_mask(const ComponentMask& mask) const {
  CellTensor c = *this;
  c.relax_mask_ = mask;
  return c;
}

bool CellTensor::has_relaxed_components() const {
  for (const auto& row : relax_mask_)
    for (bool b : row)
      if (b) return true;
  return false;
}

bool CellTensor::operator==(const CellTensor& o) const {
  return vectors_ == o.vectors_ && periodic_ == o.periodic_ && relax_mask_ == o.relax_mask_;
}

// ---------------------------------------------------------------------------

AtomicStructure::AtomicStructure(StructureData data) : d_(std::move(data)) {
  validate();
}

AtomicStructure::AtomicStructure(std::vector<Vec3> positions,
                                 std::vector<std::string> species,
                                 std::optional<CellTensor> cell) {
  d_.positions = std::move(positions);
  d_.species = std::move(species);
  d_.cell = std::move(cell);
  validate();
}

void AtomicStructure::validate() {
  const std::size_t n = d_.positions.size();
  if (d_.species.size() != n)
    throw InvalidInput("species list length does not match positions");
  if (d_.masses.empty()) {
    d_.masses.reserve(n);
    for (const auto& s : d_.species) d_.masses.push_back(element_mass(s));
  }
  if (d_.constraints.empty()) d_.constraints.assign(n, FixMask{});
  if (d_.volume_ratios.empty()) d_.volume_ratios.assign(n, 1.0);
  if (d_.masses.size() != n || d_.constraints.size() != n || d_.volume_ratios.size() != n)
    throw InvalidInput("per-atom field lengths differ");
  if (!(d_.overlap_guard >= 0.0)) throw InvalidInput("overlap guard must be >= 0");

  for (std::size_t i = 0; i < n; ++i) {
    if (!d_.positions[i].allFinite())
      throw InvalidInput("non-finite position for atom " + std::to_string(i));
    if (!(d_.masses[i] > 0.0))
      throw InvalidInput("non-positive mass for atom " + std::to_string(i));
    if (!(d_.volume_ratios[i] > 0.0))
      throw InvalidInput("non-positive volume ratio for atom " + std::to_string(i));
  }

  if (d_.overlap_guard <= 0.0 || n < 1) return;

  std::vector<Vec3> shifts{Vec3::Zero()};
  if (d_.cell) {
    const auto& c = *d_.cell;
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        for (int k = -1; k <= 1; ++k) {
          if ((a && !c.is_periodic(0)) || (b && !c.is_periodic(1)) || (k && !c.is_periodic(2)))
            continue;
          if (a == 0 && b == 0 && k == 0) continue;
          shifts.push_back(c.translation({a, b, k}));
        }
  }
  const double g2 = d_.overlap_guard * d_.overlap_guard;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      for (std::size_t s = (i == j ? 1 : 0); s < shifts.size(); ++s) {
        const Vec3 d = d_.positions[i] - d_.positions[j] - shifts[s];
        if (d.squaredNorm() < g2) {
          std::ostringstream os;
          os << "atoms " << i << " and " << j << " closer than overlap guard ("
             << std::sqrt(d.squaredNorm()) << " < " << d_.overlap_guard << " A)";
          throw GeometryError(os.str());
        }
      }
    }
  }
}

std::size_t AtomicStructure::free_component_count() const {
  std::size_t count = 0;
  for (const auto& m : d_.constraints)
    for (bool f : m.fixed) count += f ? 0 : 1;
  return count;
}

AtomicStructure AtomicStructure::with_positions(std::vector<Vec3> positions) const {
  StructureData d = d_;
  d.positions = std::move(positions);
  return AtomicStructure(std::move(d));
}

AtomicStructure AtomicStructure::with_cell(std::optional<CellTensor> cell) const {
  StructureData d = d_;
  d.cell = std::move(cell);
  return AtomicStructure(std::move(d));
}

AtomicStructure AtomicStructure::with_constraints(std::vector<FixMask> constraints) const {
  StructureData d = d_;
  d.constraints = std::move(constraints);
  return AtomicStructure(std::move(d));
}

AtomicStructure AtomicStructure::with_volume_ratios(std::vector<double> ratios) const {
  StructureData d = d_;
  d.volume_ratios = std::move(ratios);
  return AtomicStructure(std::move(d));
}

double distance(const AtomicStructure& s, std::size_t i, std::size_t j, const Vec3& image) {
  if (i >= s.size() || j >= s.size())
    throw InvalidInput("atom index out of range in distance()");
  return (s.position(i) - (s.position(j) + image)).norm();
}

} // namespace vdwmech
