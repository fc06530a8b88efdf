#include "vdwmech/periodic.hpp"

#include <algorithm>
#include <cmath>

#include "vdwmech/errors.hpp"
#include "vdwmech/units.hpp"

namespace vdwmech {

ImageSet ImageSet::zero_only() {
  ImageSet s;
  s.translations.push_back(Vec3::Zero());
  s.shifts.push_back({0, 0, 0});
  s.shell_index.push_back(0);
  return s;
}

ImageSet generate_images(const CellTensor& cell, const std::array<int, 3>& shells) {
  std::array<int, 3> n{};
  for (int k = 0; k < 3; ++k) {
    if (shells[k] < 0) throw InvalidInput("image shells must be >= 0");
    n[k] = cell.is_periodic(k) ? shells[k] : 0;
  }
  ImageSet out = ImageSet::zero_only();
  for (int a = -n[0]; a <= n[0]; ++a)
    for (int b = -n[1]; b <= n[1]; ++b)
      for (int c = -n[2]; c <= n[2]; ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        const LatticeShift sh{a, b, c};
        out.translations.push_back(cell.translation(sh));
        out.shifts.push_back(sh);
        out.shell_index.push_back(std::max({std::abs(a), std::abs(b), std::abs(c)}));
      }
  return out;
}

ImageSet generate_images(const CellTensor& cell, int shells) {
  return generate_images(cell, std::array<int, 3>{shells, shells, shells});
}

std::array<int, 3> shells_for_radius(const CellTensor& cell, double radius) {
  if (!(radius >= 0.0)) throw InvalidInput("image radius must be >= 0");
  const Mat3& U = cell.vectors();
  std::array<int, 3> out{};
  for (int k = 0; k < 3; ++k) {
    if (!cell.is_periodic(k)) continue;
    // Width of the cell perpendicular to the plane of the other two vectors.
    const Vec3 n = U.col((k + 1) % 3).cross(U.col((k + 2) % 3));
    const double width = std::abs(U.col(k).dot(n)) / n.norm();
    out[k] = int(std::ceil(radius / width));
  }
  return out;
}

ImageSet images_for(const AtomicStructure& s, int shells) {
  if (!s.periodic()) return ImageSet::zero_only();
  return generate_images(*s.cell(), shells);
}

AtomicStructure deform(const AtomicStructure& s, const Mat3& F) {
  std::vector<Vec3> pos;
  pos.reserve(s.size());
  for (const auto& r : s.positions()) pos.push_back(F * r);
  StructureData d = s.data();
  d.positions = std::move(pos);
  if (d.cell)
    d.cell = CellTensor(F * d.cell->vectors(), d.cell->periodic())
                 .with_relax_mask(d.cell->relax_mask());
  return AtomicStructure(std::move(d));
}

AtomicStructure apply_cell_strain(const AtomicStructure& s, int a, int b, double delta,
                                  StrainMode mode, StrainDelta kind, bool diagonal_only) {
  if (!s.cell()) throw InvalidInput("apply_cell_strain requires a cell");
  if (a < 0 || a > 2 || b < 0 || b > 2) throw InvalidInput("cell component out of range");
  const CellTensor& cell = *s.cell();
  if (!cell.is_periodic(b)) throw InvalidInput("strained cell component is not periodic");

  Mat3 U = cell.vectors();
  const double step = kind == StrainDelta::Length ? delta : delta * U(a, b);
  Mat3 U_new = U;
  U_new(a, b) += step;
  if (!(U_new.determinant() > 0.0))
    throw GeometryError("cell strain produces a non-positive cell determinant");

  const Mat3 F = U_new * U.inverse();
  AtomicStructure out = deform(s, F);

  CellTensor::ComponentMask mask{};
  if (mode == StrainMode::RelaxedOthers) {
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        if (!cell.is_periodic(c) || !cell.is_periodic(r)) continue;
        if ((r == a && c == b) || (r == b && c == a)) continue;
        if (diagonal_only && r != c) continue;
        mask[r][c] = true;
      }
  }
  // Re-create with the exact new tensor to avoid F*U round-off on U(a, b).
  return out.with_cell(CellTensor(U_new, cell.periodic()).with_relax_mask(mask));
}

StressTensor StressTensor::from_matrix(const Mat3& sigma) {
  StressTensor t;
  t.sigma = 0.5 * (sigma + sigma.transpose());
  Eigen::SelfAdjointEigenSolver<Mat3> es(t.sigma);
  // Eigen sorts ascending; store descending.
  for (int k = 0; k < 3; ++k) {
    t.principal_values[k] = es.eigenvalues()[2 - k];
    t.principal_axes.col(k) = es.eigenvectors().col(2 - k);
  }
  return t;
}

double strain_derivative(const AtomicStructure& s, const EnergyFunction& energy, int a, int b,
                         double h) {
  Mat3 eps = Mat3::Zero();
  if (a == b) {
    eps(a, a) = h;
  } else {
    eps(a, b) = h;
    eps(b, a) = h;
  }
  const double ep = energy(deform(s, Mat3::Identity() + eps));
  const double em = energy(deform(s, Mat3::Identity() - eps));
  return (ep - em) / (2.0 * h);
}

StressTensor cell_stress(const AtomicStructure& s, const EnergyFunction& energy,
                         double strain_step) {
  if (!s.cell() || !s.cell()->fully_periodic())
    throw InvalidInput("cell_stress requires a fully periodic cell");
  if (!(strain_step > 0.0)) throw InvalidInput("strain step must be positive");
  const double V = s.cell()->volume();
  Mat3 sigma = Mat3::Zero();
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) {
      const double dE = strain_derivative(s, energy, a, b, strain_step);
      // Off-diagonal strain moves both (a,b) and (b,a).
      const double value = (a == b ? dE : 0.5 * dE) / V;
      sigma(a, b) = sigma(b, a) = value * units::kEvPerA3ToGpa;
    }
  return StressTensor::from_matrix(sigma);
}

} // namespace vdwmech

namespace vdwmech {

namespace {

bool lexicographically_positive(const LatticeShift& n) {
  for (int k = 0; k < 3; ++k) {
    if (n[k] > 0) return true;
    if (n[k] < 0) return false;
  }
  return false;
}

} // namespace

std::vector<PairImage> pairs_within(const AtomicStructure& s, double radius) {
  if (!(radius > 0.0)) throw InvalidInput("pair search radius must be > 0");
  std::vector<PairImage> out;
  const std::size_t n = s.size();
  const double r2max = radius * radius;
  if (!s.periodic()) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const Vec3 r = s.position(j) - s.position(i);
        if (r.squaredNorm() <= r2max) out.push_back({i, j, {0, 0, 0}, r});
      }
    return out;
  }

  const CellTensor& cell = *s.cell();
  const Mat3& U = cell.vectors();
  const Mat3 Uinv = U.inverse();
  // Half-width of the admissible shift window per direction, in cell units.
  std::array<double, 3> w{};
  for (int k = 0; k < 3; ++k) {
    if (!cell.is_periodic(k)) continue;
    const Vec3 nrm = U.col((k + 1) % 3).cross(U.col((k + 2) % 3));
    w[k] = radius / (std::abs(U.col(k).dot(nrm)) / nrm.norm());
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const Vec3 d = s.position(j) - s.position(i);
      const Vec3 f = Uinv * d;
      std::array<int, 3> lo{}, hi{};
      for (int k = 0; k < 3; ++k) {
        if (!cell.is_periodic(k)) continue;
        lo[k] = int(std::ceil(-f[k] - w[k] - 1e-9));
        hi[k] = int(std::floor(-f[k] + w[k] + 1e-9));
      }
      for (int a = lo[0]; a <= hi[0]; ++a)
        for (int b = lo[1]; b <= hi[1]; ++b)
          for (int c = lo[2]; c <= hi[2]; ++c) {
            const LatticeShift sh{a, b, c};
            if (i == j && !lexicographically_positive(sh)) continue;
            const Vec3 r = d + cell.translation(sh);
            if (r.squaredNorm() <= r2max) out.push_back({i, j, sh, r});
          }
    }
  }
  return out;
}

} // namespace vdwmech
