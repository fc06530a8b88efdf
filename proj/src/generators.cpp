#include "vdwmech/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vdwmech/errors.hpp"
#include "vdwmech/units.hpp"

namespace vdwmech {

void ChainSpec::validate() const {
  if (n_upper < 1 || n_lower < 1) throw InvalidInput("chain atom counts must be >= 1");
  if (!(spacing > 0.0)) throw InvalidInput("chain spacing must be > 0");
  if (!(gap > 0.0)) throw InvalidInput("chain gap must be > 0");
  if (hydrogen_caps && !(cap_length > 0.0)) throw InvalidInput("cap length must be > 0");
}

ChainGroups chain_groups(const ChainSpec& spec) {
  spec.validate();
  ChainGroups g;
  std::size_t idx = 0;
  for (int k = 0; k < spec.n_upper; ++k) g.upper.push_back(idx++);
  if (spec.hydrogen_caps) g.upper_caps = {idx, idx + 1}, idx += 2;
  for (int k = 0; k < spec.n_lower; ++k) g.lower.push_back(idx++);
  if (spec.hydrogen_caps) g.lower_caps = {idx, idx + 1}, idx += 2;
  return g;
}

AtomicStructure make_chain_pair(const ChainSpec& spec) {
  spec.validate();
  StructureData d;
  auto add_chain = [&](int count, double x0, double y) {
    for (int k = 0; k < count; ++k) {
      d.positions.emplace_back(x0 + k * spec.spacing, y, 0.0);
      d.species.push_back("C");
      d.constraints.push_back(FixMask::free());
    }
    if (spec.hydrogen_caps) {
      d.positions.emplace_back(x0 - spec.cap_length, y, 0.0);
      d.positions.emplace_back(x0 + (count - 1) * spec.spacing + spec.cap_length, y, 0.0);
      for (int k = 0; k < 2; ++k) {
        d.species.push_back("H");
        d.constraints.push_back(FixMask::all());
      }
    }
  };
  const double x0_upper = 0.5 * (spec.n_lower - spec.n_upper) * spec.spacing;
  add_chain(spec.n_upper, x0_upper, spec.gap);
  add_chain(spec.n_lower, 0.0, 0.0);
  return AtomicStructure(std::move(d));
}

void CntSpec::validate() const {
  if (!(n > 0 && m >= 0 && n >= m)) throw InvalidInput("chiral indices need n >= m >= 0, n > 0");
  if (rings < 1) throw InvalidInput("nanotube needs at least one unit cell");
  if (!(bond_length > 0.0)) throw InvalidInput("bond length must be > 0");
  if (fix_end_rings && !periodic_axis && rings < 3)
    throw InvalidInput("fixed end rings need at least 3 unit cells");
}

double swcnt_radius(int n, int m, double bond_length) {
  const double a = std::sqrt(3.0) * bond_length;
  return a * std::sqrt(double(n * n + n * m + m * m)) / (2.0 * units::kPi);
}

AtomicStructure make_swcnt(const CntSpec& spec, CntGeometry* geometry) {
  spec.validate();
  using V2 = Eigen::Vector2d;
  const double a = std::sqrt(3.0) * spec.bond_length;
  const V2 a1(a, 0.0), a2(0.5 * a, 0.5 * std::sqrt(3.0) * a);
  const int n = spec.n, m = spec.m;
  const int dR = std::gcd(2 * m + n, 2 * n + m);
  const int t1 = (2 * m + n) / dR, t2 = -(2 * n + m) / dR;
  const V2 Ch = n * a1 + m * a2;
  const V2 T = t1 * a1 + t2 * a2;
  const double lch = Ch.norm(), lt = T.norm();
  const double radius = lch / (2.0 * units::kPi);
  const V2 basis[2] = {V2::Zero(), (a1 + a2) / 3.0};

  // Lattice index bounds of the rolled rectangle.
  const double R = spec.rings;
  const double ci[4] = {0.0, double(n), R * t1, n + R * t1};
  const double cj[4] = {0.0, double(m), R * t2, m + R * t2};
  const int imin = int(std::floor(*std::min_element(ci, ci + 4))) - 2;
  const int imax = int(std::ceil(*std::max_element(ci, ci + 4))) + 2;
  const int jmin = int(std::floor(*std::min_element(cj, cj + 4))) - 2;
  const int jmax = int(std::ceil(*std::max_element(cj, cj + 4))) + 2;

  struct Site {
    double s, t; // fractions of Ch and T
  };
  std::vector<Site> sites;
  constexpr double eps = 1e-9;
  for (int i = imin; i <= imax; ++i)
    for (int j = jmin; j <= jmax; ++j)
      for (const V2& b : basis) {
        const V2 p = i * a1 + j * a2 + b;
        const double s = p.dot(Ch) / (lch * lch);
        const double t = p.dot(T) / (lt * lt);
        if (s >= -eps && s < 1.0 - eps && t >= -eps && t < R - eps) sites.push_back({s, t});
      }
  std::sort(sites.begin(), sites.end(), [](const Site& x, const Site& y) {
    if (std::abs(x.t - y.t) > 1e-9) return x.t < y.t;
    return x.s < y.s;
  });

  StructureData d;
  CntGeometry geo;
  geo.radius = radius;
  geo.unit_length = lt;
  geo.length = R * lt;
  geo.atoms_per_unit = int(4 * (n * n + n * m + m * m) / dR);
  for (const Site& st : sites) {
    const double s = std::max(st.s, 0.0), t = std::max(st.t, 0.0);
    const double th = 2.0 * units::kPi * s;
    d.positions.emplace_back(radius * std::cos(th), radius * std::sin(th), t * lt);
    d.species.push_back("C");
    const int unit = std::min(int(std::floor(t + eps)), spec.rings - 1);
    const bool fixed =
        spec.fix_end_rings && !spec.periodic_axis && (unit == 0 || unit == spec.rings - 1);
    d.constraints.push_back(fixed ? FixMask::all() : FixMask::free());
    geo.unrolled.emplace_back(s * lch, t * lt, 0.0);
    geo.unit_index.push_back(unit);
  }
  if (spec.periodic_axis) {
    const double box = 2.0 * radius + 20.0;
    Mat3 U = Mat3::Zero();
    U(0, 0) = box;
    U(1, 1) = box;
    U(2, 2) = R * lt;
    d.cell = CellTensor(U, {false, false, true});
  }
  if (geometry) *geometry = std::move(geo);
  return AtomicStructure(std::move(d));
}

void PeCrystalSpec::validate() const {
  if (nx < 1 || ny < 1 || nz < 1) throw InvalidInput("supercell counts must be >= 1");
  if (!(a > 0.0 && b > 0.0 && c > 0.0)) throw InvalidInput("lattice parameters must be > 0");
  if (!(cc_bond > 0.5 * c)) throw InvalidInput("C-C bond must exceed c/2");
  if (!(ch_bond > 0.0)) throw InvalidInput("C-H bond must be > 0");
  if (!(hch_angle_deg > 0.0 && hch_angle_deg < 180.0)) throw InvalidInput("H-C-H angle out of range");
}

AtomicStructure make_pe_crystal(const PeCrystalSpec& spec) {
  spec.validate();
  const double deg = units::kPi / 180.0;
  // Lateral zig-zag offset so that the C-C bond has the requested length.
  const double off = 0.5 * std::sqrt(spec.cc_bond * spec.cc_bond - 0.25 * spec.c * spec.c);
  const double half = 0.5 * spec.hch_angle_deg * deg;
  const double phi = spec.setting_angle_deg * deg;

  struct Site {
    const char* el;
    Vec3 r;
  };
  std::vector<Site> basis;
  for (int chain = 0; chain < 2; ++chain) {
    const double sgn = chain == 0 ? 1.0 : -1.0;
    const Vec3 center = chain == 0 ? Vec3::Zero() : Vec3(0.0, 0.5 * spec.a, 0.5 * spec.b);
    const Vec3 u(0.0, std::cos(phi), sgn * std::sin(phi));
    const Vec3 w = Vec3::UnitX().cross(u);
    for (int k = 0; k < 2; ++k) {
      const double side = k == 0 ? 1.0 : -1.0;
      const Vec3 c = center + Vec3(0.5 * k * spec.c, 0.0, 0.0) + side * off * u;
      basis.push_back({"C", c});
      for (double pm : {1.0, -1.0})
        basis.push_back(
            {"H", c + spec.ch_bond * (side * std::cos(half) * u + pm * std::sin(half) * w)});
    }
  }

  StructureData d;
  for (int ix = 0; ix < spec.nx; ++ix)
    for (int iy = 0; iy < spec.ny; ++iy)
      for (int iz = 0; iz < spec.nz; ++iz) {
        const Vec3 o(ix * spec.c, iy * spec.a, iz * spec.b);
        for (const auto& site : basis) {
          d.positions.push_back(o + site.r);
          d.species.push_back(site.el);
        }
      }
  Mat3 U = Mat3::Zero();
  U(0, 0) = spec.nx * spec.c;
  U(1, 1) = spec.ny * spec.a;
  U(2, 2) = spec.nz * spec.b;
  d.cell = CellTensor(U);
  return AtomicStructure(std::move(d));
}

} // namespace vdwmech
