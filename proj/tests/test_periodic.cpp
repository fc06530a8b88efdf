#include <doctest.h>

#include <set>

#include "support.hpp"
#include "vdwmech/errors.hpp"
#include "vdwmech/generators.hpp"
#include "vdwmech/model.hpp"
#include "vdwmech/periodic.hpp"
#include "vdwmech/units.hpp"

using namespace vdwmech;
using namespace testsupport;

namespace {

CellTensor skewed_cell() {
  Mat3 U;
  U << 6.0, 1.0, 0.5, 0.0, 5.5, -0.8, 0.0, 0.0, 7.0;
  return CellTensor(U);
}

AtomicStructure periodic_cluster(std::uint64_t seed) {
  const AtomicStructure c = random_cluster(6, seed, 4.5, 1.4);
  return c.with_cell(skewed_cell());
}

} // namespace

TEST_CASE("image sets start at zero and are closed under negation") {
  const ImageSet im = generate_images(skewed_cell(), 2);
  CHECK(im.size() == 125);
  CHECK(im.translations[0].norm() == 0.0);
  std::set<std::array<int, 3>> shifts(im.shifts.begin(), im.shifts.end());
  for (const auto& s : im.shifts) CHECK(shifts.count({-s[0], -s[1], -s[2]}) == 1);
  const CellTensor slab(Mat3::Identity() * 5.0, {true, true, false});
  CHECK(generate_images(slab, 1).size() == 9);
}

TEST_CASE("shells for a radius reach every short translation") {
  const CellTensor c = skewed_cell();
  const double radius = 13.0;
  const auto sh = shells_for_radius(c, radius);
  const ImageSet im = generate_images(c, sh);
  for (int a = -6; a <= 6; ++a)
    for (int b = -6; b <= 6; ++b)
      for (int k = -6; k <= 6; ++k) {
        const Vec3 t = c.translation({a, b, k});
        if (t.norm() > radius) continue;
        bool found = false;
        for (const auto& s : im.shifts) found = found || s == LatticeShift{a, b, k};
        CHECK(found);
      }
}

TEST_CASE("pair search agrees with a brute-force image loop") {
  const AtomicStructure s = periodic_cluster(3);
  const double radius = 9.0;
  const auto pairs = pairs_within(s, radius);
  std::size_t brute = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i; j < s.size(); ++j)
      for (int a = -5; a <= 5; ++a)
        for (int b = -5; b <= 5; ++b)
          for (int k = -5; k <= 5; ++k) {
            if (i == j && (a > 0 || (a == 0 && (b > 0 || (b == 0 && k >= 0))))) continue;
            const Vec3 r = s.position(j) + s.cell()->translation({a, b, k}) - s.position(i);
            if (r.norm() <= radius) ++brute;
          }
  CHECK(pairs.size() == brute);
  for (const auto& p : pairs) CHECK(p.r.norm() <= radius);
}

TEST_CASE("cell strain keeps fractional coordinates") {
  const AtomicStructure s = periodic_cluster(4);
  const AtomicStructure t = apply_cell_strain(s, 0, 0, 0.3, StrainMode::FixedOthers);
  CHECK(t.cell()->vectors()(0, 0) == doctest::Approx(6.3));
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Vec3 fa = s.cell()->to_fractional(s.position(i));
    const Vec3 fb = t.cell()->to_fractional(t.position(i));
    CHECK((fa - fb).norm() < 1e-12);
  }
  const AtomicStructure r = apply_cell_strain(s, 1, 1, 0.02, StrainMode::RelaxedOthers,
                                              StrainDelta::Fraction, true);
  CHECK(r.cell()->vectors()(1, 1) == doctest::Approx(5.5 * 1.02));
  CHECK(r.cell()->relax_mask()[0][0]);
  CHECK_FALSE(r.cell()->relax_mask()[1][1]);
  CHECK_FALSE(r.cell()->relax_mask()[0][1]);
}

TEST_CASE("analytic virial matches the finite-difference stress") {
  PeCrystalSpec spec;
  const AtomicStructure base = make_pe_crystal(spec);
  auto p = base.positions();
  for (std::size_t i = 0; i < p.size(); ++i) p[i] += Vec3(0.02 * std::sin(i), 0.03 * std::cos(2 * i), 0.01 * std::sin(5 * i));
  const AtomicStructure s = base.with_positions(p);
  for (VdwKind k : {VdwKind::None, VdwKind::PW, VdwKind::MBD}) {
    CompositeModel m = CompositeModel::build(base, k, true, true);
    m.freeze_images(s);
    const auto e = m.evaluate(s, true);
    const StressTensor fd = cell_stress(s, m.energy_function(), 1e-5);
    const Mat3 analytic = 0.5 * (e.virial + e.virial.transpose()) / s.cell()->volume() *
                          units::kEvPerA3ToGpa;
    CHECK((analytic - fd.sigma).cwiseAbs().maxCoeff() < 1e-5 * std::max(1.0, fd.sigma.norm()));
  }
}

TEST_CASE("stretching a bonded crystal along the chains is tensile") {
  const AtomicStructure s = make_pe_crystal({});
  const CompositeModel m = CompositeModel::build(s, VdwKind::None, true, false);
  const AtomicStructure t = apply_cell_strain(s, 0, 0, 0.01, StrainMode::FixedOthers,
                                              StrainDelta::Fraction);
  CHECK(cell_stress(t, m.energy_function()).sigma(0, 0) > 0.0);
}

TEST_CASE("periodic pairwise energy is extensive") {
  PeCrystalSpec one, two;
  two.nx = 2;
  const AtomicStructure a = make_pe_crystal(one), b = make_pe_crystal(two);
  CompositeModel m;
  m.vdw = VdwKind::PW;
  m.pw.cutoff = 12.0;
  CHECK(m.energy(b) == doctest::Approx(2.0 * m.energy(a)).epsilon(1e-10));
}

TEST_CASE("principal stresses are sorted eigenvalues") {
  Mat3 sig;
  sig << 1.0, 0.5, 0.0, 0.5, -2.0, 0.0, 0.0, 0.0, 0.3;
  const StressTensor st = StressTensor::from_matrix(sig);
  CHECK(st.principal_values[0] >= st.principal_values[1]);
  CHECK(st.principal_values[1] >= st.principal_values[2]);
  CHECK(st.principal_values.sum() == doctest::Approx(sig.trace()));
  const Mat3 back = st.principal_axes * st.principal_values.asDiagonal() * st.principal_axes.transpose();
  CHECK((back - sig).cwiseAbs().maxCoeff() < 1e-12);
}
