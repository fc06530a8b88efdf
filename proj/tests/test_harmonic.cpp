#include <doctest.h>

#include <sstream>

#include "support.hpp"
#include "vdwmech/errors.hpp"
#include "vdwmech/generators.hpp"
#include "vdwmech/harmonic.hpp"
#include "vdwmech/model.hpp"

using namespace vdwmech;
using namespace testsupport;

namespace {

// Hydrocarbon-like cluster: a bent C chain with H atoms, then jittered.
AtomicStructure distorted_alkane(std::uint64_t seed) {
  std::vector<Vec3> p{{0, 0, 0},       {1.25, 0.85, 0},  {2.5, 0, 0.1},   {3.8, 0.8, 0.2},
                      {-0.5, -0.9, 0.5}, {-0.6, 0.4, -0.8}, {1.3, 1.5, 0.9},  {2.5, -0.7, -0.8},
                      {4.4, 0.3, 1.0},  {4.3, 1.0, -0.8}};
  std::vector<std::string> sp{"C", "C", "C", "C", "H", "H", "H", "H", "H", "H"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.08, 0.08);
  for (auto& r : p) r += Vec3(u(rng), u(rng), u(rng));
  return AtomicStructure(p, sp);
}

} // namespace

TEST_CASE("angle and dihedral helpers") {
  CHECK(bond_angle(Vec3(1, 0, 0), Vec3::Zero(), Vec3(0, 1, 0)) == doctest::Approx(M_PI / 2));
  CHECK(bond_angle(Vec3(1, 0, 0), Vec3::Zero(), Vec3(-1, 0, 0)) == doctest::Approx(M_PI));
  CHECK(dihedral_angle(Vec3(1, 0, 0), Vec3::Zero(), Vec3(0, 0, 1), Vec3(0, 1, 1)) ==
        doctest::Approx(M_PI / 2));
  CHECK(std::abs(dihedral_angle(Vec3(1, 0, 0), Vec3::Zero(), Vec3(0, 0, 1), Vec3(1, 0, 1))) < 1e-12);
  CHECK_THROWS_AS(dihedral_angle(Vec3(0, 0, -1), Vec3::Zero(), Vec3(0, 0, 1), Vec3(1, 0, 1)),
                  GeometryError);
  CHECK(wrap_angle(3 * M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(-M_PI) == doctest::Approx(M_PI));
}

TEST_CASE("reference geometry has zero energy and zero force") {
  const AtomicStructure s = distorted_alkane(1);
  const HarmonicTopology t = detect_topology(s);
  const auto r = harmonic_evaluate(s, t, true);
  CHECK(std::abs(r.energy) < 1e-20);
  for (const auto& f : r.forces) CHECK(f.norm() < 1e-12);
}

TEST_CASE("topology of a propane-like chain") {
  const AtomicStructure s = distorted_alkane(1);
  const HarmonicTopology t = detect_topology(s);
  CHECK(t.bonds.size() == 9);
  // Every carbon has three neighbors: 3 angles each.
  CHECK(t.angles.size() == 12);
  CHECK(t.dihedrals.size() > 0);
}

TEST_CASE("harmonic forces match central differences to 1e-7") {
  const AtomicStructure s0 = distorted_alkane(1);
  const HarmonicTopology t = detect_topology(s0);
  for (std::uint64_t seed : {2u, 3u, 4u}) {
    const AtomicStructure s = distorted_alkane(seed);
    const auto f = harmonic_forces(s, t);
    const auto fd = fd_forces(s, [&](const AtomicStructure& x) { return harmonic_energy(x, t); },
                              1e-4);
    CHECK(relative_error(f, fd) < 1e-7);
  }
}

TEST_CASE("term energies add up and respond to their constants") {
  const AtomicStructure s0 = distorted_alkane(1);
  HarmonicTopology t = detect_topology(s0);
  const AtomicStructure s = distorted_alkane(5);
  const auto r = harmonic_evaluate(s, t, false);
  CHECK(r.energy == doctest::Approx(r.bond_energy + r.angle_energy + r.dihedral_energy));
  t.include_dihedrals = false;
  CHECK(harmonic_energy(s, t) == doctest::Approx(r.bond_energy + r.angle_energy));
  t.include_dihedrals = true;
  t.constants.k_r *= 2.0;
  CHECK(harmonic_evaluate(s, t, false).bond_energy == doctest::Approx(2.0 * r.bond_energy));
}

TEST_CASE("harmonic energy is invariant under rigid motion") {
  const HarmonicTopology t = detect_topology(distorted_alkane(1));
  const AtomicStructure s = distorted_alkane(6);
  const AtomicStructure m = transformed(s, rotation(2.1, 0.3, -0.9), Vec3(10, 20, -30));
  CHECK(std::abs(harmonic_energy(m, t) - harmonic_energy(s, t)) < 1e-10);
  Vec3 net = Vec3::Zero(), torque = Vec3::Zero();
  const auto f = harmonic_forces(s, t);
  for (std::size_t i = 0; i < s.size(); ++i) net += f[i], torque += s.position(i).cross(f[i]);
  CHECK(net.norm() < 1e-9);
  CHECK(torque.norm() < 1e-9);
}

TEST_CASE("topology text form round-trips") {
  const HarmonicTopology t = detect_topology(distorted_alkane(1));
  std::stringstream ss;
  write_topology(ss, t);
  const HarmonicTopology u = read_topology(ss);
  CHECK(u.bonds.size() == t.bonds.size());
  CHECK(u.angles.size() == t.angles.size());
  CHECK(u.dihedrals.size() == t.dihedrals.size());
  const AtomicStructure s = distorted_alkane(9);
  CHECK(harmonic_energy(s, u) == doctest::Approx(harmonic_energy(s, t)).epsilon(1e-12));
}

TEST_CASE("over-coordinated carbon is a topology error") {
  std::vector<Vec3> p{Vec3::Zero()};
  std::vector<std::string> sp{"C"};
  for (int k = 0; k < 5; ++k) {
    const double a = 2 * M_PI * k / 5;
    p.emplace_back(1.4 * std::cos(a), 1.4 * std::sin(a), 0.0);
    sp.push_back("C");
  }
  CHECK_THROWS_AS(detect_topology(AtomicStructure(p, sp)), TopologyError);
}

TEST_CASE("bonded pair lookup counts bond separations") {
  ChainSpec spec;
  spec.n_upper = spec.n_lower = 6;
  const AtomicStructure s = make_chain_pair(spec);
  const HarmonicTopology t = detect_topology(s);
  const BondedPairs one(s.size(), t, 1), three(s.size(), t, 3);
  CHECK(one.size() == t.bonds.size());
  CHECK(one.contains(0, 1, {0, 0, 0}));
  CHECK(one.contains(1, 0, {0, 0, 0}));
  CHECK_FALSE(one.contains(0, 2, {0, 0, 0}));
  CHECK(three.contains(0, 3, {0, 0, 0}));
  CHECK_FALSE(three.contains(0, 4, {0, 0, 0}));
  CHECK(one.contains(0, 6, {0, 0, 0}));          // terminal cap
  CHECK_FALSE(three.contains(0, 8, {0, 0, 0})); // other chain
}

TEST_CASE("contact repulsion forces match central differences") {
  ChainSpec spec;
  spec.n_upper = spec.n_lower = 6;
  spec.gap = 3.0;
  AtomicStructure s = make_chain_pair(spec);
  auto p = s.positions();
  for (std::size_t i = 0; i < p.size(); ++i) p[i] += Vec3(0.05 * std::sin(i), 0.1 * std::cos(i), 0.07 * std::sin(3 * i));
  s = s.with_positions(p);
  const CompositeModel m = CompositeModel::build(s, VdwKind::None, false, true);
  const auto e = m.evaluate(s, true);
  CHECK(e.repulsion > 0.0);
  const auto fd = fd_forces(s, [&](const AtomicStructure& x) { return m.energy(x); });
  CHECK(relative_error(e.forces, fd) < 1e-7);
}
