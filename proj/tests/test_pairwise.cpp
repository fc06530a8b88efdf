#include <doctest.h>

#include "oracles.hpp"
#include "support.hpp"
#include "vdwmech/errors.hpp"
#include "vdwmech/model.hpp"
#include "vdwmech/pairwise.hpp"

using namespace vdwmech;
using namespace testsupport;

namespace {

CompositeModel pw_only() {
  CompositeModel m;
  m.vdw = VdwKind::PW;
  return m;
}

} // namespace

TEST_CASE("damping is one half at the vdW radius and saturates") {
  CHECK(fermi_damping(3.0, 3.0, 20.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(fermi_damping(30.0, 3.0, 20.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fermi_damping(0.3, 3.0, 20.0) < 1e-7);
  CHECK_THROWS_AS(fermi_damping(1.0, 0.0, 20.0), InvalidInput);
}

TEST_CASE("homonuclear combination returns the atomic C6") {
  PerAtomVdwState a;
  a.c6_eff = 46.6;
  a.alpha0_eff = 12.0;
  CHECK(combine_c6(a, a) == doctest::Approx(46.6).epsilon(1e-15));
}

TEST_CASE("pairwise energy matches an independent pair sum") {
  const auto& table = default_species_table();
  for (std::size_t n : {2u, 5u, 12u, 20u}) {
    AtomicStructure s = random_cluster(n, 100 + n);
    std::vector<double> ratios(n);
    for (std::size_t i = 0; i < n; ++i) ratios[i] = 0.7 + 0.05 * double(i % 7);
    s = s.with_volume_ratios(ratios);
    const double ref = oracle::pw_pair_sum(s, table);
    const double e = pw_only().energy(s);
    CHECK(std::abs(e - ref) <= 1e-12 * std::abs(ref));
  }
}

TEST_CASE("pairwise forces match central differences") {
  const CompositeModel m = pw_only();
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const AtomicStructure s = random_cluster(8 + seed, seed);
    const auto f = m.evaluate(s, true).forces;
    const auto fd = fd_forces(s, [&](const AtomicStructure& x) { return m.energy(x); });
    CHECK(relative_error(f, fd) < 1e-6);
  }
}

TEST_CASE("pairwise energy is invariant under rigid motion and forces sum to zero") {
  const CompositeModel m = pw_only();
  const AtomicStructure s = random_cluster(10, 42);
  const auto e0 = m.evaluate(s, true);
  const AtomicStructure t = transformed(s, rotation(0.3, -1.1, 2.0), Vec3(3.0, -7.0, 11.0));
  CHECK(std::abs(m.energy(t) - e0.total) < 1e-10);
  Vec3 net = Vec3::Zero(), torque = Vec3::Zero();
  for (std::size_t i = 0; i < s.size(); ++i) {
    net += e0.forces[i];
    torque += s.position(i).cross(e0.forces[i]);
  }
  CHECK(net.norm() < 1e-9);
  CHECK(torque.norm() < 1e-9);
}

TEST_CASE("a cutoff removes pairs beyond it") {
  AtomicStructure s({Vec3::Zero(), Vec3(0, 0, 12.0)}, {"C", "C"});
  CompositeModel m = pw_only();
  const double full = m.energy(s);
  CHECK(full < 0.0);
  m.pw.cutoff = 10.0;
  CHECK(m.energy(s) == 0.0);
}

TEST_CASE("invalid pairwise settings are rejected") {
  PwModelConfig c;
  c.d = -1.0;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c = {};
  c.gamma = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
}
