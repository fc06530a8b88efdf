#include <doctest.h>

#include <cmath>

#include "vdwmech/errors.hpp"
#include "vdwmech/generators.hpp"
#include "vdwmech/harmonic.hpp"

using namespace vdwmech;

TEST_CASE("chain pair layout and caps") {
  ChainSpec spec;
  const AtomicStructure s = make_chain_pair(spec);
  const ChainGroups g = chain_groups(spec);
  CHECK(s.size() == 60);
  CHECK(g.upper.size() == 28);
  CHECK(g.upper_caps.size() == 2);
  for (auto i : g.upper) CHECK(s.position(i).y() == doctest::Approx(spec.gap));
  for (auto i : g.lower) CHECK(s.position(i).y() == 0.0);
  for (auto i : g.upper_caps) {
    CHECK(s.species(i) == "H");
    CHECK(s.constraints()[i] == FixMask::all());
  }
  CHECK((s.position(g.upper[1]) - s.position(g.upper[0])).norm() == doctest::Approx(1.2));
  const HarmonicTopology t = detect_topology(s);
  CHECK(t.bonds.size() == 2 * 29);
}

TEST_CASE("unequal chains are centered on each other") {
  ChainSpec spec;
  spec.n_upper = 10;
  spec.n_lower = 30;
  spec.hydrogen_caps = false;
  const AtomicStructure s = make_chain_pair(spec);
  const ChainGroups g = chain_groups(spec);
  const double cu = 0.5 * (s.position(g.upper.front()).x() + s.position(g.upper.back()).x());
  const double cl = 0.5 * (s.position(g.lower.front()).x() + s.position(g.lower.back()).x());
  CHECK(cu == doctest::Approx(cl));
}

TEST_CASE("armchair nanotube matches the reference tube") {
  CntGeometry g;
  const AtomicStructure s = make_swcnt({}, &g);
  CHECK(s.size() == 640);
  CHECK(g.radius == doctest::Approx(5.42).epsilon(1e-3));
  CHECK(g.length == doctest::Approx(49.19).epsilon(1e-3));
  CHECK(g.atoms_per_unit == 32);
  for (const Vec3& r : s.positions())
    CHECK(std::hypot(r.x(), r.y()) == doctest::Approx(g.radius).epsilon(1e-12));
  int fixed = 0;
  for (const auto& c : s.constraints()) fixed += c.any();
  CHECK(fixed == 64);
  const HarmonicTopology t = detect_topology(s);
  CHECK(t.bonds.size() == 944); // open ends: 16 dangling bonds per end
  for (const Bond& b : t.bonds) CHECK(b.r0 == doctest::Approx(1.42).epsilon(1e-2));
}

TEST_CASE("unrolled nanotube coordinates recover graphene") {
  for (auto [n, m] : {std::pair{8, 8}, std::pair{10, 0}, std::pair{6, 3}}) {
    CntSpec spec;
    spec.n = n;
    spec.m = m;
    spec.rings = 2;
    spec.fix_end_rings = false;
    CntGeometry g;
    const AtomicStructure s = make_swcnt(spec, &g);
    CHECK(s.size() == std::size_t(2 * g.atoms_per_unit));
    // Nearest unrolled neighbor of every atom sits one bond away (with the
    // circumference wrapped).
    const double lch = 2.0 * M_PI * g.radius;
    for (std::size_t i = 0; i < s.size(); ++i) {
      double best = 1e9;
      for (std::size_t j = 0; j < s.size(); ++j) {
        if (i == j) continue;
        Vec3 d = g.unrolled[j] - g.unrolled[i];
        d.x() -= lch * std::round(d.x() / lch);
        best = std::min(best, d.norm());
      }
      CHECK(best == doctest::Approx(1.42).epsilon(1e-8));
    }
  }
}

TEST_CASE("periodic nanotube has no dangling bonds") {
  CntSpec spec;
  spec.periodic_axis = true;
  spec.rings = 4;
  const AtomicStructure s = make_swcnt(spec);
  CHECK(s.cell());
  const HarmonicTopology t = detect_topology(s);
  CHECK(t.bonds.size() == 3 * s.size() / 2);
}

TEST_CASE("polyethylene cell has two chains of CH2 units") {
  const AtomicStructure s = make_pe_crystal({});
  CHECK(s.size() == 12);
  const HarmonicTopology t = detect_topology(s);
  CHECK(t.bonds.size() == 12); // 4 C-C across the period, 8 C-H
  for (const Bond& b : t.bonds) {
    const bool cc = s.species(b.i) == "C" && s.species(b.j) == "C";
    CHECK(b.r0 == doctest::Approx(cc ? 1.53 : 1.09).epsilon(1e-9));
  }
  PeCrystalSpec big;
  big.nx = 10;
  CHECK(make_pe_crystal(big).size() == 120);
  CHECK(make_pe_crystal(big).cell()->vectors()(0, 0) == doctest::Approx(25.4));
}

TEST_CASE("generators are deterministic and validate their inputs") {
  CHECK(make_swcnt({}).positions() == make_swcnt({}).positions());
  CntSpec bad;
  bad.n = 2;
  bad.m = 5;
  CHECK_THROWS_AS(make_swcnt(bad), InvalidInput);
  ChainSpec c;
  c.spacing = 0.0;
  CHECK_THROWS_AS(make_chain_pair(c), InvalidInput);
  PeCrystalSpec p;
  p.cc_bond = 1.0;
  CHECK_THROWS_AS(make_pe_crystal(p), InvalidInput);
}
