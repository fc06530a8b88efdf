#include <doctest.h>

#include <sstream>

#include "vdwmech/config.hpp"
#include "vdwmech/errors.hpp"
#include "vdwmech/generators.hpp"
#include "vdwmech/records.hpp"
#include "vdwmech/xyz.hpp"

using namespace vdwmech;

namespace {

AtomicStructure parse(const std::string& text) {
  std::istringstream in(text);
  return parse_xyz(in);
}

std::size_t error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

} // namespace

TEST_CASE("two-atom file round-trips exactly") {
  StructureData d;
  d.positions = {Vec3(0.1, 1.0 / 3.0, -2.5), Vec3(1.2345678901234567, 0.0, 1e-12)};
  d.species = {"C", "H"};
  d.volume_ratios = {0.8123456789, 1.0};
  d.constraints = {FixMask::free(), FixMask{{true, false, true}}};
  const AtomicStructure s(d);
  std::stringstream ss;
  format_xyz(ss, s);
  const AtomicStructure t = parse_xyz(ss);
  CHECK(t.species() == s.species());
  CHECK(t.positions() == s.positions());
  CHECK(t.volume_ratios() == s.volume_ratios());
  CHECK(t.constraints() == s.constraints());
  CHECK_FALSE(t.cell());
}

TEST_CASE("lattice field populates a periodic cell") {
  const AtomicStructure pe = make_pe_crystal({});
  std::stringstream ss;
  format_xyz(ss, pe);
  const AtomicStructure t = parse_xyz(ss);
  REQUIRE(t.cell());
  CHECK(t.cell()->vectors() == pe.cell()->vectors());
  CHECK(t.cell()->fully_periodic());
  CHECK(t.positions() == pe.positions());

  const AtomicStructure u = parse("1\nLattice=\"5 0 0 0 6 0 0 0 7\" pbc=\"T T F\"\nC 0 0 0\n");
  CHECK(u.cell()->vectors()(1, 1) == 6.0);
  CHECK_FALSE(u.cell()->is_periodic(2));
}

TEST_CASE("missing volume ratio column defaults to one") {
  const AtomicStructure s = parse("2\nplain comment\nC 0 0 0\nH 0 0 1.1\n");
  CHECK(s.volume_ratios() == std::vector<double>{1.0, 1.0});
  const AtomicStructure f = parse("1\n\nC 0 0 0 0 1 0\n");
  CHECK(f.constraints()[0].fixed == std::array<bool, 3>{false, true, false});
  CHECK(f.volume_ratios()[0] == 1.0);
}

TEST_CASE("malformed files report the offending line") {
  CHECK(error_line("two\n\nC 0 0 0\n") == 1);
  CHECK(error_line("2\n\nC 0 0 0\nXx 0 0 1\n") == 4);
  CHECK(error_line("2\n\nC 0 0 0\nC 0 0 1.5 1\n") == 4);
  CHECK(error_line("2\n\nC 0 0 0\n") == 4);
  CHECK(error_line("1\n\nC 0 zero 0\n") == 3);
  CHECK(error_line("1\nLattice=\"1 2 3\"\nC 0 0 0\n") == 2);
  CHECK(error_line("1\nProperties=species:S:1:pos:R:3:charge:R:1\nC 0 0 0 1\n") == 2);
}

TEST_CASE("overlapping atoms are a geometry error") {
  CHECK_THROWS_AS(parse("2\n\nC 0 0 0\nC 0 0 0.05\n"), GeometryError);
}

TEST_CASE("record CSV has a unit-bearing header and one row per step") {
  StepRecord r;
  r.step = 1;
  r.strain = -0.01;
  r.stress = StressTensor::from_matrix(Mat3::Identity());
  r.stiffness = 950.0;
  std::ostringstream out;
  format_records(out, {r});
  const auto l = lines(out.str());
  REQUIRE(l.size() == 2);
  CHECK(l[0].find("strain") != std::string::npos);
  CHECK(l[0].find("sigma_zz_GPa") != std::string::npos);
  CHECK(l[0].find("stiffness_GPa") != std::string::npos);
  CHECK(l[1].find("9.500000000000e+02") != std::string::npos);
  const auto cols = [](const std::string& s) { return std::count(s.begin(), s.end(), ',') + 1; };
  CHECK(cols(l[0]) == cols(l[1]));
  std::ostringstream empty;
  CHECK_THROWS_AS(format_records(empty, {}), InvalidInput);
}

TEST_CASE("MD statistics CSV carries mean and spread of the y displacement") {
  const AtomicStructure s({Vec3::Zero(), Vec3(1.4, 0, 0)}, {"C", "C"});
  MdStatistics st;
  st.mean_displacement = {Vec3(0, 0.1, 0), Vec3(0, -0.1, 0)};
  st.std_displacement = {Vec3(0, 0.02, 0), Vec3(0, 0.03, 0)};
  std::ostringstream out;
  format_md_statistics(out, s, st);
  const auto l = lines(out.str());
  REQUIRE(l.size() == 3);
  CHECK(l[0].find("mean_dy_A") != std::string::npos);
  CHECK(l[0].find("std_dy_A") != std::string::npos);
  CHECK(l[2].find("-1.000000000000e-01") != std::string::npos);
}

TEST_CASE("config to JSON and back is lossless") {
  RunConfig c;
  c.seed = 1234567890123ULL;
  c.model.vdw = VdwKind::MBD;
  c.model.mbd.replica_radius = 9.5;
  c.model.pw.gamma = 0.9412345678901234;
  c.protocol.direction = Vec3(0.1, -0.7, 1.0 / 3.0);
  c.protocol.driven = {3, 5, 8};
  c.sweep.gaps = {6.5, 7.25};
  c.structure.generator = "pe";
  c.cell_relax = "diagonal";
  const nlohmann::json j = to_json(c);
  const RunConfig d = config_from_json(j);
  CHECK(to_json(d) == j);
  CHECK(config_from_json(nlohmann::json::parse(dump_config(c))).protocol.direction ==
        c.protocol.direction);
}

TEST_CASE("unknown keys and bad values are rejected") {
  using nlohmann::json;
  CHECK_THROWS_AS(config_from_json(json{{"sed", 3}}), InvalidInput);
  CHECK_THROWS_AS(config_from_json(json{{"model", {{"vwd", "pw"}}}}), InvalidInput);
  CHECK_THROWS_AS(config_from_json(json{{"model", {{"vdw", "lj"}}}}), InvalidInput);
  CHECK_THROWS_AS(config_from_json(json{{"protocol", {{"step_count", 1.5}}}}), InvalidInput);
  CHECK_THROWS_AS(config_from_json(json{{"seed", -1}}), InvalidInput);
  CHECK_THROWS_AS(config_from_json(json{{"md", {{"timestep", 0.0}}}}), InvalidInput);
  try {
    config_from_json(json{{"minimizer", {{"tolerance", 1}}}});
    FAIL("expected rejection");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("minimizer.tolerance") != std::string::npos);
  }
}

TEST_CASE("command line overrides address dotted keys") {
  RunConfig c;
  apply_override(c, "model.vdw", "mbd");
  apply_override(c, "protocol.increment", "0.25");
  apply_override(c, "output_dir", "some/where");
  apply_override(c, "model.bond_cutoffs.C-C", "1.7");
  CHECK(c.model.vdw == VdwKind::MBD);
  CHECK(c.protocol.increment == 0.25);
  CHECK(c.output_dir == "some/where");
  CHECK(c.model.bond_cutoffs.at("C-C") == 1.7);
  CHECK_THROWS_AS(apply_override(c, "model.nope", "1"), InvalidInput);
}

TEST_CASE("builders follow the config") {
  RunConfig c;
  c.structure.generator = "chain";
  c.structure.chain.n_upper = c.structure.chain.n_lower = 5;
  c.model.vdw = VdwKind::PW;
  c.model.dihedrals = false;
  c.protocol.driven_group = "upper_caps";
  c.protocol.direction = Vec3(0, -1, 0);
  const AtomicStructure s = build_structure(c);
  CHECK(s.size() == 14);
  const CompositeModel m = build_model(c, s);
  CHECK(m.vdw == VdwKind::PW);
  CHECK_FALSE(m.bonded->include_dihedrals);
  const LoadingProtocol p = build_protocol(c, s);
  CHECK(p.driven == std::vector<std::size_t>{5, 6});
  c.seed = 77;
  CHECK(build_md(c).seed == 77);
  CHECK_THROWS_AS(atom_group(c, s, "top_ring"), InvalidInput);
}

TEST_CASE("identical inputs give byte-identical CSV") {
  const auto pts = chain_force_sweep({6.0, 9.0}, {4}, 10);
  std::ostringstream a, b;
  format_chain_sweep(a, pts);
  format_chain_sweep(b, chain_force_sweep({6.0, 9.0}, {4}, 10));
  CHECK(a.str() == b.str());
  CHECK(lines(a.str()).size() == 3);
}
