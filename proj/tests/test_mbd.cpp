#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "support.hpp"
#include "vdwmech/errors.hpp"
#include "vdwmech/generators.hpp"
#include "vdwmech/mbd.hpp"
#include "vdwmech/model.hpp"

using namespace vdwmech;
using namespace testsupport;

namespace {

CompositeModel mbd_only() {
  CompositeModel m;
  m.vdw = VdwKind::MBD;
  return m;
}

AtomicStructure dimer(double R, const std::string& el = "C") {
  return AtomicStructure({Vec3::Zero(), Vec3(0.3 * R, -0.4 * R, std::sqrt(0.75) * R)}, {el, el});
}

} // namespace

TEST_CASE("dimer energy matches the closed-form two-oscillator solution") {
  const CompositeModel m = mbd_only();
  for (const std::string el : {"C", "H"}) {
    const auto& p = default_species_table().at(el);
    for (double R : {3.0, 4.0, 6.0, 10.0, 20.0, 35.0, 50.0}) {
      const double ref = oracle::mbd_two_body(p, R);
      const double e = m.energy(dimer(R, el));
      CHECK(std::abs(e - ref) <= 1e-10 * std::abs(ref));
    }
  }
}

TEST_CASE("dimer energy decays as R^-6 at long range") {
  const CompositeModel m = mbd_only();
  std::vector<double> x, y;
  for (double R = 10.0; R <= 50.0 + 1e-9; R += 2.5) {
    x.push_back(std::log(R));
    y.push_back(std::log(std::abs(m.energy(dimer(R)))));
  }
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k)
    sx += x[k], sy += y[k], sxx += x[k] * x[k], sxy += x[k] * y[k];
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == doctest::Approx(-6.0).epsilon(0.05 / 6.0));
}

TEST_CASE("coupling matrix spectrum matches a Jacobi-type eigensolver") {
  for (std::size_t n : {2u, 6u, 10u}) {
    const AtomicStructure s = random_cluster(n, 7 * n);
    const auto states = vdw_states(s, default_species_table());
    const DipoleCouplingMatrix c = assemble_mbd_matrix(s, states, MbdModelConfig{});
    CHECK((c.matrix - c.matrix.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.matrix);
    const Eigen::VectorXd ref = es.eigenvalues();
    const double scale = ref.cwiseAbs().maxCoeff();
    CHECK((c.eigenvalues - ref).cwiseAbs().maxCoeff() <= 1e-10 * scale);
    // Eigenvectors diagonalize the matrix.
    const Eigen::MatrixXd D = c.eigenvectors.transpose() * c.matrix * c.eigenvectors;
    CHECK((D - Eigen::MatrixXd(c.eigenvalues.asDiagonal())).cwiseAbs().maxCoeff() <= 1e-10 * scale);
  }
}

TEST_CASE("many-body forces match central differences") {
  const CompositeModel m = mbd_only();
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const AtomicStructure s = random_cluster(8 + (seed % 5), seed);
    const auto f = m.evaluate(s, true).forces;
    const auto fd = fd_forces(s, [&](const AtomicStructure& x) { return m.energy(x); });
    CHECK(relative_error(f, fd) < 1e-6);
  }
}

TEST_CASE("excluding bonded pairs keeps forces consistent") {
  ChainSpec spec;
  spec.n_upper = spec.n_lower = 5;
  spec.gap = 4.0;
  AtomicStructure s = make_chain_pair(spec);
  auto p = s.positions();
  for (std::size_t i = 0; i < p.size(); ++i) p[i] += Vec3(0.01 * std::sin(i), 0.02 * std::cos(3 * i), 0.015 * std::sin(2 * i + 1));
  s = s.with_positions(p).with_constraints(std::vector<FixMask>(s.size()));
  // Only the dispersion term is differentiated: the nearly straight chains
  // put the angle terms close to their collinear limit, where central
  // differences lose accuracy.
  const HarmonicTopology topo = detect_topology(s);
  for (VdwKind k : {VdwKind::PW, VdwKind::MBD}) {
    CompositeModel m;
    m.vdw = k;
    const double full = m.energy(s);
    m.vdw_exclusions.emplace(s.size(), topo, 2);
    const double excl = m.energy(s);
    CHECK(excl != full);
    const auto f = m.evaluate(s, true).forces;
    const auto fd = fd_forces(s, [&](const AtomicStructure& x) { return m.energy(x); });
    CHECK(relative_error(f, fd) < 1e-6);
  }
}

TEST_CASE("many-body energy is invariant under rigid motion") {
  const CompositeModel m = mbd_only();
  const AtomicStructure s = random_cluster(9, 77);
  const auto e0 = m.evaluate(s, true);
  const AtomicStructure t = transformed(s, rotation(-0.7, 0.4, 1.3), Vec3(-5.0, 2.0, 9.0));
  CHECK(std::abs(m.energy(t) - e0.total) < 1e-10);
  Vec3 net = Vec3::Zero(), torque = Vec3::Zero();
  for (std::size_t i = 0; i < s.size(); ++i) {
    net += e0.forces[i];
    torque += s.position(i).cross(e0.forces[i]);
  }
  CHECK(net.norm() < 1e-9);
  CHECK(torque.norm() < 1e-9);
}

TEST_CASE("collinear trimer energy is not pairwise additive") {
  const CompositeModel m = mbd_only();
  const double d = 3.0;
  const std::vector<Vec3> r{Vec3::Zero(), Vec3(d, 0, 0), Vec3(2 * d, 0, 0)};
  const double e3 = m.energy(AtomicStructure(r, {"C", "C", "C"}));
  double e2 = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) e2 += m.energy(AtomicStructure({r[i], r[j]}, {"C", "C"}));
  CHECK(std::abs(e3 - e2) / std::abs(e3) > 1e-6);
}

TEST_CASE("screened radial function agrees with its series branch") {
  // Both sides of the r/s = 0.5 switch.
  const auto a = screened_radial(0.5 * 2.0 - 1e-9, 2.0);
  const auto b = screened_radial(0.5 * 2.0 + 1e-9, 2.0);
  CHECK(a.v == doctest::Approx(b.v).epsilon(1e-8));
  CHECK(a.f == doctest::Approx(b.f).epsilon(1e-7));
  CHECK(a.h == doctest::Approx(b.h).epsilon(1e-6));
}

TEST_CASE("an unstable coupling matrix is reported") {
  MbdModelConfig cfg;
  cfg.beta = 0.05; // almost unscreened: close atoms polarize catastrophically
  const AtomicStructure s({Vec3::Zero(), Vec3(0, 0, 0.35)}, {"C", "C"});
  const auto states = vdw_states(s, default_species_table());
  CHECK_THROWS_AS(mbd_evaluate(s, states, cfg, ImageSet::zero_only(), false), InstabilityError);
}
