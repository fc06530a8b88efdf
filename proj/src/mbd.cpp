#include "vdwmech/mbd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vdwmech/errors.hpp"
#include "vdwmech/harmonic.hpp"
#include "vdwmech/linalg.hpp"
#include "vdwmech/units.hpp"

namespace vdwmech {

void MbdModelConfig::validate() const {
  if (!(beta > 0.0)) throw InvalidInput("MBD beta must be > 0");
  if (replica_shells < 0) throw InvalidInput("MBD replica_shells must be >= 0");
  if (replica_radius && !(*replica_radius >= 0.0))
    throw InvalidInput("MBD replica_radius must be >= 0");
  if (!(shell_energy_tol > 0.0)) throw InvalidInput("MBD shell_energy_tol must be > 0");
  if (!(eigenvalue_floor >= 0.0)) throw InvalidInput("MBD eigenvalue floor must be >= 0");
}

ImageSet mbd_images(const AtomicStructure& s, const MbdModelConfig& cfg) {
  if (!s.periodic()) return ImageSet::zero_only();
  if (cfg.replica_radius)
    return generate_images(*s.cell(), shells_for_radius(*s.cell(), *cfg.replica_radius));
  return generate_images(*s.cell(), cfg.replica_shells);
}

ScreenedRadial screened_radial(double r, double s) {
  const double A = 2.0 / (s * std::sqrt(units::kPi));
  const double u = r / s;
  ScreenedRadial out;
  if (u < 0.5) {
    // erf(u)/u = A*s * sum_k c_k u^(2k), c_k = (-1)^k / (k! (2k+1))
    const double u2 = u * u;
    double fact = 1.0; // k!
    double upow = 1.0; // u^(2k)
    double v = 0.0, f = 0.0, h = 0.0, q = 0.0;
    for (int k = 0; k < 20; ++k) {
      if (k > 0) fact *= k;
      const double ck = ((k % 2) ? -1.0 : 1.0) / (fact * (2 * k + 1));
      v += ck * upow;
      // f, h, q series are shifted by one, two and three powers of u^2.
      if (k >= 1) f += 2.0 * k * ck * (upow / u2);
      if (k >= 2) h += 4.0 * k * (k - 1) * ck * (upow / (u2 * u2));
      if (k >= 3) q += 4.0 * k * (k - 1) * (2 * k - 4) * ck * (upow / (u2 * u2 * u2));
      upow *= u2;
    }
    const double s2 = s * s;
    out.v = A * v;
    out.f = A / s2 * f;
    out.h = A / (s2 * s2) * h;
    out.q = A / (s2 * s2 * s2) * q;
    return out;
  }
  const double E = std::erf(u);
  const double G = A * std::exp(-u * u);
  const double s2 = s * s;
  const double G1 = -2.0 * r / s2 * G;
  const double G2 = (-2.0 / s2 + 4.0 * r * r / (s2 * s2)) * G;
  const double r2 = r * r, r3 = r2 * r, r4 = r3 * r;
  const double v1 = G / r - E / r2;
  const double v2 = G1 / r - 2.0 * G / r2 + 2.0 * E / r3;
  const double v3 = G2 / r - 3.0 * G1 / r2 + 6.0 * G / r3 - 6.0 * E / r4;
  const double g = v2 - v1 / r;
  const double dg = v3 - v2 / r + v1 / r2;
  out.v = E / r;
  out.f = v1 / r;
  out.h = g / r2;
  out.q = (dg / r2 - 2.0 * g / r3) / r;
  return out;
}

namespace {

// Screening length beta*sqrt(sigma_i^2 + sigma_j^2), Bohr.
double screening_length(const PerAtomVdwState& a, const PerAtomVdwState& b, double beta) {
  return beta * std::sqrt(a.sigma * a.sigma + b.sigma * b.sigma);
}

// T = -(h r r^T + f I) for displacement r (Bohr).
Mat3 tensor_from_radial(const Vec3& r, const ScreenedRadial& rad) {
  Mat3 T = -rad.h * (r * r.transpose());
  T.diagonal().array() -= rad.f;
  return T;
}

void check_guard(double r_a, double guard, std::size_t i, std::size_t j) {
  if (r_a < guard) {
    std::ostringstream os;
    os << "MBD: atoms " << i << " and " << j << " at " << r_a << " A (overlap guard)";
    throw GeometryError(os.str());
  }
}

void check_states(const AtomicStructure& s, const std::vector<PerAtomVdwState>& states) {
  if (states.size() != s.size()) throw InvalidInput("vdW state count does not match atom count");
}

} // namespace

Mat3 dipole_tensor(const AtomicStructure& s, const std::vector<PerAtomVdwState>& states,
                   const MbdModelConfig& cfg, std::size_t i, std::size_t j, const Vec3& image) {
  cfg.validate();
  check_states(s, states);
  if (i >= s.size() || j >= s.size()) throw InvalidInput("dipole_tensor: index out of range");
  const Vec3 r_a = s.position(i) - (s.position(j) + image);
  const double d = r_a.norm();
  if (i == j && image.isZero(0.0)) throw GeometryError("dipole_tensor: coincident atoms");
  if (d == 0.0) throw GeometryError("dipole_tensor: coincident atoms");
  check_guard(d, s.overlap_guard(), i, j);
  const Vec3 r = r_a / units::kBohrAngstrom;
  const double sc = screening_length(states[i], states[j], cfg.beta);
  return tensor_from_radial(r, screened_radial(r.norm(), sc));
}

DipoleCouplingMatrix assemble_mbd_matrix(const AtomicStructure& s,
                                         const std::vector<PerAtomVdwState>& states,
                                         const MbdModelConfig& cfg, const ImageSet& images,
                                         const BondedPairs* exclude) {
  cfg.validate();
  check_states(s, states);
  const std::size_t n = s.size();
  if (n == 0) throw InvalidInput("assemble_mbd_matrix: empty structure");
  const double guard = s.overlap_guard();

  DipoleCouplingMatrix out;
  out.matrix = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  auto& C = out.matrix;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = states[i].omega;
    for (std::size_t j = i; j < n; ++j) {
      const double wj = states[j].omega;
      const double K = wi * wj * std::sqrt(states[i].alpha0_eff * states[j].alpha0_eff);
      const double sc = screening_length(states[i], states[j], cfg.beta);
      Mat3 block = Mat3::Zero();
      for (std::size_t L = 0; L < images.size(); ++L) {
        if (i == j && L == 0) continue;
        if (exclude && exclude->contains(i, j, images.shifts[L])) continue;
        const Vec3 r_a = s.position(i) - s.position(j) - images.translations[L];
        check_guard(r_a.norm(), guard, i, j);
        const Vec3 r = r_a / units::kBohrAngstrom;
        block += tensor_from_radial(r, screened_radial(r.norm(), sc));
      }
      block *= K;
      if (i == j) {
        block.diagonal().array() += wi * wi;
        // Self-image couplings: symmetrize the accumulated block exactly.
        block = 0.5 * (block + block.transpose()).eval();
        C.block<3, 3>(3 * i, 3 * i) = block;
      } else {
        C.block<3, 3>(3 * i, 3 * j) = block;
        C.block<3, 3>(3 * j, 3 * i) = block.transpose();
      }
    }
  }

  double wmin = states[0].omega, wmax = states[0].omega;
  for (const auto& st : states) {
    wmin = std::min(wmin, st.omega);
    wmax = std::max(wmax, st.omega);
  }
  out.shift = wmin * wmax;

  Eigen::MatrixXd shifted = C;
  shifted.diagonal().array() -= out.shift;
  SymEigen eig = sym_eigen(shifted);
  out.shifted_eigenvalues = std::move(eig.values);
  out.eigenvectors = std::move(eig.vectors);
  out.eigenvalues = out.shifted_eigenvalues.array() + out.shift;
  return out;
}

double mbd_energy_from_matrix(const DipoleCouplingMatrix& c,
                              const std::vector<PerAtomVdwState>& states,
                              double eigenvalue_floor) {
  const Eigen::Index m = c.eigenvalues.size();
  for (Eigen::Index p = 0; p < m; ++p) {
    if (c.eigenvalues[p] < -eigenvalue_floor) {
      std::ostringstream os;
      os << "MBD instability: mode " << p << " has eigenvalue " << c.eigenvalues[p]
         << " Ha^2 (below floor -" << eigenvalue_floor << ")";
      throw InstabilityError(std::size_t(p), c.eigenvalues[p], os.str());
    }
  }
  // With lambda = shift + mu and sq = sqrt(shift):
  //   sqrt(lambda) = sq + mu/(2 sq) - mu^2 / (2 sq (sqrt(lambda) + sq)^2)
  // and sum(mu) = trace(C) - 3N shift, so only the second-order remainder
  // involves the eigenvalues.
  const double sq = std::sqrt(c.shift);
  double diag_terms = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double tr = c.matrix(3 * i, 3 * i) + c.matrix(3 * i + 1, 3 * i + 1) +
                      c.matrix(3 * i + 2, 3 * i + 2);
    diag_terms += 1.5 * (sq - states[i].omega) + (tr - 3.0 * c.shift) / (4.0 * sq);
  }
  double modes = 0.0;
  for (Eigen::Index p = 0; p < m; ++p) {
    const double mu = c.shifted_eigenvalues[p];
    const double root = std::sqrt(std::max(c.eigenvalues[p], 0.0)) + sq;
    modes += mu * mu / (root * root);
  }
  return units::hartree_to_ev(diag_terms - modes / (4.0 * sq));
}

MbdResult mbd_evaluate(const AtomicStructure& s, const std::vector<PerAtomVdwState>& states,
                       const MbdModelConfig& cfg, const ImageSet& images, bool with_forces,
                       const BondedPairs* exclude) {
  cfg.validate();
  check_states(s, states);
  const std::size_t n = s.size();
  MbdResult out;
  if (with_forces) out.forces.assign(n, Vec3::Zero());
  if (n == 0) return out;

  const DipoleCouplingMatrix c = assemble_mbd_matrix(s, states, cfg, images, exclude);
  out.min_eigenvalue = c.eigenvalues.minCoeff();
  out.energy = mbd_energy_from_matrix(c, states, cfg.eigenvalue_floor);
  if (!with_forces) return out;

  for (Eigen::Index p = 0; p < c.eigenvalues.size(); ++p) {
    if (!(c.eigenvalues[p] > cfg.eigenvalue_floor)) {
      std::ostringstream os;
      os << "MBD instability: mode " << p << " eigenvalue " << c.eigenvalues[p]
         << " Ha^2 makes Lambda^(-1/2) singular";
      throw InstabilityError(std::size_t(p), c.eigenvalues[p], os.str());
    }
  }

  // M = S Lambda^(-1/2) S^T, so that dE/dx = 1/4 tr(dC/dx M).
  Eigen::MatrixXd X = c.eigenvectors;
  for (Eigen::Index p = 0; p < X.cols(); ++p) X.col(p) *= std::pow(c.eigenvalues[p], -0.25);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(X.rows(), X.rows());
  M.selfadjointView<Eigen::Lower>().rankUpdate(X);
  M.triangularView<Eigen::StrictlyUpper>() = M.transpose();

  const double guard = s.overlap_guard();
  Mat3 virial = Mat3::Zero(); // Ha
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (i == j && images.size() == 1) continue;
      const double K = states[i].omega * states[j].omega *
                       std::sqrt(states[i].alpha0_eff * states[j].alpha0_eff);
      const double sc = screening_length(states[i], states[j], cfg.beta);
      const Mat3 Q = M.block<3, 3>(3 * i, 3 * j);
      const Mat3 Qs = Q + Q.transpose();
      const double trQ = Q.trace();
      // dE/dC is M/4 on a diagonal block and M/2 on each off-diagonal pair.
      const double pref = i == j ? 0.25 * K : 0.5 * K;
      Vec3 grad = Vec3::Zero(); // dE/dR_i in Ha/Bohr
      for (std::size_t L = 0; L < images.size(); ++L) {
        if (i == j && L == 0) continue;
        if (exclude && exclude->contains(i, j, images.shifts[L])) continue;
        const Vec3 r_a = s.position(i) - s.position(j) - images.translations[L];
        check_guard(r_a.norm(), guard, i, j);
        const Vec3 r = r_a / units::kBohrAngstrom;
        const ScreenedRadial rad = screened_radial(r.norm(), sc);
        // sum_ab W_abc Q_ab with W = q r r r + h (sym. delta r)
        const Vec3 contracted =
            rad.q * r.dot(Q * r) * r + rad.h * (Qs * r) + rad.h * trQ * r;
        const Vec3 g = -pref * contracted;
        grad += g;
        virial += g * r.transpose();
      }
      if (i == j) continue;
      const Vec3 f = -grad * units::kForceAuToEvA;
      out.forces[i] += f;
      out.forces[j] -= f;
    }
  }
  out.virial = units::hartree_to_ev(1.0) * virial;
  return out;
}

double mbd_energy(const AtomicStructure& s, const std::vector<PerAtomVdwState>& states,
                  const MbdModelConfig& cfg, const ImageSet& images) {
  if (s.size() <= 1 && images.size() <= 1) return 0.0;
  return mbd_evaluate(s, states, cfg, images, false).energy;
}

std::vector<Vec3> mbd_forces(const AtomicStructure& s, const std::vector<PerAtomVdwState>& states,
                             const MbdModelConfig& cfg, const ImageSet& images) {
  return mbd_evaluate(s, states, cfg, images, true).forces;
}

ShellConvergence converge_replica_shells(const AtomicStructure& s,
                                         const std::vector<PerAtomVdwState>& states,
                                         const MbdModelConfig& cfg, int max_shells) {
  cfg.validate();
  ShellConvergence out;
  if (!s.periodic()) {
    out.energy = mbd_energy(s, states, cfg);
    out.converged = true;
    return out;
  }
  double prev = mbd_energy(s, states, cfg, generate_images(*s.cell(), 0));
  for (int k = 1; k <= max_shells; ++k) {
    const double e = mbd_energy(s, states, cfg, generate_images(*s.cell(), k));
    out.shells = k;
    out.energy = e;
    out.last_change = std::abs(e - prev);
    if (out.last_change < cfg.shell_energy_tol) {
      out.converged = true;
      return out;
    }
    prev = e;
  }
  return out;
}

} // namespace vdwmech
