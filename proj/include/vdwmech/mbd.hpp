#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "vdwmech/periodic.hpp"
#include "vdwmech/species.hpp"
#include "vdwmech/structure.hpp"

namespace vdwmech {

class BondedPairs;

/// Many-body dispersion settings.
struct MbdModelConfig {
  double beta = 1.0;       // range-separation constant of the erf-screened potential
  int replica_shells = 1;  // image shells for periodic structures
  std::optional<double> replica_radius; // Angstrom; overrides replica_shells per direction
  double shell_energy_tol = 1e-4; // eV, used by converge_replica_shells
  double eigenvalue_floor = 1e-12; // Ha^2

  void validate() const;
};

/// The 3N x 3N coupled-oscillator matrix (Ha^2) and its spectrum.
///
/// The spectrum is computed for the shifted matrix C - shift*I with shift
/// equal to omega_min*omega_max, so `shifted_eigenvalues` carry absolute
/// error relative to the coupling strength rather than to omega^2. The energy is
/// assembled from those, which keeps it accurate when the interaction
/// energy is many orders of magnitude below sum(omega).
struct DipoleCouplingMatrix {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd eigenvalues;         // ascending, lambda_p = shift + mu_p
  Eigen::VectorXd shifted_eigenvalues; // mu_p
  Eigen::MatrixXd eigenvectors;        // S, columns orthonormal
  double shift = 0.0;
};

/// Radial pieces of the erf-screened Coulomb potential v(r) = erf(r/s)/r,
/// written so that d_a d_b v = h r_a r_b + f delta_ab and
/// d_a d_b d_c v = q r_a r_b r_c + h (delta_ab r_c + delta_ac r_b + delta_bc r_a).
/// All in Bohr units; series expansion is used for r/s < 0.5.
struct ScreenedRadial {
  double v = 0.0;
  double f = 0.0;
  double h = 0.0;
  double q = 0.0;
};
ScreenedRadial screened_radial(double r, double s);

/// T_ij for the pair (i, j + image): the second derivative
/// grad_Ri (x) grad_Rj of erf(R/(beta*sigma_ij))/R, Bohr^-3.
Mat3 dipole_tensor(const AtomicStructure& s, const std::vector<PerAtomVdwState>& states,
                   const MbdModelConfig& cfg, std::size_t i, std::size_t j,
                   const Vec3& image = Vec3::Zero());

/// Assembles C (diagonal blocks omega_i^2 I plus self-image couplings,
/// off-diagonal blocks omega_i omega_j sqrt(alpha_i alpha_j) T_ij summed
/// over images) and diagonalizes it. Pairs listed in `exclude` contribute
/// no coupling.
DipoleCouplingMatrix assemble_mbd_matrix(const AtomicStructure& s,
                                         const std::vector<PerAtomVdwState>& states,
                                         const MbdModelConfig& cfg,
                                         const ImageSet& images = ImageSet::zero_only(),
                                         const BondedPairs* exclude = nullptr);

/// 1/2 sum sqrt(lambda_p) - 3/2 sum omega_i, in eV.
double mbd_energy(const AtomicStructure& s, const std::vector<PerAtomVdwState>& states,
                  const MbdModelConfig& cfg, const ImageSet& images = ImageSet::zero_only());

/// -dE/dR_i via the trace over modes of Lambda^(-1/2) S^T (dC/dR_i) S,
/// eV/Angstrom.
std::vector<Vec3> mbd_forces(const AtomicStructure& s, const std::vector<PerAtomVdwState>& states,
                             const MbdModelConfig& cfg,
                             const ImageSet& images = ImageSet::zero_only());

struct MbdResult {
  double energy = 0.0;
  std::vector<Vec3> forces;
  Mat3 virial = Mat3::Zero(); // sum of dE/dr (x) r over pair images, eV
  double min_eigenvalue = 0.0;
};

/// Energy (and forces with the virial) from one diagonalization.
MbdResult mbd_evaluate(const AtomicStructure& s, const std::vector<PerAtomVdwState>& states,
                       const MbdModelConfig& cfg, const ImageSet& images, bool with_forces,
                       const BondedPairs* exclude = nullptr);

/// Energy of an assembled matrix (eV). Throws InstabilityError when a mode
/// lies below -eigenvalue_floor.
double mbd_energy_from_matrix(const DipoleCouplingMatrix& c,
                              const std::vector<PerAtomVdwState>& states, double eigenvalue_floor);

struct ShellConvergence {
  int shells = 0;
  double energy = 0.0;        // eV at `shells`
  double last_change = 0.0;   // eV between the last two shell counts
  bool converged = false;
};

/// Increments the replica shell count until the energy per cell changes by
/// less than cfg.shell_energy_tol.
ShellConvergence converge_replica_shells(const AtomicStructure& s,
                                         const std::vector<PerAtomVdwState>& states,
                                         const MbdModelConfig& cfg, int max_shells = 8);

/// Image set implied by the config (radius if set, else uniform shells).
ImageSet mbd_images(const AtomicStructure& s, const MbdModelConfig& cfg);

} // namespace vdwmech
