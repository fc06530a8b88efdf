#pragma once

#include <string>
#include <vector>

#include "vdwmech/model.hpp"

namespace vdwmech {

enum class MinimizerAlgorithm { Fire, Lbfgs };

std::string to_string(MinimizerAlgorithm a);
MinimizerAlgorithm parse_minimizer_algorithm(const std::string& s);

struct MinimizerConfig {
  MinimizerAlgorithm algorithm = MinimizerAlgorithm::Fire;
  double force_tolerance = 1e-3; // eV/A, max free component
  int max_iterations = 20000;
  double initial_step = 0.1;     // A, cap on any single coordinate move
  double dt_start = 0.1;         // FIRE time step (unit masses)
  double dt_max = 0.5;
  bool relax_cell = true;        // honor the cell relax mask
  int lbfgs_memory = 10;

  void validate() const;
};

struct MinimizeResult {
  AtomicStructure structure;
  bool converged = false;
  int iterations = 0;
  int rejected_steps = 0; // uphill trial steps that were discarded
  double energy = 0.0;    // eV at the returned structure
  double max_force = 0.0; // eV/A, largest free generalized force
  std::vector<double> accepted_energies;
};

/// Relaxes the free Cartesian components, and the cell components flagged
/// in the cell relax mask, with FIRE or with L-BFGS under a backtracking
/// line search. FIRE rejects steps that raise the energy (velocity reset,
/// smaller step); L-BFGS only accepts steps with sufficient decrease. Either
/// way accepted energies never increase. Cell degrees of freedom are
/// symmetric strains scaled by V^(1/3), driven by -dE/d(strain).
/// Non-convergence is reported, not thrown.
MinimizeResult minimize(const AtomicStructure& s, const CompositeModel& model,
                        const MinimizerConfig& cfg = {});

/// Largest |force| over free components of an evaluated structure.
double max_free_force(const AtomicStructure& s, const std::vector<Vec3>& forces);

} // namespace vdwmech
