#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vdwmech/model.hpp"

namespace vdwmech {

enum class Thermostat { None, Langevin };

struct MdConfig {
  double timestep = 1.0;    // fs
  double temperature = 300.0; // K, thermostat target and initial velocities
  Thermostat thermostat = Thermostat::Langevin;
  double friction = 0.01;   // 1/fs
  long total_steps = 1000;  // including the run-up
  long runup_steps = 0;
  std::uint64_t seed = 1;
  int sample_interval = 1;
  bool initial_velocities = true; // Maxwell-Boltzmann at `temperature`
  bool record_trajectory = false;
  // Atoms whose held force is reported; empty = every fully fixed atom.
  std::vector<std::size_t> reaction_atoms;

  void validate() const;
};

struct MdSample {
  double time = 0.0;        // fs
  double temperature = 0.0; // K
  double e_potential = 0.0; // eV
  double e_kinetic = 0.0;   // eV
  Vec3 reaction = Vec3::Zero(); // -sum of forces on the reaction atoms, eV/A
};

/// Production-phase averages.
struct MdStatistics {
  std::size_t samples = 0;
  std::vector<Vec3> mean_displacement; // A, relative to the input positions
  std::vector<Vec3> std_displacement;  // A
  Vec3 mean_reaction = Vec3::Zero();   // eV/A
  double mean_temperature = 0.0;       // K
  double mean_potential = 0.0;         // eV
};

struct MdResult {
  MdStatistics stats;
  std::vector<MdSample> samples;                 // production samples
  std::vector<std::vector<Vec3>> trajectory;     // production positions if recorded
  AtomicStructure final_structure;
  std::vector<Vec3> final_velocities;            // A/fs
  double initial_total_energy = 0.0;             // eV
};

/// Velocity Verlet; with the Langevin thermostat the BAOAB splitting.
/// Fixed Cartesian components never move. Throws ConvergenceError when the
/// total energy runs away (more than 1000x its initial scale) or turns
/// non-finite.
MdResult run_md(const AtomicStructure& s, const CompositeModel& model, const MdConfig& cfg,
                const std::optional<std::vector<Vec3>>& velocities = std::nullopt);

/// Kinetic energy (eV) and temperature (K) over the free components.
double kinetic_energy(const AtomicStructure& s, const std::vector<Vec3>& velocities);
double kinetic_temperature(const AtomicStructure& s, const std::vector<Vec3>& velocities);

} // namespace vdwmech
