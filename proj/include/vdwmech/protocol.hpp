#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "vdwmech/minimize.hpp"
#include "vdwmech/periodic.hpp"

namespace vdwmech {

enum class LoadingKind { Displacement, CellStrain };

/// Incremental loading: each step applies one increment, relaxes the free
/// degrees of freedom and records the response.
struct LoadingProtocol {
  LoadingKind kind = LoadingKind::Displacement;
  double increment = 0.0; // A (or fraction for StrainDelta::Fraction)
  int step_count = 1;
  MinimizerConfig minimizer;
  int max_halvings = 4;   // retries with split increments before giving up
  bool halt_on_failure = true;

  // Displacement: the driven atoms are held fixed and moved rigidly.
  std::vector<std::size_t> driven;
  Vec3 direction = -Vec3::UnitZ();
  std::optional<double> reference_length; // A; default: extent along direction
  std::optional<double> face_area;        // A^2; enables axial stress and stiffness

  // Cell strain: component U(a, b).
  int component_a = 0, component_b = 0;
  StrainDelta delta_kind = StrainDelta::Length;
  StrainMode mode = StrainMode::FixedOthers;
  bool diagonal_only = false;
  bool record_stress = true;
  double stress_strain_step = 1e-5;

  void validate(const AtomicStructure& s) const;
};

struct StepRecord {
  int step = 0;         // 1-based
  double applied = 0.0; // cumulative increment, A (or fraction)
  double strain = 0.0;  // dimensionless
  double e_total = 0.0, e_bonded = 0.0, e_repulsion = 0.0, e_vdw = 0.0; // eV
  Vec3 reaction_vector = Vec3::Zero(); // -sum of model forces on the driven atoms, eV/A
  double reaction = 0.0; // reaction_vector along the loading direction, eV/A
  std::optional<StressTensor> stress;  // GPa, periodic runs
  std::optional<double> axial_stress;  // GPa
  std::optional<double> stiffness;     // GPa, from step 2 on
  bool converged = false;
  int halvings = 0;
  int iterations = 0;
  double max_force = 0.0; // eV/A after relaxation
};

struct QuasistaticResult {
  std::vector<StepRecord> records;
  AtomicStructure final_structure;
  bool completed = false; // false if a step failed and the run halted
};

using StepObserver = std::function<void(const StepRecord&, const AtomicStructure&)>;

/// Runs the protocol from `s`, carrying the relaxed state from step to
/// step. A step that fails to relax is retried as 2, 4, ... sub-steps up to
/// max_halvings times; if it still fails it is recorded with
/// converged = false and, with halt_on_failure, the run stops there.
QuasistaticResult run_quasistatic(const AtomicStructure& s, const CompositeModel& model,
                                  const LoadingProtocol& protocol,
                                  const StepObserver& observer = {});

/// Reaction force / face area in GPa for every record.
std::vector<double> face_reaction_stress(const std::vector<StepRecord>& records,
                                         double face_area);

/// Nanotube face area 2 pi R t with wall thickness t (default 3.4 A).
double tube_face_area(double radius, double wall_thickness = 3.4);

/// Finite-difference slope d(stress)/d(strain); entry 0 is empty.
std::vector<std::optional<double>> instantaneous_stiffness(const std::vector<double>& strain,
                                                           const std::vector<double>& stress);

} // namespace vdwmech
