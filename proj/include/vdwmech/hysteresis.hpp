#pragma once

#include <optional>
#include <vector>

#include "vdwmech/generators.hpp"
#include "vdwmech/protocol.hpp"

namespace vdwmech {

/// Bonding/debonding cycle of a capped chain pair: the upper caps are moved
/// from h_max down to h_min and back while everything else relaxes.
struct HysteresisConfig {
  ChainSpec chain;          // chain.gap is ignored; the start is h_max
  VdwKind vdw = VdwKind::PW;
  bool repulsion = true;
  double h_max = 11.0;      // A, cap separation
  double h_min = 5.0;
  double increment = 0.2;   // A per step
  double perturbation = 1e-3; // A, sine bow of the upper chain that breaks the symmetry
  MinimizerConfig minimizer = [] {
    MinimizerConfig m;
    m.algorithm = MinimizerAlgorithm::Lbfgs;
    m.force_tolerance = 1e-5;
    m.max_iterations = 100000;
    return m;
  }();

  void validate() const;
};

struct HysteresisPoint {
  double h_bar = 0.0;      // A, cap separation
  double attraction = 0.0; // eV/A, force holding the upper caps, positive when attracting
  double mean_gap = 0.0;   // A, mean y distance between the carbons of the two chains
  double mid_gap = 0.0;    // A, gap at the middle carbon
  bool converged = false;
};

struct HysteresisResult {
  std::vector<HysteresisPoint> bonding;   // h_max -> h_min, first entry is the start
  std::vector<HysteresisPoint> debonding; // h_min -> h_max
  double loop_area = 0.0; // eV, integral of (debonding - bonding) attraction over h_bar
  // h_bar of the first snapped state; empty if no jump exceeds one increment.
  std::optional<double> snap_in;
  std::optional<double> snap_out;
};

using HysteresisObserver = std::function<void(bool bonding, const HysteresisPoint&)>;

/// The caps are first relaxed free along the chain axis at h_max (the
/// chains may contract under attraction), then held fixed for the cycle.
HysteresisResult run_hysteresis(const HysteresisConfig& cfg,
                                const HysteresisObserver& observer = {});

} // namespace vdwmech
