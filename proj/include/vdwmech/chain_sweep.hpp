#pragma once

#include <vector>

#include "vdwmech/generators.hpp"
#include "vdwmech/model.hpp"

namespace vdwmech {

/// Net dispersion force on the upper chain of a rigid, uncapped chain pair.
struct ChainForcePoint {
  double gap = 0.0;     // A
  int n_upper = 0;
  int n_lower = 0;
  double force_pw = 0.0;  // sum of F_y over the upper chain, eV/A
  double force_mbd = 0.0; // eV/A
  double ratio() const { return force_mbd / force_pw; }
};

/// Sum of F_y on the upper chain for the dispersion model alone (no bonded
/// terms). Caps in `spec` are ignored.
double chain_net_force(const ChainSpec& spec, VdwKind kind);

/// Every (gap, n_upper) combination, gaps varying fastest.
std::vector<ChainForcePoint> chain_force_sweep(const std::vector<double>& gaps,
                                               const std::vector<int>& n_upper, int n_lower,
                                               double spacing = 1.2);

} // namespace vdwmech
