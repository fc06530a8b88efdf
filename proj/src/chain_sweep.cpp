#include "vdwmech/chain_sweep.hpp"

#include "vdwmech/errors.hpp"

namespace vdwmech {

double chain_net_force(const ChainSpec& spec_in, VdwKind kind) {
  if (kind == VdwKind::None) throw InvalidInput("chain force needs a dispersion model");
  ChainSpec spec = spec_in;
  spec.hydrogen_caps = false;
  const AtomicStructure s = make_chain_pair(spec);
  CompositeModel model;
  model.vdw = kind;
  const ModelEvaluation e = model.evaluate(s, true);
  double fy = 0.0;
  for (std::size_t i : chain_groups(spec).upper) fy += e.forces[i].y();
  return fy;
}

std::vector<ChainForcePoint> chain_force_sweep(const std::vector<double>& gaps,
                                               const std::vector<int>& n_upper, int n_lower,
                                               double spacing) {
  std::vector<ChainForcePoint> out;
  for (int nu : n_upper)
    for (double h : gaps) {
      ChainSpec spec;
      spec.n_upper = nu;
      spec.n_lower = n_lower;
      spec.gap = h;
      spec.spacing = spacing;
      spec.hydrogen_caps = false;
      ChainForcePoint p{h, nu, n_lower, 0.0, 0.0};
      p.force_pw = chain_net_force(spec, VdwKind::PW);
      p.force_mbd = chain_net_force(spec, VdwKind::MBD);
      out.push_back(p);
    }
  return out;
}

} // namespace vdwmech
