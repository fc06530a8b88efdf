#include "vdwmech/hysteresis.hpp"

#include <cmath>

#include "vdwmech/errors.hpp"
#include "vdwmech/units.hpp"

namespace vdwmech {

void HysteresisConfig::validate() const {
  chain.validate();
  if (!chain.hydrogen_caps) throw InvalidInput("hysteresis needs capped chains");
  if (!(h_min > 0.0 && h_max > h_min)) throw InvalidInput("hysteresis needs 0 < h_min < h_max");
  if (!(increment > 0.0)) throw InvalidInput("hysteresis increment must be > 0");
  const double n = (h_max - h_min) / increment;
  if (std::abs(n - std::round(n)) > 1e-9)
    throw InvalidInput("hysteresis range must be a whole number of increments");
  minimizer.validate();
}

namespace {

double mean_y(const AtomicStructure& s, const std::vector<std::size_t>& idx) {
  double y = 0.0;
  for (auto i : idx) y += s.position(i).y();
  return y / double(idx.size());
}

// Largest gap change in excess of the driven step; the snapped state is the
// one after the jump.
std::optional<double> find_snap(const std::vector<HysteresisPoint>& path, double increment) {
  std::optional<double> out;
  double best = increment;
  for (std::size_t k = 1; k < path.size(); ++k) {
    const double excess = std::abs(path[k].mean_gap - path[k - 1].mean_gap) -
                          std::abs(path[k].h_bar - path[k - 1].h_bar);
    if (excess > best) best = excess, out = path[k].h_bar;
  }
  return out;
}

} // namespace

HysteresisResult run_hysteresis(const HysteresisConfig& cfg, const HysteresisObserver& observer) {
  cfg.validate();
  ChainSpec spec = cfg.chain;
  spec.gap = cfg.h_max;
  AtomicStructure s = make_chain_pair(spec);
  const ChainGroups g = chain_groups(spec);
  const CompositeModel model = CompositeModel::build(s, cfg.vdw, true, cfg.repulsion);

  std::vector<Vec3> pos = s.positions();
  const double nu = double(g.upper.size() + 1);
  for (std::size_t k = 0; k < g.upper.size(); ++k)
    pos[g.upper[k]].y() -= cfg.perturbation * std::sin(units::kPi * double(k + 1) / nu);
  s = s.with_positions(std::move(pos));

  {
    auto cons = s.constraints();
    for (auto i : g.upper_caps) cons[i].fixed = {false, true, true};
    for (auto i : g.lower_caps) cons[i].fixed = {false, true, true};
    const MinimizeResult r = minimize(s.with_constraints(cons), model, cfg.minimizer);
    if (!r.converged) throw ConvergenceError("chain pre-relaxation did not converge");
    s = r.structure.with_constraints(s.constraints());
  }

  const std::size_t mid = g.upper.size() / 2;
  auto point = [&](const AtomicStructure& st, double h_bar, double attraction, bool conv) {
    HysteresisPoint p;
    p.h_bar = h_bar;
    p.attraction = attraction;
    p.mean_gap = mean_y(st, g.upper) - mean_y(st, g.lower);
    p.mid_gap = st.position(g.upper[mid]).y() - st.position(g.lower[std::min(mid, g.lower.size() - 1)]).y();
    p.converged = conv;
    return p;
  };

  HysteresisResult res;
  {
    const ModelEvaluation e = model.evaluate(s, true);
    double fy = 0.0;
    for (auto i : g.upper_caps) fy += e.forces[i].y();
    res.bonding.push_back(point(s, cfg.h_max, -fy, true));
    if (observer) observer(true, res.bonding.back());
  }

  LoadingProtocol pr;
  pr.kind = LoadingKind::Displacement;
  pr.increment = cfg.increment;
  pr.step_count = int(std::lround((cfg.h_max - cfg.h_min) / cfg.increment));
  pr.driven = g.upper_caps;
  pr.reference_length = 1.0;
  pr.minimizer = cfg.minimizer;
  pr.halt_on_failure = false;

  // The reaction vector holds the caps against the model forces, so its y
  // component is the attraction.
  pr.direction = -Vec3::UnitY();
  const QuasistaticResult down = run_quasistatic(s, model, pr, [&](const StepRecord& r,
                                                                    const AtomicStructure& st) {
    res.bonding.push_back(point(st, cfg.h_max - r.applied, r.reaction_vector.y(), r.converged));
    if (observer) observer(true, res.bonding.back());
  });
  res.debonding.push_back(res.bonding.back());
  if (observer) observer(false, res.debonding.back());
  pr.direction = Vec3::UnitY();
  run_quasistatic(down.final_structure, model, pr,
                  [&](const StepRecord& r, const AtomicStructure& st) {
                    res.debonding.push_back(
                        point(st, cfg.h_min + r.applied, r.reaction_vector.y(), r.converged));
                    if (observer) observer(false, res.debonding.back());
                  });

  // Both paths visit the same h_bar grid in opposite order.
  const std::size_t n = res.bonding.size();
  if (res.debonding.size() == n)
    for (std::size_t k = 1; k < n; ++k) {
      const auto& b0 = res.bonding[n - k];
      const auto& b1 = res.bonding[n - 1 - k];
      const auto& d0 = res.debonding[k - 1];
      const auto& d1 = res.debonding[k];
      res.loop_area += 0.5 * ((d0.attraction - b0.attraction) + (d1.attraction - b1.attraction)) *
                       (d1.h_bar - d0.h_bar);
    }
  res.snap_in = find_snap(res.bonding, cfg.increment);
  res.snap_out = find_snap(res.debonding, cfg.increment);
  return res;
}

} // namespace vdwmech
