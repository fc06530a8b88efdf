#include "vdwmech/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "vdwmech/errors.hpp"
#include "vdwmech/units.hpp"

namespace vdwmech {

void LoadingProtocol::validate(const AtomicStructure& s) const {
  if (step_count < 1) throw InvalidInput("protocol step_count must be >= 1");
  if (!std::isfinite(increment)) throw InvalidInput("protocol increment must be finite");
  if (max_halvings < 0) throw InvalidInput("protocol max_halvings must be >= 0");
  minimizer.validate();
  if (kind == LoadingKind::Displacement) {
    if (driven.empty()) throw InvalidInput("displacement protocol needs driven atoms");
    for (auto i : driven)
      if (i >= s.size()) throw InvalidInput("driven atom index out of range");
    if (!(direction.norm() > 0.0)) throw InvalidInput("loading direction must be nonzero");
    if (reference_length && !(*reference_length > 0.0))
      throw InvalidInput("reference length must be > 0");
    if (face_area && !(*face_area > 0.0)) throw InvalidInput("face area must be > 0");
  } else {
    if (!s.cell()) throw InvalidInput("cell-strain protocol needs a periodic cell");
    if (component_a < 0 || component_a > 2 || component_b < 0 || component_b > 2)
      throw InvalidInput("cell component out of range");
    if (!s.cell()->is_periodic(component_b) || !s.cell()->is_periodic(component_a))
      throw InvalidInput("strained cell component is not periodic");
    if (!(stress_strain_step > 0.0)) throw InvalidInput("stress strain step must be > 0");
  }
}

double tube_face_area(double radius, double wall_thickness) {
  if (!(radius > 0.0) || !(wall_thickness > 0.0))
    throw InvalidInput("face area needs positive radius and wall thickness");
  return 2.0 * units::kPi * radius * wall_thickness;
}

std::vector<double> face_reaction_stress(const std::vector<StepRecord>& records,
                                         double face_area) {
  if (!(face_area > 0.0)) throw InvalidInput("face area must be > 0");
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.reaction / face_area * units::kEvPerA3ToGpa);
  return out;
}

std::vector<std::optional<double>> instantaneous_stiffness(const std::vector<double>& strain,
                                                           const std::vector<double>& stress) {
  if (strain.size() != stress.size()) throw InvalidInput("strain/stress length mismatch");
  std::vector<std::optional<double>> out(strain.size());
  for (std::size_t k = 1; k < strain.size(); ++k) {
    const double de = strain[k] - strain[k - 1];
    if (de != 0.0) out[k] = (stress[k] - stress[k - 1]) / de;
  }
  return out;
}

namespace {

struct Advance {
  AtomicStructure s;
  MinimizeResult relax;
  bool ok = false;
  int depth = 0;
};

} // namespace

QuasistaticResult run_quasistatic(const AtomicStructure& s0, const CompositeModel& model_in,
                                  const LoadingProtocol& p, const StepObserver& observer) {
  p.validate(s0);
  CompositeModel model = model_in;
  model.validate();
  model.freeze_images(s0);

  AtomicStructure s = s0;
  Vec3 dir = p.direction.normalized();
  double ref_length = 1.0;
  double u_ref = 1.0, u0 = 0.0;
  if (p.kind == LoadingKind::Displacement) {
    auto cons = s.constraints();
    for (auto i : p.driven) cons[i] = FixMask::all();
    s = s.with_constraints(std::move(cons));
    if (p.reference_length) {
      ref_length = *p.reference_length;
    } else {
      double lo = 1e300, hi = -1e300;
      for (const auto& r : s.positions()) {
        lo = std::min(lo, r.dot(dir));
        hi = std::max(hi, r.dot(dir));
      }
      ref_length = hi - lo;
      if (!(ref_length > 0.0)) throw InvalidInput("structure has no extent along the direction");
    }
  } else {
    const Mat3& U = s.cell()->vectors();
    u0 = U(p.component_a, p.component_b);
    u_ref = U(p.component_b, p.component_b);
  }

  auto apply = [&](const AtomicStructure& cur, double delta) {
    if (p.kind == LoadingKind::Displacement) {
      auto pos = cur.positions();
      for (auto i : p.driven) pos[i] += delta * dir;
      return cur.with_positions(std::move(pos));
    }
    return apply_cell_strain(cur, p.component_a, p.component_b, delta, p.mode, p.delta_kind,
                             p.diagonal_only);
  };

  // Applies delta, relaxing once; on failure splits it in two, recursively.
  std::function<Advance(const AtomicStructure&, double, int)> advance =
      [&](const AtomicStructure& cur, double delta, int depth) -> Advance {
    Advance a;
    a.depth = depth;
    a.relax = minimize(apply(cur, delta), model, p.minimizer);
    a.s = a.relax.structure;
    a.ok = a.relax.converged;
    if (a.ok || depth >= p.max_halvings) return a;
    Advance first = advance(cur, 0.5 * delta, depth + 1);
    if (!first.ok) return first;
    Advance second = advance(first.s, 0.5 * delta, depth + 1);
    second.depth = std::max(first.depth, second.depth);
    return second;
  };

  QuasistaticResult res;
  double applied = 0.0;
  for (int step = 1; step <= p.step_count; ++step) {
    Advance a = advance(s, p.increment, 0);
    s = a.s;
    applied += p.increment;

    StepRecord r;
    r.step = step;
    r.applied = applied;
    r.converged = a.ok;
    r.halvings = a.depth;
    r.iterations = a.relax.iterations;
    const ModelEvaluation e = model.evaluate(s, true);
    r.e_total = e.total;
    r.e_bonded = e.bonded;
    r.e_repulsion = e.repulsion;
    r.e_vdw = e.vdw;
    r.max_force = max_free_force(s, e.forces);
    if (p.kind == LoadingKind::Displacement) {
      for (auto i : p.driven) r.reaction_vector -= e.forces[i];
      r.reaction = r.reaction_vector.dot(dir);
      r.strain = applied / ref_length;
      if (p.face_area) r.axial_stress = r.reaction / *p.face_area * units::kEvPerA3ToGpa;
    } else {
      r.strain = (s.cell()->vectors()(p.component_a, p.component_b) - u0) / u_ref;
      if (p.record_stress) {
        r.stress = cell_stress(s, model.energy_function(), p.stress_strain_step);
        r.axial_stress = r.stress->sigma(p.component_a, p.component_b);
      }
    }
    if (!res.records.empty()) {
      const StepRecord& prev = res.records.back();
      if (r.axial_stress && prev.axial_stress && r.strain != prev.strain)
        r.stiffness = (*r.axial_stress - *prev.axial_stress) / (r.strain - prev.strain);
    }
    res.records.push_back(r);
    if (observer) observer(r, s);
    if (!a.ok && p.halt_on_failure) {
      res.final_structure = s;
      return res;
    }
  }
  res.final_structure = s;
  res.completed = true;
  return res;
}

} // namespace vdwmech
