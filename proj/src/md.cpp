#include "vdwmech/md.hpp"

#include <cmath>
#include <random>

#include "vdwmech/errors.hpp"
#include "vdwmech/units.hpp"

namespace vdwmech {

void MdConfig::validate() const {
  if (!(timestep > 0.0)) throw InvalidInput("MD timestep must be > 0");
  if (!(temperature >= 0.0)) throw InvalidInput("MD temperature must be >= 0");
  if (thermostat == Thermostat::Langevin && !(friction > 0.0))
    throw InvalidInput("Langevin friction must be > 0");
  if (total_steps < 0 || runup_steps < 0 || runup_steps > total_steps)
    throw InvalidInput("MD needs 0 <= runup_steps <= total_steps");
  if (sample_interval < 1) throw InvalidInput("MD sample_interval must be >= 1");
}

double kinetic_energy(const AtomicStructure& s, const std::vector<Vec3>& v) {
  double ke = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (int k = 0; k < 3; ++k)
      if (!s.constraints()[i].fixed[k]) ke += 0.5 * s.masses()[i] * v[i][k] * v[i][k];
  return ke / units::kAccelerationUnit;
}

double kinetic_temperature(const AtomicStructure& s, const std::vector<Vec3>& v) {
  const std::size_t dof = s.free_component_count();
  if (dof == 0) return 0.0;
  return 2.0 * kinetic_energy(s, v) / (double(dof) * units::kBoltzmannEv);
}

MdResult run_md(const AtomicStructure& s0, const CompositeModel& model_in, const MdConfig& cfg,
                const std::optional<std::vector<Vec3>>& velocities) {
  cfg.validate();
  CompositeModel model = model_in;
  model.validate();
  model.freeze_images(s0);
  const std::size_t n = s0.size();
  const auto& fix = s0.constraints();
  const auto& mass = s0.masses();

  std::vector<std::size_t> reaction_atoms = cfg.reaction_atoms;
  if (reaction_atoms.empty())
    for (std::size_t i = 0; i < n; ++i)
      if (fix[i].fixed[0] && fix[i].fixed[1] && fix[i].fixed[2]) reaction_atoms.push_back(i);
  for (auto i : reaction_atoms)
    if (i >= n) throw InvalidInput("MD reaction atom index out of range");

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  // Thermal velocity scale sqrt(kT/m) in A/fs.
  auto thermal = [&](std::size_t i) {
    return std::sqrt(units::kBoltzmannEv * cfg.temperature / mass[i] * units::kAccelerationUnit);
  };

  std::vector<Vec3> v(n, Vec3::Zero());
  if (velocities) {
    if (velocities->size() != n) throw InvalidInput("initial velocity count mismatch");
    v = *velocities;
  } else if (cfg.initial_velocities && cfg.temperature > 0.0) {
    for (std::size_t i = 0; i < n; ++i)
      for (int k = 0; k < 3; ++k) v[i][k] = thermal(i) * gauss(rng);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < 3; ++k)
      if (fix[i].fixed[k]) v[i][k] = 0.0;

  std::vector<Vec3> x = s0.positions();
  AtomicStructure s = s0;
  ModelEvaluation e = model.evaluate(s, true);
  auto accel = [&](std::size_t i, int k) {
    return fix[i].fixed[k] ? 0.0 : e.forces[i][k] / mass[i] * units::kAccelerationUnit;
  };

  MdResult res;
  res.initial_total_energy = e.total + kinetic_energy(s, v);
  const double scale = std::max({std::abs(res.initial_total_energy), 1.0,
                                 double(s.free_component_count()) * units::kBoltzmannEv *
                                     cfg.temperature});

  const double dt = cfg.timestep;
  const bool langevin = cfg.thermostat == Thermostat::Langevin;
  const double c1 = langevin ? std::exp(-cfg.friction * dt) : 1.0;
  const double c2 = std::sqrt(1.0 - c1 * c1);

  std::vector<Vec3> sum(n, Vec3::Zero()), sumsq(n, Vec3::Zero());
  MdStatistics& st = res.stats;

  auto drift = [&](double h) {
    for (std::size_t i = 0; i < n; ++i)
      for (int k = 0; k < 3; ++k)
        if (!fix[i].fixed[k]) x[i][k] += h * v[i][k];
  };

  for (long step = 1; step <= cfg.total_steps; ++step) {
    for (std::size_t i = 0; i < n; ++i)
      for (int k = 0; k < 3; ++k) v[i][k] += 0.5 * dt * accel(i, k);
    drift(0.5 * dt);
    if (langevin) {
      for (std::size_t i = 0; i < n; ++i) {
        const double sig = thermal(i);
        for (int k = 0; k < 3; ++k) {
          const double xi = gauss(rng); // drawn for every component, keeps the stream aligned
          if (!fix[i].fixed[k]) v[i][k] = c1 * v[i][k] + c2 * sig * xi;
        }
      }
    }
    drift(0.5 * dt);
    s = s.with_positions(x);
    e = model.evaluate(s, true);
    for (std::size_t i = 0; i < n; ++i)
      for (int k = 0; k < 3; ++k) v[i][k] += 0.5 * dt * accel(i, k);

    const double ke = kinetic_energy(s, v);
    const double total = e.total + ke;
    if (!std::isfinite(total) || std::abs(total - res.initial_total_energy) > 1e3 * scale)
      throw ConvergenceError("MD integration blew up at step " + std::to_string(step));

    if (step <= cfg.runup_steps || (step - cfg.runup_steps) % cfg.sample_interval != 0) continue;
    MdSample sm;
    sm.time = step * dt;
    sm.e_potential = e.total;
    sm.e_kinetic = ke;
    sm.temperature = kinetic_temperature(s, v);
    for (auto i : reaction_atoms) sm.reaction -= e.forces[i];
    res.samples.push_back(sm);
    if (cfg.record_trajectory) res.trajectory.push_back(x);

    ++st.samples;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 d = x[i] - s0.position(i);
      sum[i] += d;
      sumsq[i] += d.cwiseProduct(d);
    }
    st.mean_reaction += sm.reaction;
    st.mean_temperature += sm.temperature;
    st.mean_potential += sm.e_potential;
  }

  st.mean_displacement.assign(n, Vec3::Zero());
  st.std_displacement.assign(n, Vec3::Zero());
  if (st.samples > 0) {
    const double inv = 1.0 / double(st.samples);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 mean = sum[i] * inv;
      st.mean_displacement[i] = mean;
      st.std_displacement[i] = (sumsq[i] * inv - mean.cwiseProduct(mean)).cwiseMax(0.0).cwiseSqrt();
    }
    st.mean_reaction *= inv;
    st.mean_temperature *= inv;
    st.mean_potential *= inv;
  }
  res.final_structure = s;
  res.final_velocities = v;
  return res;
}

} // namespace vdwmech
