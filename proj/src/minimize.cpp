#include "vdwmech/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "vdwmech/errors.hpp"

namespace vdwmech {

std::string to_string(MinimizerAlgorithm a) {
  return a == MinimizerAlgorithm::Lbfgs ? "lbfgs" : "fire";
}

MinimizerAlgorithm parse_minimizer_algorithm(const std::string& s) {
  if (s == "fire") return MinimizerAlgorithm::Fire;
  if (s == "lbfgs") return MinimizerAlgorithm::Lbfgs;
  throw InvalidInput("unknown minimizer '" + s + "' (expected fire or lbfgs)");
}

void MinimizerConfig::validate() const {
  if (!(force_tolerance > 0.0)) throw InvalidInput("minimizer force_tolerance must be > 0");
  if (max_iterations < 0) throw InvalidInput("minimizer max_iterations must be >= 0");
  if (!(initial_step > 0.0)) throw InvalidInput("minimizer initial_step must be > 0");
  if (!(dt_start > 0.0) || !(dt_max >= dt_start))
    throw InvalidInput("minimizer requires 0 < dt_start <= dt_max");
  if (lbfgs_memory < 1) throw InvalidInput("minimizer lbfgs_memory must be >= 1");
}

double max_free_force(const AtomicStructure& s, const std::vector<Vec3>& forces) {
  double m = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (int k = 0; k < 3; ++k)
      if (!s.constraints()[i].fixed[k]) m = std::max(m, std::abs(forces[i][k]));
  return m;
}

namespace {

struct CellDof {
  int a, b;
};

std::vector<CellDof> cell_dofs(const AtomicStructure& s, bool enabled) {
  std::vector<CellDof> out;
  if (!enabled || !s.cell()) return out;
  const auto& m = s.cell()->relax_mask();
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b)
      if (m[a][b] || m[b][a]) out.push_back({a, b});
  return out;
}

struct State {
  AtomicStructure s;
  double energy = 0.0;
  Eigen::VectorXd force; // generalized: 3N atom components, then cell dofs
};

// FIRE constants (Bitzek et al.).
constexpr int kNmin = 5;
constexpr double kFinc = 1.1;
constexpr double kFdec = 0.5;
constexpr double kAlpha0 = 0.1;
constexpr double kFalpha = 0.99;

// Armijo sufficient-decrease constant and line-search budget.
constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 30;

} // namespace

MinimizeResult minimize(const AtomicStructure& s0, const CompositeModel& model_in,
                        const MinimizerConfig& cfg) {
  cfg.validate();
  const std::size_t n = s0.size();
  const std::vector<CellDof> dofs = cell_dofs(s0, cfg.relax_cell);
  // A moving cell must not change the image set mid-run, or the energy jumps.
  CompositeModel model = model_in;
  if (!dofs.empty()) {
    auto frozen = model;
    frozen.freeze_images(s0);
    if (!model.pw_shells) model.pw_shells = frozen.pw_shells;
    if (!model.mbd_shells) model.mbd_shells = frozen.mbd_shells;
  }
  const Eigen::Index dim = Eigen::Index(3 * n + dofs.size());

  auto evaluate = [&](const AtomicStructure& s) {
    State st{s, 0.0, Eigen::VectorXd::Zero(dim)};
    const ModelEvaluation e = model.evaluate(s, true);
    st.energy = e.total;
    for (std::size_t i = 0; i < n; ++i)
      for (int k = 0; k < 3; ++k)
        if (!s.constraints()[i].fixed[k]) st.force[Eigen::Index(3 * i + k)] = e.forces[i][k];
    if (!dofs.empty()) {
      const double lref = std::cbrt(s.cell()->volume());
      for (std::size_t d = 0; d < dofs.size(); ++d) {
        const auto [a, b] = dofs[d];
        const double dEde = a == b ? e.virial(a, a) : e.virial(a, b) + e.virial(b, a);
        st.force[Eigen::Index(3 * n + d)] = -dEde / lref;
      }
    }
    return st;
  };

  auto step_to = [&](const AtomicStructure& s, const Eigen::VectorXd& dx) {
    std::vector<Vec3> pos = s.positions();
    for (std::size_t i = 0; i < n; ++i) pos[i] += dx.segment<3>(Eigen::Index(3 * i));
    AtomicStructure moved = s.with_positions(std::move(pos));
    if (dofs.empty()) return moved;
    const double lref = std::cbrt(s.cell()->volume());
    Mat3 F = Mat3::Identity();
    for (std::size_t d = 0; d < dofs.size(); ++d) {
      const auto [a, b] = dofs[d];
      const double e = dx[Eigen::Index(3 * n + d)] / lref;
      F(a, b) += e;
      if (a != b) F(b, a) += e;
    }
    return deform(moved, F);
  };

  MinimizeResult res;
  State cur = evaluate(s0);
  res.accepted_energies.push_back(cur.energy);

  auto finish = [&](bool converged) {
    res.structure = cur.s;
    res.converged = converged;
    res.energy = cur.energy;
    res.max_force = dim ? cur.force.cwiseAbs().maxCoeff() : 0.0;
    return res;
  };
  auto try_step = [&](const Eigen::VectorXd& dx) -> std::optional<State> {
    try {
      return evaluate(step_to(cur.s, dx));
    } catch (const GeometryError&) {
    } catch (const InstabilityError&) {
      // Overshoot into an overlap or an unstable MBD region counts as uphill.
    }
    return std::nullopt;
  };
  auto cap = [&](Eigen::VectorXd& dx) {
    const double big = dx.cwiseAbs().maxCoeff();
    if (big > cfg.initial_step) dx *= cfg.initial_step / big;
  };

  if (cfg.algorithm == MinimizerAlgorithm::Lbfgs) {
    // Generalized gradient g = -force; two-loop recursion over the last
    // lbfgs_memory accepted (step, gradient change) pairs.
    std::vector<Eigen::VectorXd> hist_s, hist_y;
    std::vector<double> hist_rho;
    for (int it = 0;; ++it) {
      res.iterations = it;
      const double fmax = dim ? cur.force.cwiseAbs().maxCoeff() : 0.0;
      if (fmax <= cfg.force_tolerance) return finish(true);
      if (it >= cfg.max_iterations) return finish(false);

      Eigen::VectorXd q = -cur.force;
      const std::size_t m = hist_s.size();
      std::vector<double> a(m);
      for (std::size_t k = m; k-- > 0;) {
        a[k] = hist_rho[k] * hist_s[k].dot(q);
        q -= a[k] * hist_y[k];
      }
      if (m > 0) q *= hist_s.back().dot(hist_y.back()) / hist_y.back().squaredNorm();
      for (std::size_t k = 0; k < m; ++k) {
        const double b = hist_rho[k] * hist_y[k].dot(q);
        q += (a[k] - b) * hist_s[k];
      }
      Eigen::VectorXd dir = -q;
      if (!(dir.dot(cur.force) > 0.0)) {
        hist_s.clear(), hist_y.clear(), hist_rho.clear();
        dir = cur.force;
      }
      if (hist_s.empty()) dir *= cfg.dt_start * cfg.dt_start; // first step: small descent
      cap(dir);

      const double slope = -dir.dot(cur.force); // dE along dir, < 0
      std::optional<State> trial;
      double t = 1.0;
      for (int bt = 0; bt < kMaxBacktracks; ++bt, t *= 0.5) {
        trial = try_step(t * dir);
        if (trial && trial->energy <= cur.energy + kArmijo * t * slope) break;
        ++res.rejected_steps;
        trial.reset();
      }
      if (!trial) {
        if (hist_s.empty()) return finish(false); // steepest descent stalled too
        hist_s.clear(), hist_y.clear(), hist_rho.clear();
        continue;
      }
      Eigen::VectorXd sk = t * dir;
      Eigen::VectorXd yk = cur.force - trial->force;
      const double sy = sk.dot(yk);
      cur = std::move(*trial);
      res.accepted_energies.push_back(cur.energy);
      if (sy > 1e-12 * sk.norm() * yk.norm()) {
        hist_s.push_back(std::move(sk));
        hist_y.push_back(std::move(yk));
        hist_rho.push_back(1.0 / sy);
        if (int(hist_s.size()) > cfg.lbfgs_memory) {
          hist_s.erase(hist_s.begin());
          hist_y.erase(hist_y.begin());
          hist_rho.erase(hist_rho.begin());
        }
      }
    }
  }

  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  double dt = cfg.dt_start, alpha = kAlpha0;
  int npos = 0;
  for (int it = 0;; ++it) {
    res.iterations = it;
    const double fmax = dim ? cur.force.cwiseAbs().maxCoeff() : 0.0;
    if (fmax <= cfg.force_tolerance) return finish(true);
    if (it >= cfg.max_iterations) return finish(false);

    const double P = cur.force.dot(v);
    if (P > 0.0) {
      const double fn = cur.force.norm();
      v = (1.0 - alpha) * v + alpha * v.norm() / fn * cur.force;
      if (++npos > kNmin) {
        dt = std::min(dt * kFinc, cfg.dt_max);
        alpha *= kFalpha;
      }
    } else if (P < 0.0) {
      v.setZero();
      dt *= kFdec;
      alpha = kAlpha0;
      npos = 0;
    }
    v += dt * cur.force;
    Eigen::VectorXd dx = dt * v;
    cap(dx);

    std::optional<State> trial = try_step(dx);
    if (!trial || !(trial->energy <= cur.energy)) {
      // Uphill: restart from rest with a smaller step.
      ++res.rejected_steps;
      v.setZero();
      dt *= kFdec;
      alpha = kAlpha0;
      npos = 0;
      if (dt < 1e-8 * cfg.dt_start) return finish(false);
      continue;
    }
    cur = std::move(*trial);
    res.accepted_energies.push_back(cur.energy);
  }
}

} // namespace vdwmech
