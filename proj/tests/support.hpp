#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "vdwmech/structure.hpp"

namespace testsupport {

using vdwmech::AtomicStructure;
using vdwmech::Vec3;

/// Random C/H cluster with every pair at least `dmin` apart inside a cube.
inline AtomicStructure random_cluster(std::size_t n, std::uint64_t seed, double box = 6.0,
                                      double dmin = 1.3, bool with_hydrogen = true) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, box);
  std::vector<Vec3> pos;
  std::vector<std::string> sp;
  while (pos.size() < n) {
    const Vec3 r(u(rng), u(rng), u(rng));
    bool ok = true;
    for (const auto& p : pos) ok = ok && (p - r).norm() >= dmin;
    if (!ok) continue;
    pos.push_back(r);
    sp.push_back(with_hydrogen && pos.size() % 3 == 0 ? "H" : "C");
  }
  return AtomicStructure(pos, sp);
}

/// Central-difference forces -dE/dR.
inline std::vector<Vec3> fd_forces(const AtomicStructure& s,
                                   const std::function<double(const AtomicStructure&)>& energy,
                                   double h = 1e-4) {
  std::vector<Vec3> out(s.size(), Vec3::Zero());
  for (std::size_t i = 0; i < s.size(); ++i)
    for (int k = 0; k < 3; ++k) {
      auto p = s.positions();
      p[i][k] += h;
      const double ep = energy(s.with_positions(p));
      p[i][k] -= 2.0 * h;
      const double em = energy(s.with_positions(p));
      out[i][k] = -(ep - em) / (2.0 * h);
    }
  return out;
}

/// Secular energy change over a run: least-squares slope of (t, E) times the
/// run length. Bounded integrator oscillations average out.
inline double linear_drift(const std::vector<double>& t, const std::vector<double>& e) {
  const double n = double(t.size());
  double st = 0, se = 0, stt = 0, ste = 0;
  for (std::size_t k = 0; k < t.size(); ++k) st += t[k], se += e[k], stt += t[k] * t[k], ste += t[k] * e[k];
  const double slope = (n * ste - st * se) / (n * stt - st * st);
  return std::abs(slope) * (t.back() - t.front());
}

/// max |a - b| / max |b| over all components.
inline double relative_error(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, (a[i] - b[i]).cwiseAbs().maxCoeff());
    den = std::max(den, b[i].cwiseAbs().maxCoeff());
  }
  return num / den;
}

inline Eigen::Matrix3d rotation(double ax, double ay, double az) {
  return (Eigen::AngleAxisd(az, Vec3::UnitZ()) * Eigen::AngleAxisd(ay, Vec3::UnitY()) *
          Eigen::AngleAxisd(ax, Vec3::UnitX()))
      .toRotationMatrix();
}

inline AtomicStructure transformed(const AtomicStructure& s, const Eigen::Matrix3d& R,
                                   const Vec3& t) {
  std::vector<Vec3> p = s.positions();
  for (auto& r : p) r = R * r + t;
  return s.with_positions(p);
}

} // namespace testsupport
