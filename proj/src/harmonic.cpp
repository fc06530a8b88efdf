#include "vdwmech/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <set>
#include <sstream>

#include "vdwmech/errors.hpp"
#include "vdwmech/periodic.hpp"
#include "vdwmech/units.hpp"

namespace vdwmech {

namespace {

constexpr LatticeShift kZero{0, 0, 0};

bool is_zero(const LatticeShift& s) { return s[0] == 0 && s[1] == 0 && s[2] == 0; }

LatticeShift add(const LatticeShift& a, const LatticeShift& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

LatticeShift neg(const LatticeShift& a) { return {-a[0], -a[1], -a[2]}; }

Vec3 image_pos(const AtomicStructure& s, std::size_t idx, const LatticeShift& shift) {
  if (is_zero(shift)) return s.position(idx);
  if (!s.cell()) throw InvalidInput("topology uses lattice shifts but the structure has no cell");
  return s.position(idx) + s.cell()->translation(shift);
}

std::pair<std::string, std::string> key(const std::string& a, const std::string& b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

// sin(theta) below which a bond angle counts as collinear.
constexpr double kCollinearSin = 1e-6;

} // namespace

double wrap_angle(double x) {
  x = std::remainder(x, 2.0 * units::kPi);
  if (x <= -units::kPi) x += 2.0 * units::kPi;
  return x;
}

double bond_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 u = a - b, v = c - b;
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

double dihedral_angle(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const Vec3 b1 = b - a, b2 = c - b, b3 = d - c;
  const Vec3 n1 = b1.cross(b2), n2 = b2.cross(b3);
  const double l2 = b2.norm();
  if (n1.norm() < kCollinearSin * b1.norm() * l2 || n2.norm() < kCollinearSin * l2 * b3.norm())
    throw GeometryError("dihedral undefined: collinear inner angle");
  const double phi = std::atan2(l2 * b1.dot(n2), n1.dot(n2));
  return phi <= -units::kPi ? units::kPi : phi;
}

void HarmonicTopology::validate(std::size_t n) const {
  auto check = [n](std::size_t idx) {
    if (idx >= n) throw InvalidInput("topology index out of range");
  };
  for (const auto& b : bonds) {
    check(b.i);
    check(b.j);
    if (b.i == b.j && is_zero(b.sj)) throw InvalidInput("bond joins an atom to itself");
    if (!(b.r0 > 0.0)) throw InvalidInput("bond r0 must be > 0");
  }
  for (const auto& a : angles) {
    check(a.i);
    check(a.j);
    check(a.k);
    if ((a.i == a.j && is_zero(a.si)) || (a.k == a.j && is_zero(a.sk)) ||
        (a.i == a.k && a.si == a.sk))
      throw InvalidInput("angle repeats an atom");
    if (!(a.theta0 > 0.0 && a.theta0 <= units::kPi)) throw InvalidInput("angle theta0 out of (0, pi]");
  }
  for (const auto& d : dihedrals) {
    check(d.i);
    check(d.j);
    check(d.k);
    check(d.l);
    if (!(d.phi0 > -units::kPi && d.phi0 <= units::kPi))
      throw InvalidInput("dihedral phi0 out of (-pi, pi]");
  }
  if (!(constants.k_r >= 0.0 && constants.k_theta >= 0.0 && constants.k_phi >= 0.0))
    throw InvalidInput("force constants must be >= 0");
}

BondCutoffs BondCutoffs::defaults() {
  BondCutoffs c;
  c.set("C", "C", 1.8);
  c.set("C", "H", 1.3);
  return c;
}

void BondCutoffs::set(const std::string& a, const std::string& b, double length) {
  if (!(length > 0.0)) throw InvalidInput("bond cutoff must be > 0");
  m_[key(a, b)] = length;
}

std::optional<double> BondCutoffs::get(const std::string& a, const std::string& b) const {
  auto it = m_.find(key(a, b));
  if (it == m_.end()) return std::nullopt;
  return it->second;
}

double BondCutoffs::max_length() const {
  double m = 0.0;
  for (const auto& [k, v] : m_) m = std::max(m, v);
  return m;
}

HarmonicTopology detect_topology(const AtomicStructure& s, const BondCutoffs& cutoffs,
                                 const HarmonicConstants& constants) {
  HarmonicTopology topo;
  topo.constants = constants;
  const std::size_t n = s.size();
  if (n < 2 || cutoffs.max_length() <= 0.0) return topo;

  struct Neighbor {
    std::size_t atom;
    LatticeShift shift;
  };
  std::vector<std::vector<Neighbor>> adj(n);
  for (const auto& p : pairs_within(s, cutoffs.max_length())) {
    const auto cut = cutoffs.get(s.species(p.i), s.species(p.j));
    if (!cut || p.r.norm() > *cut) continue;
    if (p.i == p.j) {
      std::ostringstream os;
      os << "atom " << p.i << " bonds to its own periodic image; enlarge the cell";
      throw TopologyError(os.str());
    }
    topo.bonds.push_back({p.i, p.j, p.shift, p.r.norm()});
    adj[p.i].push_back({p.j, p.shift});
    adj[p.j].push_back({p.i, neg(p.shift)});
  }

  for (std::size_t i = 0; i < n; ++i) {
    const std::string& el = s.species(i);
    const std::size_t limit = el == "C" ? 4 : el == "H" ? 1 : adj[i].size();
    if (adj[i].size() > limit) {
      std::ostringstream os;
      os << "atom " << i << " (" << el << ") has " << adj[i].size() << " bonds (max " << limit
         << ")";
      throw TopologyError(os.str());
    }
  }

  for (std::size_t j = 0; j < n; ++j) {
    const Vec3 rj = s.position(j);
    for (std::size_t x = 0; x < adj[j].size(); ++x)
      for (std::size_t y = x + 1; y < adj[j].size(); ++y) {
        const auto& a = adj[j][x];
        const auto& c = adj[j][y];
        const double th =
            bond_angle(image_pos(s, a.atom, a.shift), rj, image_pos(s, c.atom, c.shift));
        topo.angles.push_back({a.atom, j, c.atom, a.shift, c.shift, th});
      }
  }

  auto collinear = [](const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 u = a - b, v = c - b;
    return u.cross(v).norm() < 1e-3 * u.norm() * v.norm();
  };
  for (const auto& b : topo.bonds) {
    const std::size_t j = b.i, k = b.j;
    const LatticeShift sk = b.sj;
    const Vec3 rj = s.position(j), rk = image_pos(s, k, sk);
    for (const auto& ni : adj[j]) {
      if (ni.atom == k && ni.shift == sk) continue;
      const Vec3 ri = image_pos(s, ni.atom, ni.shift);
      if (collinear(ri, rj, rk)) continue;
      for (const auto& nl : adj[k]) {
        const LatticeShift sl = add(sk, nl.shift);
        if (nl.atom == j && is_zero(sl)) continue;
        if (nl.atom == ni.atom && sl == ni.shift) continue; // three-membered ring
        const Vec3 rl = image_pos(s, nl.atom, sl);
        if (collinear(rj, rk, rl)) continue;
        topo.dihedrals.push_back(
            {ni.atom, j, k, nl.atom, ni.shift, sk, sl, dihedral_angle(ri, rj, rk, rl)});
      }
    }
  }
  return topo;
}

HarmonicResult harmonic_evaluate(const AtomicStructure& s, const HarmonicTopology& topo,
                                 bool with_forces) {
  topo.validate(s.size());
  HarmonicResult out;
  std::vector<Vec3> grad;
  if (with_forces) grad.assign(s.size(), Vec3::Zero());
  const auto& K = topo.constants;

  for (const auto& b : topo.bonds) {
    const Vec3 xi = s.position(b.i), xj = image_pos(s, b.j, b.sj);
    const Vec3 d = xj - xi;
    const double r = d.norm();
    if (r == 0.0) throw GeometryError("bond of zero length");
    const double dr = r - b.r0;
    out.bond_energy += 0.5 * K.k_r * dr * dr;
    if (with_forces) {
      const Vec3 g = K.k_r * dr / r * d; // dE/dxj
      grad[b.j] += g;
      grad[b.i] -= g;
      out.virial += g * d.transpose();
    }
  }

  for (const auto& a : topo.angles) {
    const Vec3 xj = s.position(a.j);
    const Vec3 u = image_pos(s, a.i, a.si) - xj, v = image_pos(s, a.k, a.sk) - xj;
    const double lu = u.norm(), lv = v.norm();
    if (lu == 0.0 || lv == 0.0) throw GeometryError("angle with zero-length arm");
    const double sn = u.cross(v).norm() / (lu * lv);
    const double cs = u.dot(v) / (lu * lv);
    const double th = std::atan2(sn, cs);
    const double dth = th - a.theta0;
    out.angle_energy += 0.5 * K.k_theta * dth * dth;
    if (!with_forces) continue;
    // ratio = (theta - theta0) / sin(theta), finite at theta = theta0 = pi.
    double ratio;
    if (sn > 1e-8) {
      ratio = dth / sn;
    } else if (std::abs(a.theta0 - units::kPi) < 1e-6 && cs < 0.0) {
      ratio = -1.0;
    } else {
      throw GeometryError("angle gradient undefined at a collinear triple");
    }
    const Vec3 uh = u / lu, vh = v / lv;
    const Vec3 gi = K.k_theta * ratio * (cs * uh - vh) / lu;
    const Vec3 gk = K.k_theta * ratio * (cs * vh - uh) / lv;
    grad[a.i] += gi;
    grad[a.k] += gk;
    grad[a.j] -= gi + gk;
    out.virial += gi * u.transpose() + gk * v.transpose();
  }

  if (topo.include_dihedrals) {
    for (const auto& d : topo.dihedrals) {
      const Vec3 xj = s.position(d.j);
      const Vec3 xi = image_pos(s, d.i, d.si), xk = image_pos(s, d.k, d.sk),
                 xl = image_pos(s, d.l, d.sl);
      const double phi = dihedral_angle(xi, xj, xk, xl);
      const double dphi = wrap_angle(phi - d.phi0);
      out.dihedral_energy += 0.5 * K.k_phi * dphi * dphi;
      if (!with_forces) continue;
      const Vec3 b1 = xj - xi, b2 = xk - xj, b3 = xl - xk;
      const Vec3 n1 = b1.cross(b2), n2 = b2.cross(b3);
      const double l2sq = b2.squaredNorm(), l2 = std::sqrt(l2sq);
      const Vec3 di = -l2 / n1.squaredNorm() * n1;
      const Vec3 dl = l2 / n2.squaredNorm() * n2;
      const double p = b1.dot(b2) / l2sq, q = b3.dot(b2) / l2sq;
      const Vec3 dj = -(1.0 + p) * di + q * dl;
      const Vec3 dk = p * di - (1.0 + q) * dl;
      const double c = K.k_phi * dphi;
      grad[d.i] += c * di;
      grad[d.j] += c * dj;
      grad[d.k] += c * dk;
      grad[d.l] += c * dl;
      out.virial += c * (di * (xi - xj).transpose() + dk * (xk - xj).transpose() +
                         dl * (xl - xj).transpose());
    }
  }

  out.energy = out.bond_energy + out.angle_energy + out.dihedral_energy;
  if (with_forces) {
    out.forces.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out.forces[i] = -grad[i];
  }
  return out;
}

double harmonic_energy(const AtomicStructure& s, const HarmonicTopology& topo) {
  return harmonic_evaluate(s, topo, false).energy;
}

std::vector<Vec3> harmonic_forces(const AtomicStructure& s, const HarmonicTopology& topo) {
  return harmonic_evaluate(s, topo, true).forces;
}

void write_topology(std::ostream& out, const HarmonicTopology& t) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17);
  os << "# harmonic topology\n";
  os << "constants " << t.constants.k_r << ' ' << t.constants.k_theta << ' ' << t.constants.k_phi
     << '\n';
  os << "include_dihedrals " << (t.include_dihedrals ? 1 : 0) << '\n';
  auto sh = [&os](const LatticeShift& s) { os << ' ' << s[0] << ' ' << s[1] << ' ' << s[2]; };
  for (const auto& b : t.bonds) {
    os << "bond " << b.i << ' ' << b.j;
    sh(b.sj);
    os << ' ' << b.r0 << '\n';
  }
  for (const auto& a : t.angles) {
    os << "angle " << a.i << ' ' << a.j << ' ' << a.k;
    sh(a.si);
    sh(a.sk);
    os << ' ' << a.theta0 << '\n';
  }
  for (const auto& d : t.dihedrals) {
    os << "dihedral " << d.i << ' ' << d.j << ' ' << d.k << ' ' << d.l;
    sh(d.si);
    sh(d.sk);
    sh(d.sl);
    os << ' ' << d.phi0 << '\n';
  }
  out << os.str();
}

HarmonicTopology read_topology(std::istream& in) {
  HarmonicTopology t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    ls.imbue(std::locale::classic());
    std::string tag;
    if (!(ls >> tag)) continue;
    auto shift = [&ls]() {
      LatticeShift s{};
      ls >> s[0] >> s[1] >> s[2];
      return s;
    };
    if (tag == "constants") {
      ls >> t.constants.k_r >> t.constants.k_theta >> t.constants.k_phi;
    } else if (tag == "include_dihedrals") {
      int v = 0;
      ls >> v;
      t.include_dihedrals = v != 0;
    } else if (tag == "bond") {
      Bond b;
      ls >> b.i >> b.j;
      b.sj = shift();
      ls >> b.r0;
      t.bonds.push_back(b);
    } else if (tag == "angle") {
      Angle a;
      ls >> a.i >> a.j >> a.k;
      a.si = shift();
      a.sk = shift();
      ls >> a.theta0;
      t.angles.push_back(a);
    } else if (tag == "dihedral") {
      Dihedral d;
      ls >> d.i >> d.j >> d.k >> d.l;
      d.si = shift();
      d.sk = shift();
      d.sl = shift();
      ls >> d.phi0;
      t.dihedrals.push_back(d);
    } else {
      throw ParseError(lineno, "unknown topology record '" + tag + "'");
    }
    if (ls.fail()) throw ParseError(lineno, "malformed '" + tag + "' record");
    std::string extra;
    if (ls >> extra) throw ParseError(lineno, "trailing field '" + extra + "'");
  }
  return t;
}

// Contact repulsion ---------------------------------------------------------

namespace {

std::array<long long, 5> pair_key(std::size_t i, std::size_t j, LatticeShift s) {
  if (i > j) {
    std::swap(i, j);
    s = neg(s);
  } else if (i == j) {
    // Keep the lexicographically positive representative.
    for (int k = 0; k < 3; ++k) {
      if (s[k] > 0) break;
      if (s[k] < 0) {
        s = neg(s);
        break;
      }
    }
  }
  return {(long long)i, (long long)j, s[0], s[1], s[2]};
}

} // namespace

BondedPairs::BondedPairs(std::size_t atom_count, const HarmonicTopology& topo, int max_bonds)
    : max_bonds_(max_bonds) {
  if (max_bonds < 0) throw InvalidInput("bond separation must be >= 0");
  topo.validate(atom_count);
  struct Neighbor {
    std::size_t atom;
    LatticeShift shift;
  };
  std::vector<std::vector<Neighbor>> adj(atom_count);
  for (const auto& b : topo.bonds) {
    adj[b.i].push_back({b.j, b.sj});
    adj[b.j].push_back({b.i, neg(b.sj)});
  }
  std::set<std::array<long long, 5>> keys;
  for (std::size_t i = 0; i < atom_count; ++i) {
    // Breadth-first walk over atom copies.
    std::set<std::pair<std::size_t, LatticeShift>> seen{{i, kZero}};
    std::vector<std::pair<std::size_t, LatticeShift>> frontier{{i, kZero}};
    for (int depth = 0; depth < max_bonds; ++depth) {
      std::vector<std::pair<std::size_t, LatticeShift>> next;
      for (const auto& [a, sa] : frontier)
        for (const auto& nb : adj[a]) {
          std::pair<std::size_t, LatticeShift> c{nb.atom, add(sa, nb.shift)};
          if (seen.insert(c).second) next.push_back(c);
        }
      frontier = std::move(next);
    }
    for (const auto& [j, sj] : seen)
      if (!(j == i && is_zero(sj))) keys.insert(pair_key(i, j, sj));
  }
  keys_.assign(keys.begin(), keys.end());
}

bool BondedPairs::contains(std::size_t i, std::size_t j, const LatticeShift& shift) const {
  return std::binary_search(keys_.begin(), keys_.end(), pair_key(i, j, shift));
}

std::map<std::pair<std::string, std::string>, RepulsionParams> ContactRepulsion::default_params() {
  return {{{"C", "C"}, {3626.0, 3.60}}, {{"H", "H"}, {115.0, 3.74}}, {{"C", "H"}, {380.0, 3.67}}};
}

ContactRepulsion::ContactRepulsion(
    const AtomicStructure& s, const HarmonicTopology& topo,
    std::map<std::pair<std::string, std::string>, RepulsionParams> params, double cutoff)
    : cutoff_(cutoff), atom_count_(s.size()) {
  if (!(cutoff > 0.0)) throw InvalidInput("repulsion cutoff must be > 0");
  for (const auto& [k, v] : params) {
    if (!(v.a >= 0.0 && v.b > 0.0)) throw InvalidInput("repulsion parameters must be positive");
    params_[key(k.first, k.second)] = v;
  }
  excluded_ = BondedPairs(s.size(), topo, 3);
}

const RepulsionParams* ContactRepulsion::lookup(const std::string& a, const std::string& b) const {
  auto it = params_.find(key(a, b));
  return it == params_.end() ? nullptr : &it->second;
}

ContactRepulsion::Result ContactRepulsion::evaluate(const AtomicStructure& s,
                                                    bool with_forces) const {
  if (s.size() != atom_count_) throw InvalidInput("repulsion built for a different atom count");
  Result out;
  if (with_forces) out.forces.assign(s.size(), Vec3::Zero());
  const double rc = cutoff_;
  for (const auto& p : pairs_within(s, rc)) {
    if (excluded(p.i, p.j, p.shift)) continue;
    const RepulsionParams* prm = lookup(s.species(p.i), s.species(p.j));
    if (!prm || prm->a == 0.0) continue;
    const double r = p.r.norm();
    if (r < s.overlap_guard()) throw GeometryError("repulsion: atoms closer than the overlap guard");
    // Force-shifted: phi(r) - phi(rc) - phi'(rc) (r - rc).
    const double ec = prm->a * std::exp(-prm->b * rc);
    const double e = prm->a * std::exp(-prm->b * r);
    out.energy += e - ec + prm->b * ec * (r - rc);
    if (with_forces) {
      const double dphi = -prm->b * e + prm->b * ec; // d/dr
      const Vec3 g = dphi / r * p.r;                 // dE/dx_j
      out.forces[p.j] -= g;
      out.forces[p.i] += g;
      out.virial += g * p.r.transpose();
    }
  }
  return out;
}

} // namespace vdwmech
