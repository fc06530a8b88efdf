#include "vdwmech/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "vdwmech/errors.hpp"
#include "vdwmech/xyz.hpp"

namespace vdwmech {

using nlohmann::json;

namespace {

const std::set<std::string> kGenerators{"chain", "cnt", "pe", "file"};
const std::set<std::string> kProtocolKinds{"displacement", "cell_strain"};
const std::set<std::string> kDeltaKinds{"length", "fraction"};
const std::set<std::string> kStrainModes{"fixed_others", "relaxed_others"};
const std::set<std::string> kThermostats{"langevin", "none"};
const std::set<std::string> kCellRelax{"none", "diagonal", "all"};

// Reads the keys of one JSON object into fields; finish() rejects the keys
// nobody asked for.
class Section {
public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw InvalidInput(fmt::format("config '{}' must be an object", where()));
  }

  template <class T>
  void get(const std::string& key, T& out) {
    const json* v = find(key);
    if (!v) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v->is_boolean()) throw InvalidInput("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v->is_number_integer()) throw InvalidInput("");
        if constexpr (std::is_unsigned_v<T>)
          if (v->is_number_integer() && !v->is_number_unsigned()) throw InvalidInput("");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v->is_number()) throw InvalidInput("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v->is_string()) throw InvalidInput("");
      }
      out = v->get<T>();
    } catch (const std::exception&) {
      throw InvalidInput(fmt::format("config key '{}' has the wrong type", name(key)));
    }
  }

  void get_optional(const std::string& key, std::optional<double>& out) {
    const json* v = find(key);
    if (!v) return;
    if (v->is_null()) {
      out.reset();
      return;
    }
    double x = 0.0;
    get(key, x);
    out = x;
  }

  void get_vec3(const std::string& key, Vec3& out) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_array() || v->size() != 3)
      throw InvalidInput(fmt::format("config key '{}' needs 3 numbers", name(key)));
    for (int k = 0; k < 3; ++k) {
      if (!(*v)[k].is_number())
        throw InvalidInput(fmt::format("config key '{}' needs 3 numbers", name(key)));
      out[k] = (*v)[k].get<double>();
    }
  }

  template <class T>
  void get_list(const std::string& key, std::vector<T>& out) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_array()) throw InvalidInput(fmt::format("config key '{}' needs a list", name(key)));
    std::vector<T> tmp;
    for (const auto& e : *v) {
      const bool ok = std::is_integral_v<T> ? e.is_number_integer() && !(std::is_unsigned_v<T> &&
                                                                          !e.is_number_unsigned())
                                            : e.is_number();
      if (!ok) throw InvalidInput(fmt::format("config key '{}' has a wrong list entry", name(key)));
      tmp.push_back(e.get<T>());
    }
    out = std::move(tmp);
  }

  void get_map(const std::string& key, std::map<std::string, double>& out) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_object()) throw InvalidInput(fmt::format("config key '{}' must be an object", name(key)));
    std::map<std::string, double> tmp;
    for (const auto& [k, e] : v->items()) {
      if (!e.is_number())
        throw InvalidInput(fmt::format("config key '{}.{}' must be a number", name(key), k));
      tmp[k] = e.get<double>();
    }
    out = std::move(tmp);
  }

  Section sub(const std::string& key) {
    const json* v = find(key);
    static const json empty = json::object();
    return Section(v ? *v : empty, name(key));
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw InvalidInput(fmt::format("unknown config key '{}'", name(k)));
  }

private:
  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "<root>" : path_; }

  json j_;
  std::string path_;
  std::set<std::string> seen_;
};

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

std::pair<std::string, std::string> split_pair(const std::string& key) {
  const auto dash = key.find('-');
  if (dash == std::string::npos || dash == 0 || dash + 1 == key.size())
    throw InvalidInput("bond cutoff key '" + key + "' must look like C-H");
  return {key.substr(0, dash), key.substr(dash + 1)};
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidInput(msg);
}

} // namespace

void RunConfig::validate() const {
  require(!output_dir.empty(), "output_dir must not be empty");
  require(kCellRelax.count(cell_relax) > 0, "cell_relax must be none, diagonal or all");
  require(kGenerators.count(structure.generator) > 0,
          "structure.generator must be chain, cnt, pe or file");
  if (structure.generator == "file")
    require(!structure.input.empty(), "structure.input is required for generator 'file'");
  structure.chain.validate();
  structure.cnt.validate();
  structure.pe.validate();

  model.pw.validate();
  model.mbd.validate();
  require(model.bonded || model.repulsion || model.vdw != VdwKind::None,
          "model has no active energy component");
  require(model.vdw_exclusion_bonds >= 0 && model.vdw_exclusion_bonds <= 3,
          "model.vdw_exclusion_bonds must be in 0..3");
  require(model.vdw_exclusion_bonds == 0 || model.bonded,
          "model.vdw_exclusion_bonds needs model.bonded");
  require(model.periodic_vdw_radius > 0.0, "model.periodic_vdw_radius must be > 0");
  require(model.harmonic.k_r >= 0.0 && model.harmonic.k_theta >= 0.0 && model.harmonic.k_phi >= 0.0,
          "model.harmonic constants must be >= 0");
  for (const auto& [k, v] : model.bond_cutoffs) {
    const auto [a, b] = split_pair(k);
    require(is_known_element(a) && is_known_element(b), "bond cutoff '" + k + "' names an unknown element");
    require(v > 0.0, "bond cutoff '" + k + "' must be > 0");
  }

  minimizer.validate();

  require(kProtocolKinds.count(protocol.kind) > 0,
          "protocol.kind must be displacement or cell_strain");
  require(protocol.step_count >= 1, "protocol.step_count must be >= 1");
  require(std::isfinite(protocol.increment), "protocol.increment must be finite");
  require(protocol.max_halvings >= 0, "protocol.max_halvings must be >= 0");
  require(protocol.direction.norm() > 0.0, "protocol.direction must be nonzero");
  require(!protocol.reference_length || *protocol.reference_length > 0.0,
          "protocol.reference_length must be > 0");
  require(!protocol.face_area || *protocol.face_area > 0.0, "protocol.face_area must be > 0");
  require(protocol.component_a >= 0 && protocol.component_a <= 2 && protocol.component_b >= 0 &&
              protocol.component_b <= 2,
          "protocol cell components must be in 0..2");
  require(kDeltaKinds.count(protocol.delta_kind) > 0, "protocol.delta_kind must be length or fraction");
  require(kStrainModes.count(protocol.mode) > 0,
          "protocol.mode must be fixed_others or relaxed_others");
  require(protocol.stress_strain_step > 0.0, "protocol.stress_strain_step must be > 0");

  require(kThermostats.count(md.thermostat) > 0, "md.thermostat must be langevin or none");
  build_md(*this).validate();

  require(!sweep.gaps.empty() && !sweep.n_upper.empty(), "sweep lists must not be empty");
  for (double h : sweep.gaps) require(h > 0.0, "sweep.gaps must be > 0");
  for (int n : sweep.n_upper) require(n >= 1, "sweep.n_upper must be >= 1");
  require(sweep.n_lower >= 1, "sweep.n_lower must be >= 1");
  require(sweep.spacing > 0.0, "sweep.spacing must be > 0");
}

json to_json(const RunConfig& c) {
  const auto& s = c.structure;
  const auto& m = c.model;
  const auto& p = c.protocol;
  json j;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["cell_relax"] = c.cell_relax;
  j["structure"] = {
      {"generator", s.generator},
      {"input", s.input},
      {"chain",
       {{"n_upper", s.chain.n_upper},
        {"n_lower", s.chain.n_lower},
        {"spacing", s.chain.spacing},
        {"gap", s.chain.gap},
        {"hydrogen_caps", s.chain.hydrogen_caps},
        {"cap_length", s.chain.cap_length}}},
      {"cnt",
       {{"n", s.cnt.n},
        {"m", s.cnt.m},
        {"rings", s.cnt.rings},
        {"bond_length", s.cnt.bond_length},
        {"fix_end_rings", s.cnt.fix_end_rings},
        {"periodic_axis", s.cnt.periodic_axis}}},
      {"pe",
       {{"nx", s.pe.nx},
        {"ny", s.pe.ny},
        {"nz", s.pe.nz},
        {"a", s.pe.a},
        {"b", s.pe.b},
        {"c", s.pe.c},
        {"cc_bond", s.pe.cc_bond},
        {"ch_bond", s.pe.ch_bond},
        {"hch_angle_deg", s.pe.hch_angle_deg},
        {"setting_angle_deg", s.pe.setting_angle_deg}}}};
  j["model"] = {
      {"vdw", to_string(m.vdw)},
      {"bonded", m.bonded},
      {"repulsion", m.repulsion},
      {"dihedrals", m.dihedrals},
      {"vdw_exclusion_bonds", m.vdw_exclusion_bonds},
      {"periodic_vdw_radius", m.periodic_vdw_radius},
      {"pw", {{"d", m.pw.d}, {"gamma", m.pw.gamma}, {"cutoff", opt(m.pw.cutoff)}}},
      {"mbd",
       {{"beta", m.mbd.beta},
        {"replica_shells", m.mbd.replica_shells},
        {"replica_radius", opt(m.mbd.replica_radius)},
        {"eigenvalue_floor", m.mbd.eigenvalue_floor}}},
      {"harmonic",
       {{"k_r", m.harmonic.k_r}, {"k_theta", m.harmonic.k_theta}, {"k_phi", m.harmonic.k_phi}}},
      {"bond_cutoffs", m.bond_cutoffs}};
  j["minimizer"] = {{"algorithm", to_string(c.minimizer.algorithm)},
                    {"force_tolerance", c.minimizer.force_tolerance},
                    {"max_iterations", c.minimizer.max_iterations},
                    {"initial_step", c.minimizer.initial_step},
                    {"dt_start", c.minimizer.dt_start},
                    {"dt_max", c.minimizer.dt_max},
                    {"relax_cell", c.minimizer.relax_cell},
                    {"lbfgs_memory", c.minimizer.lbfgs_memory}};
  j["protocol"] = {{"kind", p.kind},
                   {"increment", p.increment},
                   {"step_count", p.step_count},
                   {"max_halvings", p.max_halvings},
                   {"halt_on_failure", p.halt_on_failure},
                   {"driven", p.driven},
                   {"driven_group", p.driven_group},
                   {"direction", vec(p.direction)},
                   {"reference_length", opt(p.reference_length)},
                   {"face_area", opt(p.face_area)},
                   {"tube_face_area", p.tube_face_area},
                   {"component_a", p.component_a},
                   {"component_b", p.component_b},
                   {"delta_kind", p.delta_kind},
                   {"mode", p.mode},
                   {"diagonal_only", p.diagonal_only},
                   {"record_stress", p.record_stress},
                   {"stress_strain_step", p.stress_strain_step}};
  j["md"] = {{"timestep", c.md.timestep},
             {"temperature", c.md.temperature},
             {"thermostat", c.md.thermostat},
             {"friction", c.md.friction},
             {"total_steps", c.md.total_steps},
             {"runup_steps", c.md.runup_steps},
             {"sample_interval", c.md.sample_interval},
             {"initial_velocities", c.md.initial_velocities}};
  j["sweep"] = {{"gaps", c.sweep.gaps},
                {"n_upper", c.sweep.n_upper},
                {"n_lower", c.sweep.n_lower},
                {"spacing", c.sweep.spacing}};
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  Section root(j, "");
  root.get("seed", c.seed);
  root.get("output_dir", c.output_dir);
  root.get("cell_relax", c.cell_relax);
  {
    auto& s = c.structure;
    Section st = root.sub("structure");
    st.get("generator", s.generator);
    st.get("input", s.input);
    Section ch = st.sub("chain");
    ch.get("n_upper", s.chain.n_upper);
    ch.get("n_lower", s.chain.n_lower);
    ch.get("spacing", s.chain.spacing);
    ch.get("gap", s.chain.gap);
    ch.get("hydrogen_caps", s.chain.hydrogen_caps);
    ch.get("cap_length", s.chain.cap_length);
    ch.finish();
    Section cn = st.sub("cnt");
    cn.get("n", s.cnt.n);
    cn.get("m", s.cnt.m);
    cn.get("rings", s.cnt.rings);
    cn.get("bond_length", s.cnt.bond_length);
    cn.get("fix_end_rings", s.cnt.fix_end_rings);
    cn.get("periodic_axis", s.cnt.periodic_axis);
    cn.finish();
    Section pe = st.sub("pe");
    pe.get("nx", s.pe.nx);
    pe.get("ny", s.pe.ny);
    pe.get("nz", s.pe.nz);
    pe.get("a", s.pe.a);
    pe.get("b", s.pe.b);
    pe.get("c", s.pe.c);
    pe.get("cc_bond", s.pe.cc_bond);
    pe.get("ch_bond", s.pe.ch_bond);
    pe.get("hch_angle_deg", s.pe.hch_angle_deg);
    pe.get("setting_angle_deg", s.pe.setting_angle_deg);
    pe.finish();
    st.finish();
  }
  {
    auto& m = c.model;
    Section md = root.sub("model");
    std::string vdw = to_string(m.vdw);
    md.get("vdw", vdw);
    m.vdw = parse_vdw_kind(vdw);
    md.get("bonded", m.bonded);
    md.get("repulsion", m.repulsion);
    md.get("dihedrals", m.dihedrals);
    md.get("vdw_exclusion_bonds", m.vdw_exclusion_bonds);
    md.get("periodic_vdw_radius", m.periodic_vdw_radius);
    Section pw = md.sub("pw");
    pw.get("d", m.pw.d);
    pw.get("gamma", m.pw.gamma);
    pw.get_optional("cutoff", m.pw.cutoff);
    pw.finish();
    Section mb = md.sub("mbd");
    mb.get("beta", m.mbd.beta);
    mb.get("replica_shells", m.mbd.replica_shells);
    mb.get_optional("replica_radius", m.mbd.replica_radius);
    mb.get("eigenvalue_floor", m.mbd.eigenvalue_floor);
    mb.finish();
    Section h = md.sub("harmonic");
    h.get("k_r", m.harmonic.k_r);
    h.get("k_theta", m.harmonic.k_theta);
    h.get("k_phi", m.harmonic.k_phi);
    h.finish();
    md.get_map("bond_cutoffs", m.bond_cutoffs);
    md.finish();
  }
  {
    auto& mc = c.minimizer;
    Section mi = root.sub("minimizer");
    std::string algo = to_string(mc.algorithm);
    mi.get("algorithm", algo);
    mc.algorithm = parse_minimizer_algorithm(algo);
    mi.get("force_tolerance", mc.force_tolerance);
    mi.get("max_iterations", mc.max_iterations);
    mi.get("initial_step", mc.initial_step);
    mi.get("dt_start", mc.dt_start);
    mi.get("dt_max", mc.dt_max);
    mi.get("relax_cell", mc.relax_cell);
    mi.get("lbfgs_memory", mc.lbfgs_memory);
    mi.finish();
  }
  {
    auto& p = c.protocol;
    Section pr = root.sub("protocol");
    pr.get("kind", p.kind);
    pr.get("increment", p.increment);
    pr.get("step_count", p.step_count);
    pr.get("max_halvings", p.max_halvings);
    pr.get("halt_on_failure", p.halt_on_failure);
    pr.get_list("driven", p.driven);
    pr.get("driven_group", p.driven_group);
    pr.get_vec3("direction", p.direction);
    pr.get_optional("reference_length", p.reference_length);
    pr.get_optional("face_area", p.face_area);
    pr.get("tube_face_area", p.tube_face_area);
    pr.get("component_a", p.component_a);
    pr.get("component_b", p.component_b);
    pr.get("delta_kind", p.delta_kind);
    pr.get("mode", p.mode);
    pr.get("diagonal_only", p.diagonal_only);
    pr.get("record_stress", p.record_stress);
    pr.get("stress_strain_step", p.stress_strain_step);
    pr.finish();
  }
  {
    Section md = root.sub("md");
    md.get("timestep", c.md.timestep);
    md.get("temperature", c.md.temperature);
    md.get("thermostat", c.md.thermostat);
    md.get("friction", c.md.friction);
    md.get("total_steps", c.md.total_steps);
    md.get("runup_steps", c.md.runup_steps);
    md.get("sample_interval", c.md.sample_interval);
    md.get("initial_velocities", c.md.initial_velocities);
    md.finish();
  }
  {
    Section sw = root.sub("sweep");
    sw.get_list("gaps", c.sweep.gaps);
    sw.get_list("n_upper", c.sweep.n_upper);
    sw.get("n_lower", c.sweep.n_lower);
    sw.get("spacing", c.sweep.spacing);
    sw.finish();
  }
  root.finish();
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

std::string dump_config(const RunConfig& c) { return to_json(c).dump(2); }

void apply_override(RunConfig& c, const std::string& dotted_key, const std::string& value) {
  json j = to_json(c);
  json* node = &j;
  std::stringstream ss(dotted_key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw InvalidInput("empty override key");
  for (std::size_t k = 0; k + 1 < parts.size(); ++k) {
    if (!node->is_object() || !node->contains(parts[k]))
      throw InvalidInput("unknown config key '" + dotted_key + "'");
    node = &(*node)[parts[k]];
  }
  // Maps such as model.bond_cutoffs accept new entries; everything else
  // must already exist.
  const bool open_map = parts.size() == 3 && parts[0] == "model" && parts[1] == "bond_cutoffs";
  if (!node->is_object() || (!open_map && !node->contains(parts.back())))
    throw InvalidInput("unknown config key '" + dotted_key + "'");
  json v;
  try {
    v = json::parse(value);
  } catch (const json::parse_error&) {
    v = value;
  }
  (*node)[parts.back()] = v;
  c = config_from_json(j);
}

AtomicStructure build_structure(const RunConfig& c) {
  const auto& s = c.structure;
  if (s.generator == "chain") return make_chain_pair(s.chain);
  if (s.generator == "cnt") return make_swcnt(s.cnt);
  if (s.generator == "pe") return make_pe_crystal(s.pe);
  if (s.generator == "file") return read_xyz(s.input);
  throw InvalidInput("unknown generator '" + s.generator + "'");
}

CompositeModel build_model(const RunConfig& c, const AtomicStructure& s) {
  const auto& m = c.model;
  BondCutoffs cut;
  for (const auto& [k, v] : m.bond_cutoffs) {
    const auto [a, b] = split_pair(k);
    cut.set(a, b, v);
  }
  CompositeModel model = CompositeModel::build(s, m.vdw, m.bonded, m.repulsion, cut, m.harmonic);
  if (model.bonded) model.bonded->include_dihedrals = m.dihedrals;
  model.pw = m.pw;
  model.mbd = m.mbd;
  model.periodic_vdw_radius = m.periodic_vdw_radius;
  if (m.vdw_exclusion_bonds > 0) model.exclude_bonded_vdw(s.size(), m.vdw_exclusion_bonds);
  model.validate();
  return model;
}

std::vector<std::size_t> atom_group(const RunConfig& c, const AtomicStructure& s,
                                    const std::string& name) {
  std::vector<std::size_t> out;
  if (name == "fixed") {
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s.constraints()[i] == FixMask::all()) out.push_back(i);
    return out;
  }
  const std::string& gen = c.structure.generator;
  if (gen == "chain") {
    const ChainGroups g = chain_groups(c.structure.chain);
    if (name == "upper") return g.upper;
    if (name == "lower") return g.lower;
    if (name == "upper_caps") return g.upper_caps;
    if (name == "lower_caps") return g.lower_caps;
  } else if (gen == "cnt" && (name == "top_ring" || name == "bottom_ring")) {
    CntGeometry geo;
    make_swcnt(c.structure.cnt, &geo);
    const int want = name == "top_ring" ? c.structure.cnt.rings - 1 : 0;
    if (geo.unit_index.size() != s.size())
      throw InvalidInput("structure does not match the nanotube generator");
    for (std::size_t i = 0; i < s.size(); ++i)
      if (geo.unit_index[i] == want) out.push_back(i);
    return out;
  }
  throw InvalidInput("unknown atom group '" + name + "' for generator '" + gen + "'");
}

LoadingProtocol build_protocol(const RunConfig& c, const AtomicStructure& s) {
  const auto& p = c.protocol;
  LoadingProtocol lp;
  lp.kind = p.kind == "cell_strain" ? LoadingKind::CellStrain : LoadingKind::Displacement;
  lp.increment = p.increment;
  lp.step_count = p.step_count;
  lp.minimizer = c.minimizer;
  lp.max_halvings = p.max_halvings;
  lp.halt_on_failure = p.halt_on_failure;
  lp.driven = p.driven;
  if (lp.kind == LoadingKind::Displacement && lp.driven.empty() && !p.driven_group.empty())
    lp.driven = atom_group(c, s, p.driven_group);
  lp.direction = p.direction;
  lp.reference_length = p.reference_length;
  lp.face_area = p.face_area;
  if (p.tube_face_area) {
    if (c.structure.generator != "cnt")
      throw InvalidInput("protocol.tube_face_area needs the cnt generator");
    lp.face_area = vdwmech::tube_face_area(
        swcnt_radius(c.structure.cnt.n, c.structure.cnt.m, c.structure.cnt.bond_length));
  }
  lp.component_a = p.component_a;
  lp.component_b = p.component_b;
  lp.delta_kind = p.delta_kind == "fraction" ? StrainDelta::Fraction : StrainDelta::Length;
  lp.mode = p.mode == "relaxed_others" ? StrainMode::RelaxedOthers : StrainMode::FixedOthers;
  lp.diagonal_only = p.diagonal_only;
  lp.record_stress = p.record_stress;
  lp.stress_strain_step = p.stress_strain_step;
  lp.validate(s);
  return lp;
}

MdConfig build_md(const RunConfig& c) {
  MdConfig m;
  m.timestep = c.md.timestep;
  m.temperature = c.md.temperature;
  m.thermostat = c.md.thermostat == "none" ? Thermostat::None : Thermostat::Langevin;
  m.friction = c.md.friction;
  m.total_steps = c.md.total_steps;
  m.runup_steps = c.md.runup_steps;
  m.sample_interval = c.md.sample_interval;
  m.initial_velocities = c.md.initial_velocities;
  m.seed = c.seed;
  return m;
}

AtomicStructure with_cell_relax(const RunConfig& c, const AtomicStructure& s) {
  if (c.cell_relax == "none" || !s.cell()) return s;
  const CellTensor& cell = *s.cell();
  CellTensor::ComponentMask m{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      m[a][b] = cell.is_periodic(a) && cell.is_periodic(b) && (a == b || c.cell_relax == "all");
  return s.with_cell(cell.with_relax_mask(m));
}

} // namespace vdwmech
