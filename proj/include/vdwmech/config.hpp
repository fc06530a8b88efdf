#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "vdwmech/chain_sweep.hpp"
#include "vdwmech/generators.hpp"
#include "vdwmech/md.hpp"
#include "vdwmech/model.hpp"
#include "vdwmech/protocol.hpp"

namespace vdwmech {

/// Where the starting structure comes from.
struct StructureSource {
  std::string generator = "chain"; // chain | cnt | pe | file
  std::string input;               // extended XYZ path for "file"
  ChainSpec chain;
  CntSpec cnt;
  PeCrystalSpec pe;
};

struct ModelSettings {
  VdwKind vdw = VdwKind::PW;
  bool bonded = true;
  bool repulsion = false;
  bool dihedrals = true;
  int vdw_exclusion_bonds = 0;
  double periodic_vdw_radius = 15.0;
  PwModelConfig pw;
  MbdModelConfig mbd;
  HarmonicConstants harmonic;
  std::map<std::string, double> bond_cutoffs{{"C-C", 1.8}, {"C-H", 1.3}};
};

struct ProtocolSettings {
  std::string kind = "displacement"; // displacement | cell_strain
  double increment = 0.1;
  int step_count = 10;
  int max_halvings = 4;
  bool halt_on_failure = true;
  std::vector<std::size_t> driven;
  std::string driven_group; // generator group name, used when `driven` is empty
  Vec3 direction = -Vec3::UnitZ();
  std::optional<double> reference_length;
  std::optional<double> face_area;
  bool tube_face_area = false; // cnt generator: area from the tube radius
  int component_a = 0, component_b = 0;
  std::string delta_kind = "length"; // length | fraction
  std::string mode = "fixed_others"; // fixed_others | relaxed_others
  bool diagonal_only = false;
  bool record_stress = true;
  double stress_strain_step = 1e-5;
};

struct MdSettings {
  double timestep = 1.0;
  double temperature = 300.0;
  std::string thermostat = "langevin"; // langevin | none
  double friction = 0.01;
  long total_steps = 1000;
  long runup_steps = 0;
  int sample_interval = 1;
  bool initial_velocities = true;
};

struct SweepSettings {
  std::vector<double> gaps{6.0, 8.0, 10.0, 14.0, 20.0};
  std::vector<int> n_upper{10, 50, 100, 200};
  int n_lower = 200;
  double spacing = 1.2;
};

/// Complete description of one run. Every field has a default; a config
/// file only lists what it changes.
struct RunConfig {
  std::uint64_t seed = 1;
  std::string output_dir = "vdwmech_out";
  std::string cell_relax = "none"; // none | diagonal | all: cell components relaxed by `relax`
  StructureSource structure;
  ModelSettings model;
  MinimizerConfig minimizer;
  ProtocolSettings protocol;
  MdSettings md;
  SweepSettings sweep;

  /// Throws InvalidInput on any out-of-range value.
  void validate() const;
};

/// Full config, defaults included. Keys are the field names above.
nlohmann::json to_json(const RunConfig& c);
/// Starts from defaults and applies `j`; unknown keys, wrong types and
/// invalid values throw InvalidInput naming the dotted key.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
std::string dump_config(const RunConfig& c);

/// Sets one dotted key ("model.vdw", "protocol.increment") from a command
/// line string; the text is read as JSON when it parses, else as a string.
void apply_override(RunConfig& c, const std::string& dotted_key, const std::string& value);

AtomicStructure build_structure(const RunConfig& c);
CompositeModel build_model(const RunConfig& c, const AtomicStructure& s);
LoadingProtocol build_protocol(const RunConfig& c, const AtomicStructure& s);
MdConfig build_md(const RunConfig& c);
/// The structure with the cell relax mask requested by cell_relax.
AtomicStructure with_cell_relax(const RunConfig& c, const AtomicStructure& s);

/// Named atom groups of the configured generator: chain "upper", "lower",
/// "upper_caps", "lower_caps"; cnt "top_ring", "bottom_ring"; any
/// generator "fixed" (every fully fixed atom).
std::vector<std::size_t> atom_group(const RunConfig& c, const AtomicStructure& s,
                                    const std::string& name);

} // namespace vdwmech
