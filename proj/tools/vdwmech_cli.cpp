#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "vdwmech/config.hpp"
#include "vdwmech/errors.hpp"
#include "vdwmech/records.hpp"
#include "vdwmech/xyz.hpp"

namespace fs = std::filesystem;
using namespace vdwmech;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kNumerical = 2;

const char* const kUsage =
    "usage: vdwmech <command> --config <file> [options]\n"
    "commands: generate energy forces relax quasistatic md chain-sweep\n";

// One diagnostic per line: error kind=<kind> message="<text>".
void diagnose(const std::string& kind, const std::string& msg) {
  std::string esc;
  for (char ch : msg) {
    if (ch == '"' || ch == '\\') esc += '\\';
    esc += ch == '\n' ? ' ' : ch;
  }
  fmt::print(std::cerr, "error kind={} message=\"{}\"\n", kind, esc);
}

struct Options {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> vdw, input, output_dir;
  std::optional<int> steps;
  std::optional<double> increment;
};

RunConfig resolve(const Options& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InvalidInput("--set expects key=value, got '" + kv + "'");
    apply_override(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed) c.seed = *o.seed;
  if (o.vdw) c.model.vdw = parse_vdw_kind(*o.vdw);
  if (o.input) c.structure.generator = "file", c.structure.input = *o.input;
  if (o.output_dir) c.output_dir = *o.output_dir;
  if (o.steps) c.protocol.step_count = *o.steps, c.md.total_steps = *o.steps;
  if (o.increment) c.protocol.increment = *o.increment;
  c.validate();
  return c;
}

class Run {
public:
  Run(std::string command, RunConfig cfg) : command_(std::move(command)), cfg_(std::move(cfg)) {
    fs::create_directories(cfg_.output_dir);
  }
  const RunConfig& cfg() const { return cfg_; }
  fs::path out(const std::string& name) {
    outputs_.push_back(name);
    return fs::path(cfg_.output_dir) / name;
  }
  void write_manifest(const std::string& status) {
    nlohmann::json m;
    m["command"] = command_;
    m["seed"] = cfg_.seed;
    m["status"] = status;
    m["outputs"] = outputs_;
    m["config"] = to_json(cfg_);
    std::ofstream f(fs::path(cfg_.output_dir) / "manifest.json", std::ios::binary);
    f << m.dump(2) << '\n';
    if (!f) throw InvalidInput("cannot write manifest in '" + cfg_.output_dir + "'");
  }

private:
  std::string command_;
  RunConfig cfg_;
  std::vector<std::string> outputs_;
};

int cmd_generate(Run& run) {
  const AtomicStructure s = build_structure(run.cfg());
  const fs::path p = run.out("structure.xyz");
  write_xyz(s, p);
  fmt::print("atoms={} path={}\n", s.size(), p.string());
  return kOk;
}

int cmd_energy(Run& run) {
  const AtomicStructure s = build_structure(run.cfg());
  const ModelEvaluation e = build_model(run.cfg(), s).evaluate(s, false);
  fmt::print("total_eV={:.12e}\nbonded_eV={:.12e}\nrepulsion_eV={:.12e}\nvdw_eV={:.12e}\n",
             e.total, e.bonded, e.repulsion, e.vdw);
  std::ofstream f(run.out("energy.csv"), std::ios::binary);
  fmt::print(f, "total_eV,bonded_eV,repulsion_eV,vdw_eV\n{:.12e},{:.12e},{:.12e},{:.12e}\n",
             e.total, e.bonded, e.repulsion, e.vdw);
  return kOk;
}

int cmd_forces(Run& run) {
  const AtomicStructure s = build_structure(run.cfg());
  const ModelEvaluation e = build_model(run.cfg(), s).evaluate(s, true);
  std::ofstream f(run.out("forces.csv"), std::ios::binary);
  f << "atom,species,fx_eV_per_A,fy_eV_per_A,fz_eV_per_A\n";
  Vec3 net = Vec3::Zero();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Vec3& F = e.forces[i];
    net += F;
    fmt::print(f, "{},{},{:.12e},{:.12e},{:.12e}\n", i, s.species(i), F.x(), F.y(), F.z());
  }
  fmt::print("total_eV={:.12e}\nmax_free_force_eV_per_A={:.12e}\nnet_force_eV_per_A={:.12e}\n",
             e.total, max_free_force(s, e.forces), net.norm());
  return kOk;
}

int cmd_relax(Run& run) {
  const AtomicStructure s = with_cell_relax(run.cfg(), build_structure(run.cfg()));
  const CompositeModel model = build_model(run.cfg(), s);
  const MinimizeResult r = minimize(s, model, run.cfg().minimizer);
  write_xyz(r.structure, run.out("relaxed.xyz"));
  fmt::print("converged={}\niterations={}\nenergy_eV={:.12e}\nmax_force_eV_per_A={:.12e}\n",
             int(r.converged), r.iterations, r.energy, r.max_force);
  if (r.structure.cell() && r.structure.cell()->fully_periodic()) {
    CompositeModel m = model;
    const StressTensor st = cell_stress(r.structure, m.energy_function());
    fmt::print("stress_norm_GPa={:.12e}\n", st.norm());
  }
  if (!r.converged) {
    diagnose("convergence", "relaxation did not reach the force tolerance");
    return kNumerical;
  }
  return kOk;
}

int cmd_quasistatic(Run& run) {
  const AtomicStructure s = build_structure(run.cfg());
  const CompositeModel model = build_model(run.cfg(), s);
  const LoadingProtocol p = build_protocol(run.cfg(), s);
  const QuasistaticResult r = run_quasistatic(s, model, p);
  emit_records(r.records, run.out("records.csv"));
  write_xyz(r.final_structure, run.out("final.xyz"));
  fmt::print("steps={}\ncompleted={}\n", r.records.size(), int(r.completed));
  if (!r.completed) {
    diagnose("convergence", "a loading step failed to relax");
    return kNumerical;
  }
  return kOk;
}

int cmd_md(Run& run) {
  const AtomicStructure s = build_structure(run.cfg());
  const CompositeModel model = build_model(run.cfg(), s);
  const MdResult r = run_md(s, model, build_md(run.cfg()));
  emit_md_samples(r.samples, run.out("md_samples.csv"));
  emit_md_statistics(s, r.stats, run.out("md_stats.csv"));
  write_xyz(r.final_structure, run.out("final.xyz"));
  fmt::print("samples={}\nmean_temperature_K={:.6f}\nmean_potential_eV={:.12e}\n",
             r.stats.samples, r.stats.mean_temperature, r.stats.mean_potential);
  return kOk;
}

int cmd_chain_sweep(Run& run) {
  const auto& sw = run.cfg().sweep;
  const auto pts = chain_force_sweep(sw.gaps, sw.n_upper, sw.n_lower, sw.spacing);
  emit_chain_sweep(pts, run.out("chain_sweep.csv"));
  fmt::print("points={}\n", pts.size());
  return kOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dispersion-aware mechanics of carbon nanostructures and polymer crystals"};
  app.require_subcommand(1);
  app.footer(kUsage);

  Options opt;
  using Handler = int (*)(Run&);
  struct Command {
    std::string name, help;
    Handler fn;
  };
  const std::vector<Command> commands{
      {"generate", "write the configured structure as extended XYZ", cmd_generate},
      {"energy", "evaluate the energy and its components", cmd_energy},
      {"forces", "evaluate per-atom forces", cmd_forces},
      {"relax", "minimize atoms and, if requested, the cell", cmd_relax},
      {"quasistatic", "run a displacement or cell-strain loading protocol", cmd_quasistatic},
      {"md", "run molecular dynamics and write time averages", cmd_md},
      {"chain-sweep", "net force between rigid chains, pairwise vs many-body", cmd_chain_sweep}};
  for (const auto& [name, help, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--set", opt.sets, "override a dotted config key: key=value");
    sub->add_option("--seed", opt.seed, "random seed");
    sub->add_option("--vdw", opt.vdw, "none, pw or mbd");
    sub->add_option("--input", opt.input, "extended XYZ input structure");
    sub->add_option("--output-dir", opt.output_dir, "directory for outputs and the manifest");
    sub->add_option("--steps", opt.steps, "loading steps or MD steps");
    sub->add_option("--increment", opt.increment, "loading increment");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    diagnose("usage", e.what());
    std::cerr << kUsage;
    return kValidation;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  Handler handler = nullptr;
  for (const auto& c : commands)
    if (c.name == chosen->get_name()) handler = c.fn;

  std::optional<Run> run;
  try {
    run.emplace(chosen->get_name(), resolve(opt));
    const int code = handler(*run);
    run->write_manifest(code == kOk ? "ok" : "numerical_error");
    return code;
  } catch (const ParseError& e) {
    diagnose("parse", e.what());
    return kValidation;
  } catch (const TopologyError& e) {
    diagnose("topology", e.what());
    return kValidation;
  } catch (const InvalidInput& e) {
    diagnose("validation", e.what());
    return kValidation;
  } catch (const GeometryError& e) {
    diagnose("geometry", e.what());
    if (run) run->write_manifest("numerical_error");
    return kNumerical;
  } catch (const NumericalError& e) {
    diagnose("numerical", e.what());
    if (run) run->write_manifest("numerical_error");
    return kNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    diagnose("io", e.what());
    return kValidation;
  }
}
