#include "vdwmech/records.hpp"

#include <fstream>
#include <optional>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "vdwmech/errors.hpp"

namespace vdwmech {

namespace {

std::string num(double v) { return fmt::format("{:.12e}", v); }
std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

template <class F>
void to_file(const std::filesystem::path& path, F&& write) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  write(out);
  if (!out) throw InvalidInput("write failed for '" + path.string() + "'");
}

// Voigt order.
constexpr int kVoigt[6][2] = {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};
constexpr const char* kVoigtName[6] = {"xx", "yy", "zz", "yz", "xz", "xy"};

} // namespace

void format_records(std::ostream& out, const std::vector<StepRecord>& records) {
  if (records.empty()) throw InvalidInput("no records to emit");
  out << "step,applied,strain,e_total_eV,e_bonded_eV,e_repulsion_eV,e_vdw_eV,"
         "reaction_x_eV_per_A,reaction_y_eV_per_A,reaction_z_eV_per_A,reaction_eV_per_A";
  for (const char* n : kVoigtName) out << ",sigma_" << n << "_GPa";
  out << ",axial_stress_GPa,stiffness_GPa,converged,halvings,iterations,max_force_eV_per_A\n";
  for (const StepRecord& r : records) {
    fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{}", r.step, num(r.applied), num(r.strain),
               num(r.e_total), num(r.e_bonded), num(r.e_repulsion), num(r.e_vdw),
               num(r.reaction_vector.x()), num(r.reaction_vector.y()),
               num(r.reaction_vector.z()), num(r.reaction));
    for (const auto& ab : kVoigt)
      out << ',' << (r.stress ? num(r.stress->sigma(ab[0], ab[1])) : std::string());
    fmt::print(out, ",{},{},{},{},{},{}\n", num(r.axial_stress), num(r.stiffness),
               int(r.converged), r.halvings, r.iterations, num(r.max_force));
  }
}

void emit_records(const std::vector<StepRecord>& records, const std::filesystem::path& path) {
  if (records.empty()) throw InvalidInput("no records to emit");
  to_file(path, [&](std::ostream& o) { format_records(o, records); });
}

void format_md_statistics(std::ostream& out, const AtomicStructure& s, const MdStatistics& st) {
  if (st.mean_displacement.size() != s.size() || st.std_displacement.size() != s.size())
    throw InvalidInput("statistics do not match the structure");
  out << "atom,species,x0_A,y0_A,z0_A,mean_dx_A,mean_dy_A,mean_dz_A,std_dx_A,std_dy_A,"
         "std_dz_A\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Vec3& r = s.position(i);
    const Vec3& m = st.mean_displacement[i];
    const Vec3& d = st.std_displacement[i];
    fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{}\n", i, s.species(i), num(r.x()),
               num(r.y()), num(r.z()), num(m.x()), num(m.y()), num(m.z()), num(d.x()),
               num(d.y()), num(d.z()));
  }
}

void emit_md_statistics(const AtomicStructure& s, const MdStatistics& st,
                        const std::filesystem::path& path) {
  to_file(path, [&](std::ostream& o) { format_md_statistics(o, s, st); });
}

void format_md_samples(std::ostream& out, const std::vector<MdSample>& samples) {
  out << "time_fs,temperature_K,e_potential_eV,e_kinetic_eV,e_total_eV,reaction_x_eV_per_A,"
         "reaction_y_eV_per_A,reaction_z_eV_per_A\n";
  for (const MdSample& m : samples)
    fmt::print(out, "{},{},{},{},{},{},{},{}\n", num(m.time), num(m.temperature),
               num(m.e_potential), num(m.e_kinetic), num(m.e_potential + m.e_kinetic),
               num(m.reaction.x()), num(m.reaction.y()), num(m.reaction.z()));
}

void emit_md_samples(const std::vector<MdSample>& samples, const std::filesystem::path& path) {
  to_file(path, [&](std::ostream& o) { format_md_samples(o, samples); });
}

void format_chain_sweep(std::ostream& out, const std::vector<ChainForcePoint>& points) {
  out << "h_A,n_upper,n_lower,force_y_pw_eV_per_A,force_y_mbd_eV_per_A,ratio_mbd_pw\n";
  for (const auto& p : points)
    fmt::print(out, "{},{},{},{},{},{}\n", num(p.gap), p.n_upper, p.n_lower, num(p.force_pw),
               num(p.force_mbd), num(p.ratio()));
}

void emit_chain_sweep(const std::vector<ChainForcePoint>& points,
                      const std::filesystem::path& path) {
  to_file(path, [&](std::ostream& o) { format_chain_sweep(o, points); });
}

} // namespace vdwmech
