#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <vector>

namespace vdwmech {

class AtomicStructure;

/// Free-atom dispersion reference values, Hartree atomic units.
struct VdwSpeciesParams {
  std::string element;
  double c6_free = 0.0;     // Ha*Bohr^6
  double alpha0_free = 0.0; // Bohr^3
  double rvdw_free = 0.0;   // Bohr

  void validate() const;
};

/// Environment-scaled parameters for one atom (atomic units).
struct PerAtomVdwState {
  double c6_eff = 0.0;     // Ha*Bohr^6
  double alpha0_eff = 0.0; // Bohr^3
  double rvdw_eff = 0.0;   // Bohr
  double omega = 0.0;      // characteristic frequency, Ha
  double sigma = 0.0;      // Gaussian dipole width, Bohr
};

/// Scales free-atom values by the effective/free volume ratio:
/// C6 ~ ratio^2, alpha ~ ratio, R_vdW ~ ratio^(1/3). The oscillator
/// frequency uses the free-atom values, omega = 4 C6 / (3 alpha0^2), and the
/// Gaussian width follows from the effective polarizability,
/// sigma = (sqrt(2/(9 pi)) alpha)^(1/3).
PerAtomVdwState scale_vdw_params(const VdwSpeciesParams& params, double ratio);

/// Element -> free-atom parameters, usually read from a parameter file.
class SpeciesTable {
public:
  SpeciesTable() = default;
  explicit SpeciesTable(std::vector<VdwSpeciesParams> rows);

  /// Parses "symbol c6 alpha0 rvdw" rows; '#' starts a comment.
  static SpeciesTable parse(std::istream& in);
  static SpeciesTable load(const std::filesystem::path& path);

  const VdwSpeciesParams& at(const std::string& element) const;
  bool contains(const std::string& element) const { return rows_.count(element) > 0; }
  std::size_t size() const { return rows_.size(); }
  std::vector<VdwSpeciesParams> rows() const;

private:
  std::map<std::string, VdwSpeciesParams> rows_;
};

/// Directory holding the shipped parameter files. VDWMECH_DATA_PATH
/// overrides the compiled-in location.
std::filesystem::path data_directory();

/// The shipped free-atom table (species_ts.dat), loaded once.
const SpeciesTable& default_species_table();

/// One scaled state per atom, using the structure's volume ratios.
std::vector<PerAtomVdwState> vdw_states(const AtomicStructure& s, const SpeciesTable& table);

} // namespace vdwmech
