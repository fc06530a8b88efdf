#include "vdwmech/species.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "vdwmech/errors.hpp"
#include "vdwmech/structure.hpp"
#include "vdwmech/units.hpp"

#ifndef VDWMECH_DEFAULT_DATA_DIR
#define VDWMECH_DEFAULT_DATA_DIR "data"
#endif

namespace vdwmech {

void VdwSpeciesParams::validate() const {
  if (!(c6_free > 0.0) || !(alpha0_free > 0.0) || !(rvdw_free > 0.0))
    throw InvalidInput("vdW parameters for '" + element + "' must be strictly positive");
}

PerAtomVdwState scale_vdw_params(const VdwSpeciesParams& params, double ratio) {
  params.validate();
  if (!(ratio > 0.0) || !std::isfinite(ratio))
    throw InvalidInput("volume ratio must be positive");
  PerAtomVdwState s;
  s.c6_eff = params.c6_free * ratio * ratio;
  s.alpha0_eff = params.alpha0_free * ratio;
  s.rvdw_eff = params.rvdw_free * std::cbrt(ratio);
  s.omega = 4.0 * params.c6_free / (3.0 * params.alpha0_free * params.alpha0_free);
  s.sigma = std::cbrt(std::sqrt(2.0 / (9.0 * units::kPi)) * s.alpha0_eff);
  return s;
}

SpeciesTable::SpeciesTable(std::vector<VdwSpeciesParams> rows) {
  for (auto& r : rows) {
    r.validate();
    rows_[r.element] = std::move(r);
  }
}

namespace {

double parse_number(const std::string& tok, std::size_t line) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw ParseError(line, "expected a number, got '" + tok + "'");
  return v;
}

} // namespace

SpeciesTable SpeciesTable::parse(std::istream& in) {
  std::vector<VdwSpeciesParams> rows;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto c = raw.find('#'); c != std::string::npos) raw.erase(c);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() != 4)
      throw ParseError(line, "expected 'symbol c6 alpha0 rvdw', got " +
                                 std::to_string(tok.size()) + " fields");
    VdwSpeciesParams p{tok[0], parse_number(tok[1], line), parse_number(tok[2], line),
                       parse_number(tok[3], line)};
    try {
      p.validate();
    } catch (const InvalidInput& e) {
      throw ParseError(line, e.what());
    }
    rows.push_back(p);
  }
  return SpeciesTable(std::move(rows));
}

SpeciesTable SpeciesTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open species file " + path.string());
  return parse(in);
}

const VdwSpeciesParams& SpeciesTable::at(const std::string& element) const {
  auto it = rows_.find(element);
  if (it == rows_.end())
    throw InvalidInput("no vdW parameters for element '" + element + "'");
  return it->second;
}

std::vector<VdwSpeciesParams> SpeciesTable::rows() const {
  std::vector<VdwSpeciesParams> out;
  for (const auto& [k, v] : rows_) out.push_back(v);
  return out;
}

std::filesystem::path data_directory() {
  if (const char* env = std::getenv("VDWMECH_DATA_PATH"); env && *env) return env;
  return VDWMECH_DEFAULT_DATA_DIR;
}

const SpeciesTable& default_species_table() {
  static const SpeciesTable table = SpeciesTable::load(data_directory() / "species_ts.dat");
  return table;
}

std::vector<PerAtomVdwState> vdw_states(const AtomicStructure& s, const SpeciesTable& table) {
  std::vector<PerAtomVdwState> out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    out.push_back(scale_vdw_params(table.at(s.species(i)), s.volume_ratios()[i]));
  return out;
}

} // namespace vdwmech
