#include "vdwmech/xyz.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "vdwmech/errors.hpp"

namespace vdwmech {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

double to_double(const std::string& tok, std::size_t line, const char* what) {
  double v = 0.0;
  const char* end = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || p != end)
    throw ParseError(line, fmt::format("bad {} '{}'", what, tok));
  return v;
}

bool to_flag(const std::string& tok, std::size_t line) {
  if (tok == "1" || tok == "T" || tok == "True" || tok == "true") return true;
  if (tok == "0" || tok == "F" || tok == "False" || tok == "false") return false;
  throw ParseError(line, fmt::format("bad fix flag '{}'", tok));
}

// key=value and key="quoted value" pairs of the comment line.
std::map<std::string, std::string> parse_comment(const std::string& line, std::size_t lineno) {
  std::map<std::string, std::string> kv;
  std::size_t i = 0;
  const std::size_t n = line.size();
  auto skip_ws = [&] {
    while (i < n && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  };
  for (skip_ws(); i < n; skip_ws()) {
    const std::size_t k0 = i;
    while (i < n && line[i] != '=' && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::string key = line.substr(k0, i - k0);
    if (i >= n || line[i] != '=') {
      kv[key] = ""; // bare word: free-form comment text
      continue;
    }
    ++i;
    std::string value;
    if (i < n && line[i] == '"') {
      const std::size_t close = line.find('"', i + 1);
      if (close == std::string::npos) throw ParseError(lineno, "unterminated quote in comment line");
      value = line.substr(i + 1, close - i - 1);
      i = close + 1;
    } else {
      const std::size_t v0 = i;
      while (i < n && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      value = line.substr(v0, i - v0);
    }
    kv[key] = value;
  }
  return kv;
}

struct Columns {
  bool volume_ratio = false;
  bool fix = false;
  std::size_t count() const { return 4 + (volume_ratio ? 1 : 0) + (fix ? 3 : 0); }
};

Columns parse_properties(const std::string& props, std::size_t lineno) {
  std::vector<std::string> f;
  std::stringstream ss(props);
  for (std::string tok; std::getline(ss, tok, ':');) f.push_back(tok);
  if (f.size() % 3 != 0) throw ParseError(lineno, "Properties needs name:type:count triples");
  Columns c;
  for (std::size_t k = 0; k < f.size(); k += 3) {
    const std::string& name = f[k];
    const std::string spec = f[k + 1] + ":" + f[k + 2];
    const std::size_t slot = k / 3;
    if (name == "species" && spec == "S:1" && slot == 0) continue;
    if (name == "pos" && spec == "R:3" && slot == 1) continue;
    if (name == "volume_ratio" && spec == "R:1" && slot == 2 && !c.fix) {
      c.volume_ratio = true;
      continue;
    }
    if (name == "fix" && (spec == "I:3" || spec == "L:3") && !c.fix) {
      c.fix = true;
      continue;
    }
    throw ParseError(lineno, fmt::format("unsupported property '{}:{}'", name, spec));
  }
  return c;
}

} // namespace

AtomicStructure parse_xyz(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw ParseError(lineno, "missing atom count");
  const auto count_tok = split_ws(line);
  long count = -1;
  if (count_tok.size() == 1) {
    const std::string& t = count_tok[0];
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), count);
    if (ec != std::errc() || p != t.data() + t.size()) count = -1;
  }
  if (count < 0) throw ParseError(lineno, fmt::format("malformed atom count '{}'", line));

  ++lineno;
  if (!std::getline(in, line)) throw ParseError(lineno, "missing comment line");
  const auto kv = parse_comment(line, lineno);
  const std::size_t comment_line = lineno;

  StructureData d;
  std::optional<Columns> declared;
  if (auto it = kv.find("Properties"); it != kv.end())
    declared = parse_properties(it->second, comment_line);
  if (auto it = kv.find("Lattice"); it != kv.end()) {
    const auto f = split_ws(it->second);
    if (f.size() != 9) throw ParseError(comment_line, "Lattice needs 9 numbers");
    Mat3 U;
    for (int k = 0; k < 9; ++k) U(k % 3, k / 3) = to_double(f[k], comment_line, "lattice value");
    std::array<bool, 3> pbc{true, true, true};
    if (auto p = kv.find("pbc"); p != kv.end()) {
      const auto t = split_ws(p->second);
      if (t.size() != 3) throw ParseError(comment_line, "pbc needs 3 flags");
      for (int k = 0; k < 3; ++k) pbc[k] = to_flag(t[k], comment_line);
    }
    try {
      d.cell = CellTensor(U, pbc);
    } catch (const InvalidInput& e) {
      throw ParseError(comment_line, e.what());
    }
  }

  std::optional<Columns> cols = declared;
  for (long a = 0; a < count; ++a) {
    ++lineno;
    if (!std::getline(in, line))
      throw ParseError(lineno, fmt::format("expected {} atoms, file ends after {}", count, a));
    const auto f = split_ws(line);
    if (!cols) {
      Columns c;
      switch (f.size()) {
      case 4: break;
      case 5: c.volume_ratio = true; break;
      case 7: c.fix = true; break;
      case 8: c.volume_ratio = c.fix = true; break;
      default:
        throw ParseError(lineno, fmt::format("cannot infer columns from {} fields", f.size()));
      }
      cols = c;
    }
    if (f.size() != cols->count())
      throw ParseError(lineno,
                       fmt::format("expected {} columns, found {}", cols->count(), f.size()));
    if (!is_known_element(f[0])) throw ParseError(lineno, fmt::format("unknown element '{}'", f[0]));
    d.species.push_back(f[0]);
    d.positions.emplace_back(to_double(f[1], lineno, "coordinate"),
                             to_double(f[2], lineno, "coordinate"),
                             to_double(f[3], lineno, "coordinate"));
    std::size_t k = 4;
    d.volume_ratios.push_back(cols->volume_ratio ? to_double(f[k++], lineno, "volume ratio") : 1.0);
    FixMask m;
    if (cols->fix)
      for (int c = 0; c < 3; ++c) m.fixed[c] = to_flag(f[k++], lineno);
    d.constraints.push_back(m);
  }
  try {
    return AtomicStructure(std::move(d));
  } catch (const InvalidInput& e) {
    throw ParseError(lineno, e.what());
  }
}

AtomicStructure read_xyz(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  return parse_xyz(in);
}

void format_xyz(std::ostream& out, const AtomicStructure& s) {
  bool any_fixed = false;
  for (const auto& c : s.constraints()) any_fixed = any_fixed || c.any();
  std::string comment;
  if (s.cell()) {
    const Mat3& U = s.cell()->vectors();
    comment += "Lattice=\"";
    for (int k = 0; k < 9; ++k) {
      if (k) comment += ' ';
      comment += fmt::format("{:.17g}", U(k % 3, k / 3));
    }
    const auto& p = s.cell()->periodic();
    comment += fmt::format("\" pbc=\"{} {} {}\" ", p[0] ? 'T' : 'F', p[1] ? 'T' : 'F',
                           p[2] ? 'T' : 'F');
  }
  comment += "Properties=species:S:1:pos:R:3:volume_ratio:R:1";
  if (any_fixed) comment += ":fix:I:3";
  fmt::print(out, "{}\n{}\n", s.size(), comment);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Vec3& r = s.position(i);
    fmt::print(out, "{} {:.17g} {:.17g} {:.17g} {:.17g}", s.species(i), r.x(), r.y(), r.z(),
               s.volume_ratios()[i]);
    if (any_fixed) {
      const auto& f = s.constraints()[i].fixed;
      fmt::print(out, " {:d} {:d} {:d}", int(f[0]), int(f[1]), int(f[2]));
    }
    out << '\n';
  }
}

void write_xyz(const AtomicStructure& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  format_xyz(out, s);
  if (!out) throw InvalidInput("write failed for '" + path.string() + "'");
}

} // namespace vdwmech
