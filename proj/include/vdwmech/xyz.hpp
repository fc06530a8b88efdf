#pragma once

#include <filesystem>
#include <iosfwd>

#include "vdwmech/structure.hpp"

namespace vdwmech {

/// Extended XYZ, one frame. The comment line may carry
/// Lattice="ax ay az bx by bz cx cy cz" (lattice vectors in order),
/// pbc="T T T" and Properties=species:S:1:pos:R:3[:volume_ratio:R:1][:fix:I:3].
/// Without a Properties key the per-atom column count decides: 4 = symbol
/// and position, 5 adds the volume ratio, 7 adds three fix flags, 8 has
/// both. Missing volume ratios default to 1.
AtomicStructure parse_xyz(std::istream& in);
AtomicStructure read_xyz(const std::filesystem::path& path);

/// Writes every field at full double precision, so parse_xyz(format_xyz(s))
/// reproduces s exactly. Fix flags are written only if some atom is fixed.
void format_xyz(std::ostream& out, const AtomicStructure& s);
void write_xyz(const AtomicStructure& s, const std::filesystem::path& path);

} // namespace vdwmech
