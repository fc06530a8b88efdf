#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "vdwmech/chain_sweep.hpp"
#include "vdwmech/md.hpp"
#include "vdwmech/protocol.hpp"

namespace vdwmech {

// CSV writers. Headers carry units in the column names; numbers use a
// fixed scientific format independent of the locale, and absent optional
// values are left empty.

/// One row per quasi-static step. Throws InvalidInput on an empty list.
void format_records(std::ostream& out, const std::vector<StepRecord>& records);
void emit_records(const std::vector<StepRecord>& records, const std::filesystem::path& path);

/// Per-atom production averages: mean and std of the displacement.
void format_md_statistics(std::ostream& out, const AtomicStructure& s, const MdStatistics& st);
void emit_md_statistics(const AtomicStructure& s, const MdStatistics& st,
                        const std::filesystem::path& path);

/// Production time series.
void format_md_samples(std::ostream& out, const std::vector<MdSample>& samples);
void emit_md_samples(const std::vector<MdSample>& samples, const std::filesystem::path& path);

void format_chain_sweep(std::ostream& out, const std::vector<ChainForcePoint>& points);
void emit_chain_sweep(const std::vector<ChainForcePoint>& points,
                      const std::filesystem::path& path);

} // namespace vdwmech
