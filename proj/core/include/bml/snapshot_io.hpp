#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "bml/grid.hpp"

namespace bml {

/// Binary field snapshot ("BMLF"):
///   magic "BMLF" | version u32 | n u32 | L f64 | time f64 |
///   label length u32 | label ASCII bytes | n*n f64 samples, row-major.
/// All integers and doubles are little-endian.
inline constexpr std::uint32_t kSnapshotVersion = 1;

struct Snapshot {
  RealField field;
  double time = 0.0;
};

void write_snapshot(std::ostream& os, const RealField& field, double time);
void write_snapshot(const std::filesystem::path& path, const RealField& field, double time);
Snapshot read_snapshot(std::istream& is);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace bml
