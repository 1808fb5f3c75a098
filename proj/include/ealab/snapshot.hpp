#pragma once
#include "ealab/field.hpp"

#include <cstdint>
#include <string>

namespace ealab {

/// On-disk field container, version 1:
///   magic "EAFS" (4 bytes)
///   version      u32 little-endian
///   dim          u32 in {2, 3}
///   rank         u32 in {0, 1, 2}
///   resolution   u32[dim] (points per axis)
///   time stamp   f64 little-endian
///   payload      f64[components * points] little-endian, real-space samples,
///                row-major (last axis fastest), component index outermost.
/// Round trips are bit-identical; loads refuse partial or foreign files.
inline constexpr std::uint32_t kSnapshotVersion = 1;

struct Snapshot {
  SpectralField field;
  double timestamp = 0;
};

/// Write the field's samples to `path`. Throws std::runtime_error when the
/// file cannot be created or written.
void save_snapshot(const SpectralField& field, const std::string& path,
                   double timestamp = 0);

/// Read a snapshot back. Throws std::runtime_error on magic mismatch,
/// unsupported version, malformed header, or truncated payload — never
/// returns a partial field.
Snapshot load_snapshot(const std::string& path);

}  // namespace ealab
