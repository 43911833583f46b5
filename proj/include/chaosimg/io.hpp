#pragma once

#include <filesystem>
#include <string>

#include "chaosimg/field.hpp"

namespace chaosimg::io {

namespace fs = std::filesystem;

/// Binary PGM (P5), 8- or 16-bit. Values are scaled to [0, 1] by maxval.
IntensityMap read_pgm(const fs::path& path, double pitch);

/// 8-bit P5 with maxval 255; values are clamped to [0, 1] first.
void write_pgm8(const fs::path& path, const IntensityMap& map);

/// 16-bit P5 preview with min/max scaling. The scaling is written to
/// `<path>.scale` as key=value lines. Returns the sidecar path.
fs::path write_pgm16_preview(const fs::path& path, const IntensityMap& map);

/// Raw little-endian float64 dumps, row-major. Complex fields are interleaved
/// (re, im). A plain-text header `<path>.hdr` records nx, ny, pitch and, for
/// fields, wavelength. Returns the header path.
fs::path write_raw(const fs::path& path, const ComplexField& field);
fs::path write_raw(const fs::path& path, const IntensityMap& map);

ComplexField read_raw_field(const fs::path& path);
IntensityMap read_raw_map(const fs::path& path);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const fs::path& path);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

}  // namespace chaosimg::io
