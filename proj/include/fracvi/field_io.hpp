#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fracvi/grid.hpp"

namespace fracvi::io {

// Binary layout, all little-endian:
//   bytes  0..3   magic "FVIF"
//   bytes  4..7   u32 format version (1)
//   bytes  8..11  u32 dim
//   bytes 12..15  u32 n (points per axis)
//   bytes 16..23  f64 half length L
//   bytes 24..27  u32 components per node (1 scalar, dim vector, dim*dim tensor)
//   bytes 28..31  u32 reserved, zero
// followed by size * components f64 values in row-major node order, the
// components of one node stored contiguously.
inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderBytes = 32;

struct RawField {
  Grid grid;
  std::uint32_t components = 1;
  std::vector<double> values;  // node-major, components interleaved
};

void write_raw(const std::filesystem::path& path, const RawField& raw);
RawField read_raw(const std::filesystem::path& path);

void write_field(const std::filesystem::path& path, const ScalarField& field);
void write_field(const std::filesystem::path& path, const VectorField& field);
ScalarField read_scalar_field(const std::filesystem::path& path);
VectorField read_vector_field(const std::filesystem::path& path);

/// One node per line: coordinates then value(s), 17 significant digits.
void write_csv(const std::filesystem::path& path, const ScalarField& field);
void write_csv(const std::filesystem::path& path, const VectorField& field);

}  // namespace fracvi::io
