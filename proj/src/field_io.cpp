#include "fracvi/field_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <functional>
#include <iomanip>

#include "fracvi/errors.hpp"

namespace fracvi::io {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put(std::ostream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw Error("truncated field file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_raw(const std::filesystem::path& path, const RawField& raw) {
  if (raw.values.size() != raw.grid.size() * raw.components) throw Error("raw field has inconsistent size");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os.write("FVIF", 4);
  put<std::uint32_t>(os, kFormatVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(raw.grid.dim()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(raw.grid.n()));
  put<double>(os, raw.grid.half_length());
  put<std::uint32_t>(os, raw.components);
  put<std::uint32_t>(os, 0);
  for (double v : raw.values) put<double>(os, v);
  if (!os) throw Error("failed writing " + path.string());
}

RawField read_raw(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open field file " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "FVIF", 4) != 0) throw Error(path.string() + " is not a field file");
  auto version = get<std::uint32_t>(is);
  if (version != kFormatVersion) throw Error("unsupported field file version " + std::to_string(version));
  auto dim = get<std::uint32_t>(is);
  auto n = get<std::uint32_t>(is);
  auto L = get<double>(is);
  auto components = get<std::uint32_t>(is);
  get<std::uint32_t>(is);
  RawField raw{Grid(static_cast<int>(dim), static_cast<int>(n), L), components, {}};
  raw.values.resize(raw.grid.size() * components);
  for (double& v : raw.values) v = get<double>(is);
  return raw;
}

void write_field(const std::filesystem::path& path, const ScalarField& field) {
  write_raw(path, RawField{field.grid(), 1, field.data()});
}

void write_field(const std::filesystem::path& path, const VectorField& field) {
  const auto& g = field.grid();
  RawField raw{g, static_cast<std::uint32_t>(g.dim()), std::vector<double>(g.size() * g.dim())};
  for (std::size_t i = 0; i < g.size(); ++i)
    for (int j = 0; j < g.dim(); ++j) raw.values[i * g.dim() + j] = field.component(j)[i];
  write_raw(path, raw);
}

ScalarField read_scalar_field(const std::filesystem::path& path) {
  auto raw = read_raw(path);
  if (raw.components != 1) throw Error(path.string() + " does not hold a scalar field");
  return ScalarField(raw.grid, std::move(raw.values));
}

VectorField read_vector_field(const std::filesystem::path& path) {
  auto raw = read_raw(path);
  const int d = raw.grid.dim();
  if (raw.components != static_cast<std::uint32_t>(d)) throw Error(path.string() + " does not hold a vector field");
  VectorField out(raw.grid);
  for (std::size_t i = 0; i < raw.grid.size(); ++i)
    for (int j = 0; j < d; ++j) out.component(j)[i] = raw.values[i * d + j];
  return out;
}

namespace {

void write_csv_rows(const std::filesystem::path& path, const Grid& g, int columns,
                    const std::function<double(std::size_t, int)>& value) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << std::setprecision(17);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto x = g.node_position(i);
    os << x[0];
    if (g.dim() == 2) os << ',' << x[1];
    for (int c = 0; c < columns; ++c) os << ',' << value(i, c);
    os << '\n';
  }
}

}  // namespace

void write_csv(const std::filesystem::path& path, const ScalarField& field) {
  write_csv_rows(path, field.grid(), 1, [&](std::size_t i, int) { return field[i]; });
}

void write_csv(const std::filesystem::path& path, const VectorField& field) {
  write_csv_rows(path, field.grid(), field.dim(), [&](std::size_t i, int c) { return field.component(c)[i]; });
}

}  // namespace fracvi::io
