#include "bml/snapshot_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "bml/error.hpp"

namespace bml {

namespace {

template <typename T>
void put_le(std::ostream& os, T value) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  const U bits = std::bit_cast<U>(value);
  std::array<char, sizeof(T)> buf{};
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
  os.write(buf.data(), buf.size());
}

template <typename T>
T get_le(std::istream& is) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  std::array<unsigned char, sizeof(T)> buf{};
  is.read(reinterpret_cast<char*>(buf.data()), buf.size());
  if (!is) throw DomainError("snapshot: truncated stream");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(buf[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_snapshot(std::ostream& os, const RealField& field, double time) {
  const Grid& g = field.grid();
  for (char c : field.label()) {
    if (static_cast<unsigned char>(c) > 127) throw DomainError("snapshot: label must be ASCII");
  }
  os.write("BMLF", 4);
  put_le<std::uint32_t>(os, kSnapshotVersion);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.n()));
  put_le<double>(os, g.half_length());
  put_le<double>(os, time);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(field.label().size()));
  os.write(field.label().data(), static_cast<std::streamsize>(field.label().size()));
  for (double v : field.values()) put_le<double>(os, v);
  if (!os) throw std::runtime_error("snapshot: write failed");
}

void write_snapshot(const std::filesystem::path& path, const RealField& field, double time) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("snapshot: cannot open " + path.string());
  write_snapshot(os, field, time);
}

Snapshot read_snapshot(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "BMLF", 4) != 0) throw DomainError("snapshot: bad magic");
  const auto version = get_le<std::uint32_t>(is);
  if (version != kSnapshotVersion) throw DomainError("snapshot: unsupported version");
  const auto n = get_le<std::uint32_t>(is);
  const auto L = get_le<double>(is);
  const auto time = get_le<double>(is);
  const auto len = get_le<std::uint32_t>(is);
  if (len > 4096) throw DomainError("snapshot: label too long");
  std::string label(len, '\0');
  is.read(label.data(), len);
  if (!is) throw DomainError("snapshot: truncated label");
  Grid g(n, L);
  std::vector<double> values(g.size());
  for (auto& v : values) v = get_le<double>(is);
  return Snapshot{RealField(g, std::move(values), std::move(label)), time};
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("snapshot: cannot open " + path.string());
  return read_snapshot(is);
}

}  // namespace bml
