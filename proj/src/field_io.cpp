#include "lpq/field_io.hpp"

#include "lpq/binary_io.hpp"
#include "lpq/error.hpp"

namespace lpq {

std::vector<char> encode_snapshot(const SpectralField& field) {
  bin::Writer w;
  w.magic("LPSF");
  w.u32(kSnapshotVersion);
  w.u32(static_cast<std::uint32_t>(field.n_h));
  for (const auto& c : field.coeffs) {
    w.f64(c.real());
    w.f64(c.imag());
  }
  return w.bytes();
}

SpectralField decode_snapshot(std::vector<char> bytes) {
  bin::Reader r(std::move(bytes), "LPSF");
  r.expect_magic("LPSF");
  if (r.u32() != kSnapshotVersion) r.fail("unsupported version");
  const auto n = static_cast<int>(r.u32());
  if (n < 2 || n % 2 != 0 || n > 256) r.fail("invalid n_h");
  SpectralField f{LatticeSpec(n)};
  const auto raw = r.f64s(2 * f.coeffs.size());
  for (std::size_t i = 0; i < f.coeffs.size(); ++i) f.coeffs[i] = {raw[2 * i], raw[2 * i + 1]};
  r.expect_end();
  return f;
}

void write_snapshot(const std::filesystem::path& path, const SpectralField& field) {
  bin::write_file(path, encode_snapshot(field));
}

SpectralField read_snapshot(const std::filesystem::path& path) {
  return decode_snapshot(bin::read_file(path));
}

std::vector<char> encode_grid(const PhysicalField& grid) {
  bin::Writer w;
  w.magic("LPPG");
  w.u32(kGridVersion);
  w.u32(static_cast<std::uint32_t>(grid.n_g));
  w.f64(grid.box);
  w.f64s(grid.values);
  return w.bytes();
}

PhysicalField decode_grid(std::vector<char> bytes) {
  bin::Reader r(std::move(bytes), "LPPG");
  r.expect_magic("LPPG");
  if (r.u32() != kGridVersion) r.fail("unsupported version");
  PhysicalField g;
  g.n_g = static_cast<int>(r.u32());
  if (g.n_g < 1 || g.n_g > 1 << 15) r.fail("invalid n_g");
  g.box = r.f64();
  g.values = r.f64s(static_cast<std::size_t>(g.n_g) * g.n_g);
  r.expect_end();
  return g;
}

void write_grid(const std::filesystem::path& path, const PhysicalField& grid) {
  bin::write_file(path, encode_grid(grid));
}

PhysicalField read_grid(const std::filesystem::path& path) {
  return decode_grid(bin::read_file(path));
}

}  // namespace lpq
