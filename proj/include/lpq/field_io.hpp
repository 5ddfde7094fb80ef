#pragma once

// Snapshot formats.
//   LPSF: "LPSF", u32 version, u32 n_h, n_h^4 x (f64 re, f64 im) in index order.
//   LPPG: "LPPG", u32 version, u32 n_g, f64 D, n_g^2 f64 row-major.
// All integers and floats little-endian.

#include <filesystem>
#include <vector>

#include "lpq/solver.hpp"

namespace lpq {

inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::uint32_t kGridVersion = 1;

std::vector<char> encode_snapshot(const SpectralField& field);
SpectralField decode_snapshot(std::vector<char> bytes);
void write_snapshot(const std::filesystem::path& path, const SpectralField& field);
SpectralField read_snapshot(const std::filesystem::path& path);

std::vector<char> encode_grid(const PhysicalField& grid);
PhysicalField decode_grid(std::vector<char> bytes);
void write_grid(const std::filesystem::path& path, const PhysicalField& grid);
PhysicalField read_grid(const std::filesystem::path& path);

}  // namespace lpq
