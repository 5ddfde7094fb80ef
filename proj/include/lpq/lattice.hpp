#pragma once

// Four-dimensional reciprocal index lattice and its projection onto the plane.
//
// Storage order: flat = ((i1 * n + i2) * n + i3) * n + i4 where each i_k is the
// FFT-order slot of component h_k, i.e. slots 0..n/2-1 hold frequencies
// 0..n/2-1 and slots n/2..n-1 hold -n/2..-1. Every module uses this layout.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "lpq/model.hpp"

namespace lpq {

inline constexpr int kSuperDim = 4;
inline constexpr int kPhysDim = 2;

using ModeIndex = std::array<int, kSuperDim>;
using Vec2 = std::array<double, kPhysDim>;
using Projection = std::array<std::array<double, kSuperDim>, kPhysDim>;

// Rows [1, cos 30, cos 60, 0] and [0, sin 30, sin 60, 1].
Projection dodecagonal_projection();

struct LatticeSpec {
  int n_h = 32;
  Projection projection = dodecagonal_projection();

  explicit LatticeSpec(int modes_per_dim = 32);

  std::size_t mode_count() const {
    const auto n = static_cast<std::size_t>(n_h);
    return n * n * n * n;
  }
  int min_freq() const { return -n_h / 2; }
  int max_freq() const { return n_h / 2 - 1; }
  bool in_range(const ModeIndex& h) const;
};

// Frequency held by FFT slot i of an axis with n entries.
constexpr int slot_frequency(int slot, int n) { return slot < n / 2 ? slot : slot - n; }
constexpr int frequency_slot(int freq, int n) { return ((freq % n) + n) % n; }

std::size_t flat_index(const LatticeSpec& spec, const ModeIndex& h);
ModeIndex mode_at(const LatticeSpec& spec, std::size_t flat);
// Flat index of -h (modular negation).
std::size_t negated_flat(const LatticeSpec& spec, std::size_t flat);

// g = S h.
Vec2 project(const LatticeSpec& spec, const ModeIndex& h);

// |S h|^2 for the dodecagonal S, evaluated as A + B sqrt(3) with integer A, B
// so that ring memberships (|g|^2 = 1 or 2 + sqrt 3) are exact.
double projected_norm_sq(const ModeIndex& h);

// A mode is active when no component sits on the Nyquist frequency -n/2.
// Inactive modes have no conjugate partner inside the range and are held at 0.
bool is_active(const LatticeSpec& spec, const ModeIndex& h);

struct MultiplierTable {
  int n_h = 0;
  std::vector<double> k_sq;        // |S h|^2
  std::vector<double> quartic;     // c sigma^2
  std::vector<double> symbol;      // sigma = (1 - k^2)(q^2 - k^2)
  std::vector<std::uint8_t> active;
};

MultiplierTable build_tables(const LatticeSpec& spec, const ModelParams& p);

// Signed seed index sets. Unit ring: the 12 vectors of length 1. q ring: the
// 12 sums of angularly adjacent unit-ring vectors, all with |g|^2 = 2 + sqrt 3.
const std::vector<ModeIndex>& unit_ring_indices();
const std::vector<ModeIndex>& q_ring_indices();

}  // namespace lpq
