#include "lpq/lattice.hpp"

#include <cmath>

#include "lpq/error.hpp"

namespace lpq {

Projection dodecagonal_projection() {
  return {{{1.0, std::cos(M_PI / 6.0), std::cos(M_PI / 3.0), 0.0},
           {0.0, std::sin(M_PI / 6.0), std::sin(M_PI / 3.0), 1.0}}};
}

LatticeSpec::LatticeSpec(int modes_per_dim) : n_h(modes_per_dim) {
  if (n_h < 2 || n_h % 2 != 0) throw ConfigError("lattice: n_h must be a positive even integer");
}

bool LatticeSpec::in_range(const ModeIndex& h) const {
  for (int c : h)
    if (c < min_freq() || c > max_freq()) return false;
  return true;
}

std::size_t flat_index(const LatticeSpec& spec, const ModeIndex& h) {
  const int n = spec.n_h;
  std::size_t flat = 0;
  for (int c : h) flat = flat * n + static_cast<std::size_t>(frequency_slot(c, n));
  return flat;
}

ModeIndex mode_at(const LatticeSpec& spec, std::size_t flat) {
  const auto n = static_cast<std::size_t>(spec.n_h);
  ModeIndex h{};
  for (int k = kSuperDim - 1; k >= 0; --k) {
    h[k] = slot_frequency(static_cast<int>(flat % n), spec.n_h);
    flat /= n;
  }
  return h;
}

std::size_t negated_flat(const LatticeSpec& spec, std::size_t flat) {
  const auto n = static_cast<std::size_t>(spec.n_h);
  std::size_t out = 0, stride = 1;
  for (int k = 0; k < kSuperDim; ++k) {
    const std::size_t slot = flat % n;
    out += ((n - slot) % n) * stride;
    flat /= n;
    stride *= n;
  }
  return out;
}

Vec2 project(const LatticeSpec& spec, const ModeIndex& h) {
  Vec2 g{0.0, 0.0};
  for (int r = 0; r < kPhysDim; ++r)
    for (int k = 0; k < kSuperDim; ++k) g[r] += spec.projection[r][k] * h[k];
  return g;
}

double projected_norm_sq(const ModeIndex& h) {
  const long a = long(h[0]) * h[0] + long(h[1]) * h[1] + long(h[2]) * h[2] + long(h[3]) * h[3] +
                 long(h[0]) * h[2] + long(h[1]) * h[3];
  const long b = long(h[0]) * h[1] + long(h[1]) * h[2] + long(h[2]) * h[3];
  return static_cast<double>(a) + static_cast<double>(b) * kSqrt3;
}

bool is_active(const LatticeSpec& spec, const ModeIndex& h) {
  for (int c : h)
    if (c == spec.min_freq()) return false;
  return true;
}

MultiplierTable build_tables(const LatticeSpec& spec, const ModelParams& p) {
  MultiplierTable t;
  t.n_h = spec.n_h;
  const std::size_t m = spec.mode_count();
  t.k_sq.resize(m);
  t.quartic.resize(m);
  t.symbol.resize(m);
  t.active.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const ModeIndex h = mode_at(spec, i);
    const double k2 = projected_norm_sq(h);
    t.k_sq[i] = k2;
    t.symbol[i] = spectral_symbol(k2, p);
    t.quartic[i] = quartic_multiplier(k2, p);
    t.active[i] = is_active(spec, h) ? 1 : 0;
  }
  return t;
}

namespace {

std::vector<ModeIndex> with_negatives(std::vector<ModeIndex> v) {
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) v.push_back({-v[i][0], -v[i][1], -v[i][2], -v[i][3]});
  return v;
}

}  // namespace

const std::vector<ModeIndex>& unit_ring_indices() {
  // Angles 0, 30, ..., 150 degrees; the negatives cover 180..330.
  static const std::vector<ModeIndex> ring = with_negatives({{1, 0, 0, 0},
                                                             {0, 1, 0, 0},
                                                             {0, 0, 1, 0},
                                                             {0, 0, 0, 1},
                                                             {-1, 0, 1, 0},
                                                             {0, -1, 0, 1}});
  return ring;
}

const std::vector<ModeIndex>& q_ring_indices() {
  // Angles 15, 45, ..., 165 degrees.
  static const std::vector<ModeIndex> ring = with_negatives({{1, 1, 0, 0},
                                                             {0, 1, 1, 0},
                                                             {0, 0, 1, 1},
                                                             {-1, 0, 1, 1},
                                                             {-1, -1, 1, 1},
                                                             {-1, -1, 0, 1}});
  return ring;
}

}  // namespace lpq
