#pragma once

// Test-only reference computations. Nothing here calls the FFT path or the
// kernels it is used to check.

#include <complex>
#include <random>
#include <vector>

#include "lpq/lattice.hpp"
#include "lpq/model.hpp"
#include "lpq/solver.hpp"

namespace lpq::oracle {

using cplx = std::complex<double>;

// Random Hermitian field on active modes with max |h_i| <= radius.
inline SpectralField random_hermitian(const LatticeSpec& spec, std::mt19937_64& rng,
                                      double amplitude, int radius) {
  std::normal_distribution<double> n(0.0, amplitude);
  SpectralField f(spec);
  for (std::size_t i = 0; i < spec.mode_count(); ++i) {
    const ModeIndex h = mode_at(spec, i);
    bool ok = is_active(spec, h);
    for (int c : h) ok = ok && std::abs(c) <= radius;
    if (!ok) continue;
    const std::size_t j = negated_flat(spec, i);
    if (j < i) continue;
    if (j == i) {
      f.coeffs[i] = n(rng);
    } else {
      f.coeffs[i] = cplx(n(rng), n(rng));
      f.coeffs[j] = std::conj(f.coeffs[i]);
    }
  }
  return f;
}

inline std::vector<std::size_t> support(const SpectralField& f) {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < f.coeffs.size(); ++i)
    if (f.coeffs[i] != cplx(0.0)) s.push_back(i);
  return s;
}

inline ModeIndex add(const ModeIndex& a, const ModeIndex& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}
inline ModeIndex sub(const ModeIndex& a, const ModeIndex& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]};
}

// (c * c)(H) = sum_{H1 + H2 = H (mod n)} c(H1) c(H2)
inline std::vector<cplx> quadratic_convolution(const SpectralField& f) {
  const LatticeSpec spec = f.spec();
  const auto s = support(f);
  std::vector<cplx> out(f.coeffs.size(), 0.0);
  for (std::size_t a : s)
    for (std::size_t b : s) {
      const auto h = add(mode_at(spec, a), mode_at(spec, b));
      out[flat_index(spec, h)] += f.coeffs[a] * f.coeffs[b];
    }
  return out;
}

// (c * c * c)(H) = sum_{H1 + H2 + H3 = H (mod n)} c(H1) c(H2) c(H3)
inline std::vector<cplx> cubic_convolution(const SpectralField& f) {
  const LatticeSpec spec = f.spec();
  const auto s = support(f);
  std::vector<cplx> out(f.coeffs.size(), 0.0);
  for (std::size_t a : s)
    for (std::size_t b : s) {
      const cplx ab = f.coeffs[a] * f.coeffs[b];
      const auto hab = add(mode_at(spec, a), mode_at(spec, b));
      for (std::size_t c : s)
        out[flat_index(spec, add(hab, mode_at(spec, c)))] += ab * f.coeffs[c];
    }
  return out;
}

// Bulk energy density as closed index sums (H1 + ... + Hk = 0 mod n).
inline double bulk_energy_by_convolution(const SpectralField& f, const ModelParams& p) {
  const LatticeSpec spec = f.spec();
  const auto s = support(f);
  cplx two = 0.0, three = 0.0, four = 0.0;
  for (std::size_t a : s) two += f.coeffs[a] * f.coeffs[negated_flat(spec, a)];
  const auto quad = quadratic_convolution(f);
  for (std::size_t c : s) three += quad[negated_flat(spec, c)] * f.coeffs[c];
  for (std::size_t i = 0; i < quad.size(); ++i) four += quad[i] * quad[negated_flat(spec, i)];
  return (-0.5 * p.eps * two - p.alpha / 3.0 * three + 0.25 * four).real();
}

// Values of the superspace field at every 4D torus node, summed mode by mode.
inline std::vector<double> torus_values(const SpectralField& f,
                                        const std::vector<double>* multiplier = nullptr) {
  const LatticeSpec spec = f.spec();
  const int n = spec.n_h;
  const auto s = support(f);
  std::vector<double> out(spec.mode_count(), 0.0);
  for (std::size_t x = 0; x < out.size(); ++x) {
    const ModeIndex j = mode_at(spec, x);
    cplx acc = 0.0;
    for (std::size_t a : s) {
      const ModeIndex h = mode_at(spec, a);
      double phase = 0.0;
      for (int k = 0; k < 4; ++k) phase += double(h[k]) * double((j[k] + n) % n);
      cplx c = f.coeffs[a];
      if (multiplier) c *= (*multiplier)[a];
      acc += c * std::exp(cplx(0.0, 2.0 * M_PI * phase / n));
    }
    out[x] = acc.real();
  }
  return out;
}

// Direct planar sum over modes for one grid, optionally weighted per mode.
inline std::vector<double> planar_values(const SpectralField& f, int n_g, double dx,
                                         const ModelParams* symbol) {
  const LatticeSpec spec = f.spec();
  std::vector<double> out(static_cast<std::size_t>(n_g) * n_g, 0.0);
  for (int i = 0; i < n_g; ++i)
    for (int j = 0; j < n_g; ++j) {
      cplx acc = 0.0;
      for (std::size_t a = 0; a < f.coeffs.size(); ++a) {
        if (f.coeffs[a] == cplx(0.0)) continue;
        const ModeIndex h = mode_at(spec, a);
        const Vec2 g = project(spec, h);
        cplx c = f.coeffs[a];
        if (symbol) {
          const double k2 = g[0] * g[0] + g[1] * g[1];
          c *= (1.0 - k2) * (symbol->q_sq - k2);
        }
        acc += c * std::exp(cplx(0.0, g[0] * j * dx + g[1] * i * dx));
      }
      out[static_cast<std::size_t>(i) * n_g + j] = acc.real();
    }
  return out;
}

inline double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline double max_abs(const std::vector<cplx>& a) {
  double d = 0.0;
  for (const auto& v : a) d = std::max(d, std::abs(v));
  return d;
}

}  // namespace lpq::oracle
