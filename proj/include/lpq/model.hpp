#pragma once

// Lifshitz-Petrich model: parameters, bulk polynomial, Fourier symbols of the
// two-scale interaction operator and the constant-field (liquid) minimizer.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

namespace lpq {

inline const double kSqrt3 = std::sqrt(3.0);

enum class StateKind : int { QC = 0, C6 = 1, LQ = 2, T6 = 3, Lam = 4, Lq = 5 };

inline constexpr int kNumStates = 6;
inline constexpr int kNumOrdered = 5;

// Ordered states in canonical (tie-break) order.
inline constexpr std::array<StateKind, kNumOrdered> kOrderedStates = {
    StateKind::QC, StateKind::C6, StateKind::LQ, StateKind::T6, StateKind::Lam};

inline constexpr std::array<StateKind, kNumStates> kAllStates = {
    StateKind::QC, StateKind::C6,  StateKind::LQ,
    StateKind::T6, StateKind::Lam, StateKind::Lq};

constexpr int index_of(StateKind s) { return static_cast<int>(s); }

std::string_view to_string(StateKind s);
std::optional<StateKind> parse_state(std::string_view name);

struct ModelParams {
  double c_pen = 1.0;
  double q = 2.0 * std::cos(M_PI / 12.0);
  // q^2 kept separately so that the default is exactly 2 + sqrt(3).
  double q_sq = 2.0 + kSqrt3;
  double eps = 0.0;
  double alpha = 0.0;

  // Default two-scale model (c = 1, q = 2 cos(pi/12)) at the given (eps, alpha).
  static ModelParams standard(double eps, double alpha);
  // Custom second length scale; q_sq is taken as q*q.
  static ModelParams with_scale(double c_pen, double q, double eps, double alpha);

  // Throws ConfigError when an invariant is violated.
  void validate() const;
};

struct EnergyBreakdown {
  double e1 = 0.0;  // interaction energy density
  double e2 = 0.0;  // bulk energy density
  double total = 0.0;

  static EnergyBreakdown from_parts(double e1, double e2) { return {e1, e2, e1 + e2}; }
};

// H(v) = -eps/2 v^2 - alpha/3 v^3 + v^4/4
inline double bulk_density(double v, const ModelParams& p) {
  const double v2 = v * v;
  return -0.5 * p.eps * v2 - (p.alpha / 3.0) * v2 * v + 0.25 * v2 * v2;
}

// Explicit nonlinear forcing of the stepper, alpha v^2 - v^3.
inline double bulk_force(double v, const ModelParams& p) {
  const double v2 = v * v;
  return p.alpha * v2 - v2 * v;
}

// (1 - k^2)(q^2 - k^2): Fourier symbol of (lap + 1)(lap + q^2).
inline double spectral_symbol(double k_sq, const ModelParams& p) {
  return (1.0 - k_sq) * (p.q_sq - k_sq);
}

// c (1 - k^2)^2 (q^2 - k^2)^2: the implicit operator of the gradient flow.
inline double quartic_multiplier(double k_sq, const ModelParams& p) {
  const double s = spectral_symbol(k_sq, p);
  return p.c_pen * s * s;
}

struct LiquidState {
  double c_star = 0.0;
  double energy_density = 0.0;
};

// Global minimizer over constant fields v of (c/2) q^4 v^2 + H(v).
LiquidState liquid_equilibrium(const ModelParams& p);

// Objective minimized by liquid_equilibrium.
inline double liquid_objective(double v, const ModelParams& p) {
  return 0.5 * p.c_pen * p.q_sq * p.q_sq * v * v + bulk_density(v, p);
}

}  // namespace lpq
