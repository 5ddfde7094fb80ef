#include "lpq/model.hpp"

#include "lpq/error.hpp"

namespace lpq {

namespace {
constexpr std::array<std::string_view, kNumStates> kNames = {"QC", "C6", "LQ",
                                                             "T6", "Lam", "Lq"};
}

std::string_view to_string(StateKind s) { return kNames[index_of(s)]; }

std::optional<StateKind> parse_state(std::string_view name) {
  for (int i = 0; i < kNumStates; ++i)
    if (kNames[i] == name) return static_cast<StateKind>(i);
  return std::nullopt;
}

ModelParams ModelParams::standard(double eps, double alpha) {
  ModelParams p;
  p.eps = eps;
  p.alpha = alpha;
  return p;
}

ModelParams ModelParams::with_scale(double c_pen, double q, double eps, double alpha) {
  ModelParams p;
  p.c_pen = c_pen;
  p.eps = eps;
  p.alpha = alpha;
  if (q != p.q) {
    p.q = q;
    p.q_sq = q * q;
  }
  p.validate();
  return p;
}

void ModelParams::validate() const {
  if (!(c_pen > 0.0)) throw ConfigError("model: c_pen must be positive");
  if (!(q > 1.0)) throw ConfigError("model: q must exceed 1");
  if (std::abs(q * q - q_sq) > 1e-12) throw ConfigError("model: q_sq inconsistent with q");
  if (!std::isfinite(eps) || !std::isfinite(alpha))
    throw ConfigError("model: eps and alpha must be finite");
}

LiquidState liquid_equilibrium(const ModelParams& p) {
  // Stationary points: v = 0 and the real roots of v^2 - alpha v + (c q^4 - eps) = 0.
  LiquidState best{0.0, liquid_objective(0.0, p)};
  const double b = p.c_pen * p.q_sq * p.q_sq - p.eps;
  const double disc = p.alpha * p.alpha - 4.0 * b;
  if (disc >= 0.0) {
    const double r = std::sqrt(disc);
    for (double v : {0.5 * (p.alpha + r), 0.5 * (p.alpha - r)}) {
      const double f = liquid_objective(v, p);
      if (f < best.energy_density) best = {v, f};
    }
  }
  return best;
}

}  // namespace lpq
