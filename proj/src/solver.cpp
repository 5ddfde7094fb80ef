#include "lpq/solver.hpp"

#include <algorithm>
#include <cmath>

#include "lpq/error.hpp"
#include "lpq/kernels.hpp"

namespace lpq {

double SpectralField::hermitian_defect() const {
  const LatticeSpec s = spec();
  double defect = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    defect = std::max(defect, std::abs(coeffs[negated_flat(s, i)] - std::conj(coeffs[i])));
  return defect;
}

bool SpectralField::all_finite() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](const std::complex<double>& c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
}

std::size_t SpectralField::nonzero_count(double threshold) const {
  return static_cast<std::size_t>(std::count_if(
      coeffs.begin(), coeffs.end(), [&](const auto& c) { return std::abs(c) > threshold; }));
}

void SolverConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("solver.dt must be positive");
  if (!(conv_tol > 0.0)) throw ConfigError("solver.conv_tol must be positive");
  if (max_steps < 0) throw ConfigError("solver.max_steps must be non-negative");
}

void GridSpec::validate() const {
  if (n_g < 8) throw ConfigError("grid.n_g must be at least 8");
  if (!(box_multiplier > 0.0)) throw ConfigError("grid.L must be positive");
}

std::vector<ModeIndex> seed_indices(StateKind state, const SeedOverrides* overrides) {
  std::vector<ModeIndex> base;
  if (overrides) {
    if (auto it = overrides->find(state); it != overrides->end()) base = it->second;
  }
  if (base.empty()) {
    switch (state) {
      case StateKind::QC:
        base = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0},
                {0, 0, 0, 1}, {-1, 0, 1, 0}, {0, -1, 0, 1}};
        break;
      case StateKind::C6:
        base = {{1, 0, 0, 0}, {0, 0, 1, 0}, {-1, 0, 1, 0}};
        break;
      case StateKind::T6:
        base = {{1, 1, 0, 0}, {0, 0, 1, 1}, {-1, -1, 1, 1}};
        break;
      case StateKind::Lam:
        base = {{1, 0, 0, 0}};
        break;
      case StateKind::LQ:
        base = {{0, 1, 0, 0}, {0, 0, 1, 0}, {0, 1, 1, 0}};
        break;
      case StateKind::Lq:
        throw Error("initialize: the liquid state is analytic and has no seed spectrum");
    }
  }
  std::vector<ModeIndex> all;
  auto push = [&](const ModeIndex& h) {
    if (std::find(all.begin(), all.end(), h) == all.end()) all.push_back(h);
  };
  for (const auto& h : base) push(h);
  for (const auto& h : base) push({-h[0], -h[1], -h[2], -h[3]});
  return all;
}

SpectralField initialize(StateKind state, const LatticeSpec& spec, double amplitude,
                         const SeedOverrides* overrides) {
  if (!(amplitude > 0.0)) throw ConfigError("initialize: amplitude must be positive");
  SpectralField f(spec);
  for (const auto& h : seed_indices(state, overrides)) {
    if (!spec.in_range(h) || !is_active(spec, h))
      throw ConfigError("initialize: seed index outside the usable lattice range");
    f.at(h) = amplitude;
  }
  return f;
}

Stepper::Stepper(const LatticeSpec& spec, const ModelParams& p, const SolverConfig& cfg)
    : spec_(spec), params_(p), cfg_(cfg), tables_(build_tables(spec, p)), fft_(spec.n_h) {
  cfg_.validate();
  const std::size_t m = spec.mode_count();
  dealias_mask_.resize(m);
  partner_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const ModeIndex h = mode_at(spec, i);
    bool keep = tables_.active[i] != 0;
    for (int c : h) keep = keep && 4 * std::abs(c) < spec.n_h;
    dealias_mask_[i] = keep ? 1 : 0;
    partner_[i] = negated_flat(spec, i);
  }
}

void Stepper::load_for_physical(const SpectralField& field, bool dealias) {
  if (field.n_h != spec_.n_h) throw ShapeMismatch("field lattice size does not match stepper");
  auto buf = fft_.data();
  if (dealias) {
    for (std::size_t i = 0; i < buf.size(); ++i)
      buf[i] = dealias_mask_[i] ? field.coeffs[i] : std::complex<double>(0.0);
  } else {
    std::copy(field.coeffs.begin(), field.coeffs.end(), buf.begin());
  }
  fft_.to_physical();
}

void Stepper::check_residue(double max_imag, double max_abs) const {
  if (!std::isfinite(max_abs) || !std::isfinite(max_imag))
    throw NonFiniteError("non-finite physical field");
  if (max_imag > 1e-8 * (1.0 + max_abs))
    throw SolverFailure("physical field has a non-negligible imaginary part");
}

double Stepper::step(const SpectralField& in, SpectralField& out,
                     EnergyBreakdown* energy_of_input) {
  if (energy_of_input && cfg_.dealias) *energy_of_input = energy(in);

  load_for_physical(in, cfg_.dealias);
  const auto stats = kernels::apply_bulk_force(fft_.data(), params_);
  check_residue(stats.max_imag, stats.max_abs);

  if (energy_of_input && !cfg_.dealias) {
    double e1 = 0.0;
    for (std::size_t i = 0; i < in.coeffs.size(); ++i)
      e1 += 0.5 * tables_.quartic[i] * std::norm(in.coeffs[i]);
    *energy_of_input =
        EnergyBreakdown::from_parts(e1, stats.bulk_sum / static_cast<double>(fft_.size()));
  }

  fft_.to_spectral();
  if (out.n_h != in.n_h) out = SpectralField(spec_);
  const double delta = kernels::implicit_update(
      in.coeffs, fft_.data(), 1.0 / static_cast<double>(fft_.size()), tables_.quartic,
      tables_.active, 1.0 / cfg_.dt, params_.eps, out.coeffs);
  if (cfg_.zero_mean) out.coeffs[0] = 0.0;

  // Restore exact conjugate symmetry lost to FFT rounding.
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
    const std::size_t j = partner_[i];
    if (j > i) {
      const std::complex<double> avg = 0.5 * (out.coeffs[i] + std::conj(out.coeffs[j]));
      out.coeffs[i] = avg;
      out.coeffs[j] = std::conj(avg);
    } else if (j == i) {
      out.coeffs[i] = out.coeffs[i].real();
    }
  }
  if (!std::isfinite(delta) || !out.all_finite())
    throw NonFiniteError("non-finite coefficients after step; reduce dt");
  return delta;
}

EnergyBreakdown Stepper::energy(const SpectralField& field) {
  double e1 = 0.0;
  for (std::size_t i = 0; i < field.coeffs.size(); ++i)
    e1 += 0.5 * tables_.quartic[i] * std::norm(field.coeffs[i]);
  load_for_physical(field, false);
  const auto stats = kernels::bulk_stats(fft_.data(), params_);
  check_residue(stats.max_imag, stats.max_abs);
  const auto e = EnergyBreakdown::from_parts(e1, stats.bulk_sum / static_cast<double>(fft_.size()));
  if (!std::isfinite(e.total)) throw NonFiniteError("non-finite energy");
  return e;
}

std::pair<std::vector<std::complex<double>>, std::vector<std::complex<double>>>
Stepper::nonlinear_terms(const SpectralField& field) {
  load_for_physical(field, false);
  auto buf = fft_.data();
  std::vector<double> phi(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) phi[i] = buf[i].real();
  const double scale = 1.0 / static_cast<double>(buf.size());

  auto transform = [&](int power) {
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = power == 2 ? phi[i] * phi[i] : phi[i] * phi[i] * phi[i];
    fft_.to_spectral();
    std::vector<std::complex<double>> out(buf.begin(), buf.end());
    for (auto& c : out) c *= scale;
    return out;
  };
  auto quad = transform(2);
  auto cubic = transform(3);
  return {std::move(quad), std::move(cubic)};
}

SpectralField step(const SpectralField& field, const ModelParams& p, const SolverConfig& cfg) {
  Stepper s(field.spec(), p, cfg);
  SpectralField out(field.spec());
  s.step(field, out);
  return out;
}

EnergyBreakdown energy(const SpectralField& field, const ModelParams& p) {
  Stepper s(field.spec(), p, SolverConfig{});
  return s.energy(field);
}

RelaxationResult relax_from(SpectralField field, const ModelParams& p, const SolverConfig& cfg,
                            int history_stride) {
  cfg.validate();
  Stepper stepper(field.spec(), p, cfg);
  RelaxationResult r;
  SpectralField next(field.spec());
  for (int n = 0; n < cfg.max_steps; ++n) {
    const bool record = history_stride > 0 && n % history_stride == 0;
    EnergyBreakdown e;
    const double delta = stepper.step(field, next, record ? &e : nullptr);
    if (record) r.energy_history.push_back(e.total);
    std::swap(field, next);
    r.steps_taken = n + 1;
    if (delta < cfg.conv_tol) {
      r.converged = true;
      break;
    }
  }
  r.energy = stepper.energy(field);
  if (history_stride > 0) r.energy_history.push_back(r.energy.total);
  r.field = std::move(field);
  return r;
}

RelaxationResult relax(StateKind state, const ModelParams& p, const SolverConfig& cfg,
                       const LatticeSpec& spec, const RelaxOptions& opt) {
  return relax_from(initialize(state, spec, opt.amplitude, opt.seeds), p, cfg,
                    opt.history_stride);
}

namespace {

PhysicalField evaluate(const SpectralField& field, const GridSpec& grid, double threshold,
                       const ModelParams* symbol_params) {
  grid.validate();
  if (threshold < 0.0) throw ConfigError("reconstruct: threshold must be non-negative");
  const LatticeSpec spec = field.spec();
  std::vector<kernels::PlaneWave> waves;
  for (std::size_t i = 0; i < field.coeffs.size(); ++i) {
    if (!(std::abs(field.coeffs[i]) > threshold)) continue;
    const ModeIndex h = mode_at(spec, i);
    std::complex<double> a = field.coeffs[i];
    if (symbol_params) a *= spectral_symbol(projected_norm_sq(h), *symbol_params);
    const Vec2 g = project(spec, h);
    waves.push_back({a, g[0], g[1]});
  }
  PhysicalField out;
  out.n_g = grid.n_g;
  out.box = grid.box();
  const std::size_t n = static_cast<std::size_t>(grid.n_g) * grid.n_g;
  out.values.assign(n, 0.0);
  std::vector<double> im(n, 0.0);
  kernels::evaluate_plane_waves(waves, grid.n_g, grid.spacing(), out.values, im);
  double sup = 0.0, sup_im = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sup = std::max(sup, std::abs(out.values[k]));
    sup_im = std::max(sup_im, std::abs(im[k]));
  }
  if (sup_im > 1e-8 * (1.0 + sup))
    throw SolverFailure("reconstruction has a non-negligible imaginary part");
  return out;
}

}  // namespace

PhysicalField reconstruct_physical(const SpectralField& field, const GridSpec& grid,
                                   double threshold) {
  return evaluate(field, grid, threshold, nullptr);
}

PhysicalField reconstruct_gradient_term(const SpectralField& field, const GridSpec& grid,
                                        const ModelParams& p, double threshold) {
  return evaluate(field, grid, threshold, &p);
}

std::vector<double> evaluate_at(const SpectralField& field, std::span<const Vec2> points,
                                double threshold) {
  const LatticeSpec spec = field.spec();
  std::vector<double> out(points.size(), 0.0);
  for (std::size_t i = 0; i < field.coeffs.size(); ++i) {
    if (!(std::abs(field.coeffs[i]) > threshold)) continue;
    const Vec2 g = project(spec, mode_at(spec, i));
    for (std::size_t k = 0; k < points.size(); ++k)
      out[k] += (field.coeffs[i] *
                 std::polar(1.0, g[0] * points[k][0] + g[1] * points[k][1])).real();
  }
  return out;
}

}  // namespace lpq
