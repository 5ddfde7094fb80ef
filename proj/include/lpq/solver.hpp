#pragma once

// Projection-method solver: the 4D periodic superspace field is relaxed by a
// semi-implicit gradient flow whose nonlinear terms are evaluated
// pseudospectrally, and projected back to the plane on demand.

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "lpq/fft4.hpp"
#include "lpq/lattice.hpp"
#include "lpq/model.hpp"

namespace lpq {

struct SpectralField {
  int n_h = 0;
  std::vector<std::complex<double>> coeffs;

  SpectralField() = default;
  explicit SpectralField(const LatticeSpec& spec)
      : n_h(spec.n_h), coeffs(spec.mode_count(), 0.0) {}

  LatticeSpec spec() const { return LatticeSpec(n_h); }
  std::complex<double>& at(const ModeIndex& h) { return coeffs[flat_index(spec(), h)]; }
  std::complex<double> at(const ModeIndex& h) const { return coeffs[flat_index(spec(), h)]; }

  // sup_h |c(-h) - conj(c(h))|
  double hermitian_defect() const;
  bool all_finite() const;
  std::size_t nonzero_count(double threshold = 0.0) const;
};

struct SolverConfig {
  double dt = 0.1;
  int max_steps = 20000;
  double conv_tol = 1e-9;
  bool dealias = false;
  bool zero_mean = false;

  void validate() const;
};

struct RelaxationResult {
  SpectralField field;
  EnergyBreakdown energy;
  int steps_taken = 0;
  bool converged = false;
  std::vector<double> energy_history;  // totals, one per recorded step
};

struct GridSpec {
  int n_g = 256;
  double box_multiplier = 30.0;  // D = L 2 pi

  double box() const { return box_multiplier * 2.0 * M_PI; }
  double spacing() const { return box() / n_g; }
  void validate() const;
};

struct PhysicalField {
  int n_g = 0;
  double box = 0.0;
  std::vector<double> values;  // row-major, value(i, j) at (x, y) = (j dx, i dx)

  double spacing() const { return box / n_g; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * n_g + j]; }
};

// Alternative seed spectra, keyed by state. Each entry is a list of signed
// indices; conjugate partners are added automatically.
using SeedOverrides = std::map<StateKind, std::vector<ModeIndex>>;

// Seed indices for an ordered state, including conjugate partners.
std::vector<ModeIndex> seed_indices(StateKind state, const SeedOverrides* overrides = nullptr);

SpectralField initialize(StateKind state, const LatticeSpec& spec, double amplitude = 0.3,
                         const SeedOverrides* overrides = nullptr);

// Reusable workspace for one (lattice, parameters, config) triple. Not shared
// between threads; create one per concurrent relaxation.
class Stepper {
 public:
  Stepper(const LatticeSpec& spec, const ModelParams& p, const SolverConfig& cfg);

  const MultiplierTable& tables() const { return tables_; }
  const ModelParams& params() const { return params_; }

  // One semi-implicit step. Returns sup |out - in| over modes. When
  // `energy_of_input` is given it receives the energy of `in`.
  double step(const SpectralField& in, SpectralField& out,
              EnergyBreakdown* energy_of_input = nullptr);

  EnergyBreakdown energy(const SpectralField& field);

  // Spectra of phi^2 and phi^3 (pseudospectral, mode-wise).
  std::pair<std::vector<std::complex<double>>, std::vector<std::complex<double>>> nonlinear_terms(
      const SpectralField& field);

 private:
  void load_for_physical(const SpectralField& field, bool dealias);
  void check_residue(double max_imag, double max_abs) const;

  LatticeSpec spec_;
  ModelParams params_;
  SolverConfig cfg_;
  MultiplierTable tables_;
  std::vector<std::uint8_t> dealias_mask_;
  std::vector<std::size_t> partner_;
  Fft4 fft_;
};

SpectralField step(const SpectralField& field, const ModelParams& p, const SolverConfig& cfg);

// Energy densities of a field.
EnergyBreakdown energy(const SpectralField& field, const ModelParams& p);

struct RelaxOptions {
  double amplitude = 0.3;
  int history_stride = 0;  // 0: no history
  const SeedOverrides* seeds = nullptr;
};

RelaxationResult relax(StateKind state, const ModelParams& p, const SolverConfig& cfg,
                       const LatticeSpec& spec, const RelaxOptions& opt = {});

// Continue relaxing from an arbitrary field.
RelaxationResult relax_from(SpectralField field, const ModelParams& p, const SolverConfig& cfg,
                            int history_stride = 0);

// phi(r) on the n_g x n_g grid from all modes with |c| > threshold.
PhysicalField reconstruct_physical(const SpectralField& field, const GridSpec& grid,
                                   double threshold = 1e-8);

// G(phi)(r) = sum sigma(|g|^2) c(H) exp(i g.r), sigma the first-power symbol.
PhysicalField reconstruct_gradient_term(const SpectralField& field, const GridSpec& grid,
                                        const ModelParams& p, double threshold = 1e-8);

// phi at arbitrary planar points (x, y), all modes with |c| > threshold.
std::vector<double> evaluate_at(const SpectralField& field, std::span<const Vec2> points,
                                double threshold = 1e-8);

}  // namespace lpq
