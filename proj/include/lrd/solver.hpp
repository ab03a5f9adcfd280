#pragma once

// Alternating per-mode solver for low-rank deconvolution with squared-TV and
// integral regularization, carried out in the DFT domain.
//
// The signal is modelled as U = sum_m D_m * [[X_m^(0), ..., X_m^(N-1)]]
// (circular convolution with rank-R Kruskal activations). Updating mode n for
// all filters at once is a linear least-squares problem in the factor spectra
// Xhat_m^(n) = F X_m^(n). Its normal matrix
//
//     W^H W + gamma Theta^H Theta + zeta Omega^H Omega + alpha I
//
// couples no two distinct mode-n frequency indices i: the filter spectra act
// elementwise and [Qhat kron I] keeps i fixed. So instead of one
// (M R I_n)^2 system we solve I_n independent (M R)^2 Hermitian "slice"
// systems. Slice i has one row per complement frequency lambda with entries
// Dhat_m(i, lambda) * Qhat_m(lambda, r) over the unknowns (m, r).
//
// Scales: the spectral objective equals prod(I) times the spatial one
// (Parseval), and the ridge alpha acts on the factor spectra, i.e. the ridge
// term reported in ObjectiveBreakdown is alpha/(2 prod(I)) sum ||Xhat||^2.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "lrd/dictionary.hpp"
#include "lrd/multilinear.hpp"
#include "lrd/regularization.hpp"
#include "lrd/spectral.hpp"
#include "lrd/tensor.hpp"

namespace lrd {

struct SolveOptions {
  int max_outer_iters = 20;
  /// Stop once |J_prev - J| < rel_tol * max(|J_prev|, |J|).
  double rel_tol = 1e-5;
  std::uint64_t seed = 0;
  /// Largest tolerated imaginary residue of the spatial factors, relative to
  /// max(1, largest real magnitude).
  double imag_purge_tol = 1e-8;
  /// Real signal and filters make slice I_n - i the conjugate of slice i;
  /// when set only slices 0..I_n/2 are solved and the rest mirrored.
  bool exploit_symmetry = true;
  /// Lower bound on the ridge used inside the slice factorizations, relative
  /// to the mean diagonal of the slice matrix. Keeps the Cholesky factor
  /// well-defined when alpha is below rounding level (e.g. 1e-16). 0 disables.
  double ridge_floor = 1e-12;
  IntegralDcPolicy dc_policy = IntegralDcPolicy::zero();

  void validate() const;
};

/// factor spectra indexed [m][n], each I_n x R.
using FactorSpectra = std::vector<std::vector<Eigen::MatrixXcd>>;

/// Seeded uniform [0,1) spatial factors for M filters.
std::vector<KruskalFactors> init_spatial_factors(const Shape& shape, std::size_t rank,
                                                 std::size_t filter_count, std::uint64_t seed);
FactorSpectra init_factors(const Shape& shape, std::size_t rank, std::size_t filter_count,
                           std::uint64_t seed);

FactorSpectra factor_spectra_of(const std::vector<KruskalFactors>& factors);

/// Transposed mode-n unfoldings (Lambda x I_n) of the fixed spectral data,
/// so slice i of a mode is a contiguous column.
struct ModeUnfoldings {
  Eigen::MatrixXcd signal;
  std::vector<Eigen::MatrixXcd> filters;
  Eigen::MatrixXd tv;
  Eigen::MatrixXd ti;
};

class SolverState {
 public:
  /// Starts from init_factors(shape, rank, M, options.seed) unless `initial`
  /// provides spatial factors.
  SolverState(DenseTensor signal, const Dictionary& dict, std::size_t rank,
              RegularizationConfig config, SolveOptions options = {},
              std::optional<std::vector<KruskalFactors>> initial = std::nullopt);

  const Shape& shape() const { return signal_.shape(); }
  std::size_t order() const { return signal_.order(); }
  std::size_t rank() const { return rank_; }
  std::size_t filter_count() const { return filter_spectra_.size(); }

  const DenseTensor& signal() const { return signal_; }
  const ComplexTensor& signal_spectrum() const { return signal_spectrum_; }
  const std::vector<ComplexTensor>& filter_spectra() const { return filter_spectra_; }
  const FactorSpectra& factor_spectra() const { return factors_; }
  FactorSpectra& factor_spectra() { return factors_; }
  const RegularizationConfig& config() const { return config_; }
  const SolveOptions& options() const { return options_; }

  /// sum_d |2 pi j xi_d|^2 and sum_d |(2 pi j xi_d)^-1|^2 on the full grid.
  const DenseTensor& tv_energy() const { return tv_energy_; }
  const DenseTensor& ti_energy() const { return ti_energy_; }

  const ModeUnfoldings& unfoldings(std::size_t mode) const { return unfoldings_.at(mode); }

  std::vector<ObjectiveBreakdown>& history() { return history_; }
  const std::vector<ObjectiveBreakdown>& history() const { return history_; }

 private:
  DenseTensor signal_;
  ComplexTensor signal_spectrum_;
  std::vector<ComplexTensor> filter_spectra_;
  FactorSpectra factors_;
  std::size_t rank_;
  RegularizationConfig config_;
  SolveOptions options_;
  DenseTensor tv_energy_;
  DenseTensor ti_energy_;
  std::vector<ModeUnfoldings> unfoldings_;
  std::vector<ObjectiveBreakdown> history_;
};

/// Hermitian slice system A x = b over the unknowns (m, r), index m * R + r.
struct SliceSystem {
  Eigen::MatrixXcd lhs;
  Eigen::VectorXcd rhs;
};

/// Per-mode data shared by all slice systems of that mode: the mode-n
/// unfoldings of the signal, filter spectra and energy weights, and the
/// complement Khatri-Rao products Qhat_m.
class ModeSystems {
 public:
  ModeSystems(const SolverState& state, std::size_t mode);

  std::size_t mode() const { return mode_; }
  std::size_t slices() const { return static_cast<std::size_t>(data_->signal.cols()); }
  std::size_t unknowns() const { return filters_ * rank_; }

  /// Full Hermitian system with the configured alpha.
  SliceSystem build(std::size_t i) const;
  /// Lower triangle only; adds `ridge` on the diagonal.
  void assemble_lower(std::size_t i, double ridge, Eigen::MatrixXcd& lhs, Eigen::VectorXcd& rhs) const;

 private:
  std::size_t mode_;
  std::size_t filters_;
  std::size_t rank_;
  double alpha_;
  bool per_filter_;
  std::vector<double> gamma_m_;
  std::vector<double> zeta_m_;
  double gamma_;
  double zeta_;
  const ModeUnfoldings* data_;
  std::vector<Eigen::MatrixXcd> q_;
};

SliceSystem build_slice_system(std::size_t mode, std::size_t i, const SolverState& state);

/// Exact minimization over all filters' mode-n factor spectra.
/// Throws NumericalError naming (mode, slice) when a slice solve fails.
void solve_mode(std::size_t mode, SolverState& state);

ObjectiveBreakdown objective(const SolverState& state);
ObjectiveBreakdown objective(const DenseTensor& signal, const Dictionary& dict,
                             const std::vector<KruskalFactors>& factors,
                             const RegularizationConfig& config,
                             IntegralDcPolicy dc = IntegralDcPolicy::zero());

/// Spatial factors from the state's spectra. Throws NumericalError when the
/// imaginary residue exceeds options().imag_purge_tol.
std::vector<KruskalFactors> spatial_factors(const SolverState& state);

/// sum_m D_m * [[F_m]], evaluated spectrally.
DenseTensor reconstruct(const std::vector<KruskalFactors>& factors, const Dictionary& dict);
/// The individual D_m * [[F_m]].
std::vector<DenseTensor> reconstruct_components(const std::vector<KruskalFactors>& factors,
                                                const Dictionary& dict);
/// Reconstruction from the current spectra of a solver state.
DenseTensor reconstruct(const SolverState& state);

struct LrdResult {
  std::vector<KruskalFactors> factors;
  std::vector<ObjectiveBreakdown> history;
  int iterations = 0;
  bool converged = false;
};

struct IterationReport {
  int iteration;
  const SolverState& state;
  const ObjectiveBreakdown& breakdown;
};
using IterationCallback = std::function<void(const IterationReport&)>;

/// Outer loop: sweep modes 0..N-1 until the relative change of the total
/// objective drops below rel_tol or max_outer_iters sweeps ran. history holds
/// one breakdown per sweep.
LrdResult lrd_solve(const DenseTensor& signal, const Dictionary& dict, std::size_t rank,
                    const RegularizationConfig& config, const SolveOptions& options = {},
                    const IterationCallback& on_iteration = {});

/// Thread cap for slice-parallel work: LRD_THREADS when set, else the
/// OpenMP default.
int configured_threads();

}  // namespace lrd
