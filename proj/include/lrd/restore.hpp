#pragma once

#include <optional>
#include <vector>

#include "lrd/dictionary.hpp"
#include "lrd/regularization.hpp"
#include "lrd/solver.hpp"
#include "lrd/tensor.hpp"

namespace lrd {

/// Post-denoising intensity normalization strategy.
///   PercentileAffine: map the lower/upper percentiles of U linearly onto the
///                     target range, then clip to it.
///   Clip:             clip to the target range only.
///   None:             leave U untouched.
struct NormalizationPolicy {
  enum class Kind { PercentileAffine, Clip, None };
  Kind kind = Kind::PercentileAffine;
  double lower_percentile = 0.1;
  double upper_percentile = 99.9;
};

/// Target intensity range of the normalized output.
struct ReferenceStats {
  double lo = 0.0;
  double hi = 1.0;
};

/// Linear-interpolated percentile (0..100) of the tensor's values.
double percentile(const DenseTensor& t, double pct);

DenseTensor normalize_output(const DenseTensor& u, const ReferenceStats& ref = {},
                             const NormalizationPolicy& policy = {});

struct RestorationResult {
  DenseTensor output;
  /// Per-filter reconstructions D_m * [[X_m]] (enhancement only).
  std::optional<std::vector<DenseTensor>> per_filter_components;
  std::vector<ObjectiveBreakdown> history;
  int iterations = 0;
  bool converged = false;
  double wall_time = 0.0;
};

/// Solves with denoise_preset(gamma, alpha) and normalizes the reconstruction.
RestorationResult denoise(const DenseTensor& signal, const Dictionary& dict, std::size_t rank,
                          double gamma, double alpha, const SolveOptions& options = {},
                          const NormalizationPolicy& normalization = {},
                          const IterationCallback& on_iteration = {});

/// Solves with per-filter gamma_m / zeta_m and returns S + sum_m delta_m U_m.
/// `config` must carry gamma_m, zeta_m and delta lists of length M.
RestorationResult enhance(const DenseTensor& signal, const Dictionary& dict, std::size_t rank,
                          const RegularizationConfig& config, const SolveOptions& options = {});

/// Channels are solved independently. `dicts` holds either one shared
/// dictionary or one per channel.
std::vector<RestorationResult> denoise_channels(const std::vector<DenseTensor>& channels,
                                                const std::vector<Dictionary>& dicts,
                                                std::size_t rank, double gamma, double alpha,
                                                const SolveOptions& options = {},
                                                const NormalizationPolicy& normalization = {});
std::vector<RestorationResult> enhance_channels(const std::vector<DenseTensor>& channels,
                                                const std::vector<Dictionary>& dicts,
                                                std::size_t rank, const RegularizationConfig& config,
                                                const SolveOptions& options = {});

/// Mean over positions of the standard deviation in a window x window
/// neighbourhood (circular), averaged over every 2-D slice of the trailing
/// two modes. Local-contrast statistic used to check enhancement.
double mean_local_std(const DenseTensor& t, std::size_t window = 7);

}  // namespace lrd
