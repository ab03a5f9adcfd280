#include "lrd/restore.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace lrd {

double percentile(const DenseTensor& t, double pct) {
  std::vector<double> v(t.data().begin(), t.data().end());
  std::sort(v.begin(), v.end());
  const double pos = std::clamp(pct, 0.0, 100.0) / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

DenseTensor normalize_output(const DenseTensor& u, const ReferenceStats& ref,
                             const NormalizationPolicy& policy) {
  if (!(ref.hi > ref.lo)) throw DomainError("normalization target range must satisfy lo < hi");
  DenseTensor out = u;
  if (policy.kind == NormalizationPolicy::Kind::None) return out;
  if (policy.kind == NormalizationPolicy::Kind::PercentileAffine) {
    const double p_lo = percentile(u, policy.lower_percentile);
    const double p_hi = percentile(u, policy.upper_percentile);
    // Degenerate (constant) inputs are only clipped.
    if (p_hi > p_lo) {
      const double scale = (ref.hi - ref.lo) / (p_hi - p_lo);
      for (auto& v : out.data()) v = ref.lo + (v - p_lo) * scale;
    }
  }
  for (auto& v : out.data()) v = std::clamp(v, ref.lo, ref.hi);
  return out;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

const Dictionary& dict_for_channel(const std::vector<Dictionary>& dicts, std::size_t c,
                                   std::size_t channels) {
  if (dicts.size() == 1) return dicts.front();
  if (dicts.size() != channels) {
    throw ConfigError("expected 1 or " + std::to_string(channels) + " dictionaries, got " +
                      std::to_string(dicts.size()));
  }
  return dicts[c];
}

}  // namespace

RestorationResult denoise(const DenseTensor& signal, const Dictionary& dict, std::size_t rank,
                          double gamma, double alpha, const SolveOptions& options,
                          const NormalizationPolicy& normalization,
                          const IterationCallback& on_iteration) {
  const auto start = std::chrono::steady_clock::now();
  const RegularizationConfig config = denoise_preset(gamma, alpha);
  LrdResult solved = lrd_solve(signal, dict, rank, config, options, on_iteration);
  RestorationResult r;
  r.output = normalize_output(reconstruct(solved.factors, dict), ReferenceStats{}, normalization);
  r.history = std::move(solved.history);
  r.iterations = solved.iterations;
  r.converged = solved.converged;
  r.wall_time = seconds_since(start);
  return r;
}

RestorationResult enhance(const DenseTensor& signal, const Dictionary& dict, std::size_t rank,
                          const RegularizationConfig& config, const SolveOptions& options) {
  if (!config.gamma_per_filter || !config.zeta_per_filter || !config.delta) {
    throw ConfigError("enhancement needs per-filter gamma_m, zeta_m and delta_m lists");
  }
  config.validate(dict.size());
  const auto start = std::chrono::steady_clock::now();
  LrdResult solved = lrd_solve(signal, dict, rank, config, options);
  std::vector<DenseTensor> components = reconstruct_components(solved.factors, dict);

  RestorationResult r;
  r.output = signal;
  for (std::size_t m = 0; m < components.size(); ++m) {
    const double gain = (*config.delta)[m];
    if (gain == 0.0) continue;
    for (std::size_t k = 0; k < r.output.size(); ++k) r.output[k] += gain * components[m][k];
  }
  r.per_filter_components = std::move(components);
  r.history = std::move(solved.history);
  r.iterations = solved.iterations;
  r.converged = solved.converged;
  r.wall_time = seconds_since(start);
  return r;
}

std::vector<RestorationResult> denoise_channels(const std::vector<DenseTensor>& channels,
                                                const std::vector<Dictionary>& dicts,
                                                std::size_t rank, double gamma, double alpha,
                                                const SolveOptions& options,
                                                const NormalizationPolicy& normalization) {
  std::vector<RestorationResult> out;
  for (std::size_t c = 0; c < channels.size(); ++c) {
    out.push_back(denoise(channels[c], dict_for_channel(dicts, c, channels.size()), rank, gamma,
                          alpha, options, normalization));
  }
  return out;
}

std::vector<RestorationResult> enhance_channels(const std::vector<DenseTensor>& channels,
                                                const std::vector<Dictionary>& dicts,
                                                std::size_t rank, const RegularizationConfig& config,
                                                const SolveOptions& options) {
  std::vector<RestorationResult> out;
  for (std::size_t c = 0; c < channels.size(); ++c) {
    out.push_back(enhance(channels[c], dict_for_channel(dicts, c, channels.size()), rank, config, options));
  }
  return out;
}

double mean_local_std(const DenseTensor& t, std::size_t window) {
  if (t.order() < 2) throw DomainError("mean_local_std needs a tensor of order >= 2");
  if (window == 0) throw DomainError("window must be positive");
  const std::size_t h = t.extent(t.order() - 2);
  const std::size_t w = t.extent(t.order() - 1);
  const std::size_t plane = h * w;
  const std::size_t slices = t.size() / plane;
  const auto half = static_cast<long>(window / 2);
  const auto count = static_cast<double>(window * window);
  double acc = 0.0;
  for (std::size_t s = 0; s < slices; ++s) {
    const double* p = t.data().data() + s * plane;
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        double sum = 0.0;
        for (long dy = -half; dy < static_cast<long>(window) - half; ++dy) {
          const std::size_t yy = (y + static_cast<std::size_t>(dy + static_cast<long>(h))) % h;
          for (long dx = -half; dx < static_cast<long>(window) - half; ++dx) {
            sum += p[yy * w + (x + static_cast<std::size_t>(dx + static_cast<long>(w))) % w];
          }
        }
        const double mean = sum / count;
        double dev = 0.0;
        for (long dy = -half; dy < static_cast<long>(window) - half; ++dy) {
          const std::size_t yy = (y + static_cast<std::size_t>(dy + static_cast<long>(h))) % h;
          for (long dx = -half; dx < static_cast<long>(window) - half; ++dx) {
            const double d = p[yy * w + (x + static_cast<std::size_t>(dx + static_cast<long>(w))) % w] - mean;
            dev += d * d;
          }
        }
        acc += std::sqrt(dev / count);
      }
    }
  }
  return acc / static_cast<double>(t.size());
}

}  // namespace lrd
