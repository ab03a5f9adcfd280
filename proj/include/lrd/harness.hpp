#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lrd/dictionary.hpp"
#include "lrd/restore.hpp"
#include "lrd/solver.hpp"
#include "lrd/synthetic.hpp"
#include "lrd/tensor.hpp"

namespace lrd {

/// Adds i.i.d. Gaussian noise of standard deviation sigma_255 / 255.
DenseTensor add_awgn(const DenseTensor& t, double sigma_255, std::uint64_t seed, bool clip = false);

/// 10 log10(peak^2 / MSE); +inf for identical inputs.
double psnr(const DenseTensor& x, const DenseTensor& ref, double peak = 1.0);

/// 64-bit FNV-1a; stable across platforms, used for seeds and digests.
std::uint64_t fnv1a(const std::string& text, std::uint64_t basis = 0xcbf29ce484222325ull);

/// Per-job seed derived from (root seed, image id, sigma).
std::uint64_t job_seed(std::uint64_t root_seed, const std::string& image_id, double sigma);

/// Everything that defines one denoising method configuration.
struct BenchConfig {
  explicit BenchConfig(Dictionary d) : dict(std::move(d)) {}

  Dictionary dict;
  std::size_t rank = 3;
  double gamma = 0.0;
  double alpha = 1e-16;
  SolveOptions solve;
  NormalizationPolicy normalization;
  bool clip_noise = false;
  std::uint64_t root_seed = 0;
};

/// Hex digest of the method-defining fields (dictionary content, rank,
/// weights, solver and normalization settings; not the root seed).
std::string config_digest(const BenchConfig& config);

struct BenchmarkRecord {
  std::string image_id;
  double sigma = 0.0;
  std::string config_digest;
  double input_psnr = 0.0;
  double output_psnr = 0.0;
  double wall_time = 0.0;
  int iterations = 0;
  std::uint64_t seed = 0;
  /// Non-empty when this cell failed (e.g. unreadable image).
  std::string error;
};

inline constexpr const char* kBenchSchema = "lrd-bench-v1";
inline constexpr const char* kBenchHeader =
    "schema,image,sigma,config_digest,input_psnr,output_psnr,wall_time,iters,seed";

struct BenchmarkReport {
  std::vector<BenchmarkRecord> records;
  /// Mean over successful records, keyed by sigma.
  std::map<double, double> mean_input_psnr;
  std::map<double, double> mean_output_psnr;
};

/// Denoises one noisy realization of `clean` (noise and solver seeded by
/// job_seed) and scores it against `clean`.
BenchmarkRecord run_denoise_cell(const NamedImage& clean, double sigma, const BenchConfig& config);

BenchmarkReport run_denoise_benchmark(const std::vector<NamedImage>& images,
                                      const std::vector<double>& sigmas, const BenchConfig& config);
/// Loads every .pgm of `dataset_dir`; unreadable files yield error records.
BenchmarkReport run_denoise_benchmark(const std::filesystem::path& dataset_dir,
                                      const std::vector<double>& sigmas, const BenchConfig& config);

void write_benchmark_csv(const BenchmarkReport& report, std::ostream& out);
void write_benchmark_csv(const BenchmarkReport& report, const std::filesystem::path& path);

struct SweepRow {
  std::string image_id;
  double sigma = 0.0;
  double gamma = 0.0;
  BenchmarkRecord record;
};

inline constexpr const char* kSweepSchema = "lrd-sweep-v1";
inline constexpr const char* kSweepHeader =
    "schema,image,sigma,gamma,config_digest,input_psnr,output_psnr,wall_time,iters,seed";

struct SweepReport {
  std::vector<SweepRow> rows;
  /// Per sigma: mean output PSNR over images for each gamma (grid order).
  std::map<double, std::vector<double>> mean_curve;
  /// Per sigma: the gamma with the highest mean output PSNR.
  std::map<double, double> best_gamma;
  std::vector<double> gammas;
};

/// PSNR over a gamma grid; `config.gamma` is replaced by each grid value.
SweepReport gamma_sweep(const std::vector<NamedImage>& images, const std::vector<double>& sigmas,
                        const std::vector<double>& gamma_grid, const BenchConfig& config);
SweepReport gamma_sweep(const NamedImage& image, const std::vector<double>& sigmas,
                        const std::vector<double>& gamma_grid, const BenchConfig& config);

void write_sweep_csv(const SweepReport& report, std::ostream& out);
void write_sweep_csv(const SweepReport& report, const std::filesystem::path& path);

struct TraceSample {
  int iteration = 0;
  double elapsed = 0.0;
  double psnr = 0.0;
};

/// One sample per outer iteration: elapsed seconds since the solve started
/// and PSNR of the normalized reconstruction against `clean`.
std::vector<TraceSample> timing_trace(const NamedImage& clean, double sigma, const BenchConfig& config);

void write_trace_csv(const std::vector<TraceSample>& trace, std::ostream& out);

/// Formats a double for CSV: fixed 6 decimals, "inf"/"nan" spelled out.
std::string csv_number(double v);

}  // namespace lrd
