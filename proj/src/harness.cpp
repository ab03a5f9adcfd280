#include "lrd/harness.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "lrd/error.hpp"
#include "lrd/image_io.hpp"

namespace lrd {

DenseTensor add_awgn(const DenseTensor& t, double sigma_255, std::uint64_t seed, bool clip) {
  if (!(sigma_255 >= 0.0)) throw DomainError("noise sigma must be non-negative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma_255 / 255.0);
  DenseTensor out = t;
  for (auto& v : out.data()) {
    v += noise(rng);
    if (clip) v = std::clamp(v, 0.0, 1.0);
  }
  return out;
}

double psnr(const DenseTensor& x, const DenseTensor& ref, double peak) {
  if (x.shape() != ref.shape()) {
    throw DomainError("psnr shape mismatch: " + shape_to_string(x.shape()) + " vs " +
                      shape_to_string(ref.shape()));
  }
  double sse = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - ref[k];
    sse += d * d;
  }
  if (sse == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = sse / static_cast<double>(x.size());
  return 10.0 * std::log10(peak * peak / mse);
}

std::uint64_t fnv1a(const std::string& text, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Exact text for doubles so digests do not depend on stream formatting.
std::string exact(double v) { return hex64(std::bit_cast<std::uint64_t>(v)); }

std::string normalization_name(const NormalizationPolicy& p) {
  switch (p.kind) {
    case NormalizationPolicy::Kind::PercentileAffine: return "percentile_affine";
    case NormalizationPolicy::Kind::Clip: return "clip";
    case NormalizationPolicy::Kind::None: return "none";
  }
  return "unknown";
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void fill_means(BenchmarkReport& report) {
  std::map<double, std::size_t> counts;
  for (const auto& r : report.records) {
    if (!r.error.empty()) continue;
    report.mean_input_psnr[r.sigma] += r.input_psnr;
    report.mean_output_psnr[r.sigma] += r.output_psnr;
    ++counts[r.sigma];
  }
  for (auto& [sigma, n] : counts) {
    report.mean_input_psnr[sigma] /= static_cast<double>(n);
    report.mean_output_psnr[sigma] /= static_cast<double>(n);
  }
}

BenchmarkRecord error_record(const std::string& id, double sigma, const BenchConfig& config,
                             std::string message) {
  BenchmarkRecord r;
  r.image_id = id;
  r.sigma = sigma;
  r.config_digest = config_digest(config);
  r.input_psnr = std::numeric_limits<double>::quiet_NaN();
  r.output_psnr = std::numeric_limits<double>::quiet_NaN();
  r.seed = job_seed(config.root_seed, id, sigma);
  r.error = std::move(message);
  return r;
}

void write_record_fields(std::ostream& out, const BenchmarkRecord& r) {
  out << r.config_digest << ',' << csv_number(r.input_psnr) << ',' << csv_number(r.output_psnr)
      << ',' << csv_number(r.wall_time) << ',' << r.iterations << ',' << r.seed << '\n';
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

std::uint64_t job_seed(std::uint64_t root_seed, const std::string& image_id, double sigma) {
  return fnv1a(std::to_string(root_seed) + "|" + image_id + "|" + exact(sigma));
}

std::string config_digest(const BenchConfig& config) {
  std::ostringstream text;
  text << "dict=" << config.dict.name() << ";support=" << shape_to_string(config.dict.support())
       << ";M=" << config.dict.size() << ";taps=";
  std::uint64_t taps = 0xcbf29ce484222325ull;
  for (const auto& f : config.dict.filters())
    for (double v : f.data()) taps = fnv1a(exact(v), taps);
  text << hex64(taps) << ";rank=" << config.rank << ";gamma=" << exact(config.gamma)
       << ";alpha=" << exact(config.alpha) << ";iters=" << config.solve.max_outer_iters
       << ";tol=" << exact(config.solve.rel_tol) << ";floor=" << exact(config.solve.ridge_floor)
       << ";sym=" << config.solve.exploit_symmetry
       << ";norm=" << normalization_name(config.normalization)
       << ";plo=" << exact(config.normalization.lower_percentile)
       << ";phi=" << exact(config.normalization.upper_percentile)
       << ";clip_noise=" << config.clip_noise;
  return hex64(fnv1a(text.str()));
}

BenchmarkRecord run_denoise_cell(const NamedImage& clean, double sigma, const BenchConfig& config) {
  BenchmarkRecord r;
  r.image_id = clean.id;
  r.sigma = sigma;
  r.config_digest = config_digest(config);
  r.seed = job_seed(config.root_seed, clean.id, sigma);

  const DenseTensor noisy = add_awgn(clean.image, sigma, r.seed, config.clip_noise);
  SolveOptions options = config.solve;
  options.seed = r.seed;
  const RestorationResult result =
      denoise(noisy, config.dict, config.rank, config.gamma, config.alpha, options, config.normalization);
  r.input_psnr = psnr(noisy, clean.image);
  r.output_psnr = psnr(result.output, clean.image);
  r.wall_time = result.wall_time;
  r.iterations = result.iterations;
  return r;
}

BenchmarkReport run_denoise_benchmark(const std::vector<NamedImage>& images,
                                      const std::vector<double>& sigmas, const BenchConfig& config) {
  BenchmarkReport report;
  for (const auto& img : images) {
    for (double sigma : sigmas) {
      try {
        report.records.push_back(run_denoise_cell(img, sigma, config));
      } catch (const NumericalError& e) {
        report.records.push_back(error_record(img.id, sigma, config, e.what()));
      }
    }
  }
  fill_means(report);
  return report;
}

BenchmarkReport run_denoise_benchmark(const std::filesystem::path& dataset_dir,
                                      const std::vector<double>& sigmas, const BenchConfig& config) {
  if (!std::filesystem::is_directory(dataset_dir)) {
    throw IoError("dataset directory not found: " + dataset_dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dataset_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  BenchmarkReport report;
  for (const auto& file : files) {
    const std::string id = file.stem().string();
    NamedImage img{id, DenseTensor(Shape{1})};
    std::string failure;
    try {
      img.image = read_pgm(file);
    } catch (const Error& e) {
      failure = e.what();
    }
    for (double sigma : sigmas) {
      if (!failure.empty()) {
        report.records.push_back(error_record(id, sigma, config, failure));
        continue;
      }
      try {
        report.records.push_back(run_denoise_cell(img, sigma, config));
      } catch (const NumericalError& e) {
        report.records.push_back(error_record(id, sigma, config, e.what()));
      }
    }
  }
  fill_means(report);
  return report;
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_benchmark_csv(const BenchmarkReport& report, std::ostream& out) {
  out << kBenchHeader << '\n';
  for (const auto& r : report.records) {
    out << kBenchSchema << ',' << r.image_id << ',' << csv_number(r.sigma) << ',';
    write_record_fields(out, r);
  }
}

void write_benchmark_csv(const BenchmarkReport& report, const std::filesystem::path& path) {
  auto out = open_output(path);
  write_benchmark_csv(report, out);
}

SweepReport gamma_sweep(const std::vector<NamedImage>& images, const std::vector<double>& sigmas,
                        const std::vector<double>& gamma_grid, const BenchConfig& config) {
  if (gamma_grid.empty()) throw ConfigError("gamma grid is empty");
  SweepReport report;
  report.gammas = gamma_grid;
  for (double sigma : sigmas) {
    std::vector<double> curve(gamma_grid.size(), 0.0);
    for (std::size_t g = 0; g < gamma_grid.size(); ++g) {
      BenchConfig cfg = config;
      cfg.gamma = gamma_grid[g];
      std::size_t ok = 0;
      for (const auto& img : images) {
        BenchmarkRecord rec;
        try {
          rec = run_denoise_cell(img, sigma, cfg);
          curve[g] += rec.output_psnr;
          ++ok;
        } catch (const NumericalError& e) {
          rec = error_record(img.id, sigma, cfg, e.what());
        }
        report.rows.push_back({img.id, sigma, gamma_grid[g], rec});
      }
      curve[g] = ok ? curve[g] / static_cast<double>(ok) : std::numeric_limits<double>::quiet_NaN();
    }
    std::size_t best = 0;
    for (std::size_t g = 1; g < curve.size(); ++g)
      if (curve[g] > curve[best] || std::isnan(curve[best])) best = g;
    report.best_gamma[sigma] = gamma_grid[best];
    report.mean_curve[sigma] = std::move(curve);
  }
  return report;
}

SweepReport gamma_sweep(const NamedImage& image, const std::vector<double>& sigmas,
                        const std::vector<double>& gamma_grid, const BenchConfig& config) {
  return gamma_sweep(std::vector<NamedImage>{image}, sigmas, gamma_grid, config);
}

void write_sweep_csv(const SweepReport& report, std::ostream& out) {
  out << kSweepHeader << '\n';
  for (const auto& row : report.rows) {
    out << kSweepSchema << ',' << row.image_id << ',' << csv_number(row.sigma) << ','
        << csv_number(row.gamma) << ',';
    write_record_fields(out, row.record);
  }
}

void write_sweep_csv(const SweepReport& report, const std::filesystem::path& path) {
  auto out = open_output(path);
  write_sweep_csv(report, out);
}

std::vector<TraceSample> timing_trace(const NamedImage& clean, double sigma, const BenchConfig& config) {
  const std::uint64_t seed = job_seed(config.root_seed, clean.id, sigma);
  const DenseTensor noisy = add_awgn(clean.image, sigma, seed, config.clip_noise);
  SolveOptions options = config.solve;
  options.seed = seed;
  std::vector<TraceSample> trace;
  // Time spent scoring inside the callback is excluded from the elapsed clock.
  double scoring = 0.0;
  const auto start = std::chrono::steady_clock::now();
  auto on_iteration = [&](const IterationReport& rep) {
    const auto t0 = std::chrono::steady_clock::now();
    const double elapsed = seconds_since(start) - scoring;
    const DenseTensor u = normalize_output(reconstruct(rep.state), ReferenceStats{}, config.normalization);
    trace.push_back({rep.iteration, elapsed, psnr(u, clean.image)});
    scoring += seconds_since(t0);
  };
  denoise(noisy, config.dict, config.rank, config.gamma, config.alpha, options, config.normalization,
          on_iteration);
  return trace;
}

void write_trace_csv(const std::vector<TraceSample>& trace, std::ostream& out) {
  out << "schema,iteration,elapsed,psnr\n";
  for (const auto& s : trace) {
    out << "lrd-trace-v1," << s.iteration << ',' << csv_number(s.elapsed) << ',' << csv_number(s.psnr)
        << '\n';
  }
}

}  // namespace lrd
