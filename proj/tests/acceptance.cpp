// Acceptance report: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria, or 0 with --report.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lrd/dictionary.hpp"
#include "lrd/harness.hpp"
#include "lrd/image_io.hpp"
#include "lrd/multilinear.hpp"
#include "lrd/restore.hpp"
#include "lrd/solver.hpp"
#include "lrd/spectral.hpp"
#include "lrd/synthetic.hpp"
#include "oracles.hpp"

using namespace lrd;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

// Pinned tolerances.
constexpr int kAlgebraInstances = 240;
constexpr double kAlgebraTol = 1e-10;
constexpr double kAlgebraSeconds = 10.0;
constexpr double kConvTol = 1e-10;
constexpr double kCalculusTol = 1e-10;
constexpr double kParsevalTol = 1e-12;
constexpr int kDenseInstances = 60;
constexpr double kDenseTol = 1e-8;
constexpr int kDescentProblems = 24;
constexpr double kDescentSlack = 1e-9;
constexpr int kSweepLimit = 20;
constexpr double kRecoveryPsnr = 60.0;
constexpr double kRecoverySeconds = 1.0;
constexpr double kTvOverLrd = 2.0;
constexpr double kTvOverInput = 3.0;
constexpr double kSuiteSeconds = 120.0;
constexpr double kLargeSeconds = 5.0;
constexpr double kDefaultGamma = 0.5;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Dictionary dct_bank(const Shape& support, std::size_t count) { return builtin_bank(BankKind::Dct, support, count); }

Dictionary random_dictionary(std::size_t m, const Shape& support, std::mt19937_64& rng) {
  std::vector<DenseTensor> filters;
  for (std::size_t k = 0; k < m; ++k) filters.push_back(oracle::random_tensor(support, rng));
  return Dictionary(filters, "random", "acceptance");
}

Outcome tensor_algebra() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  double worst = 0.0;
  int instances = 0;
  for (int k = 0; k < kAlgebraInstances; ++k) {
    const std::size_t order = 1 + static_cast<std::size_t>(k % 4);
    const Shape shape = oracle::random_shape(rng, order, 5);
    const DenseTensor t = oracle::random_tensor(shape, rng);
    const std::size_t rank = 1 + static_cast<std::size_t>(k % 3);
    std::vector<Eigen::MatrixXd> f;
    for (std::size_t n = 0; n < order; ++n)
      f.push_back(oracle::random_matrix(static_cast<Eigen::Index>(shape[n]), static_cast<Eigen::Index>(rank), rng));
    const DenseTensor kt = oracle::kruskal(f);
    worst = std::max(worst, oracle::max_abs_diff(kruskal_reconstruct(KruskalFactors(f)), kt));
    for (std::size_t n = 0; n < order; ++n) {
      const Eigen::MatrixXd u = mode_n_matricize(t, n);
      worst = std::max(worst, (u - oracle::unfold(t, n)).cwiseAbs().maxCoeff());
      worst = std::max(worst, oracle::max_abs_diff(mode_n_fold<double>(u, n, shape), t));
      const Eigen::MatrixXd kr = f[n] * complement_khatri_rao<double>(f, n).transpose();
      worst = std::max(worst, (oracle::unfold(kt, n) - kr).cwiseAbs().maxCoeff());
    }
    ++instances;
  }
  const double secs = seconds_since(t0);
  return {instances >= 200 && worst < kAlgebraTol && secs < kAlgebraSeconds,
          fmt("%d instances, max error %.2e (< %.0e), %.2f s (< %.0f s)", instances, worst, kAlgebraTol, secs,
              kAlgebraSeconds)};
}

Outcome spectral() {
  std::mt19937_64 rng(202);
  double conv = 0.0, calc = 0.0, parseval = 0.0;
  for (const Shape& s : {Shape{16}, Shape{7, 9}, Shape{4, 5, 6}, Shape{8, 8}}) {
    const DenseTensor a = oracle::random_tensor(s, rng);
    const DenseTensor b = oracle::random_tensor(s, rng);
    const DenseTensor got = real_part(inverse_dft(hadamard(forward_dft(a), forward_dft(b))));
    conv = std::max(conv, oracle::max_abs_diff(got, oracle::circular_conv(a, b)));
    const double spatial = frobenius_norm_squared(a) * static_cast<double>(a.size());
    parseval = std::max(parseval, std::abs(frobenius_norm_squared(forward_dft(a)) / spatial - 1.0));
  }
  for (std::size_t n : {12u, 16u, 21u}) {
    for (std::size_t f = 1; f < n / 2; ++f) {
      DenseTensor u(Shape{n}), v(Shape{n});
      const double w = 2.0 * pi * static_cast<double>(f) / static_cast<double>(n);
      for (std::size_t t = 0; t < n; ++t) {
        u[t] = std::sin(w * static_cast<double>(t));
        v[t] = std::cos(w * static_cast<double>(t));
      }
      const SpectralGrid grid = SpectralGrid::for_shape(u.shape());
      const ComplexTensor du = inverse_dft(hadamard(forward_dft(u), derivative_weights(grid, 0)));
      const ComplexTensor iv = inverse_dft(hadamard(forward_dft(v), integral_weights(grid, 0)));
      for (std::size_t t = 0; t < n; ++t) {
        calc = std::max(calc, std::abs(du[t] - complex(w * v[t], 0.0)));
        calc = std::max(calc, std::abs(iv[t] - complex(u[t] / w, 0.0)));
      }
    }
  }
  return {conv < kConvTol && calc < kCalculusTol && parseval < kParsevalTol,
          fmt("convolution %.2e (< %.0e), derivative/integral %.2e (< %.0e), Parseval rel %.2e (< %.0e)", conv,
              kConvTol, calc, kCalculusTol, parseval, kParsevalTol)};
}

Outcome dense_oracle() {
  std::mt19937_64 rng(303);
  double worst = 0.0;
  int instances = 0;
  for (int k = 0; k < kDenseInstances; ++k) {
    const Shape shape = k % 4 == 3 ? oracle::random_shape(rng, 3, 3) : oracle::random_shape(rng, 2, 5);
    const DenseTensor s = oracle::random_tensor(shape, rng);
    const std::size_t m = 1 + static_cast<std::size_t>(k % 3);
    const std::size_t rank = 1 + static_cast<std::size_t>(k % 2);
    Shape support(shape.size(), 1);
    for (std::size_t d = 0; d < shape.size(); ++d) support[d] = std::min<std::size_t>(shape[d], 2);
    const Dictionary dict = random_dictionary(m, support, rng);
    RegularizationConfig cfg;
    cfg.alpha = 0.01 + 0.1 * static_cast<double>(k % 5);
    std::vector<double> g(m), z(m);
    for (std::size_t j = 0; j < m; ++j) {
      g[j] = 0.3 * static_cast<double>((k + j) % 3);
      z[j] = 0.2 * static_cast<double>((k + 2 * j) % 2);
    }
    const bool per_filter = k % 2 == 1;
    if (per_filter) {
      cfg.gamma_per_filter = g;
      cfg.zeta_per_filter = z;
    } else {
      cfg.gamma = g[0];
      cfg.zeta = z[0];
      std::fill(g.begin(), g.end(), g[0]);
      std::fill(z.begin(), z.end(), z[0]);
    }
    SolveOptions o;
    o.ridge_floor = 0.0;
    o.exploit_symmetry = k % 3 != 0;
    o.seed = static_cast<std::uint64_t>(k);
    const std::size_t mode = static_cast<std::size_t>(k) % shape.size();
    SolverState state(s, dict, rank, cfg, o);
    const oracle::DenseSystem sys =
        oracle::dense_mode_system(s, dict.filters(), state.factor_spectra(), mode, g, z, cfg.alpha, per_filter);
    const Eigen::VectorXcd x = sys.a.partialPivLu().solve(sys.b);
    solve_mode(mode, state);
    Eigen::VectorXcd got(x.size());
    Eigen::Index off = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const Eigen::MatrixXcd& xm = state.factor_spectra()[j][mode];
      got.segment(off, xm.size()) = Eigen::Map<const Eigen::VectorXcd>(xm.data(), xm.size());
      off += xm.size();
    }
    worst = std::max(worst, (got - x).norm() / x.norm());
    ++instances;
  }
  return {instances >= 50 && worst < kDenseTol,
          fmt("%d instances, max relative error %.2e (< %.0e)", instances, worst, kDenseTol)};
}

DenseTensor noisy_copy(const DenseTensor& clean, double sigma, std::uint64_t seed) {
  return add_awgn(clean, sigma, seed);
}

Outcome descent_and_convergence() {
  std::mt19937_64 rng(404);
  double worst_rise = 0.0;
  int solves = 0;
  for (int k = 0; k < kDescentProblems; ++k) {
    const Shape shape = k % 3 == 2 ? Shape{6, 5, 4} : Shape{10 + static_cast<std::size_t>(k % 5), 12};
    const DenseTensor s = oracle::random_tensor(shape, rng, 0.0, 1.0);
    const Dictionary dict = dct_bank(Shape(shape.size(), 3), 3 + static_cast<std::size_t>(k % 4));
    RegularizationConfig cfg = denoise_preset(0.05 * k, k % 2 ? 1e-6 : 1e-16);
    cfg.zeta = k % 4 == 1 ? 0.01 : 0.0;
    SolveOptions o;
    o.seed = static_cast<std::uint64_t>(k);
    SolverState state(s, dict, 1 + static_cast<std::size_t>(k % 3), cfg, o);
    double prev = objective(state).total;
    for (int sweep = 0; sweep < 5; ++sweep) {
      for (std::size_t n = 0; n < shape.size(); ++n) {
        solve_mode(n, state);
        const double now = objective(state).total;
        worst_rise = std::max(worst_rise, (now - prev) / std::abs(prev));
        prev = now;
        ++solves;
      }
    }
  }
  const NamedImage img = synthetic_suite(64, 1)[0];
  const DenseTensor noisy = noisy_copy(img.image, 30.0, 7);
  const auto t0 = Clock::now();
  const RestorationResult r = denoise(noisy, dct_bank(Shape{5, 5}, 25), 3, kDefaultGamma, 1e-16);
  const double secs = seconds_since(t0);
  const bool pass = worst_rise <= kDescentSlack && r.converged && r.iterations <= kSweepLimit;
  return {pass, fmt("%d problems, %d inner solves, max relative rise %.2e (<= %.0e); 64x64 denoise "
                    "converged=%s after %d sweeps in %.2f s",
                    kDescentProblems, solves, std::max(worst_rise, 0.0), kDescentSlack, r.converged ? "yes" : "no",
                    r.iterations, secs)};
}

Outcome exact_recovery() {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  Eigen::MatrixXd a(64, 1), b(64, 1);
  for (Eigen::Index k = 0; k < 64; ++k) {
    a(k, 0) = u(rng);
    b(k, 0) = u(rng);
  }
  const DenseTensor s = oracle::kruskal(std::vector<Eigen::MatrixXd>{a, b});
  const Dictionary delta = builtin_bank(BankKind::Identity, Shape{1, 1}, 1);
  RegularizationConfig cfg = denoise_preset(0.0, 1e-16);
  const auto t0 = Clock::now();
  const LrdResult r = lrd_solve(s, delta, 1, cfg);
  const DenseTensor rec = reconstruct(r.factors, delta);
  const double secs = seconds_since(t0);
  double peak = 0.0;
  for (double v : s.data()) peak = std::max(peak, std::abs(v));
  const double p = psnr(rec, s, peak);
  return {p > kRecoveryPsnr && secs < kRecoverySeconds,
          fmt("64x64 rank-1, PSNR %.1f dB (> %.0f), %.3f s (< %.0f s)", p, kRecoveryPsnr, secs, kRecoverySeconds)};
}

Outcome tv_gain() {
  const auto suite = synthetic_suite(64, 1, 2);
  const auto t0 = Clock::now();
  BenchConfig plain(dct_bank(Shape{5, 5}, 25));
  plain.root_seed = 11;
  BenchConfig tv = plain;
  tv.gamma = kDefaultGamma;
  const BenchmarkReport a = run_denoise_benchmark(suite, {50.0}, plain);
  const BenchmarkReport b = run_denoise_benchmark(suite, {50.0}, tv);
  const double secs = seconds_since(t0);
  const double in = b.mean_input_psnr.at(50.0), lrd = a.mean_output_psnr.at(50.0), lrd_tv = b.mean_output_psnr.at(50.0);
  return {lrd_tv >= lrd + kTvOverLrd && lrd_tv >= in + kTvOverInput && secs < kSuiteSeconds,
          fmt("sigma=50, %zu images 64x64: input %.2f, LRD %.2f, LRD-TV(gamma=%.1f) %.2f dB; %.1f s (< %.0f s)",
              suite.size(), in, lrd, kDefaultGamma, lrd_tv, secs, kSuiteSeconds)};
}

Outcome gamma_interior() {
  const auto suite = synthetic_suite(64, 1, 2);
  std::vector<double> grid;
  for (int k = 0; k < 7; ++k) grid.push_back(std::pow(10.0, -4.0 + 0.5 * k));
  BenchConfig cfg(dct_bank(Shape{5, 5}, 25));
  cfg.root_seed = 13;
  const SweepReport rep = gamma_sweep(suite, {30.0}, grid, cfg);
  const auto& curve = rep.mean_curve.at(30.0);
  const std::size_t best =
      static_cast<std::size_t>(std::max_element(curve.begin(), curve.end()) - curve.begin());
  std::string text;
  for (std::size_t k = 0; k < grid.size(); ++k) text += fmt("%s%.0e:%.2f", k ? " " : "", grid[k], curve[k]);
  return {best > 0 && best + 1 < grid.size(),
          fmt("sigma=30 mean PSNR by gamma [%s], argmax gamma=%.0e (index %zu of 0..6)", text.c_str(), grid[best], best)};
}

Outcome large_image() {
  const DenseTensor clean = synthetic_image(SyntheticKind::PiecewiseSmooth, 256, 2);
  const DenseTensor noisy = noisy_copy(clean, 30.0, 17);
  SolveOptions o;
  o.max_outer_iters = kSweepLimit;
  const auto t0 = Clock::now();
  const RestorationResult r = denoise(noisy, dct_bank(Shape{5, 5}, 25), 3, kDefaultGamma, 1e-16, o);
  const double secs = seconds_since(t0);
  return {r.iterations <= kSweepLimit && secs < kLargeSeconds,
          fmt("256x256, R=3, M=25 5x5: %d sweeps (<= %d) in %.2f s (< %.0f s), PSNR %.2f -> %.2f dB", r.iterations,
              kSweepLimit, secs, kLargeSeconds, psnr(noisy, clean), psnr(r.output, clean))};
}

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

Outcome enhancement() {
  const fs::path root = fs::temp_directory_path() / "lrd_acceptance_video";
  fs::remove_all(root);
  const DenseTensor video = synthetic_video(10, 24, 24, 3);
  write_frames({video}, root / "in");
  const DenseTensor frames = read_frames(root / "in").at(0);
  const Dictionary dict = dct_bank(Shape{5, 5, 5}, 60);

  SolveOptions quick;
  quick.max_outer_iters = 1;
  const RestorationResult zero = enhance(frames, dict, 16, enhance_preset(60, 1e-3, 5e-3, 30, 0.0), quick);
  write_frames({zero.output}, root / "zero");
  bool identical = true;
  const auto in_files = list_frames(root / "in");
  const auto out_files = list_frames(root / "zero");
  identical = in_files.size() == out_files.size() && in_files.size() == 10;
  for (std::size_t k = 0; identical && k < in_files.size(); ++k)
    identical = file_bytes(in_files[k]) == file_bytes(out_files[k]);

  SolveOptions o;
  o.max_outer_iters = 3;
  const RestorationResult r = enhance(frames, dict, 16, enhance_preset(60, 1e-3, 5e-3, 30, 0.6), o);
  const double before = mean_local_std(frames), after = mean_local_std(r.output);
  fs::remove_all(root);
  return {identical && after > before,
          fmt("delta=0 round-trip byte-identical=%s; 10x24x24 preset (R=16, M=60 5x5x5, 3 sweeps) mean local std "
              "%.5f -> %.5f",
              identical ? "yes" : "no", before, after)};
}

std::string strip_wall_time(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    std::stringstream ls(line);
    std::string cell;
    int col = 0;
    while (std::getline(ls, cell, ',')) out += (col++ == 6 ? std::string("*") : cell) + ",";
    out += "\n";
  }
  return out;
}

Outcome determinism() {
  const auto suite = synthetic_suite(32, 1);
  BenchConfig cfg(dct_bank(Shape{5, 5}, 25));
  cfg.gamma = kDefaultGamma;
  cfg.root_seed = 5;
  std::ostringstream a, b;
  write_benchmark_csv(run_denoise_benchmark(suite, {30.0, 50.0}, cfg), a);
  write_benchmark_csv(run_denoise_benchmark(suite, {30.0, 50.0}, cfg), b);
  const bool csv_same = strip_wall_time(a.str()) == strip_wall_time(b.str());
  const DenseTensor noisy = noisy_copy(suite[2].image, 30.0, 9);
  SolveOptions o;
  o.seed = 42;
  const DenseTensor x = denoise(noisy, cfg.dict, 3, kDefaultGamma, 1e-16, o).output;
  const DenseTensor y = denoise(noisy, cfg.dict, 3, kDefaultGamma, 1e-16, o).output;
  const bool bits = std::memcmp(x.data().data(), y.data().data(), x.size() * sizeof(double)) == 0;
  return {csv_same && bits, fmt("repeat denoise bit-exact=%s; benchmark CSV identical modulo wall_time=%s",
                                bits ? "yes" : "no", csv_same ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  bool report_only = false;
  for (int k = 1; k < argc; ++k)
    if (std::strcmp(argv[k], "--report") == 0) report_only = true;

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"tensor algebra vs naive oracles", tensor_algebra},
      {"spectral operators", spectral},
      {"slice solves vs dense normal equations", dense_oracle},
      {"monotone descent and convergence", descent_and_convergence},
      {"exact rank-1 recovery", exact_recovery},
      {"TV gain at sigma=50", tv_gain},
      {"interior gamma optimum at sigma=30", gamma_interior},
      {"256x256 runtime", large_image},
      {"enhancement pass-through and contrast", enhancement},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return report_only ? 0 : failed;
}
