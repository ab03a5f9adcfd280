// lrd: command-line front end for denoising, enhancement and benchmarks.
//
// Exit codes: 0 ok, 2 configuration error, 3 I/O or format error,
// 4 numerical failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lrd/dictionary.hpp"
#include "lrd/error.hpp"
#include "lrd/harness.hpp"
#include "lrd/image_io.hpp"
#include "lrd/regularization.hpp"
#include "lrd/restore.hpp"
#include "lrd/synthetic.hpp"
#include "lrd/tensor_io.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kConfig = 2, kIo = 3, kNumerical = 4 };

struct BankOptions {
  std::string path;
  std::string kind = "dct";
  std::vector<std::size_t> support;
  std::size_t count = 0;

  void add_to(CLI::App& app, std::vector<std::size_t> default_support, std::size_t default_count) {
    support = std::move(default_support);
    count = default_count;
    app.add_option("--dict", path, "Filter bank (.nt); a built-in bank is used when omitted");
    app.add_option("--bank-kind", kind, "Built-in bank kind: dct, gradient, identity");
    app.add_option("--support", support, "Built-in bank support, e.g. 5,5")->delimiter(',');
    app.add_option("--count", count, "Built-in bank size M");
  }

  lrd::Dictionary load() const {
    if (!path.empty()) return lrd::load_bank(path);
    return lrd::builtin_bank(lrd::parse_bank_kind(kind), lrd::Shape(support.begin(), support.end()), count);
  }
};

struct SolverFlags {
  std::size_t rank = 3;
  double alpha = 1e-16;
  int iters = 20;
  double tol = 1e-5;
  std::uint64_t seed = 0;

  void add_to(CLI::App& app, std::size_t default_rank) {
    rank = default_rank;
    app.add_option("--rank", rank, "Kruskal rank R per filter");
    app.add_option("--alpha", alpha, "Ridge weight");
    app.add_option("--iters", iters, "Maximum outer sweeps");
    app.add_option("--tol", tol, "Relative objective change that stops the sweeps");
    app.add_option("--seed", seed, "Factor initialization seed");
  }

  lrd::SolveOptions options() const {
    lrd::SolveOptions o;
    o.max_outer_iters = iters;
    o.rel_tol = tol;
    o.seed = seed;
    return o;
  }
};

lrd::NormalizationPolicy parse_normalization(const std::string& name) {
  lrd::NormalizationPolicy p;
  if (name == "percentile") p.kind = lrd::NormalizationPolicy::Kind::PercentileAffine;
  else if (name == "clip") p.kind = lrd::NormalizationPolicy::Kind::Clip;
  else if (name == "none") p.kind = lrd::NormalizationPolicy::Kind::None;
  else throw lrd::ConfigError("unknown normalization '" + name + "' (percentile, clip, none)");
  return p;
}

void print_history(const std::vector<lrd::ObjectiveBreakdown>& history) {
  for (std::size_t k = 0; k < history.size(); ++k) {
    const auto& b = history[k];
    std::printf("  sweep %2zu  J=%.9g  data=%.6g tv=%.6g ti=%.6g ridge=%.3g\n", k + 1, b.total, b.data,
                b.tv, b.ti, b.ridge);
  }
}

// Values from --config become "--key=value" arguments for every key not
// already given on the command line.
std::vector<std::string> merge_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  std::set<std::string> given;
  for (std::size_t k = 0; k < args.size(); ++k) {
    const std::string& a = args[k];
    if (a.rfind("--", 0) != 0) continue;
    const auto eq = a.find('=');
    const std::string key = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
    given.insert(key);
    if (key == "config") {
      if (eq != std::string::npos) config_path = a.substr(eq + 1);
      else if (k + 1 < args.size()) config_path = args[k + 1];
    }
  }
  if (config_path.empty()) return args;
  if (!fs::exists(config_path)) throw lrd::IoError("config file not found: " + config_path);
  const lrd::KeyValues kv = lrd::load_key_values(config_path);
  for (const auto& [key, value] : kv) {
    if (given.count(key)) continue;
    std::istringstream words(value);
    std::vector<std::string> parts{std::istream_iterator<std::string>(words), {}};
    if (parts.size() <= 1) {
      args.push_back("--" + key + "=" + value);
    } else {
      args.push_back("--" + key);
      args.insert(args.end(), parts.begin(), parts.end());
    }
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank deconvolution with squared-TV / integral regularization"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_file;
  app.add_option("--config", config_file, "key=value file; command-line flags override it");

  // denoise
  auto* dn = app.add_subcommand("denoise", "Denoise a PGM/PPM image");
  std::string dn_input, dn_output, dn_norm = "percentile";
  double dn_gamma = 0.5;
  BankOptions dn_bank;
  SolverFlags dn_solver;
  dn->add_option("--input", dn_input, "Input image (P5/P6)")->required();
  dn->add_option("--output", dn_output, "Output image")->required();
  dn->add_option("--gamma", dn_gamma, "Squared-TV weight");
  dn->add_option("--normalize", dn_norm, "Output normalization: percentile, clip, none");
  dn_bank.add_to(*dn, {5, 5}, 25);
  dn_solver.add_to(*dn, 3);

  // enhance
  auto* en = app.add_subcommand("enhance", "Detail enhancement of a frame sequence");
  std::string en_frames, en_out;
  double en_gamma = 1e-3, en_zeta = 5e-3, en_delta = 0.6;
  std::size_t en_split = 30;
  BankOptions en_bank;
  SolverFlags en_solver;
  en->add_option("--frames", en_frames, "Directory of frame images")->required();
  en->add_option("--out", en_out, "Output directory")->required();
  en->add_option("--gamma", en_gamma, "TV weight of the filters above the split");
  en->add_option("--zeta", en_zeta, "Integral weight of the filters up to the split");
  en->add_option("--delta", en_delta, "Gain of the integral-regularized components");
  en->add_option("--split", en_split, "Number of integral-regularized filters");
  en_bank.add_to(*en, {5, 5, 5}, 60);
  en_solver.add_to(*en, 16);

  // bench / sweep / trace share the benchmark configuration
  struct BenchFlags {
    std::string dataset;
    std::size_t synthetic_size = 64;
    std::size_t per_kind = 1;
    std::vector<double> sigmas{30, 50};
    double gamma = 0.5;
    std::string norm = "percentile";
    bool clip_noise = false;
    std::uint64_t root_seed = 0;
    std::string out;
    BankOptions bank;
    SolverFlags solver;
  };
  auto add_bench_flags = [](CLI::App& sub, BenchFlags& f) {
    sub.add_option("--dataset", f.dataset, "Directory of P5 images (synthetic suite when omitted)");
    sub.add_option("--synthetic-size", f.synthetic_size, "Side of the synthetic images");
    sub.add_option("--per-kind", f.per_kind, "Synthetic images per kind");
    sub.add_option("--sigmas", f.sigmas, "Noise levels on the 0-255 scale")->delimiter(',');
    sub.add_option("--gamma", f.gamma, "Squared-TV weight");
    sub.add_option("--normalize", f.norm, "Output normalization: percentile, clip, none");
    sub.add_flag("--clip-noise", f.clip_noise, "Clip noisy inputs to [0,1]");
    sub.add_option("--root-seed", f.root_seed, "Root seed for per-job seeds");
    sub.add_option("--out", f.out, "CSV output path (stdout when omitted)");
    f.bank.add_to(sub, {5, 5}, 25);
    f.solver.add_to(sub, 3);
  };
  auto bench_config = [](const BenchFlags& f) {
    lrd::BenchConfig c{f.bank.load()};
    c.rank = f.solver.rank;
    c.gamma = f.gamma;
    c.alpha = f.solver.alpha;
    c.solve = f.solver.options();
    c.normalization = parse_normalization(f.norm);
    c.clip_noise = f.clip_noise;
    c.root_seed = f.root_seed;
    return c;
  };
  auto images_of = [](const BenchFlags& f) {
    return lrd::synthetic_suite(f.synthetic_size, 1, f.per_kind);
  };

  auto* bn = app.add_subcommand("bench", "PSNR benchmark over images and noise levels");
  BenchFlags bn_flags;
  add_bench_flags(*bn, bn_flags);

  auto* sw = app.add_subcommand("sweep", "PSNR as a function of gamma");
  BenchFlags sw_flags;
  std::vector<double> sw_gammas{1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
  add_bench_flags(*sw, sw_flags);
  sw->add_option("--gammas", sw_gammas, "Gamma grid")->delimiter(',');

  auto* tr = app.add_subcommand("trace", "PSNR versus elapsed time per sweep");
  BenchFlags tr_flags;
  std::string tr_input;
  double tr_sigma = 30;
  add_bench_flags(*tr, tr_flags);
  tr->add_option("--input", tr_input, "Clean P5 image (synthetic when omitted)");
  tr->add_option("--sigma", tr_sigma, "Noise level on the 0-255 scale");

  auto* md = app.add_subcommand("make-dict", "Write a built-in filter bank");
  std::string md_kind = "dct", md_out;
  std::vector<std::size_t> md_support{5, 5};
  std::size_t md_count = 25;
  bool md_normalize = false;
  md->add_option("--kind", md_kind, "dct, gradient or identity");
  md->add_option("--support", md_support, "Filter support, e.g. 5,5")->delimiter(',');
  md->add_option("--count", md_count, "Number of filters");
  md->add_flag("--normalize", md_normalize, "Scale every filter to unit norm");
  md->add_option("--out", md_out, "Output .nt path")->required();

  try {
    std::vector<std::string> args = merge_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  } catch (const lrd::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const lrd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }

  try {
    if (*dn) {
      const lrd::NormalizationPolicy policy = parse_normalization(dn_norm);
      const lrd::Dictionary dict = dn_bank.load();
      const lrd::Image in = lrd::read_pnm(dn_input);
      const auto results = lrd::denoise_channels(in.planes, {dict}, dn_solver.rank, dn_gamma,
                                                 dn_solver.alpha, dn_solver.options(), policy);
      std::vector<lrd::DenseTensor> planes;
      for (const auto& r : results) {
        planes.push_back(r.output);
        std::printf("channel %zu: %d sweeps%s, %.3f s\n", planes.size() - 1, r.iterations,
                    r.converged ? " (converged)" : "", r.wall_time);
        print_history(r.history);
      }
      lrd::write_pnm(lrd::image_from_planes(std::move(planes)), dn_output);
    } else if (*en) {
      const lrd::Dictionary dict = en_bank.load();
      const std::vector<lrd::DenseTensor> channels = lrd::read_frames(en_frames);
      const lrd::RegularizationConfig cfg =
          lrd::enhance_preset(dict.size(), en_gamma, en_zeta, en_split, en_delta, en_solver.alpha);
      const auto results = lrd::enhance_channels(channels, {dict}, en_solver.rank, cfg, en_solver.options());
      std::vector<lrd::DenseTensor> out;
      for (std::size_t c = 0; c < results.size(); ++c) {
        out.push_back(results[c].output);
        std::printf("channel %zu: %d sweeps, local std %.5f -> %.5f\n", c, results[c].iterations,
                    lrd::mean_local_std(channels[c]), lrd::mean_local_std(results[c].output));
      }
      lrd::write_frames(out, en_out);
    } else if (*bn) {
      const lrd::BenchConfig cfg = bench_config(bn_flags);
      const lrd::BenchmarkReport report =
          bn_flags.dataset.empty()
              ? lrd::run_denoise_benchmark(images_of(bn_flags), bn_flags.sigmas, cfg)
              : lrd::run_denoise_benchmark(fs::path(bn_flags.dataset), bn_flags.sigmas, cfg);
      if (bn_flags.out.empty()) lrd::write_benchmark_csv(report, std::cout);
      else lrd::write_benchmark_csv(report, fs::path(bn_flags.out));
      for (const auto& [sigma, mean] : report.mean_output_psnr) {
        std::fprintf(stderr, "sigma %g: input %.2f dB, output %.2f dB\n", sigma,
                     report.mean_input_psnr.at(sigma), mean);
      }
      for (const auto& r : report.records) {
        if (!r.error.empty()) std::fprintf(stderr, "%s sigma %g: %s\n", r.image_id.c_str(), r.sigma, r.error.c_str());
      }
    } else if (*sw) {
      const lrd::BenchConfig cfg = bench_config(sw_flags);
      std::vector<lrd::NamedImage> images;
      if (sw_flags.dataset.empty()) {
        images = images_of(sw_flags);
      } else {
        for (const auto& entry : fs::directory_iterator(sw_flags.dataset)) {
          if (entry.path().extension() == ".pgm")
            images.push_back({entry.path().stem().string(), lrd::read_pgm(entry.path())});
        }
        std::sort(images.begin(), images.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
      }
      const lrd::SweepReport report = lrd::gamma_sweep(images, sw_flags.sigmas, sw_gammas, cfg);
      if (sw_flags.out.empty()) lrd::write_sweep_csv(report, std::cout);
      else lrd::write_sweep_csv(report, fs::path(sw_flags.out));
      for (const auto& [sigma, best] : report.best_gamma) {
        std::fprintf(stderr, "sigma %g: best gamma %g\n", sigma, best);
      }
    } else if (*tr) {
      const lrd::BenchConfig cfg = bench_config(tr_flags);
      const lrd::NamedImage clean =
          tr_input.empty()
              ? lrd::NamedImage{"piecewise_constant_1",
                                lrd::synthetic_image(lrd::SyntheticKind::PiecewiseConstant,
                                                     tr_flags.synthetic_size, 1)}
              : lrd::NamedImage{fs::path(tr_input).stem().string(), lrd::read_pgm(tr_input)};
      const auto trace = lrd::timing_trace(clean, tr_sigma, cfg);
      if (tr_flags.out.empty()) {
        lrd::write_trace_csv(trace, std::cout);
      } else {
        std::ofstream out(tr_flags.out);
        if (!out) throw lrd::IoError("cannot open " + tr_flags.out + " for writing");
        lrd::write_trace_csv(trace, out);
      }
    } else if (*md) {
      lrd::Dictionary d = lrd::builtin_bank(lrd::parse_bank_kind(md_kind),
                                            lrd::Shape(md_support.begin(), md_support.end()), md_count);
      if (md_normalize) d = d.normalized();
      lrd::save_bank(d, md_out);
      std::printf("wrote %zu filters of support %s to %s\n", d.size(), lrd::shape_to_string(d.support()).c_str(),
                  md_out.c_str());
    }
  } catch (const lrd::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const lrd::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const lrd::FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kIo;
  } catch (const lrd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  }
  return kOk;
}
