#include "lrd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <string>

#include <omp.h>

namespace lrd {

void SolveOptions::validate() const {
  if (max_outer_iters < 1) throw ConfigError("max_outer_iters must be >= 1");
  if (!(rel_tol > 0.0) || !std::isfinite(rel_tol)) throw ConfigError("rel_tol must be positive");
  if (!(imag_purge_tol > 0.0) || !std::isfinite(imag_purge_tol)) {
    throw ConfigError("imag_purge_tol must be positive");
  }
  if (!(ridge_floor >= 0.0) || !std::isfinite(ridge_floor)) throw ConfigError("ridge_floor must be >= 0");
}

int configured_threads() {
  int threads = omp_get_max_threads();
  if (const char* env = std::getenv("LRD_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) threads = std::min(threads, static_cast<int>(cap));
  }
  return std::max(threads, 1);
}

std::vector<KruskalFactors> init_spatial_factors(const Shape& shape, std::size_t rank,
                                                 std::size_t filter_count, std::uint64_t seed) {
  if (rank < 1) throw DomainError("rank must be >= 1");
  if (filter_count < 1) throw DomainError("filter count must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<KruskalFactors> out;
  out.reserve(filter_count);
  for (std::size_t m = 0; m < filter_count; ++m) {
    std::vector<Eigen::MatrixXd> mats;
    for (std::size_t extent : shape) {
      Eigen::MatrixXd x(static_cast<Eigen::Index>(extent), static_cast<Eigen::Index>(rank));
      for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = uniform(rng);
      mats.push_back(std::move(x));
    }
    out.emplace_back(std::move(mats));
  }
  return out;
}

FactorSpectra factor_spectra_of(const std::vector<KruskalFactors>& factors) {
  FactorSpectra out;
  out.reserve(factors.size());
  for (const auto& f : factors) {
    std::vector<Eigen::MatrixXcd> per_mode;
    for (const auto& x : f.factors()) per_mode.push_back(forward_dft_columns(x.cast<complex>()));
    out.push_back(std::move(per_mode));
  }
  return out;
}

FactorSpectra init_factors(const Shape& shape, std::size_t rank, std::size_t filter_count,
                           std::uint64_t seed) {
  return factor_spectra_of(init_spatial_factors(shape, rank, filter_count, seed));
}

namespace {

Eigen::MatrixXd unfold_transposed(const DenseTensor& t, std::size_t mode) {
  return mode_n_matricize(t, mode).transpose();
}

Eigen::MatrixXcd unfold_transposed(const ComplexTensor& t, std::size_t mode) {
  return mode_n_matricize(t, mode).transpose();
}

}  // namespace

SolverState::SolverState(DenseTensor signal, const Dictionary& dict, std::size_t rank,
                         RegularizationConfig config, SolveOptions options,
                         std::optional<std::vector<KruskalFactors>> initial)
    : signal_(std::move(signal)), rank_(rank), config_(std::move(config)), options_(options) {
  config_.validate(dict.size());
  options_.validate();
  if (rank_ < 1) throw DomainError("rank must be >= 1");
  if (dict.order() != signal_.order()) {
    throw DomainError("dictionary order " + std::to_string(dict.order()) +
                      " does not match signal order " + std::to_string(signal_.order()));
  }
  signal_spectrum_ = forward_dft(signal_);
  filter_spectra_.reserve(dict.size());
  for (const auto& f : dict.filters()) filter_spectra_.push_back(embed_filter(f, signal_.shape()));

  if (initial) {
    if (initial->size() != dict.size()) throw DomainError("initial factors do not match filter count");
    for (const auto& f : *initial) {
      if (f.shape() != signal_.shape() || f.rank() != rank_) {
        throw DomainError("initial factors do not match signal shape / rank");
      }
    }
    factors_ = factor_spectra_of(*initial);
  } else {
    factors_ = init_factors(signal_.shape(), rank_, dict.size(), options_.seed);
  }

  const SpectralGrid grid = SpectralGrid::for_shape(signal_.shape());
  tv_energy_ = derivative_energy(grid);
  ti_energy_ = integral_energy(grid, options_.dc_policy);

  for (std::size_t n = 0; n < signal_.order(); ++n) {
    ModeUnfoldings u;
    u.signal = unfold_transposed(signal_spectrum_, n);
    for (const auto& f : filter_spectra_) u.filters.push_back(unfold_transposed(f, n));
    u.tv = unfold_transposed(tv_energy_, n);
    u.ti = unfold_transposed(ti_energy_, n);
    unfoldings_.push_back(std::move(u));
  }
}

ModeSystems::ModeSystems(const SolverState& state, std::size_t mode)
    : mode_(mode),
      filters_(state.filter_count()),
      rank_(state.rank()),
      alpha_(state.config().alpha),
      per_filter_(state.config().has_per_filter()),
      gamma_(state.config().gamma),
      zeta_(state.config().zeta) {
  if (mode >= state.order()) {
    throw DomainError("mode " + std::to_string(mode) + " out of range for order " +
                      std::to_string(state.order()));
  }
  const auto& cfg = state.config();
  for (std::size_t m = 0; m < filters_; ++m) {
    gamma_m_.push_back(cfg.gamma_for(m));
    zeta_m_.push_back(cfg.zeta_for(m));
  }
  data_ = &state.unfoldings(mode);
  for (std::size_t m = 0; m < filters_; ++m) {
    q_.push_back(complement_khatri_rao<complex>(state.factor_spectra()[m], mode));
  }
}

void ModeSystems::assemble_lower(std::size_t i, double ridge, Eigen::MatrixXcd& lhs,
                                 Eigen::VectorXcd& rhs) const {
  const auto col = static_cast<Eigen::Index>(i);
  const Eigen::Index lambda = data_->signal.rows();
  const auto r_count = static_cast<Eigen::Index>(rank_);
  const auto n = static_cast<Eigen::Index>(unknowns());

  Eigen::MatrixXcd w(lambda, n);
  for (std::size_t m = 0; m < filters_; ++m) {
    const auto base = static_cast<Eigen::Index>(m) * r_count;
    w.middleCols(base, r_count) = data_->filters[m].col(col).asDiagonal() * q_[m];
  }
  rhs.noalias() = w.adjoint() * data_->signal.col(col);

  lhs.setZero(n, n);
  if (!per_filter_) {
    if (gamma_ != 0.0 || zeta_ != 0.0) {
      const Eigen::VectorXd scale =
          (1.0 + gamma_ * data_->tv.col(col).array() + zeta_ * data_->ti.col(col).array()).sqrt().matrix();
      const Eigen::MatrixXcd ws = scale.asDiagonal() * w;
      lhs.selfadjointView<Eigen::Lower>().rankUpdate(ws.adjoint());
    } else {
      lhs.selfadjointView<Eigen::Lower>().rankUpdate(w.adjoint());
    }
  } else {
    lhs.selfadjointView<Eigen::Lower>().rankUpdate(w.adjoint());
    for (std::size_t m = 0; m < filters_; ++m) {
      if (gamma_m_[m] == 0.0 && zeta_m_[m] == 0.0) continue;
      const auto base = static_cast<Eigen::Index>(m) * r_count;
      const Eigen::VectorXd scale =
          (gamma_m_[m] * data_->tv.col(col).array() + zeta_m_[m] * data_->ti.col(col).array()).sqrt().matrix();
      const Eigen::MatrixXcd ws = scale.asDiagonal() * w.middleCols(base, r_count);
      lhs.block(base, base, r_count, r_count).selfadjointView<Eigen::Lower>().rankUpdate(ws.adjoint());
    }
  }
  lhs.diagonal().array() += ridge;
}

SliceSystem ModeSystems::build(std::size_t i) const {
  if (i >= slices()) throw DomainError("slice index " + std::to_string(i) + " out of range");
  Eigen::MatrixXcd lower;
  SliceSystem sys;
  assemble_lower(i, alpha_, lower, sys.rhs);
  sys.lhs = lower.selfadjointView<Eigen::Lower>();
  return sys;
}

SliceSystem build_slice_system(std::size_t mode, std::size_t i, const SolverState& state) {
  return ModeSystems(state, mode).build(i);
}

void solve_mode(std::size_t mode, SolverState& state) {
  const ModeSystems systems(state, mode);
  const std::size_t slices = systems.slices();
  const bool mirror = state.options().exploit_symmetry;
  const std::size_t solved = mirror ? slices / 2 + 1 : slices;
  const double alpha = state.config().alpha;
  const double floor = state.options().ridge_floor;

  std::vector<Eigen::VectorXcd> solutions(solved);
  std::vector<std::string> failures(solved);

#pragma omp parallel for schedule(dynamic) num_threads(configured_threads())
  for (long k = 0; k < static_cast<long>(solved); ++k) {
    const auto i = static_cast<std::size_t>(k);
    Eigen::MatrixXcd lhs;
    Eigen::VectorXcd rhs;
    systems.assemble_lower(i, 0.0, lhs, rhs);
    const double mean_diag = lhs.diagonal().real().mean();
    const double ridge = std::max(alpha, floor * mean_diag);
    lhs.diagonal().array() += ridge;
    Eigen::LLT<Eigen::MatrixXcd, Eigen::Lower> llt(lhs);
    if (llt.info() != Eigen::Success) {
      failures[i] = "Cholesky factorization failed";
      continue;
    }
    Eigen::VectorXcd x = llt.solve(rhs);
    if (!x.allFinite()) {
      failures[i] = "non-finite solution";
      continue;
    }
    solutions[i] = std::move(x);
  }

  for (std::size_t i = 0; i < solved; ++i) {
    if (!failures[i].empty()) {
      throw NumericalError("mode " + std::to_string(mode) + ", slice " + std::to_string(i) + ": " +
                           failures[i]);
    }
  }

  const auto r_count = static_cast<Eigen::Index>(state.rank());
  auto& factors = state.factor_spectra();
  for (std::size_t m = 0; m < state.filter_count(); ++m) {
    Eigen::MatrixXcd& x = factors[m][mode];
    const auto base = static_cast<Eigen::Index>(m) * r_count;
    for (std::size_t i = 0; i < solved; ++i) {
      x.row(static_cast<Eigen::Index>(i)) = solutions[i].segment(base, r_count).transpose();
    }
    if (!mirror) continue;
    for (std::size_t i = 0; i < solved; ++i) {
      const std::size_t partner = (slices - i) % slices;
      const auto row = static_cast<Eigen::Index>(i);
      if (partner == i) {
        x.row(row) = x.row(row).real().cast<complex>();
      } else if (partner > i) {
        x.row(static_cast<Eigen::Index>(partner)) = x.row(row).conjugate();
      }
    }
  }
}

namespace {

ObjectiveBreakdown evaluate(const DenseTensor& signal, const std::vector<ComplexTensor>& filter_spectra,
                            const FactorSpectra& factors, const RegularizationConfig& cfg,
                            const DenseTensor& tv_energy, const DenseTensor& ti_energy) {
  const auto total_size = static_cast<double>(signal.size());
  const bool per_filter = cfg.has_per_filter();
  ComplexTensor u_hat(signal.shape());
  double tv = 0.0;
  double ti = 0.0;

  auto weighted_energy = [](const ComplexTensor& spectrum, const DenseTensor& weight) {
    double s = 0.0;
    for (std::size_t k = 0; k < spectrum.size(); ++k) s += weight[k] * std::norm(spectrum[k]);
    return s;
  };

  for (std::size_t m = 0; m < factors.size(); ++m) {
    const ComplexTensor component =
        hadamard(filter_spectra[m], kruskal_tensor<complex>(factors[m]));
    if (per_filter) {
      if (cfg.gamma_for(m) != 0.0) tv += cfg.gamma_for(m) * weighted_energy(component, tv_energy);
      if (cfg.zeta_for(m) != 0.0) ti += cfg.zeta_for(m) * weighted_energy(component, ti_energy);
    }
    for (std::size_t k = 0; k < u_hat.size(); ++k) u_hat[k] += component[k];
  }
  if (!per_filter) {
    if (cfg.gamma != 0.0) tv = cfg.gamma * weighted_energy(u_hat, tv_energy);
    if (cfg.zeta != 0.0) ti = cfg.zeta * weighted_energy(u_hat, ti_energy);
  }

  const ComplexTensor u = inverse_dft(u_hat);
  double data = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double d = u[k].real() - signal[k];
    data += d * d;
  }

  double ridge = 0.0;
  for (const auto& per_mode : factors) {
    for (const auto& x : per_mode) ridge += x.squaredNorm();
  }

  ObjectiveBreakdown b;
  b.data = 0.5 * data;
  b.tv = 0.5 * tv / total_size;
  b.ti = 0.5 * ti / total_size;
  b.ridge = 0.5 * cfg.alpha * ridge / total_size;
  b.total = b.data + b.tv + b.ti + b.ridge;
  return b;
}

void check_factor_shapes(const std::vector<KruskalFactors>& factors, const Dictionary& dict,
                         const Shape* expected) {
  if (factors.size() != dict.size()) {
    throw DomainError("got factors for " + std::to_string(factors.size()) + " filters, dictionary has " +
                      std::to_string(dict.size()));
  }
  const Shape shape = expected ? *expected : factors.front().shape();
  for (const auto& f : factors) {
    if (f.shape() != shape) {
      throw DomainError("factor shape " + shape_to_string(f.shape()) + " does not match " +
                        shape_to_string(shape));
    }
  }
}

}  // namespace

ObjectiveBreakdown objective(const SolverState& state) {
  // Same terms as evaluate(), accumulated in the cached mode-0 layout so only
  // the summed spectrum is folded back.
  const ModeUnfoldings& u0 = state.unfoldings(0);
  const RegularizationConfig& cfg = state.config();
  const bool per_filter = cfg.has_per_filter();
  const auto total_size = static_cast<double>(state.signal().size());
  const auto& factors = state.factor_spectra();

  auto weighted_energy = [](const Eigen::MatrixXcd& spectrum, const Eigen::MatrixXd& weight) {
    return (weight.array() * spectrum.array().abs2()).sum();
  };

  Eigen::MatrixXcd u_hat = Eigen::MatrixXcd::Zero(u0.signal.rows(), u0.signal.cols());
  double tv = 0.0;
  double ti = 0.0;
  double ridge = 0.0;
  for (std::size_t m = 0; m < factors.size(); ++m) {
    const Eigen::MatrixXcd q = complement_khatri_rao<complex>(factors[m], 0);
    const Eigen::MatrixXcd component = u0.filters[m].cwiseProduct(q * factors[m][0].transpose());
    if (per_filter) {
      if (cfg.gamma_for(m) != 0.0) tv += cfg.gamma_for(m) * weighted_energy(component, u0.tv);
      if (cfg.zeta_for(m) != 0.0) ti += cfg.zeta_for(m) * weighted_energy(component, u0.ti);
    }
    u_hat += component;
    for (const auto& x : factors[m]) ridge += x.squaredNorm();
  }
  if (!per_filter) {
    if (cfg.gamma != 0.0) tv = cfg.gamma * weighted_energy(u_hat, u0.tv);
    if (cfg.zeta != 0.0) ti = cfg.zeta * weighted_energy(u_hat, u0.ti);
  }

  const ComplexTensor u =
      inverse_dft(mode_n_fold<complex>(u_hat.transpose(), 0, state.signal().shape()));
  double data = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double d = u[k].real() - state.signal()[k];
    data += d * d;
  }

  ObjectiveBreakdown b;
  b.data = 0.5 * data;
  b.tv = 0.5 * tv / total_size;
  b.ti = 0.5 * ti / total_size;
  b.ridge = 0.5 * cfg.alpha * ridge / total_size;
  b.total = b.data + b.tv + b.ti + b.ridge;
  return b;
}

ObjectiveBreakdown objective(const DenseTensor& signal, const Dictionary& dict,
                             const std::vector<KruskalFactors>& factors,
                             const RegularizationConfig& config, IntegralDcPolicy dc) {
  config.validate(dict.size());
  check_factor_shapes(factors, dict, &signal.shape());
  std::vector<ComplexTensor> filter_spectra;
  for (const auto& f : dict.filters()) filter_spectra.push_back(embed_filter(f, signal.shape()));
  const SpectralGrid grid = SpectralGrid::for_shape(signal.shape());
  return evaluate(signal, filter_spectra, factor_spectra_of(factors), config, derivative_energy(grid),
                  integral_energy(grid, dc));
}

std::vector<KruskalFactors> spatial_factors(const SolverState& state) {
  std::vector<KruskalFactors> out;
  const double tol = state.options().imag_purge_tol;
  for (std::size_t m = 0; m < state.filter_count(); ++m) {
    std::vector<Eigen::MatrixXd> mats;
    for (std::size_t n = 0; n < state.order(); ++n) {
      const Eigen::MatrixXcd x = inverse_dft_columns(state.factor_spectra()[m][n]);
      const double re = x.real().cwiseAbs().maxCoeff();
      const double im = x.imag().cwiseAbs().maxCoeff();
      if (!(im <= tol * std::max(1.0, re))) {
        std::ostringstream os;
        os << "factor (filter " << m << ", mode " << n << ") has imaginary residue " << im
           << " above tolerance " << tol;
        throw NumericalError(os.str());
      }
      mats.push_back(x.real());
    }
    out.emplace_back(std::move(mats));
  }
  return out;
}

std::vector<DenseTensor> reconstruct_components(const std::vector<KruskalFactors>& factors,
                                                const Dictionary& dict) {
  check_factor_shapes(factors, dict, nullptr);
  const Shape shape = factors.front().shape();
  std::vector<DenseTensor> out;
  out.reserve(factors.size());
  for (std::size_t m = 0; m < factors.size(); ++m) {
    const ComplexTensor spectrum =
        hadamard(embed_filter(dict.filter(m), shape), forward_dft(kruskal_reconstruct(factors[m])));
    out.push_back(real_part(inverse_dft(spectrum)));
  }
  return out;
}

DenseTensor reconstruct(const std::vector<KruskalFactors>& factors, const Dictionary& dict) {
  check_factor_shapes(factors, dict, nullptr);
  const Shape shape = factors.front().shape();
  ComplexTensor sum(shape);
  for (std::size_t m = 0; m < factors.size(); ++m) {
    const ComplexTensor spectrum =
        hadamard(embed_filter(dict.filter(m), shape), forward_dft(kruskal_reconstruct(factors[m])));
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += spectrum[k];
  }
  return real_part(inverse_dft(sum));
}

DenseTensor reconstruct(const SolverState& state) {
  ComplexTensor sum(state.shape());
  for (std::size_t m = 0; m < state.filter_count(); ++m) {
    const ComplexTensor spectrum =
        hadamard(state.filter_spectra()[m], kruskal_tensor<complex>(state.factor_spectra()[m]));
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += spectrum[k];
  }
  return real_part(inverse_dft(sum));
}

LrdResult lrd_solve(const DenseTensor& signal, const Dictionary& dict, std::size_t rank,
                    const RegularizationConfig& config, const SolveOptions& options,
                    const IterationCallback& on_iteration) {
  SolverState state(signal, dict, rank, config, options);
  LrdResult result;
  double previous = objective(state).total;

  for (int it = 1; it <= options.max_outer_iters; ++it) {
    for (std::size_t n = 0; n < state.order(); ++n) solve_mode(n, state);
    const ObjectiveBreakdown b = objective(state);
    if (!std::isfinite(b.total)) {
      std::ostringstream os;
      os << "non-finite objective after sweep " << it << " (data=" << b.data << ", tv=" << b.tv
         << ", ti=" << b.ti << ", ridge=" << b.ridge << ")";
      throw NumericalError(os.str());
    }
    state.history().push_back(b);
    result.iterations = it;
    if (on_iteration) on_iteration(IterationReport{it, state, b});
    if (std::abs(previous - b.total) < options.rel_tol * std::max(std::abs(previous), std::abs(b.total))) {
      result.converged = true;
      break;
    }
    previous = b.total;
  }

  result.factors = spatial_factors(state);
  result.history = state.history();
  return result;
}

}  // namespace lrd
