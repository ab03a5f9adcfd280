#include "lrd/spectral.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>

namespace lrd {

namespace {

// The FFTW planner is not re-entrant; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class Plan {
 public:
  Plan(const Shape& shape, complex* data, int sign) {
    std::vector<int> dims(shape.begin(), shape.end());
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf, sign, FFTW_ESTIMATE);
  }
  Plan(int n, int howmany, complex* data, int sign) {
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_many_dft(1, &n, howmany, buf, nullptr, 1, n, buf, nullptr, 1, n, sign,
                               FFTW_ESTIMATE);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }

  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_ = nullptr;
};

ComplexTensor transform(ComplexTensor t, int sign) {
  Plan plan(t.shape(), t.data().data(), sign);
  plan.execute();
  return t;
}

Eigen::MatrixXcd transform_columns(Eigen::MatrixXcd m, int sign) {
  if (m.size() == 0) return m;
  Plan plan(static_cast<int>(m.rows()), static_cast<int>(m.cols()), m.data(), sign);
  plan.execute();
  return m;
}

void check_dim(const SpectralGrid& grid, std::size_t dim) {
  if (dim >= grid.shape.size()) {
    throw DomainError("dimension " + std::to_string(dim) + " out of range for grid " +
                      shape_to_string(grid.shape));
  }
}

// Fills a full-grid tensor with f(index along dim).
template <typename F>
ComplexTensor broadcast_along(const Shape& shape, std::size_t dim, F&& f) {
  ComplexTensor out(shape);
  const auto strides = row_major_strides(shape);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    out[flat] = f((flat / strides[dim]) % shape[dim]);
  }
  return out;
}

}  // namespace

ComplexTensor forward_dft(const DenseTensor& t) { return transform(to_complex(t), FFTW_FORWARD); }

ComplexTensor forward_dft(const ComplexTensor& t) { return transform(t, FFTW_FORWARD); }

ComplexTensor inverse_dft(const ComplexTensor& t) {
  ComplexTensor out = transform(t, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(out.size());
  for (auto& v : out.data()) v *= scale;
  return out;
}

Eigen::MatrixXcd forward_dft_columns(const Eigen::MatrixXcd& m) {
  return transform_columns(m, FFTW_FORWARD);
}

Eigen::MatrixXcd inverse_dft_columns(const Eigen::MatrixXcd& m) {
  Eigen::MatrixXcd out = transform_columns(m, FFTW_BACKWARD);
  out /= static_cast<double>(m.rows());
  return out;
}

ComplexTensor hadamard(const ComplexTensor& a, const ComplexTensor& b) {
  if (a.shape() != b.shape()) {
    throw DomainError("hadamard shape mismatch " + shape_to_string(a.shape()) + " vs " +
                      shape_to_string(b.shape()));
  }
  ComplexTensor out(a.shape());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] * b[k];
  return out;
}

std::vector<double> sample_frequencies(std::size_t n) {
  std::vector<double> xi(n);
  const auto nd = static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    xi[k] = (2 * k < n) ? static_cast<double>(k) / nd : (static_cast<double>(k) - nd) / nd;
  }
  return xi;
}

SpectralGrid SpectralGrid::for_shape(const Shape& shape) {
  SpectralGrid g;
  g.shape = shape;
  for (std::size_t e : shape) g.freqs.push_back(sample_frequencies(e));
  return g;
}

DenseTensor embed_filter_spatial(const DenseTensor& filter, const Shape& shape) {
  if (filter.order() != shape.size()) {
    throw DomainError("filter order " + std::to_string(filter.order()) +
                      " does not match signal order " + std::to_string(shape.size()));
  }
  for (std::size_t d = 0; d < shape.size(); ++d) {
    if (filter.extent(d) > shape[d]) {
      throw DomainError("filter support " + shape_to_string(filter.shape()) +
                        " exceeds signal shape " + shape_to_string(shape));
    }
  }
  DenseTensor out(shape);
  const std::size_t order = shape.size();
  std::vector<std::size_t> idx(order, 0);
  std::vector<std::size_t> dst(order, 0);
  std::size_t flat = 0;
  do {
    for (std::size_t d = 0; d < order; ++d) {
      const std::size_t half = filter.extent(d) / 2;
      dst[d] = (idx[d] + shape[d] - half) % shape[d];
    }
    out.at(dst) += filter[flat++];
  } while (next_index(idx, filter.shape()));
  return out;
}

ComplexTensor embed_filter(const DenseTensor& filter, const Shape& shape) {
  return forward_dft(embed_filter_spatial(filter, shape));
}

ComplexTensor derivative_weights(const SpectralGrid& grid, std::size_t dim) {
  check_dim(grid, dim);
  const auto& xi = grid.freqs[dim];
  return broadcast_along(grid.shape, dim, [&](std::size_t k) {
    return complex(0.0, 2.0 * std::numbers::pi * xi[k]);
  });
}

ComplexTensor integral_weights(const SpectralGrid& grid, std::size_t dim, IntegralDcPolicy dc) {
  check_dim(grid, dim);
  if (dc.kind == IntegralDcPolicy::Kind::EpsilonInverse && !(dc.epsilon > 0.0)) {
    throw DomainError("epsilon-inverse DC policy needs epsilon > 0");
  }
  const auto& xi = grid.freqs[dim];
  return broadcast_along(grid.shape, dim, [&](std::size_t k) -> complex {
    if (xi[k] == 0.0) {
      return dc.kind == IntegralDcPolicy::Kind::Zero ? complex(0.0) : complex(1.0 / dc.epsilon);
    }
    return 1.0 / complex(0.0, 2.0 * std::numbers::pi * xi[k]);
  });
}

DenseTensor derivative_energy(const SpectralGrid& grid) {
  DenseTensor out(grid.shape);
  for (std::size_t d = 0; d < grid.shape.size(); ++d) {
    const ComplexTensor w = derivative_weights(grid, d);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += std::norm(w[k]);
  }
  return out;
}

DenseTensor integral_energy(const SpectralGrid& grid, IntegralDcPolicy dc) {
  DenseTensor out(grid.shape);
  for (std::size_t d = 0; d < grid.shape.size(); ++d) {
    const ComplexTensor w = integral_weights(grid, d, dc);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += std::norm(w[k]);
  }
  return out;
}

}  // namespace lrd
