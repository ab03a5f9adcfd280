#pragma once

// Discrete Fourier transforms and frequency-domain weights.
//
// Conventions:
//   * forward_dft is unnormalized, inverse_dft carries the 1/prod(I) factor,
//     so sum |T|^2 * prod(I) == sum |forward_dft(T)|^2.
//   * Frequencies are in cycles per sample: xi[k] = k/I for k < I/2 and
//     (k - I)/I otherwise, so |xi| <= 1/2 and the Nyquist bin of an even
//     extent sits at xi = -1/2.
//   * Convolution is circular. Filters are embedded centered: filter element
//     l along a mode of support L lands at offset l - floor(L/2), wrapped.

#include <vector>

#include <Eigen/Dense>

#include "lrd/tensor.hpp"

namespace lrd {

ComplexTensor forward_dft(const DenseTensor& t);
ComplexTensor forward_dft(const ComplexTensor& t);
ComplexTensor inverse_dft(const ComplexTensor& t);

/// 1-D transforms applied independently to every column.
Eigen::MatrixXcd forward_dft_columns(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd inverse_dft_columns(const Eigen::MatrixXcd& m);

ComplexTensor hadamard(const ComplexTensor& a, const ComplexTensor& b);

/// DFT sample frequencies of an extent-n axis, cycles per sample.
std::vector<double> sample_frequencies(std::size_t n);

struct SpectralGrid {
  Shape shape;
  std::vector<std::vector<double>> freqs;

  static SpectralGrid for_shape(const Shape& shape);
};

/// Zero-pads a small filter to `shape` with centered circular placement.
DenseTensor embed_filter_spatial(const DenseTensor& filter, const Shape& shape);
/// Spectrum of the embedded filter; multiplying by it convolves circularly.
ComplexTensor embed_filter(const DenseTensor& filter, const Shape& shape);

/// 2*pi*j*xi_dim broadcast over the full grid.
ComplexTensor derivative_weights(const SpectralGrid& grid, std::size_t dim);

/// How the integral weights treat the zero-frequency hyperplane of a dimension,
/// where 1/(2*pi*j*xi) is undefined.
struct IntegralDcPolicy {
  enum class Kind { Zero, EpsilonInverse };
  Kind kind = Kind::Zero;
  /// Used by EpsilonInverse: the DC weight becomes 1/epsilon.
  double epsilon = 1e-3;

  static IntegralDcPolicy zero() { return {}; }
  static IntegralDcPolicy epsilon_inverse(double eps) { return {Kind::EpsilonInverse, eps}; }
};

/// (2*pi*j*xi_dim)^-1 broadcast over the full grid, DC per `dc`.
ComplexTensor integral_weights(const SpectralGrid& grid, std::size_t dim,
                               IntegralDcPolicy dc = IntegralDcPolicy::zero());

/// sum_d |derivative_weights(d)|^2: the squared-TV energy density per bin.
DenseTensor derivative_energy(const SpectralGrid& grid);
/// sum_d |integral_weights(d)|^2.
DenseTensor integral_energy(const SpectralGrid& grid, IntegralDcPolicy dc = IntegralDcPolicy::zero());

}  // namespace lrd
