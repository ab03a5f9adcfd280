#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lrd/error.hpp"
#include "lrd/spectral.hpp"
#include "oracles.hpp"

using namespace lrd;
using std::numbers::pi;

TEST(Spectral, ForwardMatchesDirectSum) {
  std::mt19937_64 rng(11);
  const DenseTensor t = oracle::random_tensor(Shape{4, 3, 5}, rng);
  EXPECT_LT(oracle::max_abs_diff(forward_dft(t), oracle::dft(t)), 1e-11);
}

TEST(Spectral, InverseUndoesForward) {
  std::mt19937_64 rng(12);
  for (const Shape& s : {Shape{7}, Shape{6, 5}, Shape{3, 4, 2}, Shape{2, 1, 3, 2}}) {
    const DenseTensor t = oracle::random_tensor(s, rng);
    EXPECT_LT(oracle::max_abs_diff(inverse_dft(forward_dft(t)), to_complex(t)), 1e-12);
  }
}

TEST(Spectral, ParsevalPinsScale) {
  std::mt19937_64 rng(13);
  const DenseTensor t = oracle::random_tensor(Shape{8, 6}, rng);
  const double spatial = frobenius_norm_squared(t) * static_cast<double>(t.size());
  EXPECT_NEAR(frobenius_norm_squared(forward_dft(t)) / spatial, 1.0, 1e-12);
}

TEST(Spectral, ColumnTransformsMatchOneDimensional) {
  std::mt19937_64 rng(14);
  const Eigen::MatrixXd x = oracle::random_matrix(6, 3, rng);
  const Eigen::MatrixXcd xf = forward_dft_columns(x.cast<complex>());
  for (Eigen::Index r = 0; r < 3; ++r) {
    DenseTensor col(Shape{6});
    for (Eigen::Index k = 0; k < 6; ++k) col[static_cast<std::size_t>(k)] = x(k, r);
    const ComplexTensor ref = oracle::dft(col);
    for (Eigen::Index k = 0; k < 6; ++k) EXPECT_LT(std::abs(xf(k, r) - ref[static_cast<std::size_t>(k)]), 1e-12);
  }
  EXPECT_LT((inverse_dft_columns(xf) - x.cast<complex>()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Spectral, ConvolutionTheorem) {
  std::mt19937_64 rng(15);
  const DenseTensor a = oracle::random_tensor(Shape{6, 5}, rng);
  const DenseTensor b = oracle::random_tensor(Shape{6, 5}, rng);
  const ComplexTensor prod = hadamard(forward_dft(a), forward_dft(b));
  EXPECT_LT(oracle::max_abs_diff(real_part(inverse_dft(prod)), oracle::circular_conv(a, b)), 1e-10);
  EXPECT_LT(max_abs_imag(inverse_dft(prod)), 1e-12);
}

TEST(Spectral, EmbeddedAveragingFilterConvolves) {
  std::mt19937_64 rng(16);
  const DenseTensor u = oracle::random_tensor(Shape{8, 8}, rng);
  const DenseTensor box = DenseTensor::filled(Shape{3, 3}, 1.0 / 9.0);
  const DenseTensor got = real_part(inverse_dft(hadamard(forward_dft(u), embed_filter(box, u.shape()))));
  EXPECT_LT(oracle::max_abs_diff(got, oracle::circular_conv(u, oracle::embed(box, u.shape()))), 1e-10);
  // Centered: the averaging result at (4,4) is the mean of the 3x3 block around it.
  double mean = 0.0;
  for (std::size_t y = 3; y <= 5; ++y)
    for (std::size_t x = 3; x <= 5; ++x) mean += u.at({y, x}) / 9.0;
  EXPECT_NEAR(got.at({4, 4}), mean, 1e-12);
}

TEST(Spectral, EmbedPlacementAndErrors) {
  DenseTensor f(Shape{3});
  f[0] = 1.0;
  f[1] = 2.0;
  f[2] = 3.0;
  const DenseTensor e = embed_filter_spatial(f, Shape{5});
  EXPECT_EQ(e.values(), (std::vector<double>{2.0, 3.0, 0.0, 0.0, 1.0}));
  EXPECT_THROW(embed_filter_spatial(f, Shape{2}), DomainError);
  EXPECT_THROW(embed_filter_spatial(f, Shape{5, 5}), DomainError);
}

TEST(Spectral, SampleFrequenciesPutNyquistNegative) {
  EXPECT_EQ(sample_frequencies(4), (std::vector<double>{0.0, 0.25, -0.5, -0.25}));
  const auto odd = sample_frequencies(5);
  EXPECT_DOUBLE_EQ(odd[2], 0.4);
  EXPECT_DOUBLE_EQ(odd[3], -0.4);
}

TEST(Spectral, DerivativeOfSampledSinusoid) {
  const std::size_t n = 16;
  for (std::size_t f : {1u, 3u, 5u}) {
    DenseTensor u(Shape{n});
    for (std::size_t t = 0; t < n; ++t) u[t] = std::sin(2.0 * pi * static_cast<double>(t * f) / n);
    const SpectralGrid grid = SpectralGrid::for_shape(u.shape());
    const ComplexTensor du = inverse_dft(hadamard(forward_dft(u), derivative_weights(grid, 0)));
    const double w = 2.0 * pi * static_cast<double>(f) / n;
    for (std::size_t t = 0; t < n; ++t) {
      EXPECT_NEAR(du[t].real(), w * std::cos(2.0 * pi * static_cast<double>(t * f) / n), 1e-10);
      EXPECT_NEAR(du[t].imag(), 0.0, 1e-10);
    }
  }
}

TEST(Spectral, DerivativeActsAlongItsDimension) {
  const Shape s{6, 8};
  const SpectralGrid grid = SpectralGrid::for_shape(s);
  DenseTensor u(s);
  for (std::size_t y = 0; y < 6; ++y)
    for (std::size_t x = 0; x < 8; ++x) u.at({y, x}) = std::cos(2.0 * pi * 2.0 * static_cast<double>(x) / 8.0);
  // Constant along dim 0, so its derivative there vanishes.
  const ComplexTensor d0 = inverse_dft(hadamard(forward_dft(u), derivative_weights(grid, 0)));
  for (const auto& v : d0.data()) EXPECT_LT(std::abs(v), 1e-12);
  EXPECT_THROW(derivative_weights(grid, 2), DomainError);
}

TEST(Spectral, IntegralEnergyOfSingleTone) {
  const std::size_t n = 12, f = 2;
  DenseTensor u(Shape{n});
  for (std::size_t t = 0; t < n; ++t) u[t] = std::cos(2.0 * pi * static_cast<double>(t * f) / n);
  const SpectralGrid grid = SpectralGrid::for_shape(u.shape());
  const ComplexTensor uh = forward_dft(u);
  const ComplexTensor w = integral_weights(grid, 0);
  double energy = 0.0;
  for (std::size_t k = 0; k < n; ++k) energy += std::norm(w[k] * uh[k]);
  const double expect = frobenius_norm_squared(uh) / std::pow(2.0 * pi * static_cast<double>(f) / n, 2);
  EXPECT_NEAR(energy / expect, 1.0, 1e-10);
}

TEST(Spectral, IntegralUndoesDerivativeAwayFromDc) {
  std::mt19937_64 rng(17);
  DenseTensor u = oracle::random_tensor(Shape{10}, rng);
  double mean = 0.0;
  for (double v : u.data()) mean += v / 10.0;
  for (auto& v : u.data()) v -= mean;
  const SpectralGrid grid = SpectralGrid::for_shape(u.shape());
  const ComplexTensor back = hadamard(hadamard(forward_dft(u), derivative_weights(grid, 0)), integral_weights(grid, 0));
  EXPECT_LT(oracle::max_abs_diff(real_part(inverse_dft(back)), u), 1e-12);
}

TEST(Spectral, DcPolicies) {
  const SpectralGrid grid = SpectralGrid::for_shape(Shape{4, 4});
  EXPECT_EQ(integral_weights(grid, 0)[0], complex(0.0));
  const ComplexTensor eps = integral_weights(grid, 0, IntegralDcPolicy::epsilon_inverse(1e-3));
  EXPECT_DOUBLE_EQ(std::abs(eps[0]), 1e3);
  // DC hyperplane of dim 0 is every (0, x).
  EXPECT_EQ(integral_weights(grid, 0)[3], complex(0.0));
  EXPECT_NE(integral_weights(grid, 1)[3], complex(0.0));
}

TEST(Spectral, EnergyDensitiesMatchDirectFormula) {
  const Shape s{5, 4, 3};
  const SpectralGrid grid = SpectralGrid::for_shape(s);
  EXPECT_LT(oracle::max_abs_diff(derivative_energy(grid), oracle::tv_density(s)), 1e-12);
  EXPECT_LT(oracle::max_abs_diff(integral_energy(grid), oracle::ti_density(s)), 1e-12);
}
