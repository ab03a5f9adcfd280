#pragma once

// Multilinear algebra on dense tensors: n-mode matricization, Khatri-Rao
// products and the Kruskal (CP) operator.
//
// Modes are 0-based. The column index of the mode-n unfolding is
//
//     j = sum_g  i_{c_g} * prod_{g' < g} I_{c_{g'}}
//
// where c_0 < c_1 < ... are the modes other than n in increasing order, so the
// lowest complement mode varies fastest along the columns. Translation from
// the usual 1-based textbook form:
//
//     1-based                       0-based (this library)
//     i_k in 1..I_k                 i_k in 0..I_k-1
//     j in 1..Lambda                j in 0..Lambda-1
//     j = 1 + sum (i_c - 1) * P     j = sum i_c * P
//     mode n in 1..N                mode n in 0..N-1
//
// With this ordering the unfolding of a Kruskal tensor factors as
// X^(n) * (X^(N-1) (.) ... (.) X^(n+1) (.) X^(n-1) (.) ... (.) X^(0))^T,
// the Khatri-Rao list in descending mode order.

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lrd/tensor.hpp"

namespace lrd {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
Matrix<Scalar> mode_n_matricize(const BasicTensor<Scalar>& t, std::size_t mode);

template <typename Scalar>
BasicTensor<Scalar> mode_n_fold(const Matrix<Scalar>& m, std::size_t mode, const Shape& shape);

/// Column r of the result is the Kronecker product of column r of every input,
/// in list order (the last matrix's row index varies fastest).
template <typename Scalar>
Matrix<Scalar> khatri_rao(std::span<const Matrix<Scalar>> matrices);

/// Khatri-Rao product of all factors except `mode`, in descending mode order.
template <typename Scalar>
Matrix<Scalar> complement_khatri_rao(std::span<const Matrix<Scalar>> factors, std::size_t mode);

/// Sum of R rank-one outer products of the factor columns, unit weights.
template <typename Scalar>
BasicTensor<Scalar> kruskal_tensor(std::span<const Matrix<Scalar>> factors);

/// Per-mode factor matrices of a CP tensor with optional component weights.
class KruskalFactors {
 public:
  KruskalFactors() = default;
  explicit KruskalFactors(std::vector<Eigen::MatrixXd> factors,
                          std::optional<Eigen::VectorXd> weights = std::nullopt);

  std::size_t order() const { return factors_.size(); }
  std::size_t rank() const { return factors_.empty() ? 0 : static_cast<std::size_t>(factors_[0].cols()); }
  Shape shape() const;

  const std::vector<Eigen::MatrixXd>& factors() const { return factors_; }
  const Eigen::MatrixXd& factor(std::size_t mode) const { return factors_.at(mode); }
  const std::optional<Eigen::VectorXd>& weights() const { return weights_; }

 private:
  std::vector<Eigen::MatrixXd> factors_;
  std::optional<Eigen::VectorXd> weights_;
};

DenseTensor kruskal_reconstruct(const KruskalFactors& f);

/// Returns [Q^(n) kron I_{I_n}], so that
/// vec(unfold_n(kruskal(F))) == result * vec(X^(n)) with column-stacking vec.
/// Dense; meant for small instances and test oracles.
Eigen::MatrixXd kruskal_vec_operator(const KruskalFactors& f, std::size_t mode);

}  // namespace lrd
