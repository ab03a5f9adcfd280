#include "lrd/multilinear.hpp"

#include <sstream>
#include <string>

namespace lrd {

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t k = 0; k < shape.size(); ++k) os << (k ? "," : "") << shape[k];
  os << ']';
  return os.str();
}

ComplexTensor to_complex(const DenseTensor& t) {
  std::vector<complex> data(t.data().begin(), t.data().end());
  return ComplexTensor(t.shape(), std::move(data));
}

DenseTensor real_part(const ComplexTensor& t) {
  std::vector<double> data(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) data[k] = t[k].real();
  return DenseTensor(t.shape(), std::move(data));
}

double max_abs_imag(const ComplexTensor& t) {
  double m = 0.0;
  for (const complex& v : t.data()) m = std::max(m, std::abs(v.imag()));
  return m;
}

double frobenius_norm_squared(const DenseTensor& t) {
  double s = 0.0;
  for (double v : t.data()) s += v * v;
  return s;
}

double frobenius_norm_squared(const ComplexTensor& t) {
  double s = 0.0;
  for (const complex& v : t.data()) s += std::norm(v);
  return s;
}

namespace {

void check_mode(std::size_t mode, std::size_t order) {
  if (mode >= order) {
    throw DomainError("mode " + std::to_string(mode) + " out of range for order-" +
                      std::to_string(order) + " tensor");
  }
}

// Visits every element in row-major order with its (row, column) position in
// the mode-n unfolding.
template <typename Visit>
void for_each_unfolded(const Shape& shape, std::size_t mode, Visit&& visit) {
  const std::size_t order = shape.size();
  std::vector<std::size_t> col_stride(order, 0);
  std::size_t s = 1;
  for (std::size_t k = 0; k < order; ++k) {
    if (k == mode) continue;
    col_stride[k] = s;
    s *= shape[k];
  }
  const std::size_t total = shape_size(shape);
  std::vector<std::size_t> idx(order, 0);
  std::size_t col = 0;
  for (std::size_t flat = 0; flat < total; ++flat) {
    visit(flat, idx[mode], col);
    for (std::size_t k = order; k-- > 0;) {
      if (++idx[k] < shape[k]) {
        col += col_stride[k];
        break;
      }
      idx[k] = 0;
      col -= (shape[k] - 1) * col_stride[k];
    }
  }
}

}  // namespace

template <typename Scalar>
Matrix<Scalar> mode_n_matricize(const BasicTensor<Scalar>& t, std::size_t mode) {
  check_mode(mode, t.order());
  const auto rows = static_cast<Eigen::Index>(t.extent(mode));
  const auto cols = static_cast<Eigen::Index>(t.size() / t.extent(mode));
  Matrix<Scalar> out(rows, cols);
  for_each_unfolded(t.shape(), mode, [&](std::size_t flat, std::size_t r, std::size_t c) {
    out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = t[flat];
  });
  return out;
}

template <typename Scalar>
BasicTensor<Scalar> mode_n_fold(const Matrix<Scalar>& m, std::size_t mode, const Shape& shape) {
  BasicTensor<Scalar> out(shape);
  check_mode(mode, shape.size());
  if (static_cast<std::size_t>(m.rows()) != shape[mode] ||
      static_cast<std::size_t>(m.cols()) * shape[mode] != out.size()) {
    throw DomainError("cannot fold a " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                      " matrix along mode " + std::to_string(mode) + " into shape " +
                      shape_to_string(shape));
  }
  for_each_unfolded(shape, mode, [&](std::size_t flat, std::size_t r, std::size_t c) {
    out[flat] = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  });
  return out;
}

template <typename Scalar>
Matrix<Scalar> khatri_rao(std::span<const Matrix<Scalar>> matrices) {
  if (matrices.empty()) throw DomainError("khatri_rao needs at least one matrix");
  const Eigen::Index rank = matrices[0].cols();
  for (const auto& m : matrices) {
    if (m.cols() != rank) {
      throw DomainError("khatri_rao inputs disagree on column count (" + std::to_string(rank) +
                        " vs " + std::to_string(m.cols()) + ")");
    }
  }
  Matrix<Scalar> acc = matrices[0];
  for (std::size_t k = 1; k < matrices.size(); ++k) {
    const Matrix<Scalar>& next = matrices[k];
    Matrix<Scalar> grown(acc.rows() * next.rows(), rank);
    for (Eigen::Index r = 0; r < rank; ++r) {
      for (Eigen::Index a = 0; a < acc.rows(); ++a) {
        grown.col(r).segment(a * next.rows(), next.rows()) = acc(a, r) * next.col(r);
      }
    }
    acc = std::move(grown);
  }
  return acc;
}

template <typename Scalar>
Matrix<Scalar> complement_khatri_rao(std::span<const Matrix<Scalar>> factors, std::size_t mode) {
  check_mode(mode, factors.size());
  if (factors.size() == 1) {
    // Empty Khatri-Rao product: a single row of ones.
    return Matrix<Scalar>::Ones(1, factors[0].cols());
  }
  std::vector<Matrix<Scalar>> ordered;
  ordered.reserve(factors.size() - 1);
  for (std::size_t k = factors.size(); k-- > 0;) {
    if (k != mode) ordered.push_back(factors[k]);
  }
  return khatri_rao<Scalar>(ordered);
}

template <typename Scalar>
BasicTensor<Scalar> kruskal_tensor(std::span<const Matrix<Scalar>> factors) {
  if (factors.empty()) throw DomainError("kruskal_tensor needs at least one factor");
  Shape shape;
  for (const auto& f : factors) shape.push_back(static_cast<std::size_t>(f.rows()));
  const Matrix<Scalar> q = complement_khatri_rao(factors, 0);
  const Matrix<Scalar> unfolded = factors[0] * q.transpose();
  return mode_n_fold<Scalar>(unfolded, 0, shape);
}

template Matrix<double> mode_n_matricize(const BasicTensor<double>&, std::size_t);
template Matrix<complex> mode_n_matricize(const BasicTensor<complex>&, std::size_t);
template BasicTensor<double> mode_n_fold(const Matrix<double>&, std::size_t, const Shape&);
template BasicTensor<complex> mode_n_fold(const Matrix<complex>&, std::size_t, const Shape&);
template Matrix<double> khatri_rao(std::span<const Matrix<double>>);
template Matrix<complex> khatri_rao(std::span<const Matrix<complex>>);
template Matrix<double> complement_khatri_rao(std::span<const Matrix<double>>, std::size_t);
template Matrix<complex> complement_khatri_rao(std::span<const Matrix<complex>>, std::size_t);
template BasicTensor<double> kruskal_tensor(std::span<const Matrix<double>>);
template BasicTensor<complex> kruskal_tensor(std::span<const Matrix<complex>>);

KruskalFactors::KruskalFactors(std::vector<Eigen::MatrixXd> factors,
                               std::optional<Eigen::VectorXd> weights)
    : factors_(std::move(factors)), weights_(std::move(weights)) {
  if (factors_.empty()) throw DomainError("KruskalFactors needs at least one mode");
  const Eigen::Index rank = factors_[0].cols();
  if (rank < 1) throw DomainError("KruskalFactors rank must be at least 1");
  for (const auto& f : factors_) {
    if (f.cols() != rank) throw DomainError("KruskalFactors factor matrices disagree on rank");
    if (f.rows() < 1) throw DomainError("KruskalFactors factor matrices need at least one row");
  }
  if (weights_ && weights_->size() != rank) {
    throw DomainError("KruskalFactors weights length " + std::to_string(weights_->size()) +
                      " does not match rank " + std::to_string(rank));
  }
}

Shape KruskalFactors::shape() const {
  Shape s;
  for (const auto& f : factors_) s.push_back(static_cast<std::size_t>(f.rows()));
  return s;
}

DenseTensor kruskal_reconstruct(const KruskalFactors& f) {
  if (!f.weights()) return kruskal_tensor<double>(f.factors());
  std::vector<Eigen::MatrixXd> scaled = f.factors();
  scaled[0] = scaled[0] * f.weights()->asDiagonal();
  return kruskal_tensor<double>(scaled);
}

Eigen::MatrixXd kruskal_vec_operator(const KruskalFactors& f, std::size_t mode) {
  check_mode(mode, f.order());
  const Eigen::MatrixXd q = complement_khatri_rao<double>(f.factors(), mode);
  const Eigen::Index in = f.factor(mode).rows();
  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(q.rows() * in, q.cols() * in);
  for (Eigen::Index a = 0; a < q.rows(); ++a) {
    for (Eigen::Index b = 0; b < q.cols(); ++b) {
      op.block(a * in, b * in, in, in).diagonal().setConstant(q(a, b));
    }
  }
  return op;
}

}  // namespace lrd
