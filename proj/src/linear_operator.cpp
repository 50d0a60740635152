#include "tfde/linear_operator.hpp"

#include "tfde/errors.hpp"

#include <cmath>
#include <numeric>

namespace tfde {

Vector LinearOperator::apply(std::span<const double> x) const {
    Vector y(size());
    apply(x, y);
    return y;
}

DenseOperator::DenseOperator(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols()) throw SizeMismatch("DenseOperator: matrix must be square");
}

void DenseOperator::apply(std::span<const double> x, std::span<double> y) const {
    require_size(x.size(), size(), "DenseOperator input");
    require_size(y.size(), size(), "DenseOperator output");
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::Map<Eigen::VectorXd>(y.data(), n).noalias() = matrix_ * Eigen::Map<const Eigen::VectorXd>(x.data(), n);
}

Vector DenseOperator::diagonal() const {
    Vector d(size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = matrix_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    return d;
}

SparseOperator::SparseOperator(SparseMatrix matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols()) throw SizeMismatch("SparseOperator: matrix must be square");
    matrix_.makeCompressed();
}

void SparseOperator::apply(std::span<const double> x, std::span<double> y) const {
    require_size(x.size(), size(), "SparseOperator input");
    require_size(y.size(), size(), "SparseOperator output");
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::Map<Eigen::VectorXd>(y.data(), n).noalias() = matrix_ * Eigen::Map<const Eigen::VectorXd>(x.data(), n);
}

Vector SparseOperator::diagonal() const {
    Eigen::VectorXd d = matrix_.diagonal();
    return Vector(d.data(), d.data() + d.size());
}

ScaledOperator::ScaledOperator(OperatorPtr inner, double factor) : inner_(std::move(inner)), factor_(factor) {}

void ScaledOperator::apply(std::span<const double> x, std::span<double> y) const {
    inner_->apply(x, y);
    for (double& v : y) v *= factor_;
}

Vector ScaledOperator::diagonal() const {
    Vector d = inner_->diagonal();
    for (double& v : d) v *= factor_;
    return d;
}

void IdentityOperator::apply(std::span<const double> x, std::span<double> y) const {
    require_size(x.size(), n_, "IdentityOperator input");
    require_size(y.size(), n_, "IdentityOperator output");
    std::copy(x.begin(), x.end(), y.begin());
}

double dot(std::span<const double> a, std::span<const double> b) {
    require_size(b.size(), a.size(), "dot");
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
    require_size(y.size(), x.size(), "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

}  // namespace tfde
