#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace tfde {

using Vector = std::vector<double>;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Square operator applied matrix-free.
///
/// Implementations are immutable after construction; apply() may be called
/// concurrently and allocates whatever scratch it needs.
class LinearOperator {
public:
    virtual ~LinearOperator() = default;

    virtual std::size_t size() const = 0;
    virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
    /// Exact main diagonal.
    virtual Vector diagonal() const = 0;
    /// Assembled form, for operators that are stored sparse.
    virtual const SparseMatrix* sparse() const { return nullptr; }

    Vector apply(std::span<const double> x) const;
};

using OperatorPtr = std::shared_ptr<const LinearOperator>;

class DenseOperator final : public LinearOperator {
public:
    explicit DenseOperator(Eigen::MatrixXd matrix);

    std::size_t size() const override { return static_cast<std::size_t>(matrix_.rows()); }
    using LinearOperator::apply;
    void apply(std::span<const double> x, std::span<double> y) const override;
    Vector diagonal() const override;
    const Eigen::MatrixXd& matrix() const { return matrix_; }

private:
    Eigen::MatrixXd matrix_;
};

class SparseOperator final : public LinearOperator {
public:
    explicit SparseOperator(SparseMatrix matrix);

    std::size_t size() const override { return static_cast<std::size_t>(matrix_.rows()); }
    using LinearOperator::apply;
    void apply(std::span<const double> x, std::span<double> y) const override;
    Vector diagonal() const override;
    const SparseMatrix* sparse() const override { return &matrix_; }

private:
    SparseMatrix matrix_;
};

/// factor * inner
class ScaledOperator final : public LinearOperator {
public:
    ScaledOperator(OperatorPtr inner, double factor);

    std::size_t size() const override { return inner_->size(); }
    using LinearOperator::apply;
    void apply(std::span<const double> x, std::span<double> y) const override;
    Vector diagonal() const override;
    const LinearOperator& inner() const { return *inner_; }
    double factor() const { return factor_; }

private:
    OperatorPtr inner_;
    double factor_;
};

class IdentityOperator final : public LinearOperator {
public:
    explicit IdentityOperator(std::size_t n) : n_(n) {}

    std::size_t size() const override { return n_; }
    using LinearOperator::apply;
    void apply(std::span<const double> x, std::span<double> y) const override;
    Vector diagonal() const override { return Vector(n_, 1.0); }

private:
    std::size_t n_;
};

/// Euclidean helpers shared by the iterative solvers.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

}  // namespace tfde
