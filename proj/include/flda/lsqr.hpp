#pragma once

#include <Eigen/Dense>
#include <functional>

#include "flda/errors.hpp"

namespace flda {

// Abstract rectangular operator supporting forward and transpose products.
class LinearOperator {
 public:
    virtual ~LinearOperator() = default;
    virtual Eigen::Index rows() const = 0;
    virtual Eigen::Index cols() const = 0;
    virtual Eigen::VectorXd apply(const Eigen::VectorXd& x) const = 0;
    virtual Eigen::VectorXd apply_transpose(const Eigen::VectorXd& y) const = 0;

    // Densifies column by column; test/debug use only.
    Eigen::MatrixXd to_dense() const;
};

class FunctionOperator : public LinearOperator {
 public:
    using Apply = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

    FunctionOperator(Eigen::Index rows, Eigen::Index cols, Apply forward, Apply transpose)
        : rows_(rows), cols_(cols), forward_(std::move(forward)),
          transpose_(std::move(transpose)) {}

    Eigen::Index rows() const override { return rows_; }
    Eigen::Index cols() const override { return cols_; }
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const override { return forward_(x); }
    Eigen::VectorXd apply_transpose(const Eigen::VectorXd& y) const override {
        return transpose_(y);
    }

 private:
    Eigen::Index rows_, cols_;
    Apply forward_, transpose_;
};

struct LsqrResult {
    Eigen::VectorXd x;
    int iterations = 0;
    double residual_norm = 0.0;        // |b - A x|
    double normal_residual_norm = 0.0; // |A'(b - A x)|
    bool converged = false;
};

// Paige-Saunders LSQR for min |b - A x|_2, built on Golub-Kahan
// bidiagonalization; never forms A'A. Stops when the estimated relative
// residual or normal-equations residual drops below tol. If the budget
// (default 10 * (rows + cols)) runs out, the best iterate is returned
// with converged = false.
LsqrResult lsqr_solve(const LinearOperator& op, const Eigen::VectorXd& rhs,
                      double tol = 1e-10, int max_iter = 0);

}  // namespace flda
