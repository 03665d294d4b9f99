#pragma once

#include <Eigen/Dense>

namespace flowids::num {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Moore-Penrose inverse via SVD. Singular values below rtol * sigma_max are
/// treated as zero.
Matrix pseudoinverse(const Matrix& m, double rtol = 1e-10);

/// Accumulates H^T H and H^T T over row blocks, so that a ridge solve over a
/// large design never needs the full hidden-layer matrix in memory.
class NormalEquations {
public:
    NormalEquations(Eigen::Index n_features, Eigen::Index n_targets);

    void add(const Matrix& h_block, const Matrix& t_block);

    /// beta = (I/C + H^T H)^-1 H^T T, via Cholesky.
    Matrix solve(double c) const;

    /// H^T H accumulated so far (full symmetric matrix).
    Matrix gram() const;
    const Matrix& cross() const { return cross_; }

private:
    Eigen::MatrixXd lower_;  // lower triangle of H^T H
    Matrix cross_;
};

Matrix ridge_solve(const Matrix& h, const Matrix& t, double c);

struct FistaSettings {
    int max_iterations = 50;
    double l1_weight = 1e-3;
    double power_tolerance = 1e-6;
    int power_max_iterations = 100;
};

void validate(const FistaSettings& s);

/// Largest eigenvalue of a symmetric positive semi-definite matrix by power
/// iteration from the all-ones vector. Stops when the relative change of the
/// Rayleigh quotient drops below `tolerance`.
double largest_eigenvalue(const Matrix& sym, double tolerance, int max_iterations);

/// Approximate minimiser of ||H b - X||_F^2 + l1 * sum |b_ij| by FISTA,
/// starting from b = 0 and running exactly max_iterations steps.
Matrix fista_l1(const Matrix& h, const Matrix& x, const FistaSettings& settings);

/// Same iteration driven by precomputed H^T H and H^T X.
Matrix fista_l1_gram(const Matrix& gram, const Matrix& cross, const FistaSettings& settings);

double lasso_objective(const Matrix& h, const Matrix& x, const Matrix& beta, double l1_weight);

inline double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

}  // namespace flowids::num
