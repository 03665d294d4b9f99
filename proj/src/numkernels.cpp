#include "flowids/numkernels.hpp"

#include <cmath>
#include <string>

#include "flowids/core.hpp"

namespace flowids::num {

Matrix pseudoinverse(const Matrix& m, double rtol) {
    if (m.size() == 0) return Matrix(m.cols(), m.rows());
    if (!m.allFinite()) throw NumericError("pseudoinverse: input has non-finite entries");

    Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sigma = svd.singularValues();
    const double cutoff = rtol * (sigma.size() ? sigma(0) : 0.0);

    Vector inv = Vector::Zero(sigma.size());
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        if (sigma(i) > cutoff && sigma(i) > 0) inv(i) = 1.0 / sigma(i);

    Matrix out = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
    if (!out.allFinite()) throw NumericError("pseudoinverse: SVD did not converge");
    return out;
}

NormalEquations::NormalEquations(Eigen::Index n_features, Eigen::Index n_targets)
    : lower_(Eigen::MatrixXd::Zero(n_features, n_features)),
      cross_(Matrix::Zero(n_features, n_targets)) {}

void NormalEquations::add(const Matrix& h_block, const Matrix& t_block) {
    if (h_block.rows() != t_block.rows())
        throw std::invalid_argument("ridge: H and T must have the same number of rows");
    if (h_block.cols() != lower_.cols() || t_block.cols() != cross_.cols())
        throw std::invalid_argument("ridge: block width does not match the accumulator");
    lower_.selfadjointView<Eigen::Lower>().rankUpdate(h_block.transpose());
    cross_.noalias() += h_block.transpose() * t_block;
}

Matrix NormalEquations::gram() const {
    Matrix full = lower_.selfadjointView<Eigen::Lower>();
    return full;
}

Matrix NormalEquations::solve(double c) const {
    if (!(c > 0)) throw std::invalid_argument("ridge: C must be positive");
    Eigen::MatrixXd a = lower_;
    a.diagonal().array() += 1.0 / c;
    Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(a);
    if (llt.info() != Eigen::Success)
        throw NumericError("ridge: normal matrix is not positive definite");
    Matrix beta = llt.solve(Eigen::MatrixXd(cross_));
    if (!beta.allFinite()) throw NumericError("ridge: solution has non-finite entries");
    return beta;
}

Matrix ridge_solve(const Matrix& h, const Matrix& t, double c) {
    if (h.rows() != t.rows())
        throw std::invalid_argument("ridge: rows(H) = " + std::to_string(h.rows()) +
                                    " but rows(T) = " + std::to_string(t.rows()));
    NormalEquations ne(h.cols(), t.cols());
    ne.add(h, t);
    return ne.solve(c);
}

void validate(const FistaSettings& s) {
    if (s.max_iterations < 1) throw ConfigError("FISTA max_iterations must be >= 1");
    if (!(s.l1_weight > 0)) throw ConfigError("FISTA l1_weight must be positive");
    if (!(s.power_tolerance > 0)) throw ConfigError("power iteration tolerance must be positive");
    if (s.power_max_iterations < 1) throw ConfigError("power iteration cap must be >= 1");
}

double largest_eigenvalue(const Matrix& sym, double tolerance, int max_iterations) {
    if (sym.rows() != sym.cols()) throw std::invalid_argument("largest_eigenvalue: not square");
    const Eigen::Index n = sym.rows();
    if (n == 0) return 0.0;

    Vector v = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double lambda = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
        Vector w = sym * v;
        const double rayleigh = v.dot(w);
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        v = w / norm;
        const bool converged = it > 0 && std::abs(rayleigh - lambda) <= tolerance * std::abs(rayleigh);
        lambda = rayleigh;
        if (converged) break;
    }
    return std::max(lambda, v.dot(sym * v));
}

Matrix fista_l1_gram(const Matrix& gram, const Matrix& cross, const FistaSettings& settings) {
    validate(settings);
    if (gram.rows() != gram.cols() || gram.rows() != cross.rows())
        throw std::invalid_argument("fista: gram/cross dimension mismatch");

    Matrix beta = Matrix::Zero(cross.rows(), cross.cols());
    const double lipschitz =
        largest_eigenvalue(gram, settings.power_tolerance, settings.power_max_iterations);
    if (!(lipschitz > 0)) return beta;

    // The gradient of ||Hb - X||^2 is 2(H^T H b - H^T X) with Lipschitz
    // constant 2L; a step of 1/(2L) and threshold l1/(2L) follow.
    const double threshold = settings.l1_weight / (2.0 * lipschitz);
    Matrix momentum = beta;
    Matrix next(beta.rows(), beta.cols());
    double t = 1.0;
    for (int k = 0; k < settings.max_iterations; ++k) {
        next.noalias() = gram * momentum;
        next = momentum - (next - cross) / lipschitz;
        next = next.unaryExpr([threshold](double v) { return soft_threshold(v, threshold); });

        const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
        momentum = next + ((t - 1.0) / t_next) * (next - beta);
        beta.swap(next);
        t = t_next;
    }
    return beta;
}

Matrix fista_l1(const Matrix& h, const Matrix& x, const FistaSettings& settings) {
    if (h.rows() != x.rows())
        throw std::invalid_argument("fista: rows(H) = " + std::to_string(h.rows()) +
                                    " but rows(X) = " + std::to_string(x.rows()));
    NormalEquations ne(h.cols(), x.cols());
    ne.add(h, x);
    return fista_l1_gram(ne.gram(), ne.cross(), settings);
}

double lasso_objective(const Matrix& h, const Matrix& x, const Matrix& beta, double l1_weight) {
    return (h * beta - x).squaredNorm() + l1_weight * beta.cwiseAbs().sum();
}

}  // namespace flowids::num
