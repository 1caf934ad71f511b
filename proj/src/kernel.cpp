#include "harris/kernel.hpp"

#include <Eigen/LU>

#include <cmath>
#include <stdexcept>

namespace harris {

namespace {
constexpr double kRowSumTol = 1e-12;
}

StochasticKernel::StochasticKernel(Matrix m) : matrix_(std::move(m)) {
    if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols())
        throw std::invalid_argument("StochasticKernel: matrix must be square and nonempty");
    if (!matrix_.allFinite()) throw std::invalid_argument("StochasticKernel: entries must be finite");
    if ((matrix_.array() < 0.0).any()) throw std::invalid_argument("StochasticKernel: entries must be >= 0");
    for (Eigen::Index i = 0; i < matrix_.rows(); ++i) {
        double s = matrix_.row(i).sum();
        if (std::abs(s - 1.0) > kRowSumTol)
            throw std::invalid_argument("StochasticKernel: row " + std::to_string(i) + " sums to " + std::to_string(s));
    }
}

StochasticKernel StochasticKernel::identity(std::size_t n) {
    return StochasticKernel(Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
}

StochasticKernel StochasticKernel::uniform_rows(const Vector& row) {
    Matrix m(row.size(), row.size());
    for (Eigen::Index i = 0; i < row.size(); ++i) m.row(i) = row.transpose();
    return StochasticKernel(std::move(m));
}

SignedMeasure StochasticKernel::apply(const SignedMeasure& mu) const {
    if (mu.size() != size()) throw std::invalid_argument("StochasticKernel::apply: dimension mismatch");
    return SignedMeasure(matrix_.transpose() * mu.values());
}

Vector StochasticKernel::dual_apply(const Vector& f) const {
    if (static_cast<std::size_t>(f.size()) != size()) throw std::invalid_argument("StochasticKernel::dual_apply: dimension mismatch");
    return matrix_ * f;
}

SignedMeasure StochasticKernel::power_apply(std::size_t n, const SignedMeasure& mu) const {
    SignedMeasure cur = mu;
    for (std::size_t k = 0; k < n; ++k) cur = apply(cur);
    return cur;
}

StochasticKernel StochasticKernel::power(std::size_t n) const {
    // binary powering; products of row-stochastic matrices stay row-stochastic
    Matrix result = Matrix::Identity(matrix_.rows(), matrix_.cols());
    Matrix base = matrix_;
    std::size_t k = n;
    while (k > 0) {
        if (k & 1) result = result * base;
        base = base * base;
        k >>= 1;
    }
    // renormalize away accumulated roundoff in row sums (stays within kRowSumTol)
    return StochasticKernel(std::move(result));
}

GeneratorMatrix::GeneratorMatrix(Matrix m) : matrix_(std::move(m)) {
    if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols())
        throw std::invalid_argument("GeneratorMatrix: matrix must be square and nonempty");
    if (!matrix_.allFinite()) throw std::invalid_argument("GeneratorMatrix: entries must be finite");
    for (Eigen::Index i = 0; i < matrix_.rows(); ++i) {
        for (Eigen::Index j = 0; j < matrix_.cols(); ++j)
            if (i != j && matrix_(i, j) < 0.0) throw std::invalid_argument("GeneratorMatrix: off-diagonal entries must be >= 0");
        if (std::abs(matrix_.row(i).sum()) > kRowSumTol)
            throw std::invalid_argument("GeneratorMatrix: row " + std::to_string(i) + " does not sum to 0");
    }
}

Vector GeneratorMatrix::dual_apply(const Vector& f) const {
    if (f.size() != matrix_.rows()) throw std::invalid_argument("GeneratorMatrix::dual_apply: dimension mismatch");
    return matrix_ * f;
}

namespace {

int fixed_point_dimension(const Matrix& m) {
    Eigen::FullPivLU<Matrix> lu(m.transpose() - Matrix::Identity(m.rows(), m.cols()));
    lu.setThreshold(1e-9);
    return static_cast<int>(m.rows() - lu.rank());
}

}  // namespace

StationaryResult stationary_distribution(const StochasticKernel& S, double tol, std::size_t max_iters) {
    if (!(tol > 0.0)) throw std::invalid_argument("stationary_distribution: tol must be > 0");
    const std::size_t n = S.size();
    const Matrix& M = S.matrix();

    StationaryResult out;
    out.fixed_point_dim = fixed_point_dimension(M);
    out.unique = (out.fixed_point_dim == 1);

    // damped iteration mu <- (mu + S mu)/2 kills period-2 oscillation
    Vector mu = Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
    double residual = std::numeric_limits<double>::infinity();
    double prev_residual = residual;
    std::size_t stalled = 0;
    for (std::size_t it = 0; it < max_iters; ++it) {
        Vector smu = M.transpose() * mu;
        residual = (smu - mu).cwiseAbs().sum();
        if (residual <= tol) {
            out.pi = SignedMeasure(mu);
            out.residual = residual;
            out.method = "power-iteration";
            return out;
        }
        if (it % 100 == 99) {
            // gap below ~1e-6 leaves the residual ratio indistinguishable from 1
            if (residual > prev_residual * std::pow(1.0 - 1e-6, 100.0)) {
                if (++stalled >= 2) break;
            } else {
                stalled = 0;
            }
            prev_residual = residual;
        }
        mu = 0.5 * (mu + smu);
    }

    // direct null-space solve: (Mᵀ − I)π = 0, Σπ = 1
    Eigen::FullPivLU<Matrix> lu(M.transpose() - Matrix::Identity(M.rows(), M.cols()));
    lu.setThreshold(1e-9);
    Matrix kernel = lu.kernel();
    Vector candidate;
    bool found = false;
    for (Eigen::Index j = 0; j < kernel.cols() && !found; ++j) {
        Vector v = kernel.col(j);
        if (v.sum() < 0) v = -v;
        if ((v.array() >= -1e-9).all() && v.sum() > 1e-12) {
            candidate = v.cwiseMax(0.0);
            found = true;
        }
    }
    if (!found) {
        // fall back to the damped iterate, which is at least a probability vector
        candidate = mu;
    }
    candidate /= candidate.sum();
    out.pi = SignedMeasure(candidate);
    out.residual = (M.transpose() * candidate - candidate).cwiseAbs().sum();
    out.method = "null-space";
    out.converged = out.residual <= tol;
    return out;
}

StochasticKernel semigroup_at(const GeneratorMatrix& L, double t) {
    if (t < 0.0) throw std::invalid_argument("semigroup_at: t must be >= 0");
    const Eigen::Index n = static_cast<Eigen::Index>(L.size());
    if (t == 0.0) return StochasticKernel::identity(L.size());

    double q = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) q = std::max(q, -L.matrix()(i, i));
    if (q == 0.0) return StochasticKernel::identity(L.size());

    // halve t until qt is small enough for a well-conditioned Poisson sum
    int squarings = 0;
    double tau = t;
    while (q * tau > 32.0) {
        tau *= 0.5;
        ++squarings;
    }

    Matrix P = Matrix::Identity(n, n) + L.matrix() / q;
    const double qt = q * tau;
    // Poisson(qt) weights until the tail is below 1e-13
    double w = std::exp(-qt);
    Matrix term = Matrix::Identity(n, n);
    Matrix acc = w * term;
    double cumulative = w;
    for (std::size_t k = 1; cumulative < 1.0 - 1e-13 && k < 100000; ++k) {
        term = term * P;
        w *= qt / static_cast<double>(k);
        acc += w * term;
        cumulative += w;
    }
    // distribute the truncated tail onto the accumulated matrix so rows sum to 1
    acc /= cumulative;

    for (int s = 0; s < squarings; ++s) acc = acc * acc;
    return StochasticKernel(std::move(acc));
}

}  // namespace harris
