#pragma once

#include "harris/measure.hpp"

#include <string>

namespace harris {

/// Row-stochastic matrix. Row x holds the one-step distribution out of x;
/// kernels act on measures by left multiplication and on functions by right
/// multiplication. Degenerate rows are rejected at construction.
class StochasticKernel {
  public:
    StochasticKernel() = default;
    explicit StochasticKernel(Matrix m);

    static StochasticKernel identity(std::size_t n);
    static StochasticKernel uniform_rows(const Vector& row);

    std::size_t size() const { return static_cast<std::size_t>(matrix_.rows()); }
    const Matrix& matrix() const { return matrix_; }

    /// (Sμ)(y) = Σ_x μ(x)·M(x,y); preserves mass and positivity.
    SignedMeasure apply(const SignedMeasure& mu) const;
    /// (Pf)(x) = Σ_y M(x,y)·f(y); preserves constants and positivity.
    Vector dual_apply(const Vector& f) const;
    /// S^n μ by repeated application; n = 0 returns μ.
    SignedMeasure power_apply(std::size_t n, const SignedMeasure& mu) const;
    /// S^n as a kernel (matrix power).
    StochasticKernel power(std::size_t n) const;

  private:
    Matrix matrix_;
};

/// Rate matrix: nonnegative off-diagonal, zero row sums.
class GeneratorMatrix {
  public:
    GeneratorMatrix() = default;
    explicit GeneratorMatrix(Matrix m);

    std::size_t size() const { return static_cast<std::size_t>(matrix_.rows()); }
    const Matrix& matrix() const { return matrix_; }

    /// (LV)(x) = Σ_y L(x,y)·V(y)
    Vector dual_apply(const Vector& f) const;

  private:
    Matrix matrix_;
};

/// Growth bound ‖S_tμ‖_V ≤ C_V e^{ω_V t}‖μ‖_V.
struct SemigroupGrowth {
    double C_V = 1.0;
    double omega_V = 0.0;
};

struct StationaryResult {
    SignedMeasure pi;        // probability vector
    double residual = 0.0;   // TV(Sπ − π)
    bool unique = true;      // dim ker(Mᵀ − I) == 1
    int fixed_point_dim = 1;
    bool converged = true;
    std::string method;      // "power-iteration" or "null-space"
};

/// Stationary distribution via damped power iteration with a direct
/// null-space fallback when the spectral gap stalls the iteration.
StationaryResult stationary_distribution(const StochasticKernel& S, double tol, std::size_t max_iters = 200000);

/// exp(tL) by uniformization (Poisson mixture of powers of I + L/q), with
/// scaling-and-squaring once qt is large. Truncation keeps the per-entry
/// error below 1e-13 before squaring.
StochasticKernel semigroup_at(const GeneratorMatrix& L, double t);

}  // namespace harris
