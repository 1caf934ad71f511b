#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace harris {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Absolute tolerance below which a signed measure counts as zero-mean.
inline constexpr double kZeroMeanTol = 1e-12;

/// A finite state space, optionally with distinct labels.
struct StateSpace {
    std::size_t size = 0;
    std::vector<std::string> labels;  // empty or exactly `size` distinct names

    StateSpace() = default;
    explicit StateSpace(std::size_t n, std::vector<std::string> names = {});
};

/// Finite signed measure: one real mass per state.
class SignedMeasure {
  public:
    SignedMeasure() = default;
    explicit SignedMeasure(Vector values);

    static SignedMeasure zero(std::size_t n) { return SignedMeasure(Vector::Zero(static_cast<Eigen::Index>(n))); }
    static SignedMeasure dirac(std::size_t n, std::size_t state);

    const Vector& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
    std::size_t size() const { return static_cast<std::size_t>(values_.size()); }

    double mass() const { return values_.sum(); }
    bool is_zero_mean() const { return std::abs(mass()) <= kZeroMeanTol; }
    bool is_nonnegative(double tol = 0.0) const { return (values_.array() >= -tol).all(); }

  private:
    Vector values_;
};

/// Weight (Lyapunov) function V ≥ 1, stored per state.
class WeightFunction {
  public:
    WeightFunction() = default;
    explicit WeightFunction(Vector values);

    static WeightFunction ones(std::size_t n) { return WeightFunction(Vector::Ones(static_cast<Eigen::Index>(n))); }

    const Vector& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
    std::size_t size() const { return static_cast<std::size_t>(values_.size()); }

  private:
    Vector values_;
};

/// Hahn–Jordan decomposition μ = μ⁺ − μ⁻ with disjoint supports.
std::pair<SignedMeasure, SignedMeasure> hahn_jordan(const SignedMeasure& mu);

/// ∫|μ| — sum of absolute masses.
double total_variation(const SignedMeasure& mu);

/// ‖μ‖_V = Σ V(x)|μ(x)|; requires matching lengths.
double weighted_norm(const SignedMeasure& mu, const WeightFunction& V);

/// ‖μ‖ + β‖μ‖_V, β > 0.
double triple_norm(const SignedMeasure& mu, const WeightFunction& V, double beta);

}  // namespace harris
