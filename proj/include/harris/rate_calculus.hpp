#pragma once

#include "harris/scalar_function.hpp"

#include <memory>
#include <string>
#include <vector>

namespace harris {

/// ∫_a^b f(s) ds computed in log-s coordinates with adaptive Simpson; f may
/// return 0 on +∞-sentinel regions (they contribute nothing).
double integrate_log(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-9);

/// ξ*(u) = sup_{λ∈[lo,hi]} (λu − ξ(λ)) by coarse grid plus three local
/// refinement rounds (final resolution ≤ 1e-6·(hi−lo)); values above `cap`
/// become +∞ sentinels. Returns a piecewise-linear sampled function on u_grid.
ScalarFunction legendre_transform(const ScalarFunction& xi, double lo, double hi, const std::vector<double>& u_grid,
                                  double cap = 1e12);

/// ξ_*(u) = sup_{λ∈[lo,hi]} (ξ(λ) − λu) = (−ξ)*(−u).
ScalarFunction lower_transform(const ScalarFunction& xi, double lo, double hi, const std::vector<double>& u_grid,
                               double cap = 1e12);

/// Raw transform values on u_grid (no interpolation wrapper); grid suprema
/// never exceed the true transform, so left-step tabulations built from these
/// underestimate ξ* and keep downstream rate bounds sound.
std::vector<double> legendre_values(const ScalarFunction& xi, double lo, double hi, const std::vector<double>& u_grid);

/// F(x) = ∫_x^hi ds/g(s) with anchor-cached cumulative quadrature and
/// Θ(t) = F⁻¹(t) by bisection with local re-quadrature near the bracket.
/// The anchor table extends itself downward when a t beyond the current
/// range is requested (never extrapolated).
class RateInverter {
  public:
    RateInverter(ScalarFunction g, double hi = 1.0);

    double F(double x) const;
    double theta(double t) const;
    double log_theta(double t) const;
    /// largest F value reachable before the x-floor (1e-290); +inf while divergent
    double reachable() const;
    /// divergence of ∫_0 1/g: per-decade increments must not die out
    bool diverges_at_zero() const;

    double hi() const { return hi_; }

  private:
    void extend_to(double t) const;
    void push_anchor() const;
    double integral_inv(double a, double b) const;

    ScalarFunction g_;
    double hi_;
    mutable std::vector<double> x_;   // descending anchor abscissae, x_[0] = hi
    mutable std::vector<double> F_;   // increasing cumulative values
    mutable bool exhausted_ = false;
};

/// Tabulated certified rate: bound(u) = C · Θ(r·u) (optionally divided by u
/// for total-variation envelopes). Evaluation between tabulated points uses
/// the left node, which over-estimates a decreasing Θ and keeps bounds sound.
struct RateFunction {
    std::vector<double> t_grid;
    std::vector<double> log_theta;
    double prefactor = 1.0;      // C
    double time_scale = 1.0;     // r
    bool divide_by_time = false; // TV-form C/u · Θ(r·u)
    std::string norm = "V1";
    std::shared_ptr<const RateInverter> inverter;  // exact queries when present

    /// Θ(r·u) (left-node on the grid; exact via the inverter when available)
    double theta_at_scaled(double u) const;
    double bound_at(double u) const;
    double log_theta_exact(double t) const;  // requires inverter
};

/// Θ tabulated at the requested times from F(λ) = ∫_λ^1 ds/g(s).
RateFunction invert_rate(ScalarFunction g, const std::vector<double>& t_grid);

/// Difference-inequality bound u_n ≤ H⁻¹(n), H(u) = ∫_u^{u0} dv/g(v); g must
/// be positive increasing with non-integrable 1/g at 0.
std::vector<double> difference_bound_H(const ScalarFunction& g, double u0, std::size_t n_max);

/// u_n ≤ M·F⁻¹(n) for u_{n+1} ≤ (1−λ)u_n + M·ζ(λ): composes the Legendre
/// transform of ζ over (0, delta] with the F/Θ machinery.
std::vector<double> difference_bound_F(const ScalarFunction& zeta, double delta, double M, double u0,
                                       std::size_t n_max);

/// Minimal C with F⁻¹(t−k) ≤ C·F⁻¹(t) on a dense grid over [k, t_max],
/// inflated by a 5% safety margin; C = 1 for k = 0.
double shift_constant(const ScalarFunction& g, double k, double t_max);
double shift_constant(const RateInverter& inv, double k, double t_max);

}  // namespace harris
