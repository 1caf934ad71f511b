#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace harris {

class Rng;

enum class ShapeTag { Concave, Convex, MonotoneOnly };

/// Scalar function on [1, ∞) (or a stated subinterval). Closed forms carry a
/// tag and parameters so model files stay auditable; sampled functions
/// interpolate piecewise-linearly on a strictly increasing grid. Values of
/// +infinity act as sentinels (used by Legendre transforms past their cap).
class ScalarFunction {
  public:
    struct Impl {
        virtual ~Impl() = default;
        virtual double eval(double v) const = 0;
        virtual std::optional<double> exact_derivative(double /*v*/) const { return std::nullopt; }
        /// left-step tables expose their data so integrals can be exact
        virtual bool step_table(const std::vector<double>** grid, const std::vector<double>** values) const {
            (void)grid;
            (void)values;
            return false;
        }
    };

    ScalarFunction() = default;

    double operator()(double v) const;
    /// derivative; exact when the representation has one, else central difference
    double derivative(double v) const;

    const std::string& kind() const { return kind_; }
    const std::vector<double>& params() const { return params_; }
    ShapeTag shape() const { return shape_; }
    double domain_lo() const { return lo_; }
    double domain_hi() const { return hi_; }

    bool valid() const { return impl_ != nullptr; }

    // closed forms
    static ScalarFunction power(double p);
    /// regularized v/(log v)^a family: v·((a+1)/(a+1+log v))^a, concave on [1,∞)
    static ScalarFunction log_power(double a);
    static ScalarFunction affine(double c0, double c1);
    /// n·atan(π/2 + v/n)
    static ScalarFunction arctan_family(double n);
    static ScalarFunction identity();

    /// sampled grid, piecewise linear, linear extrapolation beyond the ends
    static ScalarFunction sampled(std::vector<double> grid, std::vector<double> values, ShapeTag shape);
    /// sampled grid evaluated as a left-node step function (a sound
    /// underestimate of nondecreasing functions; used inside rate quadrature)
    static ScalarFunction sampled_left_step(std::vector<double> grid, std::vector<double> values, ShapeTag shape);

    /// ψ(u) = 1 + ∫_1^u m(v)/φ(v) dv with cached cumulative quadrature
    static ScalarFunction psi_integral(ScalarFunction m, ScalarFunction phi);

    /// internal composite; kind is a display name only
    static ScalarFunction from_callable(std::string kind, std::function<double(double)> fn, double lo, double hi,
                                        ShapeTag shape,
                                        std::function<double(double)> exact_derivative = nullptr);

    /// monotone inversion of a strictly decreasing function (bisection in log v)
    static ScalarFunction monotone_decreasing_inverse(ScalarFunction f, double range_lo_hint = 1.0);

    /// non-null grid/value views when this is a left-step table
    bool step_table(const std::vector<double>** grid, const std::vector<double>** values) const;

  private:
    ScalarFunction(std::shared_ptr<const Impl> impl, std::string kind, std::vector<double> params, ShapeTag shape,
                   double lo, double hi);

    std::shared_ptr<const Impl> impl_;
    std::string kind_;
    std::vector<double> params_;
    ShapeTag shape_ = ShapeTag::MonotoneOnly;
    double lo_ = 1.0;
    double hi_ = std::numeric_limits<double>::infinity();
};

/// Three-point concavity check on random triples from [lo, hi].
bool check_concave(const ScalarFunction& f, double lo, double hi, Rng& rng, std::size_t triples = 1000,
                   double tol = 1e-9);

struct PhiRoleReport {
    bool ok = false;
    std::string reason;
};

/// φ-role admission: f(1) = 1, concave on a grid sample, and f(v)/v strictly
/// decreasing (rejects the identity, whose ratio is constant).
PhiRoleReport check_phi_role(const ScalarFunction& f, double v_max, Rng& rng);

}  // namespace harris
