#include "harris/scalar_function.hpp"

#include "harris/util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace harris {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PowerImpl final : ScalarFunction::Impl {
    double p;
    explicit PowerImpl(double pp) : p(pp) {}
    double eval(double v) const override { return std::pow(v, p); }
    std::optional<double> exact_derivative(double v) const override { return p * std::pow(v, p - 1.0); }
};

struct LogPowerImpl final : ScalarFunction::Impl {
    double a, c;  // f(v) = v*(c/(c+log v))^a with c = a+1
    explicit LogPowerImpl(double aa) : a(aa), c(aa + 1.0) {}
    double eval(double v) const override {
        double L = std::log(v);
        return v * std::pow(c / (c + L), a);
    }
    std::optional<double> exact_derivative(double v) const override {
        double L = std::log(v);
        double base = std::pow(c / (c + L), a);
        return base * (1.0 - a / (c + L));
    }
};

struct AffineImpl final : ScalarFunction::Impl {
    double c0, c1;
    AffineImpl(double a, double b) : c0(a), c1(b) {}
    double eval(double v) const override { return c0 + c1 * v; }
    std::optional<double> exact_derivative(double) const override { return c1; }
};

struct ArctanImpl final : ScalarFunction::Impl {
    double n;
    explicit ArctanImpl(double nn) : n(nn) {}
    double eval(double v) const override { return n * std::atan(M_PI_2 + v / n); }
    std::optional<double> exact_derivative(double v) const override {
        double u = M_PI_2 + v / n;
        return 1.0 / (1.0 + u * u);
    }
};

struct SampledImpl final : ScalarFunction::Impl {
    std::vector<double> grid, values;
    bool left_step;
    SampledImpl(std::vector<double> g, std::vector<double> vals, bool step)
        : grid(std::move(g)), values(std::move(vals)), left_step(step) {}
    bool step_table(const std::vector<double>** g, const std::vector<double>** v) const override {
        if (!left_step) return false;
        *g = &grid;
        *v = &values;
        return true;
    }
    double eval(double v) const override {
        // clamp outside the tabulated range
        if (v <= grid.front()) return values.front();
        if (v >= grid.back()) return values.back();
        auto it = std::upper_bound(grid.begin(), grid.end(), v);
        std::size_t j = static_cast<std::size_t>(it - grid.begin());  // grid[j-1] <= v < grid[j]
        if (left_step) return values[j - 1];

        if (std::isinf(values[j - 1]) || std::isinf(values[j])) return kInf;
        double t = (v - grid[j - 1]) / (grid[j] - grid[j - 1]);
        return values[j - 1] + t * (values[j] - values[j - 1]);
    }
};

struct CallableImpl final : ScalarFunction::Impl {
    std::function<double(double)> fn;
    std::function<double(double)> deriv;
    CallableImpl(std::function<double(double)> f, std::function<double(double)> d) : fn(std::move(f)), deriv(std::move(d)) {}
    double eval(double v) const override { return fn(v); }
    std::optional<double> exact_derivative(double v) const override {
        if (deriv) return deriv(v);
        return std::nullopt;
    }
};

// cumulative quadrature of m/phi with anchor cache; integrand is smooth and
// monotone in our uses, plain adaptive Simpson is enough
struct PsiIntegralImpl final : ScalarFunction::Impl {
    ScalarFunction m, phi;
    mutable std::vector<double> anchors{1.0};
    mutable std::vector<double> cumulative{0.0};

    PsiIntegralImpl(ScalarFunction mm, ScalarFunction pp) : m(std::move(mm)), phi(std::move(pp)) {}

    double integrand(double v) const { return m(v) / phi(v); }

    static double simpson(const PsiIntegralImpl& self, double a, double b, double fa, double fm, double fb, double whole,
                          int depth) {
        double mid = 0.5 * (a + b);
        double lm = 0.5 * (a + mid), rm = 0.5 * (mid + b);
        double flm = self.integrand(lm), frm = self.integrand(rm);
        double left = (mid - a) / 6.0 * (fa + 4.0 * flm + fm);
        double right = (b - mid) / 6.0 * (fm + 4.0 * frm + fb);
        if (depth <= 0 || std::abs(left + right - whole) < 1e-12 * (std::abs(left + right) + 1e-300) + 1e-15)
            return left + right;
        return simpson(self, a, mid, fa, flm, fm, left, depth - 1) + simpson(self, mid, b, fm, frm, fb, right, depth - 1);
    }

    double integrate(double a, double b) const {
        if (b <= a) return 0.0;
        double fa = integrand(a), fb = integrand(b), fm = integrand(0.5 * (a + b));
        double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        return simpson(*this, a, b, fa, fm, fb, whole, 28);
    }

    double eval(double u) const override {
        if (u <= 1.0) return 1.0;
        // grow anchors by doubling so repeated evaluations stay cheap
        while (anchors.back() < u) {
            double next = anchors.back() * 2.0;
            cumulative.push_back(cumulative.back() + integrate(anchors.back(), next));
            anchors.push_back(next);
        }
        auto it = std::upper_bound(anchors.begin(), anchors.end(), u);
        std::size_t j = static_cast<std::size_t>(it - anchors.begin()) - 1;
        return 1.0 + cumulative[j] + integrate(anchors[j], u);
    }

    std::optional<double> exact_derivative(double u) const override { return integrand(u); }
};

struct DecreasingInverseImpl final : ScalarFunction::Impl {
    ScalarFunction f;
    double range_lo;
    DecreasingInverseImpl(ScalarFunction ff, double rl) : f(std::move(ff)), range_lo(rl) {}
    double eval(double z) const override {
        // solve f(v) = z for strictly decreasing f with f(range_lo) >= z
        double lo = std::log(range_lo);
        double hi = lo + 1.0;
        int guard = 0;
        while (f(std::exp(hi)) > z) {
            lo = hi;
            hi *= 2.0;
            if (hi > 690.0) {  // e^690 ~ 1e299, stay inside double range
                hi = 690.0;
                break;
            }
            if (++guard > 200) break;
        }
        for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
            double mid = 0.5 * (lo + hi);
            if (f(std::exp(mid)) > z)
                lo = mid;
            else
                hi = mid;
        }
        return std::exp(0.5 * (lo + hi));
    }
};

}  // namespace

ScalarFunction::ScalarFunction(std::shared_ptr<const Impl> impl, std::string kind, std::vector<double> params,
                               ShapeTag shape, double lo, double hi)
    : impl_(std::move(impl)), kind_(std::move(kind)), params_(std::move(params)), shape_(shape), lo_(lo), hi_(hi) {}

double ScalarFunction::operator()(double v) const {
    if (!impl_) throw std::logic_error("ScalarFunction: empty");
    return impl_->eval(v);
}

bool ScalarFunction::step_table(const std::vector<double>** grid, const std::vector<double>** values) const {
    return impl_ && impl_->step_table(grid, values);
}

double ScalarFunction::derivative(double v) const {
    if (!impl_) throw std::logic_error("ScalarFunction: empty");
    if (auto d = impl_->exact_derivative(v)) return *d;
    double h = 1e-6 * std::max(1.0, std::abs(v));
    double a = std::max(lo_, v - h);
    double b = v + h;
    return (impl_->eval(b) - impl_->eval(a)) / (b - a);
}

ScalarFunction ScalarFunction::power(double p) {
    return ScalarFunction(std::make_shared<PowerImpl>(p), "power", {p},
                          p >= 1.0 ? (p == 1.0 ? ShapeTag::Concave : ShapeTag::Convex) : ShapeTag::Concave, 1.0, kInf);
}

ScalarFunction ScalarFunction::log_power(double a) {
    if (!(a > 0.0)) throw std::invalid_argument("log_power: a must be > 0");
    return ScalarFunction(std::make_shared<LogPowerImpl>(a), "log-power", {a}, ShapeTag::Concave, 1.0, kInf);
}

ScalarFunction ScalarFunction::affine(double c0, double c1) {
    return ScalarFunction(std::make_shared<AffineImpl>(c0, c1), "affine", {c0, c1}, ShapeTag::Concave, 1.0, kInf);
}

ScalarFunction ScalarFunction::arctan_family(double n) {
    if (!(n > 0.0)) throw std::invalid_argument("arctan_family: n must be > 0");
    return ScalarFunction(std::make_shared<ArctanImpl>(n), "arctan-family", {n}, ShapeTag::Concave, 1.0, kInf);
}

ScalarFunction ScalarFunction::identity() { return affine(0.0, 1.0); }

ScalarFunction ScalarFunction::sampled(std::vector<double> grid, std::vector<double> values, ShapeTag shape) {
    if (grid.size() != values.size() || grid.empty()) throw std::invalid_argument("sampled: grid/value size mismatch");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("sampled: grid must be strictly increasing");
    double lo = grid.front(), hi = grid.back();
    return ScalarFunction(std::make_shared<SampledImpl>(std::move(grid), std::move(values), false), "sampled", {},
                          shape, lo, hi);
}

ScalarFunction ScalarFunction::sampled_left_step(std::vector<double> grid, std::vector<double> values, ShapeTag shape) {
    if (grid.size() != values.size() || grid.empty()) throw std::invalid_argument("sampled: grid/value size mismatch");
    double lo = grid.front(), hi = grid.back();
    return ScalarFunction(std::make_shared<SampledImpl>(std::move(grid), std::move(values), true), "sampled-step", {},
                          shape, lo, hi);
}

ScalarFunction ScalarFunction::psi_integral(ScalarFunction m, ScalarFunction phi) {
    return ScalarFunction(std::make_shared<PsiIntegralImpl>(std::move(m), std::move(phi)), "psi-integral", {},
                          ShapeTag::Concave, 1.0, kInf);
}

ScalarFunction ScalarFunction::from_callable(std::string kind, std::function<double(double)> fn, double lo, double hi,
                                             ShapeTag shape, std::function<double(double)> exact_derivative) {
    return ScalarFunction(std::make_shared<CallableImpl>(std::move(fn), std::move(exact_derivative)), std::move(kind),
                          {}, shape, lo, hi);
}

ScalarFunction ScalarFunction::monotone_decreasing_inverse(ScalarFunction f, double range_lo_hint) {
    return ScalarFunction(std::make_shared<DecreasingInverseImpl>(std::move(f), range_lo_hint), "monotone-inverse", {},
                          ShapeTag::MonotoneOnly, 0.0, kInf);
}

bool check_concave(const ScalarFunction& f, double lo, double hi, Rng& rng, std::size_t triples, double tol) {
    for (std::size_t i = 0; i < triples; ++i) {
        double a = rng.next_uniform(lo, hi);
        double b = rng.next_uniform(lo, hi);
        double c = rng.next_uniform(lo, hi);
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        if (c - a < 1e-12) continue;
        double t = (b - a) / (c - a);
        double chord = (1.0 - t) * f(a) + t * f(c);
        double scale = std::max({std::abs(f(a)), std::abs(f(c)), 1.0});
        if (f(b) < chord - tol * scale) return false;
    }
    return true;
}

PhiRoleReport check_phi_role(const ScalarFunction& f, double v_max, Rng& rng) {
    PhiRoleReport rep;
    if (std::abs(f(1.0) - 1.0) > 1e-9) {
        rep.reason = "phi(1) != 1";
        return rep;
    }
    if (!check_concave(f, 1.0, v_max, rng)) {
        rep.reason = "phi is not concave on [1, v_max]";
        return rep;
    }
    // f(v)/v must strictly decrease; a constant ratio (the identity) is rejected
    double prev = f(1.0);
    double v = 1.0;
    const double step = std::pow(std::max(v_max, 2.0), 1.0 / 32.0);
    bool strict = false;
    while (v < v_max) {
        v *= step;
        double ratio = f(v) / v;
        if (ratio > prev + 1e-12) {
            rep.reason = "phi(v)/v increases on the grid";
            return rep;
        }
        if (ratio < prev * (1.0 - 1e-9)) strict = true;
        prev = ratio;
    }
    if (!strict) {
        rep.reason = "phi(v)/v is not strictly decreasing (phi(v)/v -> 0 fails)";
        return rep;
    }
    rep.ok = true;
    return rep;
}

}  // namespace harris
