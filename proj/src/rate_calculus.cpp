#include "harris/rate_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace harris {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kXFloor = 1e-290;

double adaptive_simpson(const std::function<double(double)>& f, double a, double fa, double b, double fb, double fm,
                        double whole, double rel_tol, int depth) {
    double mid = 0.5 * (a + b);
    double lm = 0.5 * (a + mid), rm = 0.5 * (mid + b);
    double flm = f(lm), frm = f(rm);
    double left = (mid - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - mid) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * (rel_tol * std::abs(left + right) + 1e-300))
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, fa, mid, fm, flm, left, rel_tol, depth - 1) +
           adaptive_simpson(f, mid, fm, b, fb, frm, right, rel_tol, depth - 1);
}

double integrate_linear(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    if (b <= a) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, fa, b, fb, fm, whole, rel_tol, 40);
}

}  // namespace

double integrate_log(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    if (b <= a) return 0.0;
    if (!(a > 0.0)) throw std::invalid_argument("integrate_log: lower limit must be > 0");
    auto g = [&f](double x) {
        double s = std::exp(x);
        return f(s) * s;
    };
    return integrate_linear(g, std::log(a), std::log(b), rel_tol);
}

namespace {

// refined-grid supremum of t -> lam*u - xi(lam) over [lo, hi]
double refined_sup(const ScalarFunction& xi, double lo, double hi, double u) {
    const int coarse = 1024;
    double best = -kInf;
    double best_lam = lo;
    auto value = [&](double lam) { return lam * u - xi(lam); };
    // coarse pass: linear grid plus a log grid to resolve lam -> 0 structure
    for (int i = 0; i <= coarse; ++i) {
        double lam = lo + (hi - lo) * static_cast<double>(i) / coarse;
        if (lam <= 0.0) continue;
        double v = value(lam);
        if (v > best) {
            best = v;
            best_lam = lam;
        }
    }
    if (lo <= 0.0 || lo < hi * 1e-3) {
        double llo = std::log(std::max(lo, hi * 1e-12));
        double lhi = std::log(hi);
        for (int i = 0; i <= coarse; ++i) {
            double lam = std::exp(llo + (lhi - llo) * static_cast<double>(i) / coarse);
            double v = value(lam);
            if (v > best) {
                best = v;
                best_lam = lam;
            }
        }
    }
    // three refinement rounds around the incumbent
    double width = (hi - lo) / coarse;
    for (int round = 0; round < 3; ++round) {
        double a = std::max(lo, best_lam - width);
        double b = std::min(hi, best_lam + width);
        const int fine = 64;
        for (int i = 0; i <= fine; ++i) {
            double lam = a + (b - a) * static_cast<double>(i) / fine;
            if (lam <= 0.0) continue;
            double v = value(lam);
            if (v > best) {
                best = v;
                best_lam = lam;
            }
        }
        width = (b - a) / fine;
    }
    return best;
}

}  // namespace

std::vector<double> legendre_values(const ScalarFunction& xi, double lo, double hi, const std::vector<double>& u_grid) {
    if (!(hi > lo)) throw std::invalid_argument("legendre_values: empty domain");
    if (u_grid.empty()) throw std::invalid_argument("legendre_values: empty u_grid");
    std::vector<double> vals(u_grid.size());
    for (std::size_t i = 0; i < u_grid.size(); ++i) vals[i] = refined_sup(xi, lo, hi, u_grid[i]);
    return vals;
}

ScalarFunction legendre_transform(const ScalarFunction& xi, double lo, double hi, const std::vector<double>& u_grid,
                                  double cap) {
    std::vector<double> vals = legendre_values(xi, lo, hi, u_grid);
    for (double& v : vals)
        if (v > cap) v = kInf;
    return ScalarFunction::sampled(std::vector<double>(u_grid), std::move(vals), ShapeTag::Convex);
}

ScalarFunction lower_transform(const ScalarFunction& xi, double lo, double hi, const std::vector<double>& u_grid,
                               double cap) {
    if (!(hi > lo)) throw std::invalid_argument("lower_transform: empty domain");
    auto neg = ScalarFunction::from_callable("negated", [xi](double lam) { return -xi(lam); }, lo, hi,
                                             ShapeTag::MonotoneOnly);
    std::vector<double> vals(u_grid.size());
    for (std::size_t i = 0; i < u_grid.size(); ++i) {
        double v = refined_sup(neg, lo, hi, -u_grid[i]);
        vals[i] = (v > cap) ? kInf : v;
    }
    return ScalarFunction::sampled(std::vector<double>(u_grid), std::move(vals), ShapeTag::Convex);
}

namespace {

// exact integral of 1/g over [a, b] for a left-step table; nonpositive
// pieces act as an impassable wall, +inf pieces contribute nothing
double step_integral_inv(const std::vector<double>& grid, const std::vector<double>& values, double a, double b) {
    if (b <= a) return 0.0;
    double acc = 0.0;
    // value on [grid[j], grid[j+1]) is values[j]; below grid.front() it
    // clamps to values.front(), above grid.back() to values.back()
    auto piece = [&](double lo, double hi, double val) {
        if (hi <= lo) return;
        if (std::isinf(val)) return;
        if (!(val > 0.0)) {
            acc = 1e300;
            return;
        }
        acc += (hi - lo) / val;
    };
    if (a < grid.front()) {
        piece(a, std::min(b, grid.front()), values.front());
        a = grid.front();
    }
    if (b > a && a < grid.back()) {
        auto it = std::upper_bound(grid.begin(), grid.end(), a);
        std::size_t j = static_cast<std::size_t>(it - grid.begin()) - 1;
        while (a < std::min(b, grid.back()) && j + 1 < grid.size() && acc < 1e300) {
            double hi = std::min(b, grid[j + 1]);
            piece(a, hi, values[j]);
            a = hi;
            ++j;
        }
    }
    if (b > grid.back() && acc < 1e300) piece(std::max(a, grid.back()), b, values.back());
    return acc;
}

}  // namespace

RateInverter::RateInverter(ScalarFunction g, double hi) : g_(std::move(g)), hi_(hi) {
    x_.push_back(hi_);
    F_.push_back(0.0);
}

double RateInverter::integral_inv(double a, double b) const {
    const std::vector<double>*grid, *values;
    if (g_.step_table(&grid, &values)) return step_integral_inv(*grid, *values, a, b);
    auto inv = [this](double s) {
        double gs = g_(s);
        return (gs > 0.0 && std::isfinite(gs)) ? 1.0 / gs : 0.0;
    };
    return integrate_log(inv, a, b);
}

void RateInverter::push_anchor() const {
    // 32 anchors per decade
    static const double rho = std::pow(10.0, -1.0 / 32.0);
    double next = x_.back() * rho;
    if (next < kXFloor) {
        exhausted_ = true;
        return;
    }
    double inc = integral_inv(next, x_.back());
    if (inc >= 1e300) {
        exhausted_ = true;
        return;
    }
    x_.push_back(next);
    F_.push_back(F_.back() + inc);
}

void RateInverter::extend_to(double t) const {
    while (!exhausted_ && F_.back() < t) push_anchor();
}

double RateInverter::F(double x) const {
    if (x >= hi_) return 0.0;
    if (!(x > 0.0)) throw std::invalid_argument("RateInverter::F: x must be > 0");
    while (!exhausted_ && x_.back() > x) push_anchor();
    // find anchor just above x
    auto it = std::lower_bound(x_.begin(), x_.end(), x, std::greater<double>());
    std::size_t j = static_cast<std::size_t>(it - x_.begin());
    if (j == 0) return 0.0;
    --j;  // x_[j] >= x
    return F_[j] + integral_inv(std::max(x, kXFloor), x_[j]);
}

double RateInverter::reachable() const { return exhausted_ ? F_.back() : kInf; }

double RateInverter::theta(double t) const { return std::exp(log_theta(t)); }

double RateInverter::log_theta(double t) const {
    if (t <= 0.0) return std::log(hi_);
    extend_to(t);
    if (exhausted_ && F_.back() < t) return std::log(x_.back());  // clamped at the floor
    // bracket by anchors, then Newton in log-x (one local quadrature per
    // step; dF/dlog x = -x/g(x)), falling back to bisection when a step
    // leaves the bracket
    auto it = std::lower_bound(F_.begin(), F_.end(), t);
    std::size_t j = static_cast<std::size_t>(it - F_.begin());  // F_[j] >= t, F_[j-1] < t
    if (j == 0) return std::log(hi_);
    double lo = std::log(x_[j]), hi = std::log(x_[j - 1]);
    double Fhi_anchor = F_[j - 1];  // value at x_[j-1]
    double y = 0.5 * (lo + hi);
    for (int i = 0; i < 60; ++i) {
        double x = std::exp(y);
        double Fy = Fhi_anchor + integral_inv(x, x_[j - 1]);
        if (Fy >= t)
            lo = y;  // F decreasing in x: F(y) >= t puts theta above x
        else
            hi = y;
        if (hi - lo < 1e-13 && (std::exp(hi) - std::exp(lo)) < 1e-11) break;
        double gx = g_(x);
        double slope = (gx > 0.0 && std::isfinite(gx)) ? -x / gx : 0.0;  // dF/dy
        double next = (std::abs(slope) > 1e-300) ? y - (Fy - t) / slope : 0.5 * (lo + hi);
        y = (next > lo && next < hi) ? next : 0.5 * (lo + hi);
    }
    return 0.5 * (lo + hi);
}

bool RateInverter::diverges_at_zero() const {
    // per-decade increments of F on x in [1e-18, 1e-6]·hi: a convergent tail
    // shows geometrically dying increments
    double prev_inc = -1.0;
    int shrinking = 0;
    for (int d = 6; d < 18; ++d) {
        double a = hi_ * std::pow(10.0, -d - 1);
        double b = hi_ * std::pow(10.0, -d);
        double inc = integral_inv(a, b);
        if (prev_inc >= 0.0) {
            if (inc < 0.5 * prev_inc)
                ++shrinking;
            else
                shrinking = 0;
        }
        prev_inc = inc;
    }
    return shrinking < 3;
}

double RateFunction::theta_at_scaled(double u) const {
    double t = time_scale * u;
    // left-node table lookup: at tabulated times this is exact, in between it
    // over-estimates a decreasing Θ, which keeps bounds sound and cheap
    if (!t_grid.empty() && t <= t_grid.back() * (1.0 + 1e-12) + 1e-300) {
        auto it = std::upper_bound(t_grid.begin(), t_grid.end(), t);
        if (it == t_grid.begin()) return std::exp(log_theta.front());
        std::size_t j = static_cast<std::size_t>(it - t_grid.begin()) - 1;
        return std::exp(log_theta[j]);
    }
    if (inverter) return std::exp(inverter->log_theta(t));
    if (t_grid.empty()) throw std::logic_error("RateFunction: empty grid");
    return std::exp(log_theta.back());
}

double RateFunction::bound_at(double u) const {
    double v = prefactor * theta_at_scaled(u);
    if (divide_by_time) v /= std::max(u, 1.0);
    return v;
}

double RateFunction::log_theta_exact(double t) const {
    if (!inverter) throw std::logic_error("RateFunction: no inverter attached");
    return inverter->log_theta(t);
}

RateFunction invert_rate(ScalarFunction g, const std::vector<double>& t_grid) {
    if (t_grid.empty()) throw std::invalid_argument("invert_rate: empty t_grid");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1])) throw std::invalid_argument("invert_rate: t_grid must be increasing");
    if (t_grid.front() < 0.0) throw std::invalid_argument("invert_rate: times must be >= 0");
    auto inv = std::make_shared<RateInverter>(std::move(g));
    RateFunction rf;
    rf.t_grid = t_grid;
    rf.log_theta.resize(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) rf.log_theta[i] = inv->log_theta(t_grid[i]);
    rf.inverter = inv;
    return rf;
}

std::vector<double> difference_bound_H(const ScalarFunction& g, double u0, std::size_t n_max) {
    if (!(u0 > 0.0)) throw std::invalid_argument("difference_bound_H: u0 must be > 0");
    if (!(g(u0) > 0.0)) throw std::invalid_argument("difference_bound_H: g must be positive on (0, u0]");
    RateInverter inv(g, u0);
    if (!inv.diverges_at_zero())
        throw std::invalid_argument("difference_bound_H: 1/g is integrable at 0");
    std::vector<double> out(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) out[n] = inv.theta(static_cast<double>(n));
    return out;
}

std::vector<double> difference_bound_F(const ScalarFunction& zeta, double delta, double M, double u0,
                                       std::size_t n_max) {
    if (u0 > M) throw std::invalid_argument("difference_bound_F: requires u0 <= M");
    // zeta* over (0, delta], tabulated as a left-step underestimate so the
    // resulting F over-estimates and the bound stays on the safe side
    std::vector<double> u_grid;
    for (double u = 1e-12; u <= 1.0000001; u *= std::pow(10.0, 1.0 / 64.0)) u_grid.push_back(u);
    std::vector<double> vals = legendre_values(zeta, 0.0, delta, u_grid);
    ScalarFunction zstar = ScalarFunction::sampled_left_step(std::move(u_grid), std::move(vals), ShapeTag::Convex);
    RateInverter inv(zstar);
    std::vector<double> out(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) out[n] = M * inv.theta(static_cast<double>(n));
    return out;
}

double shift_constant(const RateInverter& inv, double k, double t_max) {
    if (k <= 0.0) return 1.0;
    double worst = 1.0;
    const int grid = 2048;
    for (int i = 0; i <= grid; ++i) {
        double t = k + (t_max - k) * static_cast<double>(i) / grid;
        double num = inv.log_theta(t - k);
        double den = inv.log_theta(t);
        worst = std::max(worst, std::exp(num - den));
    }
    return 1.05 * worst;
}

double shift_constant(const ScalarFunction& g, double k, double t_max) {
    RateInverter inv(g);
    return shift_constant(inv, k, t_max);
}

}  // namespace harris
