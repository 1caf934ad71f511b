#include "harris/subgeometric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace harris {

namespace {

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    double llo = std::log(lo), lhi = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(n - 1));
    g.back() = hi;
    return g;
}

}  // namespace

CheckResult<SubgeometricEnvelopes> interpolated_subgeometric_rate(const StochasticKernel& S, const WeightFunction& V1,
                                              const WeightFunction& V2, const WeakLyapunovCert& wl1,
                                              const WeakLyapunovCert& wl2, const CouplingCert& coup1,
                                              const CouplingCert& coup2, const ScalarFunction& xi,
                                              double xi_lambda_max, std::size_t n_max) {
    CheckResult<SubgeometricEnvelopes> out;
    const std::size_t n_states = S.size();
    if (V1.size() != n_states || V2.size() != n_states) throw std::invalid_argument("interpolated_subgeometric_rate: dimension mismatch");
    if (coup1.N != coup2.N) {
        out.failure = "coupling certificates certify different powers N";
        return out;
    }
    if (coup1.vacuous || coup2.vacuous) {
        out.failure = "coupling certificate is vacuous";
        return out;
    }
    for (std::size_t x = 0; x < n_states; ++x) {
        if (V1[x] > V2[x] + 1e-12) {
            out.failure = "V1 <= V2 fails";
            out.witness_state = static_cast<int>(x);
            return out;
        }
    }
    if (!(wl1.sigma_bar - wl1.K / coup1.A > 0.0)) {
        out.failure = "A1 > K1/sigma1 fails";
        out.witness_value = wl1.sigma_bar - wl1.K / coup1.A;
        return out;
    }
    if (!(wl2.sigma_bar - wl2.K / coup2.A > 0.0)) {
        out.failure = "A2 > K2/sigma2 fails";
        out.witness_value = wl2.sigma_bar - wl2.K / coup2.A;
        return out;
    }

    // interpolation condition lambda*V1 <= phi1(V1) + xi(lambda)*V2, verified
    // pointwise at every lambda the Legendre transform will range over
    const std::vector<double> lam_grid = log_grid(std::max(1e-12, xi_lambda_max * 1e-10), xi_lambda_max, 600);
    std::vector<double> xi_vals(lam_grid.size());
    for (std::size_t i = 0; i < lam_grid.size(); ++i) xi_vals[i] = xi(lam_grid[i]);
    for (std::size_t i = 0; i < lam_grid.size(); ++i) {
        for (std::size_t x = 0; x < n_states; ++x) {
            double lhs = lam_grid[i] * V1[x];
            double rhs = wl1.phi(V1[x]) + xi_vals[i] * V2[x];
            if (lhs > rhs + 1e-9 * std::max(1.0, rhs)) {
                out.failure = "interpolation condition fails";
                out.witness_state = static_cast<int>(x);
                out.witness_value = lam_grid[i];
                return out;
            }
        }
    }

    SubgeometricEnvelopes res;
    res.N = coup1.N;
    const double N = static_cast<double>(res.N);
    res.gamma_H = std::max(coup1.gamma_H, coup2.gamma_H);
    if (!(res.gamma_H < 1.0)) {
        out.failure = "gamma_H >= 1";
        return out;
    }
    res.beta1 = (1.0 - res.gamma_H) / (wl1.K * N);
    res.beta2 = (1.0 - res.gamma_H) / (wl2.K * N);
    res.alpha = std::min(res.beta1 * (wl1.sigma_bar - wl1.K / coup1.A), res.beta2 * (wl2.sigma_bar - wl2.K / coup2.A));
    res.kappa = res.alpha / (1.0 + res.beta1);
    res.C1 = 1.0 + res.beta1 * wl1.K;
    res.C2 = std::pow(1.0 + res.beta2 * wl2.K, 2.0 * N - 2.0);
    res.m = std::max(1.0 + res.beta1, res.alpha * res.C2 * (1.0 + res.beta2) / res.beta2);
    res.r = res.kappa / (2.0 * N - 1.0);
    res.r_tv = res.kappa / (4.0 * N - 2.0);

    // xi*(kappa-free form): F(lambda) = int_lambda^1 ds/xi*(s), with xi* the
    // grid transform over the verified lambda set, tabulated as a left-step
    // underestimate (sound downstream)
    std::vector<double> s_grid = log_grid(1e-14, 1.0, 1400);
    std::vector<double> star(s_grid.size());
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < lam_grid.size(); ++j) best = std::max(best, lam_grid[j] * s_grid[i] - xi_vals[j]);
        star[i] = best;
    }
    ScalarFunction xi_star = ScalarFunction::sampled_left_step(std::move(s_grid), std::move(star), ShapeTag::Convex);
    auto inverter = std::make_shared<RateInverter>(xi_star);

    auto theta = [&inverter](double t) { return std::exp(inverter->log_theta(t)); };

    const double horizon = std::max({res.r * static_cast<double>(n_max), res.kappa * 4.0, 1.0}) + res.kappa;
    res.shift = shift_constant(*inverter, res.kappa, horizon);

    double S_h = (res.N == 1) ? 1.0 : std::max(res.shift, 1.0 / theta(res.r * (2.0 * N - 2.0)));
    double C_v1 = (1.0 / res.beta1) * std::pow(res.C1, 2.0 * N - 2.0) * (res.m / res.kappa) * S_h;
    double C_tv = std::max(4.0 * res.m * (2.0 * N - 1.0) * res.shift / (res.alpha * res.kappa * N),
                           (4.0 * N - 2.0) / theta(res.kappa));

    std::vector<double> t_grid(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) t_grid[n] = static_cast<double>(n);

    res.v1_envelope.prefactor = C_v1;
    res.v1_envelope.time_scale = res.r;
    res.v1_envelope.divide_by_time = false;
    res.v1_envelope.norm = "V1";
    res.v1_envelope.inverter = inverter;
    res.v1_envelope.t_grid.reserve(t_grid.size());
    res.v1_envelope.log_theta.reserve(t_grid.size());
    for (double n : t_grid) {
        res.v1_envelope.t_grid.push_back(res.r * n);
        res.v1_envelope.log_theta.push_back(inverter->log_theta(res.r * n));
    }

    res.tv_envelope.prefactor = C_tv;
    res.tv_envelope.time_scale = res.r_tv;
    res.tv_envelope.divide_by_time = true;
    res.tv_envelope.norm = "TV";
    res.tv_envelope.inverter = inverter;
    for (double n : t_grid) {
        res.tv_envelope.t_grid.push_back(res.r_tv * n);
        res.tv_envelope.log_theta.push_back(inverter->log_theta(res.r_tv * n));
    }

    out.cert = std::move(res);
    return out;
}

CheckResult<FellerPipeline> feller_pipeline(const ScalarFunction& phi, const ScalarFunction& psi, double R,
                                            const std::vector<double>& t_grid, double v_max_check, double z_floor) {
    CheckResult<FellerPipeline> out;
    if (!(R > 0.0)) throw std::invalid_argument("feller_pipeline: R must be > 0");

    if (std::abs(psi(1.0) - 1.0) > 1e-8) {
        out.failure = "psi(1) != 1";
        out.witness_value = psi(1.0);
        return out;
    }
    if (std::abs(psi.derivative(1.0) - 1.0) > 1e-5) {
        out.failure = "psi'(1) != 1";
        out.witness_value = psi.derivative(1.0);
        return out;
    }

    // strict concavity, growth to infinity, monotone psi'*phi, and the
    // threshold hypothesis, all on a log grid with witnesses
    const std::vector<double> grid = log_grid(1.0, v_max_check, 600);
    double prev_dpsi = std::numeric_limits<double>::infinity();
    double prev_g = -std::numeric_limits<double>::infinity();
    bool strictly_concave = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double v = grid[i];
        double d = psi.derivative(v);
        if (d > prev_dpsi + 1e-10) {
            out.failure = "psi' increases (psi not concave)";
            out.witness_value = v;
            return out;
        }
        if (i > 0 && d < prev_dpsi * (1.0 - 1e-9)) strictly_concave = true;
        prev_dpsi = d;
        double gv = d * phi(v);
        if (gv < prev_g * (1.0 - 1e-9) - 1e-12) {
            out.failure = "psi'(v)*phi(v) decreases";
            out.witness_value = v;
            return out;
        }
        prev_g = std::max(prev_g, gv);
        if (phi(v) > 2.0 * R && !(gv > R)) {
            out.failure = "psi'(v)*phi(v) <= R on {phi(v) > 2R}";
            out.witness_value = v;
            return out;
        }
    }
    if (!strictly_concave) {
        out.failure = "psi is not strictly concave";
        return out;
    }
    if (!(psi(v_max_check) > psi(1.0) + 1.0 && psi(v_max_check) > psi(std::sqrt(v_max_check)))) {
        out.failure = "psi does not grow to infinity";
        return out;
    }

    FellerPipeline pl;
    pl.f = ScalarFunction::from_callable(
        "psi-over-v", [psi](double v) { return psi(v) / v; }, 1.0, std::numeric_limits<double>::infinity(),
        ShapeTag::MonotoneOnly);
    pl.g = ScalarFunction::from_callable(
        "psi-prime-phi-over-v", [psi, phi](double v) { return psi.derivative(v) * phi(v) / v; }, 1.0,
        std::numeric_limits<double>::infinity(), ShapeTag::MonotoneOnly);
    ScalarFunction f_inv = ScalarFunction::monotone_decreasing_inverse(pl.f);
    ScalarFunction g_copy = pl.g;
    ScalarFunction h_exact = ScalarFunction::from_callable(
        "h", [g_copy, f_inv](double z) { return g_copy(f_inv(z)); }, 0.0, 1.0, ShapeTag::MonotoneOnly);
    // tabulate h once as a left-step underestimate: quadrature and Legendre
    // queries become table lookups and every downstream bound stays sound
    {
        std::vector<double> zg = log_grid(z_floor, 1.0, static_cast<std::size_t>(std::max(
                                                            400.0, 300.0 * std::log10(1.0 / z_floor))));
        std::vector<double> hv(zg.size());
        for (std::size_t i = 0; i < zg.size(); ++i) hv[i] = h_exact(zg[i]);
        pl.h = ScalarFunction::sampled_left_step(std::move(zg), std::move(hv), ShapeTag::MonotoneOnly);
    }

    // f must be strictly decreasing (checked on the grid)
    double prev_f = std::numeric_limits<double>::infinity();
    for (double v : grid) {
        double fv = pl.f(v);
        if (fv > prev_f + 1e-12) {
            out.failure = "psi(v)/v is not decreasing";
            out.witness_value = v;
            return out;
        }
        prev_f = fv;
    }

    // phi1 via the parametric map w = psi(v) -> psi'(v)*phi(v)
    {
        std::vector<double> w_grid, vals;
        w_grid.reserve(grid.size());
        vals.reserve(grid.size());
        for (double v : grid) {
            double w = psi(v);
            if (!w_grid.empty() && !(w > w_grid.back() * (1.0 + 1e-14))) continue;
            w_grid.push_back(w);
            vals.push_back(psi.derivative(v) * phi(v));
        }
        pl.phi1 = ScalarFunction::sampled(std::move(w_grid), std::move(vals), ShapeTag::Concave);
    }

    // xi = h* over z in (0,1]
    pl.xi_lambda_max = 64.0;
    std::vector<double> lam_grid = log_grid(1e-10, pl.xi_lambda_max, 800);
    pl.xi = legendre_transform(pl.h, 0.0, 1.0, lam_grid);

    auto inverter = std::make_shared<RateInverter>(pl.h);
    pl.inverter = inverter;
    pl.theta_psi.prefactor = 1.0;
    pl.theta_psi.time_scale = 1.0;
    pl.theta_psi.norm = "theta-psi";
    pl.theta_psi.inverter = inverter;
    for (double t : t_grid) {
        pl.theta_psi.t_grid.push_back(t);
        pl.theta_psi.log_theta.push_back(inverter->log_theta(t));
    }

    out.cert = std::move(pl);
    return out;
}

CheckResult<ScalarFunction> psi_builder_polynomial(const ScalarFunction& phi, double R, double eps,
                                                   double v_max_check) {
    CheckResult<ScalarFunction> out;
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("psi_builder_polynomial: eps must lie in (0,1)");
    if (!(R > 0.0)) throw std::invalid_argument("psi_builder_polynomial: R must be > 0");
    if (std::abs(phi(1.0) - 1.0) > 1e-9) {
        out.failure = "phi(1) != 1";
        return out;
    }
    if (2.0 * R < 1.0) {
        out.failure = "threshold 2R below phi(1) = 1 forces m(1) < 1";
        return out;
    }
    const double cap = std::pow(2.0 * R, 1.0 - eps);
    ScalarFunction m = ScalarFunction::from_callable(
        "m-threshold",
        [phi, R, eps, cap](double v) {
            double p = phi(v);
            return p < 2.0 * R ? std::pow(p, 1.0 - eps) : cap;
        },
        1.0, std::numeric_limits<double>::infinity(), ShapeTag::MonotoneOnly);

    // m/phi must be strictly decreasing
    const std::vector<double> grid = log_grid(1.0, v_max_check, 400);
    double prev = std::numeric_limits<double>::infinity();
    bool strict = false;
    for (double v : grid) {
        double ratio = m(v) / phi(v);
        if (ratio > prev + 1e-12) {
            out.failure = "m(v)/phi(v) increases";
            out.witness_value = v;
            return out;
        }
        if (ratio < prev * (1.0 - 1e-12)) strict = true;
        prev = ratio;
    }
    if (!strict) {
        out.failure = "m(v)/phi(v) is not strictly decreasing";
        return out;
    }
    out.cert = ScalarFunction::psi_integral(std::move(m), phi);
    return out;
}

RateFunction h_comparison_rate(const ScalarFunction& phi, const std::vector<double>& t_grid) {
    for (double v : {1.0, 2.0, 10.0})
        if (!(phi(v) > 0.0)) throw std::invalid_argument("h_comparison_rate: phi must be positive");
    // H(u) = int_1^u ds/phi(s), increasing; invert by anchored doubling
    std::vector<double> anchors{1.0};
    std::vector<double> H{0.0};
    auto inv_phi = [&phi](double s) {
        double p = phi(s);
        return (p > 0.0 && std::isfinite(p)) ? 1.0 / p : 0.0;
    };
    auto extend_to = [&](double t) {
        while (H.back() < t && anchors.back() < 1e280) {
            double next = anchors.back() * 2.0;
            H.push_back(H.back() + integrate_log(inv_phi, anchors.back(), next));
            anchors.push_back(next);
        }
    };
    auto H_inverse = [&](double t) {
        if (t <= 0.0) return 1.0;
        extend_to(t);
        auto it = std::lower_bound(H.begin(), H.end(), t);
        std::size_t j = static_cast<std::size_t>(it - H.begin());
        if (j == 0) return 1.0;
        double lo = std::log(anchors[j - 1]), hi = std::log(anchors[std::min(j, anchors.size() - 1)]);
        double Hlo = H[j - 1];
        for (int i = 0; i < 100 && hi - lo > 1e-13; ++i) {
            double mid = 0.5 * (lo + hi);
            double Hm = Hlo + integrate_log(inv_phi, anchors[j - 1], std::exp(mid));
            if (Hm < t)
                lo = mid;
            else
                hi = mid;
        }
        return std::exp(0.5 * (lo + hi));
    };

    RateFunction rf;
    rf.prefactor = 1.0;
    rf.time_scale = 1.0;
    rf.norm = "TV";
    for (double t : t_grid) {
        rf.t_grid.push_back(t);
        rf.log_theta.push_back(-std::log(H_inverse(t)));
    }
    return rf;
}

}  // namespace harris
