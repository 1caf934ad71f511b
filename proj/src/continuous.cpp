#include "harris/continuous.hpp"

#include "harris/util.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace harris {

CheckResult<GeneratorLyapunovCert> check_generator_lyapunov(const GeneratorMatrix& L, const WeightFunction& V,
                                                            const std::optional<ScalarFunction>& phi,
                                                            std::optional<double> A) {
    CheckResult<GeneratorLyapunovCert> out;
    if (V.size() != L.size()) throw std::invalid_argument("check_generator_lyapunov: dimension mismatch");
    const std::size_t n = V.size();

    if (phi) {
        double vmax = 1.0;
        for (std::size_t x = 0; x < n; ++x) vmax = std::max(vmax, V[x]);
        Rng rng(0x51a7eed5u);
        PhiRoleReport role = check_phi_role(*phi, vmax * 2.0, rng);
        if (!role.ok) {
            out.failure = "phi rejected: " + role.reason;
            return out;
        }
    }

    Vector LV = L.dual_apply(V.values());
    Vector target(static_cast<Eigen::Index>(n));
    for (std::size_t x = 0; x < n; ++x) target[static_cast<Eigen::Index>(x)] = phi ? (*phi)(V[x]) : V[x];

    // b(sigma) = max_x (LV + sigma*target)+ is piecewise linear in sigma; the
    // objective's optimum sits at a kink where the argmax state switches
    std::set<double> candidates{1e-9};
    for (std::size_t x = 0; x < n; ++x) {
        double s = -LV[static_cast<Eigen::Index>(x)] / target[static_cast<Eigen::Index>(x)];
        if (s > 0.0 && std::isfinite(s)) candidates.insert(s);
        for (std::size_t y = x + 1; y < n; ++y) {
            double dt = target[static_cast<Eigen::Index>(y)] - target[static_cast<Eigen::Index>(x)];
            if (std::abs(dt) < 1e-14) continue;
            double s = (LV[static_cast<Eigen::Index>(x)] - LV[static_cast<Eigen::Index>(y)]) / dt;
            if (s > 0.0 && std::isfinite(s)) candidates.insert(s);
        }
    }

    auto b_of = [&](double sigma) {
        double b = 0.0;
        for (Eigen::Index x = 0; x < LV.size(); ++x) b = std::max(b, LV[x] + sigma * target[x]);
        return b;
    };

    double best_obj = -std::numeric_limits<double>::infinity();
    double best_sigma = 0.0, best_b = 0.0;
    for (double s : candidates) {
        double b = b_of(s);
        double obj;
        if (A) {
            obj = s - b / *A;
            if (!(obj > 0.0)) continue;
        } else {
            obj = (b > 0.0) ? s / b : std::numeric_limits<double>::infinity();
        }
        if (obj > best_obj + 1e-15 || (std::abs(obj - best_obj) <= 1e-12 * std::max(1.0, std::abs(best_obj)) && s > best_sigma)) {
            best_obj = obj;
            best_sigma = s;
            best_b = b;
        }
    }
    if (!(best_sigma > 0.0)) {
        out.failure = A ? "no sigma > 0 with sigma - b(sigma)/A > 0" : "no sigma > 0 admissible";
        return out;
    }

    GeneratorLyapunovCert cert;
    cert.sigma = best_sigma;
    cert.b = std::max(best_b, 1e-12);
    cert.weak = phi.has_value();
    if (phi) cert.phi = *phi;
    {
        ContentHasher h;
        h.add(L.matrix()).add(V.values());
        cert.input_hash = h.hex();
    }
    // frozen dynamics: LV = 0 gives an admissible but informationless pair
    cert.useless = LV.cwiseAbs().maxCoeff() < 1e-14;
    out.cert = std::move(cert);
    return out;
}

std::vector<SemigroupEnvelopeCoeffs> semigroup_lyapunov_envelope(const GeneratorLyapunovCert& cert,
                                                                 const std::vector<double>& t_grid) {
    if (cert.weak) throw std::invalid_argument("semigroup_lyapunov_envelope: needs a geometric certificate");
    std::vector<SemigroupEnvelopeCoeffs> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        SemigroupEnvelopeCoeffs c;
        c.t = t;
        c.coef_V = std::exp(-cert.sigma * t);
        c.coef_TV = cert.b / cert.sigma * (1.0 - c.coef_V);
        out.push_back(c);
    }
    return out;
}

ExplicitTransform implicit_to_explicit(const WeightFunction& V, const ScalarFunction& phi, double sigma, double K) {
    if (!(sigma > 0.0)) throw std::invalid_argument("implicit_to_explicit: sigma must be > 0");
    const std::size_t n = V.size();
    Vector vt(static_cast<Eigen::Index>(n));
    double vmax = 1.0;
    for (std::size_t x = 0; x < n; ++x) {
        vt[static_cast<Eigen::Index>(x)] = (V[x] + sigma * phi(V[x])) / (1.0 + sigma);
        vmax = std::max(vmax, V[x]);
    }
    // phi_tilde maps w = (v + sigma*phi(v))/(1+sigma) to phi(v); tabulate on a
    // dense v-grid that contains the state values exactly
    std::vector<double> v_nodes;
    v_nodes.reserve(n + 800);
    for (std::size_t x = 0; x < n; ++x) v_nodes.push_back(V[x]);
    double hi = vmax * 4.0 + 16.0;
    for (std::size_t i = 0; i <= 800; ++i) v_nodes.push_back(std::exp(std::log(hi) * static_cast<double>(i) / 800.0));
    std::sort(v_nodes.begin(), v_nodes.end());
    v_nodes.erase(std::unique(v_nodes.begin(), v_nodes.end()), v_nodes.end());

    std::vector<double> w_grid, vals;
    w_grid.reserve(v_nodes.size());
    vals.reserve(v_nodes.size());
    for (double v : v_nodes) {
        if (v < 1.0) continue;
        double w = (v + sigma * phi(v)) / (1.0 + sigma);
        if (!w_grid.empty() && !(w > w_grid.back() * (1.0 + 1e-15))) continue;
        w_grid.push_back(w);
        vals.push_back(phi(v));
    }

    ExplicitTransform out;
    out.V_tilde = WeightFunction(std::move(vt));
    out.phi_tilde = ScalarFunction::sampled(std::move(w_grid), std::move(vals), ShapeTag::Concave);
    out.sigma_new = sigma / (1.0 + sigma);
    out.K_new = K / (1.0 + sigma);
    return out;
}

std::pair<double, double> implicit_drift_bound(const GeneratorLyapunovCert& cert, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("implicit_drift_bound: t must be > 0");
    if (!cert.weak) throw std::invalid_argument("implicit_drift_bound: needs a weak certificate");
    return {cert.sigma * t, cert.b * t * (1.0 + cert.sigma * t / 2.0)};
}

namespace {

// Continuous extension shared by both subgeometric routes. The discrete
// envelopes hold for S_{t0}^n against the transformed weights; floors and
// shifts make them valid at every real t against the original V2 norm
// (V_tilde <= V2 and the within-step growth factor are folded in).
ContinuousRateResult extend_to_continuous(SubgeometricEnvelopes disc, double t0, double growth_v1, double t_max,
                                          std::size_t grid_size) {
    ContinuousRateResult res;
    res.t0 = t0;
    res.N = disc.N;

    auto theta = [&disc](double t) { return std::exp(disc.v1_envelope.inverter->log_theta(t)); };

    RateFunction v1;
    v1.inverter = disc.v1_envelope.inverter;
    v1.norm = "V1";
    v1.time_scale = disc.r / t0;
    v1.divide_by_time = false;
    v1.prefactor = growth_v1 * disc.v1_envelope.prefactor * std::max(disc.shift, 1.0 / theta(disc.r));

    RateFunction tv;
    tv.inverter = disc.v1_envelope.inverter;
    tv.norm = "TV";
    tv.time_scale = disc.r_tv / (2.0 * t0);
    tv.divide_by_time = true;
    tv.prefactor = std::max(2.0 * t0 * disc.tv_envelope.prefactor, 2.0 * t0 / theta(disc.r_tv));
    // the divisor is clamped at 1 below t = 1, which only raises the bound;
    // make sure the bound also covers plain non-expansiveness there
    tv.prefactor = std::max(tv.prefactor, 1.0 / theta(tv.time_scale));

    for (std::size_t i = 0; i <= grid_size; ++i) {
        double t = t_max * static_cast<double>(i) / static_cast<double>(grid_size);
        v1.t_grid.push_back(v1.time_scale * t);
        v1.log_theta.push_back(disc.v1_envelope.inverter->log_theta(v1.time_scale * t));
        tv.t_grid.push_back(tv.time_scale * t);
        tv.log_theta.push_back(disc.v1_envelope.inverter->log_theta(tv.time_scale * t));
    }
    res.v1_envelope = std::move(v1);
    res.tv_envelope = std::move(tv);
    res.discrete = std::move(disc);
    return res;
}

std::vector<double> sigma_grid_below(double cap) {
    std::vector<double> g;
    for (int i = 1; i <= 40; ++i) {
        double s = cap * static_cast<double>(i) / 40.0;
        if (s > 0.0 && s < 1.0) g.push_back(s);
    }
    return g;
}

}  // namespace

CheckResult<ContinuousRateResult> continuous_subgeometric_rate(const GeneratorMatrix& L, const WeightFunction& V1,
                                                               const WeightFunction& V2,
                                                               const GeneratorLyapunovCert& weak1,
                                                               const GeneratorLyapunovCert& weak2, double T, double A1,
                                                               double A2, const ScalarFunction& xi,
                                                               double xi_lambda_max, double t_max,
                                                               std::size_t grid_size) {
    CheckResult<ContinuousRateResult> out;
    if (!weak1.weak || !weak2.weak) {
        out.failure = "both generator certificates must be weak (carry phi)";
        return out;
    }
    // time splitting: smallest N with (b_i/sigma_i)(1 + sigma_i t0/2) < A_i, t0 = T/N
    std::size_t N = 0;
    for (std::size_t cand = 1; cand <= 1000000; ++cand) {
        double t0 = T / static_cast<double>(cand);
        bool ok1 = (weak1.b / weak1.sigma) * (1.0 + weak1.sigma * t0 / 2.0) < A1;
        bool ok2 = (weak2.b / weak2.sigma) * (1.0 + weak2.sigma * t0 / 2.0) < A2;
        if (ok1 && ok2) {
            N = cand;
            break;
        }
    }
    if (N == 0) {
        out.failure = "no N <= 1e6 satisfies the time-splitting inequality";
        return out;
    }
    const double t0 = T / static_cast<double>(N);
    StochasticKernel St0 = semigroup_at(L, t0);

    auto [s1, K1] = implicit_drift_bound(weak1, t0);
    auto [s2, K2] = implicit_drift_bound(weak2, t0);
    ExplicitTransform tr1 = implicit_to_explicit(V1, weak1.phi, s1, K1);
    ExplicitTransform tr2 = implicit_to_explicit(V2, weak2.phi, s2, K2);

    // empirical weak certificates for S_t0 on the transformed weights (the
    // transform guarantees admissible constants; pointwise extraction can
    // only improve them)
    auto wl1r = check_weak_lyapunov(St0, tr1.V_tilde, tr1.phi_tilde, sigma_grid_below(tr1.sigma_new), A1);
    auto wl2r = check_weak_lyapunov(St0, tr2.V_tilde, tr2.phi_tilde, sigma_grid_below(tr2.sigma_new), A2);
    if (!wl1r || !wl2r) {
        out.failure = "transformed weak certificate extraction failed: " + (wl1r ? wl2r.failure : wl1r.failure);
        return out;
    }

    // couplings for S_T = S_t0^N on the weights phi_i(V_i) (= phi~_i(V~_i))
    Vector w1(static_cast<Eigen::Index>(V1.size())), w2(static_cast<Eigen::Index>(V2.size()));
    for (std::size_t x = 0; x < V1.size(); ++x) {
        w1[static_cast<Eigen::Index>(x)] = weak1.phi(V1[x]);
        w2[static_cast<Eigen::Index>(x)] = weak2.phi(V2[x]);
    }
    auto coup1 = check_local_coupling(St0, WeightFunction(w1), A1, N);
    auto coup2 = check_local_coupling(St0, WeightFunction(w2), A2, N);
    if (!coup1 || !coup2) {
        out.failure = "coupling extraction failed: " + (coup1 ? coup2.failure : coup1.failure);
        return out;
    }

    // interpolation transfers to the transformed weights with xi~ = (1+s2)xi
    double factor = 1.0 + s2;
    ScalarFunction xi_tilde = ScalarFunction::from_callable(
        "xi-rescaled", [xi, factor](double lam) { return factor * xi(lam); }, 0.0, xi_lambda_max,
        ShapeTag::MonotoneOnly);

    auto sub = interpolated_subgeometric_rate(St0, tr1.V_tilde, tr2.V_tilde, *wl1r, *wl2r, *coup1, *coup2, xi_tilde, xi_lambda_max,
                                static_cast<std::size_t>(std::ceil(t_max / t0)) + 2);
    if (!sub) {
        out.failure = "discrete assembly failed: " + sub.failure;
        out.witness_state = sub.witness_state;
        out.witness_value = sub.witness_value;
        return out;
    }

    // within-step growth in V1: ||S_s mu||_{V1~} <= ((1+s1) + K1)||mu||_{V1~},
    // and ||.||_{V1} <= (1+s1)||.||_{V1~} on the way back out
    double growth_v1 = (1.0 + s1) * ((1.0 + s1) + K1);
    out.cert = extend_to_continuous(std::move(*sub.cert), t0, growth_v1, t_max, grid_size);
    return out;
}

CheckResult<ContinuousRateResult> continuous_feller_rate(const GeneratorMatrix& L, const WeightFunction& V,
                                                         const GeneratorLyapunovCert& weak, const HarrisCert& harris_T,
                                                         double T, double R, double A1, double A2,
                                                         std::optional<ScalarFunction> psi, double builder_eps,
                                                         double t_max, std::size_t grid_size) {
    CheckResult<ContinuousRateResult> out;
    if (!weak.weak) {
        out.failure = "generator certificate must be weak (carry phi)";
        return out;
    }
    if (!(A2 < R) || !(A1 < R / 2.0)) {
        out.failure = "need A1 < R/2 and A2 < R for the Harris-to-coupling transfer";
        return out;
    }
    std::size_t N = 0;
    for (std::size_t cand = 1; cand <= 1000000; ++cand) {
        double t0 = T / static_cast<double>(cand);
        double lhs = (weak.b / weak.sigma) * (1.0 + weak.sigma * t0 / 2.0);
        if (lhs < std::min(A1, A2)) {
            N = cand;
            break;
        }
    }
    if (N == 0) {
        out.failure = "no N <= 1e6 satisfies the time-splitting inequality";
        return out;
    }
    const double t0 = T / static_cast<double>(N);
    StochasticKernel St0 = semigroup_at(L, t0);

    auto [s_imp, K_imp] = implicit_drift_bound(weak, t0);
    ExplicitTransform tr = implicit_to_explicit(V, weak.phi, s_imp, K_imp);

    // psi on the transformed phi~
    if (!psi) {
        auto built = psi_builder_polynomial(tr.phi_tilde, R, builder_eps);
        if (!built) {
            out.failure = "psi builder failed: " + built.failure;
            return out;
        }
        psi = *built.cert;
    }

    double vmax = 1.0;
    for (std::size_t x = 0; x < tr.V_tilde.size(); ++x) vmax = std::max(vmax, tr.V_tilde[x]);
    std::vector<double> shape_grid{1.0, 2.0};
    auto pipe = feller_pipeline(tr.phi_tilde, *psi, R, shape_grid, vmax * 8.0);
    if (!pipe) {
        out.failure = "feller pipeline rejected: " + pipe.failure;
        out.witness_value = pipe.witness_value;
        return out;
    }

    // V1 = psi(V~), weights for the two couplings
    const std::size_t n = V.size();
    Vector v1(static_cast<Eigen::Index>(n));
    for (std::size_t x = 0; x < n; ++x) v1[static_cast<Eigen::Index>(x)] = (*psi)(tr.V_tilde[x]);
    WeightFunction V1(v1);

    // phi1(V1) = psi'(V~) phi~(V~); Harris on the sub-sublevel set transfers
    HarrisCert harris_sub = harris_T;
    harris_sub.R = R;  // sublevel threshold in the phi1(V1) scale
    CouplingCert coup1 = harris_to_coupling(harris_sub, A1, N);
    // weight phi(V) with set threshold 2R: gamma = 1 - alpha(1 - A2/R)
    CouplingCert coup2;
    coup2.A = A2;
    coup2.gamma_H = 1.0 - harris_T.alpha * (1.0 - A2 / R);
    coup2.gamma_H_pairwise = coup2.gamma_H;
    coup2.N = N;
    coup2.input_hash = harris_T.input_hash;

    auto wl1r = check_weak_lyapunov(St0, V1, pipe->phi1, sigma_grid_below(tr.sigma_new), A1);
    auto wl2r = check_weak_lyapunov(St0, tr.V_tilde, tr.phi_tilde, sigma_grid_below(tr.sigma_new), A2);
    if (!wl1r || !wl2r) {
        out.failure = "transformed weak certificate extraction failed: " + (wl1r ? wl2r.failure : wl1r.failure);
        return out;
    }

    auto sub = interpolated_subgeometric_rate(St0, V1, tr.V_tilde, *wl1r, *wl2r, coup1, coup2, pipe->xi, pipe->xi_lambda_max,
                                static_cast<std::size_t>(std::ceil(t_max / t0)) + 2);
    if (!sub) {
        out.failure = "discrete assembly failed: " + sub.failure;
        out.witness_state = sub.witness_state;
        out.witness_value = sub.witness_value;
        return out;
    }

    double growth_v1 = (1.0 + s_imp) * ((1.0 + s_imp) + K_imp);
    out.cert = extend_to_continuous(std::move(*sub.cert), t0, growth_v1, t_max, grid_size);
    return out;
}

CesaroResult cesaro_invariant(const StochasticKernel& S, const Vector& mu0, std::size_t horizon, double tol,
                              const std::optional<WeakLyapunovCert>& wl, const WeightFunction* V) {
    if (mu0.size() != static_cast<Eigen::Index>(S.size())) throw std::invalid_argument("cesaro_invariant: dimension mismatch");
    if ((mu0.array() < -1e-15).any() || std::abs(mu0.sum() - 1.0) > 1e-9)
        throw std::invalid_argument("cesaro_invariant: mu0 must be a probability vector");

    CesaroResult res;
    Vector cur = mu0;
    Vector sum = Vector::Zero(mu0.size());
    double phi_sum = 0.0;
    std::size_t count = 0;
    const Matrix& M = S.matrix();
    for (std::size_t k = 0; k < horizon; ++k) {
        sum += cur;
        if (wl && V) {
            double m = 0.0;
            for (Eigen::Index x = 0; x < cur.size(); ++x) m += wl->phi((*V)[static_cast<std::size_t>(x)]) * cur[x];
            phi_sum += m;
        }
        ++count;
        cur = M.transpose() * cur;
        if ((k & 0xf) == 0xf || k + 1 == horizon) {
            Vector avg = sum / static_cast<double>(count);
            double residual = (M.transpose() * avg - avg).cwiseAbs().sum();
            if (residual <= tol || k + 1 == horizon) {
                res.average = SignedMeasure(avg / avg.sum());
                res.residual = residual;
                res.horizon_used = count;
                res.converged = residual <= tol;
                if (wl && V) {
                    res.moment_checked = true;
                    res.phiV_average = phi_sum / static_cast<double>(count);
                    double v_mass = 0.0;
                    for (Eigen::Index x = 0; x < mu0.size(); ++x) v_mass += (*V)[static_cast<std::size_t>(x)] * mu0[x];
                    res.phiV_budget = (v_mass / static_cast<double>(count) + wl->K) / wl->sigma_bar;
                    res.moment_ok = res.phiV_average <= res.phiV_budget + 1e-9;
                }
                if (res.converged) return res;
            }
        }
    }
    return res;
}

CesaroResult cesaro_invariant(const GeneratorMatrix& L, const Vector& mu0, double horizon, double dt, double tol) {
    if (!(dt > 0.0) || !(horizon > 0.0)) throw std::invalid_argument("cesaro_invariant: need dt > 0 and horizon > 0");
    StochasticKernel P = semigroup_at(L, dt);
    const Matrix& M = P.matrix();
    std::size_t steps = static_cast<std::size_t>(std::ceil(horizon / dt));

    CesaroResult res;
    Vector cur = mu0;
    Vector sum = 0.5 * cur;  // trapezoid endpoints carry half weight
    for (std::size_t k = 1; k <= steps; ++k) {
        cur = M.transpose() * cur;
        sum += (k == steps) ? 0.5 * cur : cur;
        if ((k & 0xf) == 0 || k == steps) {
            Vector avg = sum / sum.sum();
            double residual = (M.transpose() * avg - avg).cwiseAbs().sum();
            res.average = SignedMeasure(avg);
            res.residual = residual;
            res.horizon_used = k;
            res.converged = residual <= tol;
            if (res.converged) return res;
        }
    }
    return res;
}

}  // namespace harris
