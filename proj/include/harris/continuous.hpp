#pragma once

#include "harris/subgeometric.hpp"

namespace harris {

/// Generator drift certificate: LV ≤ −σV + b (geometric) or
/// LV ≤ −σφ(V) + b (weak).
struct GeneratorLyapunovCert {
    double sigma = 0.0;  // 1/time
    double b = 0.0;      // 1/time
    bool weak = false;
    ScalarFunction phi;  // set when weak
    std::string input_hash;
    bool useless = false;  // admissible but with no decay (e.g. frozen dynamics)
};

/// Fits the drift pair on the kink candidates of max_x(LV + σ·target)⁺;
/// objective σ − b(σ)/A when A is given, else σ/b(σ) (largest σ on ties).
CheckResult<GeneratorLyapunovCert> check_generator_lyapunov(const GeneratorMatrix& L, const WeightFunction& V,
                                                            const std::optional<ScalarFunction>& phi = std::nullopt,
                                                            std::optional<double> A = std::nullopt);

/// Per-time coefficients of ‖S_tμ‖_V ≤ a(t)‖μ‖_V + c(t)‖μ‖:
/// a = e^{−σt}, c = (b/σ)(1 − e^{−σt}).
struct SemigroupEnvelopeCoeffs {
    double t = 0.0;
    double coef_V = 1.0;
    double coef_TV = 0.0;
};
std::vector<SemigroupEnvelopeCoeffs> semigroup_lyapunov_envelope(const GeneratorLyapunovCert& cert,
                                                                 const std::vector<double>& t_grid);

/// Transform of the implicit inequality
/// ‖Sμ‖_V + σ‖Sμ‖_{φ(V)} ≤ ‖μ‖_V + K‖μ‖ into an explicit weak certificate
/// for Ṽ = (V + σφ(V))/(1+σ), φ̃(Ṽ) = φ(V), ς̃ = σ/(1+σ), K̃ = K/(1+σ).
struct ExplicitTransform {
    WeightFunction V_tilde;
    ScalarFunction phi_tilde;
    double sigma_new = 0.0;
    double K_new = 0.0;
};
ExplicitTransform implicit_to_explicit(const WeightFunction& V, const ScalarFunction& phi, double sigma, double K);

/// Time-t implicit constants from a weak generator certificate:
/// (σt, K_t = b·t·(1 + σt/2)).
std::pair<double, double> implicit_drift_bound(const GeneratorLyapunovCert& cert, double t);

/// Continuous envelopes assembled from the time-t₀ discrete machinery:
///   ‖S_tν‖_{V1} ≤ C_v1 · Θ(r_v1·t) · ‖ν‖_{V2}
///   ‖S_tν‖     ≤ (C_tv/t) · Θ(r_tv·t) · ‖ν‖_{V2}
struct ContinuousRateResult {
    RateFunction v1_envelope;
    RateFunction tv_envelope;
    std::size_t N = 1;
    double t0 = 0.0;
    SubgeometricEnvelopes discrete;
};

/// Generic route: weak generator certificates for both weights, a coupling
/// window [T] and interpolation ξ for the untransformed triple (V1, φ1, V2).
CheckResult<ContinuousRateResult> continuous_subgeometric_rate(const GeneratorMatrix& L, const WeightFunction& V1,
                                                               const WeightFunction& V2,
                                                               const GeneratorLyapunovCert& weak1,
                                                               const GeneratorLyapunovCert& weak2, double T, double A1,
                                                               double A2, const ScalarFunction& xi,
                                                               double xi_lambda_max, double t_max,
                                                               std::size_t grid_size);

/// Feller route: weak generator certificate for V plus a Harris certificate
/// of S_T on {φ(V) ≤ 2R}; ψ defaults to the polynomial builder on the
/// transformed φ̃ when not supplied.
CheckResult<ContinuousRateResult> continuous_feller_rate(const GeneratorMatrix& L, const WeightFunction& V,
                                                         const GeneratorLyapunovCert& weak, const HarrisCert& harris_T,
                                                         double T, double R, double A1, double A2,
                                                         std::optional<ScalarFunction> psi, double builder_eps,
                                                         double t_max, std::size_t grid_size);

struct CesaroResult {
    SignedMeasure average;
    double residual = 0.0;
    std::size_t horizon_used = 0;
    bool converged = false;
    // weak-moment tracking (set when a certificate is supplied)
    bool moment_checked = false;
    double phiV_average = 0.0;
    double phiV_budget = 0.0;
    bool moment_ok = true;
};

/// Cesàro average (1/T)Σ_{k<T} S^k μ0, extended until the invariance
/// residual drops below tol or the horizon is exhausted.
CesaroResult cesaro_invariant(const StochasticKernel& S, const Vector& mu0, std::size_t horizon, double tol,
                              const std::optional<WeakLyapunovCert>& wl = std::nullopt,
                              const WeightFunction* V = nullptr);

/// Trapezoidal time-average for generators, stepping with S_dt.
CesaroResult cesaro_invariant(const GeneratorMatrix& L, const Vector& mu0, double horizon, double dt, double tol);

}  // namespace harris
