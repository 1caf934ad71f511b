#pragma once

#include "harris/certificates.hpp"
#include "harris/geometric.hpp"
#include "harris/rate_calculus.hpp"

namespace harris {

/// Assembled subgeometric envelopes for a weak-Lyapunov/coupling pair:
///   ‖Sⁿν‖_{V1} ≤ C_V1 · Θ(r·n) · ‖ν‖_{V2}
///   ‖Sⁿν‖     ≤ (C_TV/n) · Θ(r_tv·n) · ‖ν‖_{V2}
struct SubgeometricEnvelopes {
    RateFunction v1_envelope;
    RateFunction tv_envelope;
    // assembled constants, kept for reports
    double gamma_H = 0.0;
    double beta1 = 0.0, beta2 = 0.0;
    double alpha = 0.0, kappa = 0.0;
    double C1 = 0.0, C2 = 0.0, m = 0.0;
    double r = 0.0, r_tv = 0.0;
    double shift = 1.0;
    std::size_t N = 1;
};

/// Both couplings must certify the same power N (for S^N), with weights
/// φ1(V1) and φ2(V2) respectively. ξ is verified pointwise over states at
/// every λ of the internal grid before it is trusted (witness on failure).
CheckResult<SubgeometricEnvelopes> interpolated_subgeometric_rate(const StochasticKernel& S, const WeightFunction& V1,
                                              const WeightFunction& V2, const WeakLyapunovCert& wl1,
                                              const WeakLyapunovCert& wl2, const CouplingCert& coup1,
                                              const CouplingCert& coup2, const ScalarFunction& xi,
                                              double xi_lambda_max, std::size_t n_max);

/// Rate shapes of the Feller-type route: f = ψ/v, g = ψ'φ/v, h = g∘f⁻¹,
/// F_ψ(v) = ∫_v^1 du/h(u), Θ_ψ = F_ψ⁻¹. Also the induced φ₁ with
/// φ₁(ψ(v)) = ψ'(v)φ(v) and the interpolation function ξ = h*.
struct FellerPipeline {
    ScalarFunction f, g, h;
    ScalarFunction phi1;
    ScalarFunction xi;
    double xi_lambda_max = 0.0;
    RateFunction theta_psi;
    std::shared_ptr<const RateInverter> inverter;
};

CheckResult<FellerPipeline> feller_pipeline(const ScalarFunction& phi, const ScalarFunction& psi, double R,
                                            const std::vector<double>& t_grid, double v_max_check = 1e6,
                                            double z_floor = 1e-14);

/// ψ(u) = 1 + ∫_1^u m(v)/φ(v) dv with m = φ^{1−ε} below the threshold
/// φ(v) = 2R and constant (2R)^{1−ε} above it.
CheckResult<ScalarFunction> psi_builder_polynomial(const ScalarFunction& phi, double R, double eps,
                                                   double v_max_check = 1e6);

/// 1/H⁻¹(t) with H(u) = ∫_1^u ds/φ(s) (the comparison rate of the
/// probabilistic continuous-time theorem).
RateFunction h_comparison_rate(const ScalarFunction& phi, const std::vector<double>& t_grid);

}  // namespace harris
