#pragma once

#include "harris/certificates.hpp"

#include <string>

namespace harris {

/// Certified geometric envelope: bound(u) = C·γ^u (discrete steps) or
/// C·e^{−λu} (continuous time), for the tagged norm.
struct GeometricEnvelope {
    double C = 1.0;
    double rate = 0.0;       // γ ∈ (0,1) or λ > 0
    bool continuous = false; // false: C·γ^n, true: C·e^{−λt}
    std::string norm = "TV";

    double value_at(double u) const;
};

/// Doeblin: C = 1, γ = 1 − α, TV norm.
GeometricEnvelope doeblin_rate(const DoeblinCert& cert);

/// The positive root of Kβ² + (K + b − a)β − a = 0 with a = 1 − γ_H,
/// b = 1 − γ_L − K/A (the equalizing optimal β); K = 0 falls back to direct
/// golden-section minimization of γ(β) over (0, 10³].
struct BetaChoice {
    double beta = 0.0;
    double gamma = 1.0;
    bool equalized = false;  // quadratic root accepted with both branches in (0,1)
};
BetaChoice harris_beta_optimal(double gamma_H, double gamma_L, double K, double A);

struct HarrisRate {
    GeometricEnvelope envelope;  // V-weighted: ‖Sⁿν‖_V ≤ Cγⁿ‖ν‖_V
    double beta = 0.0;
    double gamma = 1.0;          // also the one-step triple-norm contraction factor
    bool equalized = false;
};

/// Harris theorem constants from a Lyapunov + coupling pair (coupling power
/// must be 1; certify S^N upstream and compose powers in the caller).
CheckResult<HarrisRate> harris_rate(const LyapunovCert& lyap, const CouplingCert& coup);

/// check_lyapunov variant whose objective is the final Harris γ.
CheckResult<LyapunovCert> check_lyapunov_for_harris(const StochasticKernel& S, const WeightFunction& V,
                                                    const std::vector<double>& K_grid, const CouplingCert& coup);

/// ρ of [[γ_L, K], [(1−γ_H)/A, γ_H]] from the 2×2 characteristic polynomial.
double coupling_matrix_rate(double gamma_L, double K, double gamma_H, double A);

/// Continuous Doeblin envelope: C = 1/(1−α), λ = −log(1−α)/T.
GeometricEnvelope semigroup_doeblin_rate(double alpha, double T);

/// Continuous Harris envelope: C = C_V e^{ω_V T}(1+β)/(γβ), λ = −log γ/T.
GeometricEnvelope semigroup_harris_rate(const GeometricEnvelope& at_T, const SemigroupGrowth& growth, double beta,
                                        double T);

}  // namespace harris
