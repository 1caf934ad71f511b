#pragma once

#include "harris/certificates.hpp"

#include <functional>
#include <string>
#include <vector>

namespace harris {

struct NormSpec {
    std::string tag;  // "tv" or a weight name ("v1", "v2", ...)
    std::optional<WeightFunction> weight;
};

/// Trajectory norms of ν_k = S^k ν.
struct DecayTable {
    std::vector<double> times;                  // n = 0..n_max
    std::vector<std::string> columns;           // per NormSpec
    std::vector<std::vector<double>> values;    // values[c][k]
    bool zero_mean_input = true;                // flagged when the input carries mass
};

DecayTable simulate_decay(const StochasticKernel& S, const SignedMeasure& nu, std::size_t n_max,
                          const std::vector<NormSpec>& norms);

struct EnvelopeValidation {
    bool pass = false;
    double worst_ratio = 0.0;
    double arg_worst = 0.0;  // the n or t achieving the worst ratio
};

/// measured[i] ≤ envelope(times[i])·(1 + slack) for every i.
EnvelopeValidation validate_envelope(const std::vector<double>& times, const std::vector<double>& measured,
                                     const std::function<double(double)>& envelope, double slack);

struct ExistenceResult {
    SignedMeasure mu_star;
    double budget = 0.0;     // triple norm of Sμ0 − μ0
    double consumed = 0.0;   // α·Σ ‖ν_k‖_{φ(V)} at the end
    bool budget_respected = true;
    double worst_excess = 0.0;  // max over n of consumed_n − budget
};

/// Cauchy-budget check along μ_k = S^kμ0: the partial sums
/// α·Σ_{k<n}‖μ_{k+1} − μ_k‖_{φ(V)} never exceed ‖Sμ0 − μ0‖ + β‖·‖_V.
ExistenceResult existence_check(const StochasticKernel& S, const WeightFunction& V, const WeakLyapunovCert& wl,
                                const CouplingCert& coup, const Vector& mu0, std::size_t n_max);

struct UniquenessReport {
    int multiplicity = 0;  // dim ker(Mᵀ − I)
    bool unique = false;
    double second_residual = 0.0;  // TV distance between two candidates when multiplicity > 1
};

UniquenessReport uniqueness_check(const StochasticKernel& S, double tol = 1e-9);

}  // namespace harris
