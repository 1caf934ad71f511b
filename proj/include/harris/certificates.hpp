#pragma once

#include "harris/kernel.hpp"
#include "harris/scalar_function.hpp"

#include <optional>
#include <string>
#include <vector>

namespace harris {

/// Outcome of a certificate extraction; `failure` is empty iff `cert` holds.
template <typename Cert>
struct CheckResult {
    std::optional<Cert> cert;
    std::string failure;
    int witness_state = -1;
    int witness_state2 = -1;
    double witness_value = 0.0;

    explicit operator bool() const { return cert.has_value(); }
    const Cert& operator*() const { return *cert; }
    const Cert* operator->() const { return &*cert; }
};

/// Sμ ≥ αη for all probability μ.
struct DoeblinCert {
    double alpha = 0.0;
    Vector eta;
    std::string input_hash;
};

/// Sμ ≥ αη ∫_C μ on the sublevel set C = {V ≤ R}.
struct HarrisCert {
    double alpha = 0.0;
    Vector eta;
    std::vector<std::size_t> set_C;
    double R = 0.0;
    std::string input_hash;
};

/// ‖Sμ‖_V ≤ γ_L‖μ‖_V + K‖μ‖ (checked at the δ_x extreme points).
struct LyapunovCert {
    double gamma_L = 0.0;
    double K = 0.0;
    std::string input_hash;
};

/// ‖Sμ‖_V + ς‖μ‖_{φ(V)} ≤ ‖μ‖_V + K‖μ‖.
struct WeakLyapunovCert {
    double sigma_bar = 0.0;  // the drift share ς
    double K = 0.0;
    ScalarFunction phi;
    std::string input_hash;
};

/// ‖S^N ν‖ ≤ γ_H‖ν‖ whenever ‖ν‖_W ≤ A‖ν‖ (W the declared coupling weight).
/// gamma_H is the exact measure-level constant (extreme-point enumeration);
/// gamma_H_pairwise is the pairwise-at-A maximum kept for comparison.
struct CouplingCert {
    double A = 0.0;
    double gamma_H = 0.0;
    std::size_t N = 1;
    double gamma_H_pairwise = 0.0;
    bool vacuous = false;
    std::string input_hash;
};

std::string kernel_hash(const StochasticKernel& S);
std::string kernel_weight_hash(const StochasticKernel& S, const WeightFunction& V);

/// α = Σ_y min_x M(x,y), η = columnwise minimum / α; fails iff α = 0.
CheckResult<DoeblinCert> check_doeblin(const StochasticKernel& S);

/// Columnwise minimum restricted to rows in C = {x : V(x) ≤ R}.
CheckResult<HarrisCert> check_harris(const StochasticKernel& S, const WeightFunction& V, double R);

/// γ_L(K) = max_x (PV(x) − K)⁺/V(x); returns the grid pair minimizing the
/// supplied objective (default: γ_L itself). Fails when γ_L ≥ 1 on the grid.
CheckResult<LyapunovCert> check_lyapunov(const StochasticKernel& S, const WeightFunction& V,
                                         const std::vector<double>& K_grid,
                                         const std::function<double(double, double)>& objective = nullptr);

/// Default K grid: quantiles {0.5, 0.75, 0.9, 0.95, 1.0} of the PV values.
std::vector<double> default_K_grid(const StochasticKernel& S, const WeightFunction& V);

/// Minimal admissible K at fixed ς from the PV values (formula-level core:
/// K(ς) = max_x (PV + ς·φ(V) − V), floored at a small positive value).
double weak_lyapunov_K(const Vector& PV, const Vector& V, const Vector& phiV, double sigma);

/// Scans sigma_grid; picks the pair maximizing ς − K(ς)/A (or ς/K without A).
CheckResult<WeakLyapunovCert> check_weak_lyapunov(const StochasticKernel& S, const WeightFunction& V,
                                                  const ScalarFunction& phi, const std::vector<double>& sigma_grid,
                                                  std::optional<double> A = std::nullopt);

/// Exact measure-level coupling constant for S^N over the cone
/// {ν zero-mean, ‖ν‖_W ≤ A‖ν‖}: maximum of ‖S^Nν‖/‖ν‖ over the extreme
/// points (scaled pairs with W(x)+W(y) ≤ 2A, and boundary 3-point measures).
CheckResult<CouplingCert> check_local_coupling(const StochasticKernel& S, const WeightFunction& W, double A,
                                               std::size_t N);

/// Harris-to-coupling transfer: γ_H = 1 − α(1 − 2A/R), for 0 < A < R/2.
CouplingCert harris_to_coupling(const HarrisCert& cert, double A, std::size_t N = 1);

struct ComposeBoundReport {
    bool pass = false;
    double worst_margin = 0.0;  // min over states of RHS − LHS (≥ −tol passes)
    int worst_state = -1;
};

/// Pointwise check of P ψ(V) ≤ ψ(V) − ς·ψ′(V)·φ(V) + K·ψ′(V) over states.
ComposeBoundReport concave_compose_bound(const StochasticKernel& S, const WeightFunction& V, const ScalarFunction& phi,
                                         const ScalarFunction& psi, double sigma_bar, double K, double tol = 1e-10);

}  // namespace harris
