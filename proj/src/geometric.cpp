#include "harris/geometric.hpp"

#include <cmath>
#include <stdexcept>

namespace harris {

double GeometricEnvelope::value_at(double u) const {
    return continuous ? C * std::exp(-rate * u) : C * std::pow(rate, u);
}

GeometricEnvelope doeblin_rate(const DoeblinCert& cert) {
    GeometricEnvelope env;
    env.C = 1.0;
    env.rate = 1.0 - cert.alpha;
    env.continuous = false;
    env.norm = "TV";
    return env;
}

namespace {

double gamma_of_beta(double beta, double gamma_H, double K, double b) {
    return std::max(gamma_H + beta * K, 1.0 - beta / (1.0 + beta) * b);
}

// golden-section over log beta in (0, 1e3]; gamma(beta) is unimodal
BetaChoice minimize_gamma(double gamma_H, double K, double b) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = std::log(1e-12), hi = std::log(1e3);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = gamma_of_beta(std::exp(x1), gamma_H, K, b);
    double f2 = gamma_of_beta(std::exp(x2), gamma_H, K, b);
    for (int it = 0; it < 300; ++it) {
        if (f1 > f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = gamma_of_beta(std::exp(x2), gamma_H, K, b);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = gamma_of_beta(std::exp(x1), gamma_H, K, b);
        }
    }
    BetaChoice out;
    out.beta = std::exp(0.5 * (lo + hi));
    out.gamma = gamma_of_beta(out.beta, gamma_H, K, b);
    out.equalized = false;
    return out;
}

}  // namespace

BetaChoice harris_beta_optimal(double gamma_H, double gamma_L, double K, double A) {
    // gamma_H = 0 (one-step perfect coupling) is a legitimate degenerate case
    if (!(gamma_H >= 0.0 && gamma_H < 1.0) || !(gamma_L >= 0.0 && gamma_L < 1.0))
        throw std::invalid_argument("harris_beta_optimal: gamma_H, gamma_L must lie in [0,1)");
    if (K < 0.0 || !(A > 0.0)) throw std::invalid_argument("harris_beta_optimal: K >= 0 and A > 0 required");
    const double a = 1.0 - gamma_H;
    const double b = 1.0 - gamma_L - K / A;
    if (!(b > 0.0)) throw std::invalid_argument("harris_beta_optimal: requires 1 - gamma_L > K/A");

    if (K > 0.0) {
        double p = K + b - a;
        double beta = (-p + std::sqrt(p * p + 4.0 * K * a)) / (2.0 * K);
        double g1 = gamma_H + beta * K;
        double g2 = 1.0 - beta / (1.0 + beta) * b;
        if (beta > 0.0 && g1 > 0.0 && g1 < 1.0 && g2 > 0.0 && g2 < 1.0) {
            BetaChoice out;
            out.beta = beta;
            out.gamma = std::max(g1, g2);
            out.equalized = true;
            return out;
        }
    }
    return minimize_gamma(gamma_H, K, b);
}

CheckResult<HarrisRate> harris_rate(const LyapunovCert& lyap, const CouplingCert& coup) {
    CheckResult<HarrisRate> out;
    if (coup.N != 1) {
        out.failure = "coupling power N must be 1 (compose powers in the caller)";
        return out;
    }
    if (coup.vacuous) {
        out.failure = "coupling certificate is vacuous";
        return out;
    }
    double b = 1.0 - lyap.gamma_L - lyap.K / coup.A;
    if (!(b > 0.0)) {
        out.failure = "hypothesis K/A < 1 - gamma_L fails";
        out.witness_value = b;
        return out;
    }
    if (!(coup.gamma_H < 1.0)) {
        out.failure = "gamma_H >= 1: no local contraction";
        return out;
    }
    BetaChoice bc = harris_beta_optimal(coup.gamma_H, lyap.gamma_L, lyap.K, coup.A);
    if (!(bc.gamma > 0.0 && bc.gamma < 1.0)) {
        out.failure = "no beta yields gamma in (0,1)";
        out.witness_value = bc.gamma;
        return out;
    }
    HarrisRate hr;
    hr.beta = bc.beta;
    hr.gamma = bc.gamma;
    hr.equalized = bc.equalized;
    hr.envelope.C = (1.0 + bc.beta) / bc.beta;
    hr.envelope.rate = bc.gamma;
    hr.envelope.continuous = false;
    hr.envelope.norm = "V";
    out.cert = hr;
    return out;
}

CheckResult<LyapunovCert> check_lyapunov_for_harris(const StochasticKernel& S, const WeightFunction& V,
                                                    const std::vector<double>& K_grid, const CouplingCert& coup) {
    auto objective = [&coup](double gamma_L, double K) {
        double b = 1.0 - gamma_L - K / coup.A;
        if (!(b > 0.0) || !(coup.gamma_H < 1.0)) return 2.0;  // unusable, worse than any real gamma
        return harris_beta_optimal(coup.gamma_H, gamma_L, K, coup.A).gamma;
    };
    return check_lyapunov(S, V, K_grid, objective);
}

double coupling_matrix_rate(double gamma_L, double K, double gamma_H, double A) {
    // eigenvalues of [[gamma_L, K], [(1-gamma_H)/A, gamma_H]]
    double c = (1.0 - gamma_H) / A;
    double tr = gamma_L + gamma_H;
    double det = gamma_L * gamma_H - K * c;
    double disc = 0.25 * tr * tr - det;
    if (disc >= 0.0) {
        double s = std::sqrt(disc);
        return std::max(std::abs(0.5 * tr + s), std::abs(0.5 * tr - s));
    }
    return std::sqrt(det);  // complex pair: |λ|² = det
}

GeometricEnvelope semigroup_doeblin_rate(double alpha, double T) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("semigroup_doeblin_rate: alpha must lie in (0,1)");
    if (!(T > 0.0)) throw std::invalid_argument("semigroup_doeblin_rate: T must be > 0");
    GeometricEnvelope env;
    env.C = 1.0 / (1.0 - alpha);
    env.rate = -std::log(1.0 - alpha) / T;
    env.continuous = true;
    env.norm = "TV";
    return env;
}

GeometricEnvelope semigroup_harris_rate(const GeometricEnvelope& at_T, const SemigroupGrowth& growth, double beta,
                                        double T) {
    if (at_T.continuous || !(at_T.rate > 0.0 && at_T.rate < 1.0))
        throw std::invalid_argument("semigroup_harris_rate: need a discrete envelope with gamma in (0,1)");
    if (!(T > 0.0) || !(beta > 0.0)) throw std::invalid_argument("semigroup_harris_rate: T and beta must be > 0");
    GeometricEnvelope env;
    env.C = growth.C_V * std::exp(growth.omega_V * T) * (1.0 + beta) / (at_T.rate * beta);
    env.rate = -std::log(at_T.rate) / T;
    env.continuous = true;
    env.norm = "V";
    return env;
}

}  // namespace harris
