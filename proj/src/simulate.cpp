#include "harris/simulate.hpp"

#include <Eigen/LU>

#include <cmath>
#include <stdexcept>

namespace harris {

DecayTable simulate_decay(const StochasticKernel& S, const SignedMeasure& nu, std::size_t n_max,
                          const std::vector<NormSpec>& norms) {
    if (n_max < 1) throw std::invalid_argument("simulate_decay: n_max must be >= 1");
    DecayTable table;
    table.zero_mean_input = nu.is_zero_mean();
    table.times.resize(n_max + 1);
    for (std::size_t k = 0; k <= n_max; ++k) table.times[k] = static_cast<double>(k);
    table.columns.reserve(norms.size());
    table.values.assign(norms.size(), std::vector<double>(n_max + 1));
    for (const auto& spec : norms) table.columns.push_back(spec.tag);

    SignedMeasure cur = nu;
    for (std::size_t k = 0; k <= n_max; ++k) {
        if (k > 0) {
            cur = S.apply(cur);
            if (table.zero_mean_input) {
                // the exact operator preserves zero mass; the matvec rounding
                // injects a persistent mass component that would floor the
                // trajectory at ~1e-16, so project it back out
                Vector v = cur.values();
                v.array() -= v.sum() / static_cast<double>(v.size());
                cur = SignedMeasure(std::move(v));
            }
        }
        for (std::size_t c = 0; c < norms.size(); ++c) {
            table.values[c][k] = norms[c].weight ? weighted_norm(cur, *norms[c].weight) : total_variation(cur);
        }
    }
    return table;
}

EnvelopeValidation validate_envelope(const std::vector<double>& times, const std::vector<double>& measured,
                                     const std::function<double(double)>& envelope, double slack) {
    if (times.size() != measured.size()) throw std::invalid_argument("validate_envelope: size mismatch");
    EnvelopeValidation out;
    out.pass = true;
    for (std::size_t i = 0; i < times.size(); ++i) {
        double env = envelope(times[i]);
        double ratio = (env > 0.0) ? measured[i] / env : (measured[i] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        if (ratio > out.worst_ratio) {
            out.worst_ratio = ratio;
            out.arg_worst = times[i];
        }
    }
    out.pass = out.worst_ratio <= 1.0 + slack;
    return out;
}

ExistenceResult existence_check(const StochasticKernel& S, const WeightFunction& V, const WeakLyapunovCert& wl,
                                const CouplingCert& coup, const Vector& mu0, std::size_t n_max) {
    if (std::abs(mu0.sum() - 1.0) > 1e-9 || (mu0.array() < -1e-15).any())
        throw std::invalid_argument("existence_check: mu0 must be a probability vector");
    if (!(coup.A > wl.K / wl.sigma_bar))
        throw std::invalid_argument("existence_check: requires A > K/sigma");

    const double beta = (1.0 - coup.gamma_H) / (wl.K * static_cast<double>(coup.N));
    const double alpha = beta * (wl.sigma_bar - wl.K / coup.A);

    Vector phiV(static_cast<Eigen::Index>(V.size()));
    for (std::size_t x = 0; x < V.size(); ++x) phiV[static_cast<Eigen::Index>(x)] = wl.phi(V[x]);

    SignedMeasure mu(mu0);
    SignedMeasure smu = S.apply(mu);
    SignedMeasure nu0(smu.values() - mu.values());

    ExistenceResult out;
    out.budget = triple_norm(nu0, V, beta);

    SignedMeasure nu = nu0;
    double partial = 0.0;
    out.worst_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n_max; ++k) {
        double phin = (phiV.array() * nu.values().array().abs()).sum();
        partial += alpha * phin;
        out.worst_excess = std::max(out.worst_excess, partial - out.budget);
        if (partial > out.budget + 1e-9) out.budget_respected = false;
        nu = S.apply(nu);
        mu = S.apply(mu);
    }
    out.consumed = partial;
    out.mu_star = mu;
    return out;
}

UniquenessReport uniqueness_check(const StochasticKernel& S, double tol) {
    UniquenessReport rep;
    const Matrix& M = S.matrix();
    Eigen::FullPivLU<Matrix> lu(M.transpose() - Matrix::Identity(M.rows(), M.cols()));
    lu.setThreshold(1e-9);
    rep.multiplicity = static_cast<int>(M.rows() - lu.rank());
    rep.unique = rep.multiplicity == 1;
    if (rep.multiplicity > 1) {
        // exhibit two distinct invariant probability candidates from the kernel
        Matrix kern = lu.kernel();
        Vector a = kern.col(0), b = kern.col(kern.cols() - 1);
        auto to_prob = [](Vector v) {
            if (v.sum() < 0) v = -v;
            v = v.cwiseMax(0.0);
            double s = v.sum();
            return s > 0 ? Vector(v / s) : v;
        };
        Vector pa = to_prob(a), pb = to_prob(b);
        rep.second_residual = (pa - pb).cwiseAbs().sum();
        (void)tol;
    }
    return rep;
}

}  // namespace harris
