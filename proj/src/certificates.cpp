#include "harris/certificates.hpp"

#include "harris/util.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace harris {

std::string kernel_hash(const StochasticKernel& S) {
    ContentHasher h;
    h.add(S.matrix());
    return h.hex();
}

std::string kernel_weight_hash(const StochasticKernel& S, const WeightFunction& V) {
    ContentHasher h;
    h.add(S.matrix()).add(V.values());
    return h.hex();
}

CheckResult<DoeblinCert> check_doeblin(const StochasticKernel& S) {
    const Matrix& M = S.matrix();
    Vector colmin = M.colwise().minCoeff();
    double alpha = colmin.sum();
    CheckResult<DoeblinCert> out;
    if (alpha <= 0.0) {
        out.failure = "no common minorization mass: every column has a zero row";
        Eigen::Index col = 0;
        colmin.minCoeff(&col);
        Eigen::Index row = 0;
        M.col(col).minCoeff(&row);
        out.witness_state = static_cast<int>(row);
        out.witness_state2 = static_cast<int>(col);
        return out;
    }
    DoeblinCert cert;
    cert.alpha = alpha;
    cert.eta = colmin / alpha;
    cert.input_hash = kernel_hash(S);
    out.cert = std::move(cert);
    return out;
}

CheckResult<HarrisCert> check_harris(const StochasticKernel& S, const WeightFunction& V, double R) {
    CheckResult<HarrisCert> out;
    if (V.size() != S.size()) throw std::invalid_argument("check_harris: dimension mismatch");
    std::vector<std::size_t> C;
    for (std::size_t x = 0; x < V.size(); ++x)
        if (V[x] <= R) C.push_back(x);
    if (C.empty()) {
        out.failure = "sublevel set {V <= R} is empty";
        return out;
    }
    const Matrix& M = S.matrix();
    Vector colmin = Vector::Constant(M.cols(), std::numeric_limits<double>::infinity());
    for (std::size_t x : C) colmin = colmin.cwiseMin(M.row(static_cast<Eigen::Index>(x)).transpose());
    double alpha = colmin.sum();
    if (alpha <= 0.0) {
        out.failure = "rows over C share no common mass (alpha = 0)";
        Eigen::Index col = 0;
        colmin.minCoeff(&col);
        out.witness_state2 = static_cast<int>(col);
        return out;
    }
    HarrisCert cert;
    cert.alpha = alpha;
    cert.eta = colmin / alpha;
    cert.set_C = std::move(C);
    cert.R = R;
    cert.input_hash = kernel_weight_hash(S, V);
    out.cert = std::move(cert);
    return out;
}

std::vector<double> default_K_grid(const StochasticKernel& S, const WeightFunction& V) {
    Vector PV = S.dual_apply(V.values());
    std::vector<double> sorted(PV.data(), PV.data() + PV.size());
    std::sort(sorted.begin(), sorted.end());
    auto quantile = [&sorted](double q) {
        double idx = q * static_cast<double>(sorted.size() - 1);
        std::size_t lo = static_cast<std::size_t>(idx);
        std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        double t = idx - static_cast<double>(lo);
        return (1.0 - t) * sorted[lo] + t * sorted[hi];
    };
    return {quantile(0.5), quantile(0.75), quantile(0.9), quantile(0.95), quantile(1.0)};
}

CheckResult<LyapunovCert> check_lyapunov(const StochasticKernel& S, const WeightFunction& V,
                                         const std::vector<double>& K_grid,
                                         const std::function<double(double, double)>& objective) {
    CheckResult<LyapunovCert> out;
    if (K_grid.empty()) throw std::invalid_argument("check_lyapunov: empty K grid");
    for (double K : K_grid)
        if (K < 0.0) throw std::invalid_argument("check_lyapunov: K must be >= 0");
    Vector PV = S.dual_apply(V.values());

    double best_obj = std::numeric_limits<double>::infinity();
    std::optional<LyapunovCert> best;
    int worst_state = -1;
    double worst_gamma = std::numeric_limits<double>::infinity();
    for (double K : K_grid) {
        double gamma = 0.0;
        int argmax = 0;
        for (Eigen::Index x = 0; x < PV.size(); ++x) {
            double ratio = (PV[x] - K) / V[static_cast<std::size_t>(x)];
            if (ratio > gamma) {
                gamma = ratio;
                argmax = static_cast<int>(x);
            }
        }
        if (gamma < worst_gamma) {
            worst_gamma = gamma;
            worst_state = argmax;
        }
        if (gamma >= 1.0) continue;
        double obj = objective ? objective(gamma, K) : gamma;
        if (obj < best_obj) {
            best_obj = obj;
            LyapunovCert cert;
            cert.gamma_L = gamma;
            cert.K = K;
            cert.input_hash = kernel_weight_hash(S, V);
            best = std::move(cert);
        }
    }
    if (!best) {
        out.failure = "gamma_L >= 1 for every K in the grid";
        out.witness_state = worst_state;
        out.witness_value = worst_gamma;
        return out;
    }
    out.cert = std::move(best);
    return out;
}

double weak_lyapunov_K(const Vector& PV, const Vector& V, const Vector& phiV, double sigma) {
    double K = -std::numeric_limits<double>::infinity();
    for (Eigen::Index x = 0; x < PV.size(); ++x) K = std::max(K, PV[x] + sigma * phiV[x] - V[x]);
    return std::max(K, 1e-12);  // Hypothesis asks K > 0
}

CheckResult<WeakLyapunovCert> check_weak_lyapunov(const StochasticKernel& S, const WeightFunction& V,
                                                  const ScalarFunction& phi, const std::vector<double>& sigma_grid,
                                                  std::optional<double> A) {
    CheckResult<WeakLyapunovCert> out;
    if (sigma_grid.empty()) throw std::invalid_argument("check_weak_lyapunov: empty sigma grid");
    for (double s : sigma_grid)
        if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("check_weak_lyapunov: sigma must lie in (0,1)");

    double vmax = 1.0;
    for (std::size_t x = 0; x < V.size(); ++x) vmax = std::max(vmax, V[x]);
    Rng rng(0x9e3779b9u);
    PhiRoleReport role = check_phi_role(phi, vmax * 2.0, rng);
    if (!role.ok) {
        out.failure = "phi rejected: " + role.reason;
        return out;
    }

    Vector PV = S.dual_apply(V.values());
    Vector phiV(V.values().size());
    for (Eigen::Index x = 0; x < phiV.size(); ++x) phiV[x] = phi(V[static_cast<std::size_t>(x)]);

    double best_obj = -std::numeric_limits<double>::infinity();
    std::optional<WeakLyapunovCert> best;
    for (double s : sigma_grid) {
        double K = weak_lyapunov_K(PV, V.values(), phiV, s);
        double obj = A ? (s - K / *A) : (s / K);
        if (A && !(s - K / *A > 0.0)) continue;  // unusable: alpha would vanish
        if (obj > best_obj) {
            best_obj = obj;
            WeakLyapunovCert cert;
            cert.sigma_bar = s;
            cert.K = K;
            cert.phi = phi;
            cert.input_hash = kernel_weight_hash(S, V);
            best = std::move(cert);
        }
    }
    if (!best) {
        out.failure = A ? "no sigma in the grid satisfies sigma - K(sigma)/A > 0"
                        : "no usable (sigma, K) pair on the grid";
        return out;
    }
    out.cert = std::move(best);
    return out;
}

CheckResult<CouplingCert> check_local_coupling(const StochasticKernel& S, const WeightFunction& W, double A,
                                               std::size_t N) {
    CheckResult<CouplingCert> out;
    if (!(A > 0.0)) throw std::invalid_argument("check_local_coupling: A must be > 0");
    if (N < 1) throw std::invalid_argument("check_local_coupling: N must be >= 1");
    if (W.size() != S.size()) throw std::invalid_argument("check_local_coupling: dimension mismatch");

    const std::size_t n = S.size();
    const Matrix rows = S.power(N).matrix();  // row x = S^N delta_x

    auto tv_of = [](const Vector& v) { return v.cwiseAbs().sum(); };

    double best = 0.0;
    double best_pairwise_at_A = 0.0;
    int wx = -1, wy = -1;
    bool any = false;

    // scaled pairs: the measure condition ||nu||_W <= A||nu|| admits
    // delta-pair differences with W(x)+W(y) <= 2A
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = x + 1; y < n; ++y) {
            double wsum = W[x] + W[y];
            if (wsum <= 2.0 * A + 1e-12) {
                any = true;
                double r = 0.5 * tv_of(rows.row(static_cast<Eigen::Index>(x)) - rows.row(static_cast<Eigen::Index>(y)));
                if (wsum <= A + 1e-12) best_pairwise_at_A = std::max(best_pairwise_at_A, r);
                if (r > best) {
                    best = r;
                    wx = static_cast<int>(x);
                    wy = static_cast<int>(y);
                }
            }
        }
    }
    // boundary 3-point extreme measures nu = dx - b dy - c dz with b+c = 1 and
    // the W-constraint active: W(x) + bW(y) + cW(z) = 2A
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            if (y == x) continue;
            for (std::size_t z = y + 1; z < n; ++z) {
                if (z == x || std::abs(W[z] - W[y]) < 1e-14) continue;
                double c = (2.0 * A - W[x] - W[y]) / (W[z] - W[y]);
                if (c <= 1e-12 || c >= 1.0 - 1e-12) continue;
                any = true;
                Vector img = rows.row(static_cast<Eigen::Index>(x)) - (1.0 - c) * rows.row(static_cast<Eigen::Index>(y)) -
                             c * rows.row(static_cast<Eigen::Index>(z));
                double r = 0.5 * tv_of(img);
                if (r > best) {
                    best = r;
                    wx = static_cast<int>(x);
                    wy = static_cast<int>(y);
                }
            }
        }
    }

    if (!any) {
        // only diagonal pairs (the zero measure) fit the budget
        out.failure = "vacuous: no qualifying pair under the weight budget";
        out.witness_value = 0.0;
        return out;
    }
    if (best >= 1.0 - 1e-12) {
        out.failure = "no contraction: gamma_H >= 1";
        out.witness_state = wx;
        out.witness_state2 = wy;
        out.witness_value = best;
        return out;
    }
    CouplingCert cert;
    cert.A = A;
    cert.gamma_H = best;
    cert.gamma_H_pairwise = best_pairwise_at_A;
    cert.N = N;
    cert.input_hash = kernel_hash(S);
    out.cert = std::move(cert);
    return out;
}

CouplingCert harris_to_coupling(const HarrisCert& cert, double A, std::size_t N) {
    if (!(A > 0.0 && A < cert.R / 2.0))
        throw std::invalid_argument("harris_to_coupling: requires 0 < A < R/2 (gamma_H would reach 1)");
    CouplingCert out;
    out.A = A;
    out.gamma_H = 1.0 - cert.alpha * (1.0 - 2.0 * A / cert.R);
    out.gamma_H_pairwise = out.gamma_H;
    out.N = N;
    out.input_hash = cert.input_hash;
    return out;
}

ComposeBoundReport concave_compose_bound(const StochasticKernel& S, const WeightFunction& V, const ScalarFunction& phi,
                                         const ScalarFunction& psi, double sigma_bar, double K, double tol) {
    ComposeBoundReport rep;
    const std::size_t n = V.size();
    Vector psiV(static_cast<Eigen::Index>(n));
    for (std::size_t x = 0; x < n; ++x) psiV[static_cast<Eigen::Index>(x)] = psi(V[x]);
    Vector PpsiV = S.dual_apply(psiV);
    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < n; ++x) {
        double dpsi = psi.derivative(V[x]);
        double rhs = psi(V[x]) - sigma_bar * dpsi * phi(V[x]) + K * dpsi;
        double margin = rhs - PpsiV[static_cast<Eigen::Index>(x)];
        if (margin < rep.worst_margin) {
            rep.worst_margin = margin;
            rep.worst_state = static_cast<int>(x);
        }
    }
    rep.pass = rep.worst_margin >= -tol;
    return rep;
}

}  // namespace harris
