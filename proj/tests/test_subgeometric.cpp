#include "harris/fixtures.hpp"
#include "harris/subgeometric.hpp"
#include "harris/util.hpp"

#include <doctest.h>

#include <cmath>

using namespace harris;

namespace {

std::vector<double> geomspace(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * static_cast<double>(i) / static_cast<double>(n - 1));
    return g;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("psi builder: closed form below the threshold") {
    auto phi = ScalarFunction::power(0.5);
    auto psi = psi_builder_polynomial(phi, 10.0, 0.1);
    REQUIRE(psi);
    // below phi(v) = 2R = 20 i.e. u < 400: psi(u) = 1 + (u^0.95 - 1)/0.95
    for (double u : {1.0, 2.0, 50.0, 399.0}) {
        double expected = 1.0 + (std::pow(u, 0.95) - 1.0) / 0.95;
        CHECK((*psi.cert)(u) == doctest::Approx(expected).epsilon(1e-8));
    }
    CHECK((*psi.cert)(1.0) == doctest::Approx(1.0));
    CHECK(psi.cert->derivative(1.0) == doctest::Approx(1.0));
    // past the threshold the slope is m/phi = (2R)^{0.9}/sqrt(u)
    double d = psi.cert->derivative(1e4);
    CHECK(d == doctest::Approx(std::pow(20.0, 0.9) / 100.0).epsilon(1e-10));

    // threshold below phi(1) forces m(1) < 1 and is rejected
    auto bad = psi_builder_polynomial(phi, 0.3, 0.1);
    CHECK_FALSE(bad);
}

TEST_CASE("feller pipeline: shapes and monotonicity for the half-power weight") {
    // R = 0.5 puts the threshold at phi = 1: m == 1 and psi(u) = 2 sqrt(u) - 1
    auto phi = ScalarFunction::power(0.5);
    auto psi = psi_builder_polynomial(phi, 0.5, 0.1);
    REQUIRE(psi);
    CHECK((*psi.cert)(9.0) == doctest::Approx(5.0).epsilon(1e-10));

    auto t_grid = geomspace(1.0, 1e5, 40);
    t_grid.insert(t_grid.begin(), 0.0);
    auto pipe = feller_pipeline(phi, *psi.cert, 0.5, t_grid, 1e8, 1e-10);
    REQUIRE(pipe);

    // f = (2 sqrt(v) - 1)/v strictly decreasing, f(1) = 1
    CHECK(pipe->f(1.0) == doctest::Approx(1.0));
    double prev = 2.0;
    for (double v : {1.0, 2.0, 8.0, 100.0, 1e4}) {
        double fv = pipe->f(v);
        CHECK(fv < prev);
        prev = fv;
    }
    // h(z) = z^2/(1 + sqrt(1-z))^2 up to tabulation
    for (double z : {0.9, 0.5, 0.2, 0.05}) {
        double expected = z * z / std::pow(1.0 + std::sqrt(1.0 - z), 2.0);
        CHECK(pipe->h(z) == doctest::Approx(expected).epsilon(2e-2));
        CHECK(pipe->h(z) > 0.0);
    }
    // theta strictly decreasing with theta(0) = 1
    CHECK(pipe->theta_psi.log_theta.front() == doctest::Approx(0.0));
    for (std::size_t i = 1; i < pipe->theta_psi.log_theta.size(); ++i)
        CHECK(pipe->theta_psi.log_theta[i] < pipe->theta_psi.log_theta[i - 1]);

    // inversion round trip on the tabulation grid
    for (std::size_t i = 1; i < pipe->theta_psi.t_grid.size(); ++i) {
        double t = pipe->theta_psi.t_grid[i];
        double th = std::exp(pipe->theta_psi.log_theta[i]);
        CHECK(pipe->inverter->F(th) == doctest::Approx(t).epsilon(1e-8));
    }

    // asymptotic log-log slope over the tabulated horizon approaches 1 - 1/alpha = -1
    std::vector<double> xs, ys;
    for (double t : geomspace(1e3, 1e5, 30)) {
        xs.push_back(std::log(t));
        ys.push_back(pipe->inverter->log_theta(t));
    }
    double slope = ls_slope(xs, ys);
    CHECK(std::abs(slope - (-1.0)) <= 0.03);

    // psi = v (identity) violates strict concavity and is rejected
    auto rejected = feller_pipeline(phi, ScalarFunction::identity(), 0.5, {0.0, 1.0});
    CHECK_FALSE(rejected);
}

TEST_CASE("feller pipeline: stretched-exponential shape for the log-power weight") {
    auto phi = ScalarFunction::log_power(1.0);
    // normalized psi = 1 + (u^{1/2} - 1)/(1/2) = 2 sqrt(u) - 1
    auto psi = ScalarFunction::from_callable(
        "normalized-power", [](double u) { return 1.0 + (std::sqrt(u) - 1.0) * 2.0; }, 1.0,
        std::numeric_limits<double>::infinity(), ShapeTag::Concave,
        [](double u) { return 1.0 / std::sqrt(u); });
    auto pipe = feller_pipeline(phi, psi, 1.0, {0.0, 1.0}, 1e8, 1e-130);
    REQUIRE(pipe);
    std::vector<double> xs, ys;
    for (double t : geomspace(3e3, 6e4, 30)) {
        xs.push_back(std::log(t));
        ys.push_back(std::log(-pipe->inverter->log_theta(t)));
    }
    double expo = ls_slope(xs, ys);
    CHECK(std::abs(expo - 0.5) <= 0.03 * 0.5);
}

TEST_CASE("interpolated subgeometric assembly on the reflected walk") {
    Fixture walk = fixture_reflected_walk();
    const StochasticKernel& S = walk.kernel;
    const std::size_t n = S.size();
    const WeightFunction& V2 = walk.V;
    auto phi2 = *walk.phi;

    auto psi = psi_builder_polynomial(phi2, *walk.builder_R, walk.builder_eps);
    REQUIRE(psi);
    auto pipe = feller_pipeline(phi2, *psi.cert, *walk.builder_R, {0.0, 1.0}, 4.0 * V2.values().maxCoeff());
    REQUIRE(pipe);

    Vector v1(static_cast<Eigen::Index>(n)), w1(static_cast<Eigen::Index>(n)), w2(static_cast<Eigen::Index>(n));
    for (std::size_t x = 0; x < n; ++x) {
        v1[static_cast<Eigen::Index>(x)] = (*psi.cert)(V2[x]);
        w1[static_cast<Eigen::Index>(x)] = pipe->phi1(v1[static_cast<Eigen::Index>(x)]);
        w2[static_cast<Eigen::Index>(x)] = phi2(V2[x]);
    }
    WeightFunction V1(v1);

    auto coup1 = check_local_coupling(S, WeightFunction(w1), *walk.coupling_A, walk.coupling_N);
    auto coup2 = check_local_coupling(S, WeightFunction(w2), *walk.coupling_A, walk.coupling_N);
    REQUIRE(coup1);
    REQUIRE(coup2);
    CHECK(coup2->gamma_H == doctest::Approx(0.691406).epsilon(1e-4));
    CHECK(coup1->gamma_H < 1.0);

    auto wl1 = check_weak_lyapunov(S, V1, pipe->phi1, walk.sigma_grid, walk.coupling_A);
    auto wl2 = check_weak_lyapunov(S, V2, phi2, walk.sigma_grid, walk.coupling_A);
    REQUIRE(wl1);
    REQUIRE(wl2);
    // the exact hand constants for sigma = 1/2
    CHECK(wl2->sigma_bar == doctest::Approx(0.5));
    CHECK(wl2->K == doctest::Approx(1.25).epsilon(1e-12));

    auto sub = interpolated_subgeometric_rate(S, V1, V2, *wl1.cert, *wl2.cert, *coup1.cert, *coup2.cert, pipe->xi,
                                pipe->xi_lambda_max, 300);
    REQUIRE(sub);
    CHECK(sub->alpha > 0.0);
    CHECK(sub->kappa > 0.0);
    CHECK(sub->r == doctest::Approx(sub->kappa / 7.0));

    // envelope soundness for both norms over random zero-mean trajectories
    Rng rng(2025);
    for (int draw = 0; draw < 30; ++draw) {
        SignedMeasure nu(rng.next_zero_mean(n));
        double ref = weighted_norm(nu, V2);
        SignedMeasure cur = nu;
        for (std::size_t k = 0; k <= 300; ++k) {
            if (k > 0) cur = S.apply(cur);
            double u = static_cast<double>(k);
            CHECK(weighted_norm(cur, V1) <= sub->v1_envelope.bound_at(u) * ref);
            CHECK(total_variation(cur) <= sub->tv_envelope.bound_at(u) * ref);
        }
    }

    // a bogus interpolation function is rejected with a witness
    auto tiny = ScalarFunction::affine(0.0, 1e-9);
    auto rejected = interpolated_subgeometric_rate(S, V1, V2, *wl1.cert, *wl2.cert, *coup1.cert, *coup2.cert, tiny, 1.0, 10);
    CHECK_FALSE(rejected);
    CHECK(rejected.failure.find("interpolation") != std::string::npos);
    CHECK(rejected.witness_state >= 0);
}

TEST_CASE("h comparison rate: geometric limit and closed form") {
    // phi(u) = u: H = log u, rate e^{-t}
    auto lin = h_comparison_rate(ScalarFunction::identity(), {0.0, 0.5, 1.0, 3.0, 10.0});
    for (std::size_t i = 0; i < lin.t_grid.size(); ++i)
        CHECK(lin.log_theta[i] == doctest::Approx(-lin.t_grid[i]).epsilon(1e-8));

    // phi(u) = sqrt(u): rate (1 + t/2)^{-2} within 1e-6 relative on [1, 100]
    std::vector<double> ts = geomspace(1.0, 100.0, 40);
    auto sq = h_comparison_rate(ScalarFunction::power(0.5), ts);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        double expected = std::pow(1.0 + ts[i] / 2.0, -2.0);
        double got = std::exp(sq.log_theta[i]);
        CHECK(got == doctest::Approx(expected).epsilon(1e-6));
    }
}
