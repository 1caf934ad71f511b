#include "harris/scalar_function.hpp"
#include "harris/util.hpp"

#include <doctest.h>

#include <cmath>

using namespace harris;

TEST_CASE("closed forms evaluate and differentiate") {
    auto p = ScalarFunction::power(0.5);
    CHECK(p(4.0) == doctest::Approx(2.0));
    CHECK(p.derivative(4.0) == doctest::Approx(0.25));

    auto lp = ScalarFunction::log_power(1.0);
    CHECK(lp(1.0) == doctest::Approx(1.0));
    // v*(2/(2+log v)) at v = e^2: e^2 * 2/4
    CHECK(lp(std::exp(2.0)) == doctest::Approx(std::exp(2.0) * 0.5));

    auto aff = ScalarFunction::affine(1.0, 2.0);
    CHECK(aff(3.0) == doctest::Approx(7.0));
    CHECK(aff.derivative(100.0) == doctest::Approx(2.0));

    auto at = ScalarFunction::arctan_family(10.0);
    CHECK(at(1.0) == doctest::Approx(10.0 * std::atan(M_PI_2 + 0.1)));
    CHECK(at.derivative(1.0) < 1.0);
}

TEST_CASE("log-power family is concave with unit value at 1") {
    Rng rng(1);
    for (double a : {0.5, 1.0, 2.0}) {
        auto lp = ScalarFunction::log_power(a);
        CHECK(lp(1.0) == doctest::Approx(1.0));
        CHECK(check_concave(lp, 1.0, 1e6, rng));
        auto role = check_phi_role(lp, 1e6, rng);
        CHECK(role.ok);
    }
}

TEST_CASE("sampled functions interpolate and clamp") {
    auto s = ScalarFunction::sampled({1.0, 2.0, 4.0}, {1.0, 3.0, 4.0}, ShapeTag::Concave);
    CHECK(s(1.5) == doctest::Approx(2.0));
    CHECK(s(3.0) == doctest::Approx(3.5));
    CHECK(s(0.5) == doctest::Approx(1.0));  // clamped
    CHECK(s(9.0) == doctest::Approx(4.0));

    auto step = ScalarFunction::sampled_left_step({1.0, 2.0, 4.0}, {1.0, 3.0, 4.0}, ShapeTag::MonotoneOnly);
    CHECK(step(1.9) == doctest::Approx(1.0));
    CHECK(step(2.0) == doctest::Approx(3.0));
    CHECK(step(3.9) == doctest::Approx(3.0));
}

TEST_CASE("psi integral matches the closed form for m/phi = v^{-0.05}") {
    // phi = sqrt(v), m = phi^{0.9}: psi(u) = 1 + (u^{0.95} - 1)/0.95
    auto phi = ScalarFunction::power(0.5);
    auto m = ScalarFunction::power(0.45);
    auto psi = ScalarFunction::psi_integral(m, phi);
    for (double u : {1.0, 1.7, 5.0, 100.0, 4000.0}) {
        double expected = 1.0 + (std::pow(u, 0.95) - 1.0) / 0.95;
        CHECK(psi(u) == doctest::Approx(expected).epsilon(1e-9));
    }
    CHECK(psi(1.0) == doctest::Approx(1.0));
    CHECK(psi.derivative(1.0) == doctest::Approx(1.0));
}

TEST_CASE("monotone decreasing inverse") {
    auto f = ScalarFunction::from_callable("two-over-sqrt", [](double v) { return 2.0 / std::sqrt(v) - 1.0 / v; }, 1.0,
                                           std::numeric_limits<double>::infinity(), ShapeTag::MonotoneOnly);
    auto inv = ScalarFunction::monotone_decreasing_inverse(f);
    for (double z : {0.9, 0.5, 0.1, 1e-3}) {
        double v = inv(z);
        CHECK(f(v) == doctest::Approx(z).epsilon(1e-9));
    }
}

TEST_CASE("phi-role check rejects the identity and non-unit phi(1)") {
    Rng rng(3);
    CHECK_FALSE(check_phi_role(ScalarFunction::identity(), 1e4, rng).ok);
    CHECK_FALSE(check_phi_role(ScalarFunction::affine(1.0, 1.0), 1e4, rng).ok);  // phi(1) = 2
    CHECK(check_phi_role(ScalarFunction::power(0.5), 1e4, rng).ok);
    CHECK(check_phi_role(ScalarFunction::log_power(1.0), 1e4, rng).ok);
}

TEST_CASE("concavity check flags convex functions") {
    Rng rng(4);
    CHECK(check_concave(ScalarFunction::power(0.7), 1.0, 100.0, rng));
    CHECK_FALSE(check_concave(ScalarFunction::power(2.0), 1.0, 100.0, rng));
}
