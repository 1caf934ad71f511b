#include "harris/measure.hpp"
#include "harris/util.hpp"

#include <doctest.h>

using namespace harris;

namespace {
SignedMeasure make(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return SignedMeasure(v);
}
}  // namespace

TEST_CASE("hahn_jordan splits signs componentwise") {
    auto [plus, minus] = hahn_jordan(make({0.5, -0.2, 0.3}));
    CHECK(plus.values().isApprox(make({0.5, 0.0, 0.3}).values()));
    CHECK(minus.values().isApprox(make({0.0, 0.2, 0.0}).values()));

    auto [zp, zm] = hahn_jordan(SignedMeasure::zero(3));
    CHECK(total_variation(zp) == 0.0);
    CHECK(total_variation(zm) == 0.0);

    SignedMeasure nn = make({0.1, 0.0, 0.4});
    auto [p2, m2] = hahn_jordan(nn);
    CHECK(p2.values().isApprox(nn.values()));
    CHECK(total_variation(m2) == 0.0);
}

TEST_CASE("total variation basics") {
    CHECK(total_variation(make({0.5, -0.2, 0.3})) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(total_variation(make({0.25, 0.25, 0.5})) == doctest::Approx(1.0));
    SignedMeasure pair = SignedMeasure(SignedMeasure::dirac(4, 0).values() - SignedMeasure::dirac(4, 3).values());
    CHECK(total_variation(pair) == 2.0);
}

TEST_CASE("weighted norm evaluates sum V|mu| and dominates TV") {
    Vector w(3);
    w << 1, 2, 4;
    WeightFunction V(w);
    SignedMeasure mu = make({0.5, -0.2, 0.3});
    CHECK(weighted_norm(mu, V) == doctest::Approx(2.1).epsilon(1e-15));
    CHECK(weighted_norm(mu, WeightFunction::ones(3)) == doctest::Approx(total_variation(mu)));
    CHECK(weighted_norm(SignedMeasure::zero(3), V) == 0.0);
    CHECK_THROWS_AS(weighted_norm(mu, WeightFunction::ones(2)), std::invalid_argument);
}

TEST_CASE("triple norm") {
    Vector w(3);
    w << 1, 2, 4;
    WeightFunction V(w);
    SignedMeasure mu = make({0.5, -0.2, 0.3});
    CHECK(triple_norm(mu, V, 1.0) == doctest::Approx(3.1).epsilon(1e-15));
    CHECK(triple_norm(mu, V, 1e-12) == doctest::Approx(total_variation(mu)).epsilon(1e-10));
    CHECK(triple_norm(mu, V, 0.5) == doctest::Approx(1.0 + 0.5 * 2.1));
    CHECK_THROWS_AS(triple_norm(mu, V, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(triple_norm(mu, V, -1.0), std::invalid_argument);
}

TEST_CASE("measure invariants on random draws") {
    Rng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 2 + rng.next_index(8);
        SignedMeasure mu(rng.next_zero_mean(n));
        auto [plus, minus] = hahn_jordan(mu);
        // exact split of the total variation
        CHECK(total_variation(plus) + total_variation(minus) == total_variation(mu));
        // disjoint supports
        CHECK((plus.values().array() * minus.values().array()).abs().maxCoeff() == 0.0);

        Vector w(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) w[static_cast<Eigen::Index>(i)] = 1.0 + 10.0 * rng.next_open01();
        WeightFunction V(w);
        CHECK(weighted_norm(mu, V) >= total_variation(mu) - 1e-15);

        double beta = 0.01 + 2.0 * rng.next_open01();
        double tn = triple_norm(mu, V, beta);
        double wn = weighted_norm(mu, V);
        CHECK(tn >= std::min(1.0, beta) * wn - 1e-12);
        CHECK(tn <= (1.0 + beta) * wn + 1e-12);
    }
}

TEST_CASE("zero-mean predicate uses the fixed absolute tolerance") {
    CHECK(make({0.5, -0.5}).is_zero_mean());
    CHECK(make({0.5, -0.5 + 5e-13}).is_zero_mean());
    CHECK_FALSE(make({0.5, -0.5 + 5e-12}).is_zero_mean());
}

TEST_CASE("state space and weight validation") {
    CHECK_THROWS_AS(StateSpace(0), std::invalid_argument);
    CHECK_THROWS_AS(StateSpace(2, {"a", "a"}), std::invalid_argument);
    CHECK_THROWS_AS(StateSpace(2, {"a"}), std::invalid_argument);
    CHECK_NOTHROW(StateSpace(2, {"a", "b"}));
    Vector bad(2);
    bad << 1.0, 0.5;
    CHECK_THROWS_AS(WeightFunction{bad}, std::invalid_argument);
}
