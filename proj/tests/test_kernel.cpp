#include "harris/kernel.hpp"
#include "harris/util.hpp"

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

using namespace harris;

namespace {

StochasticKernel two_state() {
    Matrix m(2, 2);
    m << 0.7, 0.3, 0.4, 0.6;
    return StochasticKernel(m);
}

StochasticKernel random_kernel(Rng& rng, std::size_t n) {
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) m.row(static_cast<Eigen::Index>(i)) = rng.next_probability(n).transpose();
    return StochasticKernel(m);
}

GeneratorMatrix random_generator(Rng& rng, std::size_t n, double scale) {
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = scale * rng.next_open01();
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 0.0;
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = -m.row(static_cast<Eigen::Index>(i)).sum();
    }
    return GeneratorMatrix(m);
}

}  // namespace

TEST_CASE("kernel construction rejects degenerate rows") {
    Matrix bad(2, 2);
    bad << 0.5, 0.4, 0.5, 0.5;  // first row sums to 0.9
    CHECK_THROWS_AS(StochasticKernel{bad}, std::invalid_argument);
    Matrix neg(2, 2);
    neg << 1.2, -0.2, 0.5, 0.5;
    CHECK_THROWS_AS(StochasticKernel{neg}, std::invalid_argument);
}

TEST_CASE("apply: identity, hand product, rank-one annihilation") {
    Rng rng(7);
    SignedMeasure mu(rng.next_zero_mean(3));
    auto id = StochasticKernel::identity(3);
    CHECK(id.apply(mu).values().isApprox(mu.values()));

    SignedMeasure nu(SignedMeasure::dirac(2, 0).values() - SignedMeasure::dirac(2, 1).values());
    SignedMeasure out = two_state().apply(nu);
    CHECK(out.values()[0] == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(out.values()[1] == doctest::Approx(-0.3).epsilon(1e-14));

    Vector row(3);
    row << 0.2, 0.3, 0.5;
    auto uni = StochasticKernel::uniform_rows(row);
    SignedMeasure z = uni.apply(SignedMeasure(rng.next_zero_mean(3)));
    CHECK(total_variation(z) < 1e-14);
}

TEST_CASE("dual_apply preserves constants and matches the hand product") {
    Matrix m(3, 3);
    m << 0.8, 0.2, 0.0, 0.6, 0.2, 0.2, 0.0, 0.6, 0.4;
    StochasticKernel K(m);
    Vector V(3);
    V << 1, 2, 4;
    Vector PV = K.dual_apply(V);
    CHECK(PV[0] == doctest::Approx(1.2));
    CHECK(PV[1] == doctest::Approx(1.8));
    CHECK(PV[2] == doctest::Approx(2.8));
    Vector c = Vector::Constant(3, 3.25);
    CHECK(K.dual_apply(c).isApprox(c));
    CHECK(StochasticKernel::identity(3).dual_apply(V).isApprox(V));
}

TEST_CASE("power_apply consistency and annihilation") {
    Rng rng(11);
    SignedMeasure mu(rng.next_zero_mean(4));
    auto K = random_kernel(rng, 4);
    CHECK(K.power_apply(0, mu).values() == mu.values());
    CHECK(K.power_apply(1, mu).values().isApprox(K.apply(mu).values()));
    Vector row(4);
    row << 0.25, 0.25, 0.25, 0.25;
    auto uni = StochasticKernel::uniform_rows(row);
    CHECK(total_variation(uni.power_apply(3, mu)) < 1e-14);
}

TEST_CASE("non-expansiveness and duality on random pairs") {
    Rng rng(123);
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t n = 2 + rng.next_index(6);
        auto K = random_kernel(rng, n);
        SignedMeasure nu(rng.next_zero_mean(n));
        CHECK(total_variation(K.apply(nu)) <= total_variation(nu) + 1e-12);
        // mass preservation
        CHECK(K.apply(nu).mass() == doctest::Approx(nu.mass()).epsilon(1e-12));
    }
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 2 + rng.next_index(6);
        auto K = random_kernel(rng, n);
        SignedMeasure mu(rng.next_zero_mean(n));
        Vector fv(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) fv[static_cast<Eigen::Index>(i)] = rng.next_uniform(-2.0, 2.0);
        double lhs = mu.values().dot(K.dual_apply(fv));
        double rhs = K.apply(mu).values().dot(fv);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("Jensen property for a concave map of the weight") {
    Rng rng(5);
    auto psi = [](double v) { return std::sqrt(v); };
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = 2 + rng.next_index(8);
        auto K = random_kernel(rng, n);
        Vector V(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) V[static_cast<Eigen::Index>(i)] = 1.0 + 20.0 * rng.next_open01();
        Vector psiV(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) psiV[static_cast<Eigen::Index>(i)] = psi(V[static_cast<Eigen::Index>(i)]);
        Vector lhs = K.dual_apply(psiV);
        Vector PV = K.dual_apply(V);
        for (Eigen::Index x = 0; x < lhs.size(); ++x) CHECK(lhs[x] <= psi(PV[x]) + 1e-12);
    }
}

TEST_CASE("stationary distribution: rank-one, 2-state, identity") {
    Vector row(3);
    row << 0.2, 0.3, 0.5;
    auto uni = StochasticKernel::uniform_rows(row);
    auto r1 = stationary_distribution(uni, 1e-12);
    CHECK(r1.unique);
    CHECK(r1.pi.values().isApprox(row, 1e-10));

    auto r2 = stationary_distribution(two_state(), 1e-12);
    CHECK(r2.unique);
    CHECK(r2.pi.values()[0] == doctest::Approx(4.0 / 7.0).epsilon(1e-9));
    CHECK(r2.pi.values()[1] == doctest::Approx(3.0 / 7.0).epsilon(1e-9));

    auto r3 = stationary_distribution(StochasticKernel::identity(3), 1e-12);
    CHECK_FALSE(r3.unique);
    CHECK(r3.fixed_point_dim == 3);
}

TEST_CASE("stationary distribution handles the period-2 chain") {
    Matrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    auto r = stationary_distribution(StochasticKernel(m), 1e-12);
    CHECK(r.unique);
    CHECK(r.pi.values()[0] == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("semigroup_at: identity at zero, symmetric 2-state closed form") {
    Matrix L(2, 2);
    L << -1.0, 1.0, 1.0, -1.0;
    GeneratorMatrix gen(L);
    CHECK(semigroup_at(gen, 0.0).matrix().isApprox(Matrix::Identity(2, 2)));

    auto S1 = semigroup_at(gen, 1.0);
    double diag = (1.0 + std::exp(-2.0)) / 2.0;
    double off = (1.0 - std::exp(-2.0)) / 2.0;
    CHECK(S1.matrix()(0, 0) == doctest::Approx(diag).epsilon(1e-12));
    CHECK(S1.matrix()(0, 1) == doctest::Approx(off).epsilon(1e-12));

    auto Sbig = semigroup_at(gen, 60.0);
    CHECK(Sbig.matrix()(0, 0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(Sbig.matrix()(1, 0) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("semigroup property and row stochasticity") {
    Rng rng(99);
    auto gen = random_generator(rng, 6, 0.8);
    auto S_s = semigroup_at(gen, 0.7);
    auto S_t = semigroup_at(gen, 1.9);
    auto S_st = semigroup_at(gen, 2.6);
    Matrix prod = S_s.matrix() * S_t.matrix();
    CHECK((S_st.matrix() - prod).cwiseAbs().maxCoeff() <= 1e-8);
    for (Eigen::Index i = 0; i < 6; ++i) CHECK(std::abs(S_st.matrix().row(i).sum() - 1.0) <= 1e-10);
}

TEST_CASE("uniformization agrees with the scaled-squaring exponential oracle") {
    Rng rng(2024);
    for (std::size_t n : {3ull, 10ull, 50ull}) {
        auto gen = random_generator(rng, n, 1.5);
        for (double t : {0.2, 1.0, 7.0}) {
            Matrix oracle = (t * gen.matrix()).exp();
            Matrix ours = semigroup_at(gen, t).matrix();
            CHECK((oracle - ours).cwiseAbs().maxCoeff() <= 1e-8);
        }
    }
}
