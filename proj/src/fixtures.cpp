#include "harris/fixtures.hpp"

namespace harris {

Fixture fixture_two_state_doeblin() {
    Fixture f;
    f.name = "two_state_doeblin";
    Matrix m(2, 2);
    m << 0.7, 0.3, 0.4, 0.6;
    f.kernel = StochasticKernel(m);
    f.V = WeightFunction::ones(2);
    f.require = {"doeblin"};
    return f;
}

Fixture fixture_three_state_harris() {
    Fixture f;
    f.name = "three_state_harris";
    Matrix m(3, 3);
    m << 0.5, 0.5, 0.0, 0.25, 0.5, 0.25, 0.0, 0.5, 0.5;
    f.kernel = StochasticKernel(m);
    Vector v(3);
    v << 1.0, 2.0, 4.0;
    f.V = WeightFunction(v);
    f.harris_R = 2.0;
    f.coupling_A = 3.0;
    f.coupling_N = 1;
    f.lyapunov_K_grid = {0.8, 1.0, 1.5};
    f.require = {"doeblin", "harris", "lyapunov", "coupling", "harris_rate"};
    return f;
}

Fixture fixture_reflected_walk() {
    Fixture f;
    f.name = "reflected_walk_100";
    const std::size_t n = 100;
    Matrix m = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0) {
            m(0, 0) = 0.75;
            m(0, 1) = 0.25;
        } else if (i == n - 1) {
            m(i, i - 1) = 0.5;
            m(i, i) = 0.5;
        } else {
            m(i, i - 1) = 0.5;
            m(i, i) = 0.25;
            m(i, i + 1) = 0.25;
        }
    }
    f.kernel = StochasticKernel(m);
    Vector v(n);
    for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = (1.0 + static_cast<double>(i)) * (1.0 + static_cast<double>(i));
    f.V = WeightFunction(v);
    f.phi = ScalarFunction::power(0.5);
    f.coupling_A = 3.0;
    f.coupling_N = 4;
    f.sigma_grid = {0.25, 0.4, 0.5, 0.6, 0.75};
    f.builder_R = 6.0;
    f.builder_eps = 0.1;
    f.require = {"weak_lyapunov", "coupling", "subgeometric"};
    return f;
}

Fixture fixture_birth_death_ctmc() {
    Fixture f;
    f.name = "birth_death_ctmc";
    const std::size_t n = 30;
    Matrix L = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i + 1 < n) L(i, i + 1) = 1.0;
        if (i > 0) L(i, i - 1) = static_cast<double>(i);
        L(i, i) = -L.row(static_cast<Eigen::Index>(i)).sum();
    }
    f.generator = GeneratorMatrix(L);
    f.time_T = 2.0;
    f.kernel = semigroup_at(*f.generator, *f.time_T);
    Vector v(n);
    for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = 1.0 + static_cast<double>(i);
    f.V = WeightFunction(v);
    f.phi = ScalarFunction::power(0.5);
    f.coupling_A = 3.2;
    f.coupling_A2 = 4.0;
    f.builder_R = 12.0;
    f.builder_eps = 0.1;
    f.require = {"doeblin", "subgeometric"};
    return f;
}

Fixture fixture_period_two() {
    Fixture f;
    f.name = "period_two";
    Matrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    f.kernel = StochasticKernel(m);
    f.V = WeightFunction::ones(2);
    return f;
}

Fixture fixture_block_diagonal() {
    Fixture f;
    f.name = "block_diagonal";
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = m(0, 1) = m(1, 0) = m(1, 1) = 0.5;
    m(2, 2) = m(2, 3) = m(3, 2) = m(3, 3) = 0.5;
    f.kernel = StochasticKernel(m);
    f.V = WeightFunction::ones(4);
    return f;
}

std::vector<Fixture> all_fixtures() {
    return {fixture_two_state_doeblin(), fixture_three_state_harris(), fixture_reflected_walk(),
            fixture_birth_death_ctmc(),  fixture_period_two(),         fixture_block_diagonal()};
}

}  // namespace harris
