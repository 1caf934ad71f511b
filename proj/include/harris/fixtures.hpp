#pragma once

#include "harris/continuous.hpp"

namespace harris {

/// A bundled test model: kernel (or generator), weights, and the analysis
/// parameters the certification pipeline should use.
struct Fixture {
    std::string name;
    StochasticKernel kernel;                 // for generators: S_T at time_T
    std::optional<GeneratorMatrix> generator;
    WeightFunction V;
    std::optional<WeightFunction> V2;
    std::optional<ScalarFunction> phi;
    std::optional<double> harris_R;
    std::optional<double> coupling_A;
    std::optional<double> coupling_A2;  // second weight's radius (continuous routes)
    std::size_t coupling_N = 1;
    std::optional<double> time_T;            // coupling window for generators
    std::vector<double> lyapunov_K_grid;
    std::vector<double> sigma_grid;
    std::optional<double> builder_R;
    double builder_eps = 0.1;
    std::vector<std::string> require;        // analyses that must succeed
};

/// K = [[0.7,0.3],[0.4,0.6]]: Doeblin alpha = 0.7, stationary (4/7, 3/7).
Fixture fixture_two_state_doeblin();

/// Ergodic 3-state chain with a Harris sublevel certificate and a usable
/// one-step coupling at A = 3.
Fixture fixture_three_state_harris();

/// Reflected lazy walk on {0..99} with downward drift (down 1/2, stay 1/4,
/// up 1/4), V(i) = (1+i)^2, phi = sqrt: the weak-certificate regime.
Fixture fixture_reflected_walk();

/// Birth–death CTMC on {0..29} (birth 1, death i), V(i) = i+1:
/// LV = -V + 2 exactly.
Fixture fixture_birth_death_ctmc();

/// Period-2 swap chain.
Fixture fixture_period_two();

/// Two disconnected mixing blocks: multiplicity 2.
Fixture fixture_block_diagonal();

std::vector<Fixture> all_fixtures();

}  // namespace harris
