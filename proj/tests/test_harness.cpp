#include "harris/model.hpp"
#include "harris/report.hpp"
#include "harris/util.hpp"

#include <doctest.h>

#include <cmath>

using namespace harris;

TEST_CASE("simulate_decay: columns, monotone TV, zero-mean flag") {
    Fixture ts = fixture_two_state_doeblin();
    SignedMeasure nu(SignedMeasure::dirac(2, 0).values() - SignedMeasure::dirac(2, 1).values());
    auto table = simulate_decay(ts.kernel, nu, 100, {{"tv", std::nullopt}, {"v", ts.V}});
    CHECK(table.columns.size() == 2);
    CHECK(table.zero_mean_input);
    for (std::size_t k = 0; k <= 100; ++k) {
        CHECK(table.values[0][k] == doctest::Approx(2.0 * std::pow(0.3, static_cast<double>(k))).epsilon(1e-12));
        if (k > 0) CHECK(table.values[0][k] <= table.values[0][k - 1] + 1e-15);
    }

    // identity kernel: constant columns
    auto frozen = simulate_decay(StochasticKernel::identity(2), nu, 10, {{"tv", std::nullopt}});
    for (std::size_t k = 0; k <= 10; ++k) CHECK(frozen.values[0][k] == doctest::Approx(2.0));

    // non-zero-mean input is accepted but flagged
    auto flagged = simulate_decay(ts.kernel, SignedMeasure::dirac(2, 0), 5, {{"tv", std::nullopt}});
    CHECK_FALSE(flagged.zero_mean_input);
}

TEST_CASE("validate_envelope: zero table, tight fixture, constructed violation") {
    std::vector<double> times{0, 1, 2, 3};
    std::vector<double> zeros{0, 0, 0, 0};
    auto v0 = validate_envelope(times, zeros, [](double) { return 1.0; }, 1e-9);
    CHECK(v0.pass);
    CHECK(v0.worst_ratio == 0.0);

    // tight Doeblin fixture: ratio 1 at every n
    Fixture ts = fixture_two_state_doeblin();
    SignedMeasure nu(SignedMeasure::dirac(2, 0).values() - SignedMeasure::dirac(2, 1).values());
    auto table = simulate_decay(ts.kernel, nu, 50, {{"tv", std::nullopt}});
    auto cert = check_doeblin(ts.kernel);
    REQUIRE(cert);
    auto env = doeblin_rate(*cert.cert);
    auto v1 = validate_envelope(table.times, table.values[0],
                                [&](double n) { return env.value_at(n) * 2.0; }, 1e-9);
    CHECK(v1.pass);
    CHECK(v1.worst_ratio == doctest::Approx(1.0).epsilon(1e-12));

    // scaling the envelope down by half fails with witness n = 1
    auto v2 = validate_envelope(table.times, table.values[0],
                                [&](double n) { return n < 0.5 ? 2.0 : 0.5 * env.value_at(n) * 2.0; }, 1e-9);
    CHECK_FALSE(v2.pass);
    CHECK(v2.arg_worst == doctest::Approx(1.0));
}

TEST_CASE("existence_check: budget respected and limit matches the stationary law") {
    Fixture ts = fixture_two_state_doeblin();
    auto phi = ScalarFunction::power(0.5);
    auto wl = check_weak_lyapunov(ts.kernel, ts.V, phi, {0.5});
    REQUIRE(wl);
    auto coup = check_local_coupling(ts.kernel, ts.V, 2.0, 1);
    REQUIRE(coup);

    // already-stationary start consumes nothing
    auto st = stationary_distribution(ts.kernel, 1e-13);
    auto r0 = existence_check(ts.kernel, ts.V, *wl.cert, *coup.cert, st.pi.values(), 50);
    CHECK(r0.budget_respected);
    CHECK(r0.consumed <= 1e-10);

    Vector d0(2);
    d0 << 1.0, 0.0;
    auto r1 = existence_check(ts.kernel, ts.V, *wl.cert, *coup.cert, d0, 200);
    CHECK(r1.budget_respected);
    CHECK(r1.mu_star.values()[0] == doctest::Approx(4.0 / 7.0).epsilon(1e-10));

    Rng rng(404);
    for (int draw = 0; draw < 20; ++draw) {
        auto r = existence_check(ts.kernel, ts.V, *wl.cert, *coup.cert, rng.next_probability(2), 200);
        CHECK(r.budget_respected);
    }
}

TEST_CASE("uniqueness_check multiplicities") {
    CHECK(uniqueness_check(StochasticKernel::identity(4)).multiplicity == 4);
    CHECK(uniqueness_check(fixture_block_diagonal().kernel).multiplicity == 2);
    CHECK_FALSE(uniqueness_check(fixture_block_diagonal().kernel).unique);
    CHECK(uniqueness_check(fixture_three_state_harris().kernel).multiplicity == 1);
    CHECK(uniqueness_check(fixture_two_state_doeblin().kernel).unique);
}

TEST_CASE("model JSON parsing: schema validation with path-precise errors") {
    // valid round trip through the serializer
    for (const auto& fx : all_fixtures()) {
        std::string text = model_to_json(fx);
        Fixture back = parse_model(text, fx.name);
        CHECK(back.name == fx.name);
        CHECK(back.kernel.size() == fx.kernel.size());
        CHECK((back.kernel.matrix() - fx.kernel.matrix()).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK(back.require == fx.require);
    }

    // unknown field
    CHECK_THROWS_WITH_AS(parse_model(R"({"schema_version":1,"kernel":[[1.0]],"bogus":3})", "m"),
                         doctest::Contains("bogus"), std::invalid_argument);
    // malformed JSON
    CHECK_THROWS_WITH_AS(parse_model("{", "m"), doctest::Contains("malformed"), std::invalid_argument);
    // degenerate kernel row
    CHECK_THROWS_WITH_AS(parse_model(R"({"schema_version":1,"kernel":[[0.5,0.4],[0.5,0.5]]})", "m"),
                         doctest::Contains("kernel"), std::invalid_argument);
    // both kernel and generator
    CHECK_THROWS_AS(parse_model(R"({"schema_version":1,"kernel":[[1.0]],"generator":[[0.0]]})", "m"),
                    std::invalid_argument);
    // weight below one
    CHECK_THROWS_AS(parse_model(R"({"schema_version":1,"kernel":[[1.0]],"weight_V":[0.5]})", "m"),
                    std::invalid_argument);
    // unknown required analysis
    CHECK_THROWS_AS(parse_model(R"({"schema_version":1,"kernel":[[1.0]],"require":["wat"]})", "m"),
                    std::invalid_argument);
}

TEST_CASE("report: two-state fixture passes, determinism is byte-exact") {
    Fixture ts = fixture_two_state_doeblin();
    ReportOptions opt;
    opt.seed = 7;
    opt.n_max = 100;
    opt.n_random = 20;
    auto r1 = run_report(ts, opt);
    CHECK(r1.exit_code == 0);
    CHECK(r1.json["certificates"]["doeblin"]["alpha"].get<double>() == doctest::Approx(0.7));

    auto r2 = run_report(ts, opt);
    CHECK(r1.json.dump() == r2.json.dump());
    REQUIRE(r1.csv_files.size() == r2.csv_files.size());
    for (std::size_t i = 0; i < r1.csv_files.size(); ++i) CHECK(r1.csv_files[i].second == r2.csv_files[i].second);

    // different seed changes the random draws but never the certificates
    ReportOptions opt2 = opt;
    opt2.seed = 8;
    auto r3 = run_report(ts, opt2);
    CHECK(r3.exit_code == 0);
    CHECK(r3.json["certificates"].dump() == r1.json["certificates"].dump());
}

TEST_CASE("report: required-analysis failure exits 1") {
    // coupling requested on the identity kernel: gamma_H = 1
    Fixture f;
    f.name = "impossible";
    f.kernel = StochasticKernel::identity(3);
    f.V = WeightFunction::ones(3);
    f.coupling_A = 2.0;
    f.coupling_N = 1;
    f.require = {"coupling"};
    ReportOptions opt;
    opt.n_max = 10;
    opt.n_random = 5;
    auto r = run_report(f, opt);
    CHECK(r.exit_code == 1);
    CHECK(r.json["failures"].size() >= 1);
}

TEST_CASE("report: period-2 and block-diagonal fixtures exit 0 without requests") {
    ReportOptions opt;
    opt.n_max = 50;
    opt.n_random = 10;
    auto p2 = run_report(fixture_period_two(), opt);
    CHECK(p2.exit_code == 0);
    CHECK(p2.json["uniqueness"]["multiplicity"].get<int>() == 1);

    auto bd = run_report(fixture_block_diagonal(), opt);
    CHECK(bd.exit_code == 0);
    CHECK(bd.json["uniqueness"]["multiplicity"].get<int>() == 2);
}

TEST_CASE("decay CSV round-trips through revalidation") {
    Fixture ts = fixture_three_state_harris();
    ReportOptions opt;
    opt.n_max = 120;
    opt.n_random = 20;
    auto rep = run_report(ts, opt);
    CHECK(rep.exit_code == 0);
    REQUIRE(rep.csv_files.size() == 1);
    const std::string& csv = rep.csv_files[0].second;
    CHECK(csv.rfind("n_or_t,tv,v1_norm,v2_norm,envelope_tv,envelope_v1\n", 0) == 0);
    auto rt = revalidate_csv(csv, 1e-9);
    CHECK(rt.pass);
    CHECK(rt.rows == 121);
    CHECK(rt.worst_ratio <= 1.0 + 1e-9);
}
