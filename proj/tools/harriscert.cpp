// Command-line front end: certificate extraction, rate envelopes, decay
// simulation, and the combined certify+rate+simulate+validate report.
//
// Exit codes: 0 all validations pass; 1 a required certification is
// impossible (witnesses in the report); 2 a certified envelope failed
// validation (always a bug); 3 input error.

#include "harris/model.hpp"
#include "harris/fixtures.hpp"
#include "harris/report.hpp"
#include "harris/util.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

struct CommonArgs {
    std::string model_path;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    double tol = 1e-9;
    std::size_t n_max = 500;
    double t_max = 50.0;
    std::size_t grid_size = 50;
    std::size_t n_random = 100;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("model", a.model_path, "model JSON file")->required();
    cmd->add_option("--out", a.out_dir, "output directory for CSV tables");
    cmd->add_option("--seed", a.seed, "RNG seed recorded in the report");
    cmd->add_option("--tol", a.tol, "validation slack");
    cmd->add_option("--n-max", a.n_max, "discrete horizon");
    cmd->add_option("--t-max", a.t_max, "continuous horizon");
    cmd->add_option("--grid-size", a.grid_size, "continuous grid size");
    cmd->add_option("--n-random", a.n_random, "random trajectories per envelope");
}

harris::ReportOptions to_options(const CommonArgs& a) {
    harris::ReportOptions opt;
    opt.seed = a.seed;
    opt.tol = a.tol;
    opt.n_max = a.n_max;
    opt.t_max = a.t_max;
    opt.grid_size = a.grid_size;
    opt.n_random = a.n_random;
    return opt;
}

int run(const CommonArgs& args, bool rates, bool validation, bool write_csv) {
    harris::Fixture fixture;
    try {
        fixture = harris::load_model(args.model_path);
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 3;
    }
    harris::ReportOptions opt = to_options(args);
    opt.with_rates = rates;
    opt.with_validation = validation;
    harris::ReportResult rep;
    try {
        rep = harris::run_report(fixture, opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    if (write_csv) {
        std::error_code ec;
        std::filesystem::create_directories(args.out_dir, ec);
        for (const auto& [stem, content] : rep.csv_files) {
            std::ofstream out(std::filesystem::path(args.out_dir) / (stem + ".csv"));
            out << content;
            std::cerr << "wrote " << stem << ".csv\n";
        }
    }
    std::cout << rep.json.dump(2) << "\n";
    return rep.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"certificate and convergence-rate toolkit for finite stochastic operators"};
    app.require_subcommand(1);

    CommonArgs certify_args, rate_args, simulate_args, report_args;
    CLI::App* certify = app.add_subcommand("certify", "extract all applicable certificates");
    add_common(certify, certify_args);
    CLI::App* rate = app.add_subcommand("rate", "certificates plus rate envelopes and CSV tables");
    add_common(rate, rate_args);
    CLI::App* simulate = app.add_subcommand("simulate", "decay tables for random zero-mean measures");
    add_common(simulate, simulate_args);
    CLI::App* report = app.add_subcommand("report", "certify + rate + simulate + validate");
    add_common(report, report_args);
    std::string fixtures_dir = "fixtures";
    CLI::App* fixtures = app.add_subcommand("fixtures", "write the bundled fixture models as JSON files");
    fixtures->add_option("--out", fixtures_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 3;
    }

    if (certify->parsed()) return run(certify_args, /*rates=*/false, /*validation=*/false, /*csv=*/false);
    if (rate->parsed()) return run(rate_args, true, false, true);
    if (simulate->parsed()) return run(simulate_args, true, true, true);
    if (report->parsed()) return run(report_args, true, true, true);
    if (fixtures->parsed()) {
        std::error_code ec;
        std::filesystem::create_directories(fixtures_dir, ec);
        for (const auto& f : harris::all_fixtures()) {
            std::ofstream out(std::filesystem::path(fixtures_dir) / (f.name + ".json"));
            out << harris::model_to_json(f);
            std::cerr << "wrote " << f.name << ".json\n";
        }
        return 0;
    }
    return 3;
}
