#pragma once

#include "harris/fixtures.hpp"
#include "harris/simulate.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace harris {

inline constexpr const char* kToolVersion = "1.0.0";

struct ReportOptions {
    std::uint64_t seed = 1;
    double tol = 1e-9;         // validation slack
    std::size_t n_max = 500;   // discrete horizon
    double t_max = 50.0;       // continuous horizon
    std::size_t grid_size = 50;
    std::size_t n_random = 100;
    bool with_rates = true;      // compute envelopes
    bool with_validation = true; // simulate and compare
};

struct ReportResult {
    nlohmann::ordered_json json;
    int exit_code = 0;  // 0 ok, 1 required certification failed, 2 envelope violated
    // decay CSVs keyed by file stem
    std::vector<std::pair<std::string, std::string>> csv_files;
};

ReportResult run_report(const Fixture& f, const ReportOptions& opt);

/// Re-ingests a decay CSV produced by run_report and re-checks the
/// measured-vs-envelope columns (round-trip validation).
struct CsvRoundTrip {
    bool pass = false;
    double worst_ratio = 0.0;
    std::size_t rows = 0;
};
CsvRoundTrip revalidate_csv(const std::string& csv_text, double slack);

}  // namespace harris
