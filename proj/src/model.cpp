#include "harris/model.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace harris {

namespace {

using nlohmann::ordered_json;

Matrix parse_matrix(const ordered_json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument(path + ": expected a nonempty array of rows");
    std::size_t n = j.size();
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = j[i];
        if (!row.is_array() || row.size() != n)
            throw std::invalid_argument(path + "[" + std::to_string(i) + "]: expected " + std::to_string(n) + " entries");
        for (std::size_t k = 0; k < n; ++k) {
            if (!row[k].is_number()) throw std::invalid_argument(path + "[" + std::to_string(i) + "][" + std::to_string(k) + "]: expected a number");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k].get<double>();
        }
    }
    return m;
}

Vector parse_vector(const ordered_json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument(path + ": expected a nonempty array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw std::invalid_argument(path + "[" + std::to_string(i) + "]: expected a number");
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

void reject_unknown(const ordered_json& j, const std::set<std::string>& allowed, const std::string& path) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw std::invalid_argument(path + "." + it.key() + ": unknown field");
}

ScalarFunction parse_function(const ordered_json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("form")) throw std::invalid_argument(path + ": expected {\"form\": ...}");
    std::string form = j.at("form").get<std::string>();
    if (form == "power") {
        reject_unknown(j, {"form", "p"}, path);
        return ScalarFunction::power(j.at("p").get<double>());
    }
    if (form == "log-power") {
        reject_unknown(j, {"form", "a"}, path);
        return ScalarFunction::log_power(j.at("a").get<double>());
    }
    if (form == "affine") {
        reject_unknown(j, {"form", "c0", "c1"}, path);
        return ScalarFunction::affine(j.at("c0").get<double>(), j.at("c1").get<double>());
    }
    if (form == "arctan-family") {
        reject_unknown(j, {"form", "n"}, path);
        return ScalarFunction::arctan_family(j.at("n").get<double>());
    }
    if (form == "sampled") {
        reject_unknown(j, {"form", "grid", "values"}, path);
        Vector g = parse_vector(j.at("grid"), path + ".grid");
        Vector v = parse_vector(j.at("values"), path + ".values");
        return ScalarFunction::sampled(std::vector<double>(g.data(), g.data() + g.size()),
                                       std::vector<double>(v.data(), v.data() + v.size()), ShapeTag::MonotoneOnly);
    }
    throw std::invalid_argument(path + ".form: unknown function form '" + form + "'");
}

ordered_json function_to_json(const ScalarFunction& f) {
    ordered_json j;
    if (f.kind() == "power") {
        j["form"] = "power";
        j["p"] = f.params()[0];
    } else if (f.kind() == "log-power") {
        j["form"] = "log-power";
        j["a"] = f.params()[0];
    } else if (f.kind() == "affine") {
        j["form"] = "affine";
        j["c0"] = f.params()[0];
        j["c1"] = f.params()[1];
    } else if (f.kind() == "arctan-family") {
        j["form"] = "arctan-family";
        j["n"] = f.params()[0];
    } else {
        j["form"] = f.kind();
    }
    return j;
}

}  // namespace

Fixture parse_model(const std::string& json_text, const std::string& origin) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(origin + ": malformed JSON: " + e.what());
    }
    reject_unknown(j,
                   {"schema_version", "name", "states", "kernel", "generator", "weight_V", "weight_V2", "phi", "psi",
                    "xi", "harris_R", "coupling", "time_T", "lyapunov_K_grid", "sigma_grid", "builder", "require"},
                   origin);
    if (!j.contains("schema_version") || j.at("schema_version").get<int>() != 1)
        throw std::invalid_argument(origin + ".schema_version: expected 1");

    Fixture f;
    f.name = j.value("name", std::string("model"));

    const bool has_kernel = j.contains("kernel");
    const bool has_generator = j.contains("generator");
    if (has_kernel == has_generator)
        throw std::invalid_argument(origin + ": exactly one of 'kernel' or 'generator' is required");

    std::size_t n = 0;
    if (has_generator) {
        Matrix L = parse_matrix(j.at("generator"), origin + ".generator");
        n = static_cast<std::size_t>(L.rows());
        try {
            f.generator = GeneratorMatrix(std::move(L));
        } catch (const std::exception& e) {
            throw std::invalid_argument(origin + ".generator: " + e.what());
        }
        f.time_T = j.value("time_T", 1.0);
        f.kernel = semigroup_at(*f.generator, *f.time_T);
    } else {
        Matrix m = parse_matrix(j.at("kernel"), origin + ".kernel");
        n = static_cast<std::size_t>(m.rows());
        try {
            f.kernel = StochasticKernel(std::move(m));
        } catch (const std::exception& e) {
            throw std::invalid_argument(origin + ".kernel: " + e.what());
        }
        if (j.contains("time_T")) f.time_T = j.at("time_T").get<double>();
    }
    if (j.contains("states") && j.at("states").get<std::size_t>() != n)
        throw std::invalid_argument(origin + ".states: does not match the matrix dimension");

    if (j.contains("weight_V")) {
        Vector v = parse_vector(j.at("weight_V"), origin + ".weight_V");
        if (static_cast<std::size_t>(v.size()) != n) throw std::invalid_argument(origin + ".weight_V: length mismatch");
        try {
            f.V = WeightFunction(std::move(v));
        } catch (const std::exception& e) {
            throw std::invalid_argument(origin + ".weight_V: " + e.what());
        }
    } else {
        f.V = WeightFunction::ones(n);
    }
    if (j.contains("weight_V2")) {
        Vector v = parse_vector(j.at("weight_V2"), origin + ".weight_V2");
        if (static_cast<std::size_t>(v.size()) != n) throw std::invalid_argument(origin + ".weight_V2: length mismatch");
        f.V2 = WeightFunction(std::move(v));
    }
    if (j.contains("phi")) f.phi = parse_function(j.at("phi"), origin + ".phi");
    if (j.contains("psi")) parse_function(j.at("psi"), origin + ".psi");  // accepted, currently informational
    if (j.contains("xi")) parse_function(j.at("xi"), origin + ".xi");
    if (j.contains("harris_R")) f.harris_R = j.at("harris_R").get<double>();
    if (j.contains("coupling")) {
        const auto& c = j.at("coupling");
        reject_unknown(c, {"A", "A2", "N", "T"}, origin + ".coupling");
        if (!c.contains("A")) throw std::invalid_argument(origin + ".coupling.A: required");
        f.coupling_A = c.at("A").get<double>();
        if (c.contains("A2")) f.coupling_A2 = c.at("A2").get<double>();
        f.coupling_N = c.value("N", std::size_t{1});
        if (c.contains("T")) f.time_T = c.at("T").get<double>();
    }
    if (j.contains("lyapunov_K_grid")) {
        Vector g = parse_vector(j.at("lyapunov_K_grid"), origin + ".lyapunov_K_grid");
        f.lyapunov_K_grid.assign(g.data(), g.data() + g.size());
    }
    if (j.contains("sigma_grid")) {
        Vector g = parse_vector(j.at("sigma_grid"), origin + ".sigma_grid");
        f.sigma_grid.assign(g.data(), g.data() + g.size());
    }
    if (j.contains("builder")) {
        const auto& b = j.at("builder");
        reject_unknown(b, {"R", "eps"}, origin + ".builder");
        f.builder_R = b.at("R").get<double>();
        f.builder_eps = b.value("eps", 0.1);
    }
    if (j.contains("require")) {
        for (const auto& r : j.at("require")) f.require.push_back(r.get<std::string>());
        const std::set<std::string> known{"doeblin",  "harris",      "lyapunov", "weak_lyapunov",
                                          "coupling", "harris_rate", "subgeometric"};
        for (const auto& r : f.require)
            if (!known.count(r)) throw std::invalid_argument(origin + ".require: unknown analysis '" + r + "'");
    }
    return f;
}

Fixture load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument(path + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str(), path);
}

std::string model_to_json(const Fixture& f) {
    ordered_json j;
    j["schema_version"] = 1;
    j["name"] = f.name;
    j["states"] = f.kernel.size();
    auto matrix_json = [](const Matrix& m) {
        ordered_json rows = ordered_json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            ordered_json row = ordered_json::array();
            for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
            rows.push_back(row);
        }
        return rows;
    };
    if (f.generator) {
        j["generator"] = matrix_json(f.generator->matrix());
        j["time_T"] = f.time_T ? *f.time_T : 1.0;
    } else {
        j["kernel"] = matrix_json(f.kernel.matrix());
    }
    {
        ordered_json v = ordered_json::array();
        for (std::size_t i = 0; i < f.V.size(); ++i) v.push_back(f.V[i]);
        j["weight_V"] = v;
    }
    if (f.V2) {
        ordered_json v = ordered_json::array();
        for (std::size_t i = 0; i < f.V2->size(); ++i) v.push_back((*f.V2)[i]);
        j["weight_V2"] = v;
    }
    if (f.phi) j["phi"] = function_to_json(*f.phi);
    if (f.harris_R) j["harris_R"] = *f.harris_R;
    if (f.coupling_A) {
        ordered_json c;
        c["A"] = *f.coupling_A;
        if (f.coupling_A2) c["A2"] = *f.coupling_A2;
        c["N"] = f.coupling_N;
        j["coupling"] = c;
    }
    if (!f.lyapunov_K_grid.empty()) j["lyapunov_K_grid"] = f.lyapunov_K_grid;
    if (!f.sigma_grid.empty()) j["sigma_grid"] = f.sigma_grid;
    if (f.builder_R) {
        ordered_json b;
        b["R"] = *f.builder_R;
        b["eps"] = f.builder_eps;
        j["builder"] = b;
    }
    if (!f.require.empty()) j["require"] = f.require;
    return j.dump(2) + "\n";
}

}  // namespace harris
