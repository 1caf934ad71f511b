#include "harris/report.hpp"

#include "harris/util.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

namespace harris {

namespace {

using nlohmann::ordered_json;

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

ordered_json coupling_json(const CouplingCert& c) {
    ordered_json j;
    j["A"] = c.A;
    j["gamma_H"] = c.gamma_H;
    j["gamma_H_pairwise"] = c.gamma_H_pairwise;
    j["N"] = c.N;
    j["vacuous"] = c.vacuous;
    return j;
}

struct EnvelopeRun {
    std::string name;       // "doeblin", "harris", "subgeometric_v1", ...
    std::string norm_tag;   // column to compare
    std::string ref_norm;   // norm of the right-hand side factor
    std::function<double(double, double)> bound;  // (n_or_t, ref_norm_value) -> bound
};

}  // namespace

ReportResult run_report(const Fixture& f, const ReportOptions& opt) {
    ReportResult result;
    ordered_json& j = result.json;
    const StochasticKernel& S = f.kernel;
    const std::size_t n = S.size();

    j["schema_version"] = 1;
    j["tool_version"] = kToolVersion;
    j["model"] = f.name;
    j["input_hash"] = f.generator ? [&] {
        ContentHasher h;
        h.add(f.generator->matrix()).add(f.V.values());
        return h.hex();
    }()
                                  : kernel_weight_hash(S, f.V);
    j["seed"] = opt.seed;
    {
        ordered_json o;
        o["tol"] = opt.tol;
        o["n_max"] = opt.n_max;
        o["t_max"] = opt.t_max;
        o["grid_size"] = opt.grid_size;
        o["n_random"] = opt.n_random;
        j["options"] = o;
    }

    ordered_json certs = ordered_json::object();
    ordered_json failures = ordered_json::array();
    std::map<std::string, bool> analysis_ok;

    auto note_failure = [&failures](const std::string& what, const std::string& why, int w1 = -1, int w2 = -1) {
        ordered_json e;
        e["analysis"] = what;
        e["reason"] = why;
        if (w1 >= 0) e["witness_state"] = w1;
        if (w2 >= 0) e["witness_state2"] = w2;
        failures.push_back(e);
    };

    // --- certificates ---
    auto doeblin = check_doeblin(S);
    analysis_ok["doeblin"] = static_cast<bool>(doeblin);
    if (doeblin) {
        ordered_json d;
        d["alpha"] = doeblin->alpha;
        ordered_json eta = ordered_json::array();
        for (Eigen::Index i = 0; i < doeblin->eta.size(); ++i) eta.push_back(doeblin->eta[i]);
        d["eta"] = eta;
        d["input_hash"] = doeblin->input_hash;
        certs["doeblin"] = d;
    } else {
        certs["doeblin"] = ordered_json{{"failure", doeblin.failure}};
        note_failure("doeblin", doeblin.failure, doeblin.witness_state, doeblin.witness_state2);
    }

    std::optional<HarrisCert> harris;
    if (f.harris_R) {
        auto hr = check_harris(S, f.V, *f.harris_R);
        analysis_ok["harris"] = static_cast<bool>(hr);
        if (hr) {
            harris = *hr.cert;
            ordered_json h;
            h["alpha"] = harris->alpha;
            h["R"] = harris->R;
            h["set_C_size"] = harris->set_C.size();
            certs["harris"] = h;
        } else {
            certs["harris"] = ordered_json{{"failure", hr.failure}};
            note_failure("harris", hr.failure, hr.witness_state, hr.witness_state2);
        }
    }

    // coupling weight: phi(V) in the weak regime, V otherwise
    std::optional<CouplingCert> coupling;
    WeightFunction coupling_weight = f.V;
    if (f.phi) {
        Vector w(static_cast<Eigen::Index>(n));
        for (std::size_t x = 0; x < n; ++x) w[static_cast<Eigen::Index>(x)] = (*f.phi)(f.V[x]);
        coupling_weight = WeightFunction(w);
    }
    if (f.coupling_A) {
        auto cr = check_local_coupling(S, coupling_weight, *f.coupling_A, f.coupling_N);
        analysis_ok["coupling"] = static_cast<bool>(cr);
        if (cr) {
            coupling = *cr.cert;
            certs["coupling"] = coupling_json(*coupling);
        } else {
            certs["coupling"] = ordered_json{{"failure", cr.failure}};
            note_failure("coupling", cr.failure, cr.witness_state, cr.witness_state2);
        }
    }

    std::optional<LyapunovCert> lyap;
    if (!f.lyapunov_K_grid.empty() || (!f.phi && f.coupling_A)) {
        std::vector<double> grid = f.lyapunov_K_grid.empty() ? default_K_grid(S, f.V) : f.lyapunov_K_grid;
        auto lr = (coupling && !f.phi) ? check_lyapunov_for_harris(S, f.V, grid, *coupling)
                                       : check_lyapunov(S, f.V, grid);
        analysis_ok["lyapunov"] = static_cast<bool>(lr);
        if (lr) {
            lyap = *lr.cert;
            ordered_json l;
            l["gamma_L"] = lyap->gamma_L;
            l["K"] = lyap->K;
            certs["lyapunov"] = l;
        } else {
            certs["lyapunov"] = ordered_json{{"failure", lr.failure}};
            note_failure("lyapunov", lr.failure, lr.witness_state);
        }
    }

    std::optional<WeakLyapunovCert> weak;
    if (f.phi) {
        std::vector<double> grid = f.sigma_grid;
        if (grid.empty())
            for (int i = 1; i <= 9; ++i) grid.push_back(0.1 * i);
        auto wr = check_weak_lyapunov(S, f.V, *f.phi, grid, f.coupling_A);
        analysis_ok["weak_lyapunov"] = static_cast<bool>(wr);
        if (wr) {
            weak = *wr.cert;
            ordered_json w;
            w["sigma"] = weak->sigma_bar;
            w["K"] = weak->K;
            certs["weak_lyapunov"] = w;
        } else {
            certs["weak_lyapunov"] = ordered_json{{"failure", wr.failure}};
            note_failure("weak_lyapunov", wr.failure);
        }
    }

    // --- envelopes ---
    ordered_json envelopes = ordered_json::array();
    std::vector<EnvelopeRun> runs;
    std::optional<WeightFunction> V1_sub;  // psi(V) when the subgeometric route is active

    if (opt.with_rates && doeblin) {
        GeometricEnvelope env = doeblin_rate(*doeblin.cert);
        ordered_json e;
        e["kind"] = "doeblin";
        e["norm"] = "TV";
        e["C"] = env.C;
        e["gamma"] = env.rate;
        envelopes.push_back(e);
        runs.push_back({"doeblin", "tv", "tv", [env](double u, double ref) { return env.value_at(u) * ref; }});
    }

    if (opt.with_rates && lyap && coupling && !f.phi) {
        auto hr = harris_rate(*lyap, *coupling);
        analysis_ok["harris_rate"] = static_cast<bool>(hr);
        if (hr) {
            ordered_json e;
            e["kind"] = "harris";
            e["norm"] = "V";
            e["C"] = hr->envelope.C;
            e["gamma"] = hr->gamma;
            e["beta"] = hr->beta;
            e["equalized"] = hr->equalized;
            envelopes.push_back(e);
            GeometricEnvelope env = hr->envelope;
            runs.push_back({"harris_v", "v1", "v1", [env](double u, double ref) { return env.value_at(u) * ref; }});
            runs.push_back({"harris_tv", "tv", "v1", [env](double u, double ref) { return env.value_at(u) * ref; }});
        } else {
            certs["harris_rate"] = ordered_json{{"failure", hr.failure}};
            note_failure("harris_rate", hr.failure);
        }
    }

    std::optional<SubgeometricEnvelopes> subgeo;
    std::optional<ContinuousRateResult> cont;
    if (opt.with_rates && !f.generator && weak && coupling && f.builder_R) {
        // discrete subgeometric route: V2 = V, V1 = psi(V) from the builder
        bool ok = false;
        do {
            auto psi = psi_builder_polynomial(*f.phi, *f.builder_R, f.builder_eps);
            if (!psi) {
                note_failure("subgeometric", "psi builder: " + psi.failure);
                break;
            }
            std::vector<double> tg{0.0, 1.0};
            auto pipe = feller_pipeline(*f.phi, *psi.cert, *f.builder_R, tg, 4.0 * f.V.values().maxCoeff());
            if (!pipe) {
                note_failure("subgeometric", "pipeline: " + pipe.failure);
                break;
            }
            Vector v1(static_cast<Eigen::Index>(n)), w1(static_cast<Eigen::Index>(n));
            for (std::size_t x = 0; x < n; ++x) {
                v1[static_cast<Eigen::Index>(x)] = (*psi.cert)(f.V[x]);
                w1[static_cast<Eigen::Index>(x)] = pipe->phi1(v1[static_cast<Eigen::Index>(x)]);
            }
            WeightFunction V1(v1);
            auto coup1 = check_local_coupling(S, WeightFunction(w1), *f.coupling_A, f.coupling_N);
            if (!coup1) {
                note_failure("subgeometric", "phi1 coupling: " + coup1.failure);
                break;
            }
            std::vector<double> sg = f.sigma_grid;
            if (sg.empty())
                for (int i = 1; i <= 9; ++i) sg.push_back(0.1 * i);
            auto wl1 = check_weak_lyapunov(S, V1, pipe->phi1, sg, f.coupling_A);
            if (!wl1) {
                note_failure("subgeometric", "V1 weak certificate: " + wl1.failure);
                break;
            }
            auto t48 = interpolated_subgeometric_rate(S, V1, f.V, *wl1.cert, *weak, *coup1.cert, *coupling, pipe->xi,
                                        pipe->xi_lambda_max, opt.n_max);
            if (!t48) {
                note_failure("subgeometric", "assembly: " + t48.failure, t48.witness_state);
                break;
            }
            subgeo = *t48.cert;
            V1_sub = V1;
            ordered_json e;
            e["kind"] = "subgeometric";
            e["C_v1"] = subgeo->v1_envelope.prefactor;
            e["r"] = subgeo->r;
            e["C_tv"] = subgeo->tv_envelope.prefactor;
            e["r_tv"] = subgeo->r_tv;
            e["gamma_H"] = subgeo->gamma_H;
            e["alpha"] = subgeo->alpha;
            e["kappa"] = subgeo->kappa;
            e["N"] = subgeo->N;
            envelopes.push_back(e);
            const RateFunction env_v1 = subgeo->v1_envelope;
            const RateFunction env_tv = subgeo->tv_envelope;
            runs.push_back({"subgeometric_v1", "v1", "v2", [env_v1](double u, double ref) { return env_v1.bound_at(u) * ref; }});
            runs.push_back({"subgeometric_tv", "tv", "v2", [env_tv](double u, double ref) { return env_tv.bound_at(u) * ref; }});
            ok = true;
        } while (false);
        analysis_ok["subgeometric"] = ok;
    }

    // continuous-time analyses
    std::optional<GeneratorLyapunovCert> gen_geo;
    if (f.generator) {
        auto g = check_generator_lyapunov(*f.generator, f.V);
        if (g) {
            gen_geo = *g.cert;
            ordered_json e;
            e["kind"] = "generator_lyapunov";
            e["sigma"] = gen_geo->sigma;
            e["b"] = gen_geo->b;
            certs["generator_lyapunov"] = e;
        } else {
            certs["generator_lyapunov"] = ordered_json{{"failure", g.failure}};
        }
        if (doeblin && f.time_T && opt.with_rates) {
            if (doeblin->alpha < 1.0) {
                GeometricEnvelope env = semigroup_doeblin_rate(doeblin->alpha, *f.time_T);
                ordered_json e;
                e["kind"] = "semigroup_doeblin";
                e["C"] = env.C;
                e["lambda"] = env.rate;
                envelopes.push_back(e);
            }
        }
        if (opt.with_rates && f.phi && f.builder_R && f.coupling_A && f.coupling_A2 && f.time_T) {
            bool ok = false;
            auto gw = check_generator_lyapunov(*f.generator, f.V, *f.phi);
            if (gw) {
                Vector w2(static_cast<Eigen::Index>(n));
                for (std::size_t x = 0; x < n; ++x) w2[static_cast<Eigen::Index>(x)] = (*f.phi)(f.V[x]);
                auto hr = check_harris(S, WeightFunction(w2), 2.0 * *f.builder_R);
                if (hr) {
                    auto cf = continuous_feller_rate(*f.generator, f.V, *gw.cert, *hr.cert, *f.time_T, *f.builder_R,
                                                     *f.coupling_A, *f.coupling_A2, std::nullopt, f.builder_eps,
                                                     opt.t_max, opt.grid_size);
                    if (cf) {
                        cont = *cf.cert;
                        ordered_json e;
                        e["kind"] = "subgeometric_semigroup";
                        e["C_tv"] = cont->tv_envelope.prefactor;
                        e["rate_scale"] = cont->tv_envelope.time_scale;
                        e["N"] = cont->N;
                        e["t0"] = cont->t0;
                        envelopes.push_back(e);
                        ok = true;
                    } else {
                        note_failure("subgeometric", "continuous feller: " + cf.failure);
                    }
                } else {
                    note_failure("subgeometric", "harris on {phi(V) <= 2R}: " + hr.failure);
                }
            } else {
                note_failure("subgeometric", "weak generator certificate: " + gw.failure);
            }
            analysis_ok["subgeometric"] = ok;
        }
    }

    j["certificates"] = certs;
    j["envelopes"] = envelopes;

    // --- validation by simulation ---
    ordered_json validations = ordered_json::array();
    bool any_violation = false;
    if (opt.with_validation) {
        Rng rng(opt.seed);
        std::vector<NormSpec> norms{{"tv", std::nullopt},
                                    {"v1", V1_sub ? *V1_sub : f.V},
                                    {"v2", f.V}};
        // one representative table for the CSV
        SignedMeasure nu0(rng.next_zero_mean(n));
        DecayTable rep_table = simulate_decay(S, nu0, opt.n_max, norms);

        for (const auto& run : runs) {
            double worst = 0.0, argw = 0.0;
            Rng draw(opt.seed);
            for (std::size_t trial = 0; trial < opt.n_random; ++trial) {
                SignedMeasure nu(draw.next_zero_mean(n));
                DecayTable t = simulate_decay(S, nu, opt.n_max, norms);
                std::size_t col = (run.norm_tag == "tv") ? 0 : (run.norm_tag == "v1" ? 1 : 2);
                std::size_t ref_col = (run.ref_norm == "tv") ? 0 : (run.ref_norm == "v1" ? 1 : 2);
                double ref = t.values[ref_col][0];
                auto v = validate_envelope(t.times, t.values[col],
                                           [&](double u) { return run.bound(u, ref); }, opt.tol);
                if (v.worst_ratio > worst) {
                    worst = v.worst_ratio;
                    argw = v.arg_worst;
                }
            }
            ordered_json v;
            v["envelope"] = run.name;
            v["norm"] = run.norm_tag;
            v["draws"] = opt.n_random;
            v["worst_ratio"] = worst;
            v["arg_worst"] = argw;
            bool pass = worst <= 1.0 + opt.tol;
            v["pass"] = pass;
            validations.push_back(v);
            if (!pass) any_violation = true;
        }

        // continuous validations
        if (f.generator && gen_geo) {
            // two-coefficient drift envelope against uniformized exp(tL)
            std::vector<double> tg;
            for (std::size_t i = 1; i <= opt.grid_size; ++i) tg.push_back(opt.t_max * static_cast<double>(i) / static_cast<double>(opt.grid_size));
            auto coeffs = semigroup_lyapunov_envelope(*gen_geo, tg);
            double worst = 0.0, argw = 0.0;
            Rng draw(opt.seed + 1);
            for (std::size_t trial = 0; trial < std::min<std::size_t>(opt.n_random, 20); ++trial) {
                Vector mu = draw.next_probability(n);
                double muV = (f.V.values().array() * mu.array()).sum();
                for (const auto& c : coeffs) {
                    Vector img = semigroup_at(*f.generator, c.t).matrix().transpose() * mu;
                    double lhs = (f.V.values().array() * img.array()).sum();
                    double rhs = c.coef_V * muV + c.coef_TV;
                    double ratio = lhs / rhs;
                    if (ratio > worst) {
                        worst = ratio;
                        argw = c.t;
                    }
                }
            }
            ordered_json v;
            v["envelope"] = "generator_lyapunov_5_6";
            v["norm"] = "V";
            v["worst_ratio"] = worst;
            v["arg_worst"] = argw;
            bool pass = worst <= 1.0 + 1e-8;
            v["pass"] = pass;
            validations.push_back(v);
            if (!pass) any_violation = true;
        }
        if (f.generator && doeblin && doeblin->alpha < 1.0 && f.time_T) {
            GeometricEnvelope env = semigroup_doeblin_rate(doeblin->alpha, *f.time_T);
            double worst = 0.0, argw = 0.0;
            Rng draw(opt.seed + 2);
            for (std::size_t trial = 0; trial < std::min<std::size_t>(opt.n_random, 20); ++trial) {
                Vector nu = draw.next_zero_mean(n);
                double tv0 = nu.cwiseAbs().sum();
                for (std::size_t i = 1; i <= opt.grid_size; ++i) {
                    double t = opt.t_max * static_cast<double>(i) / static_cast<double>(opt.grid_size);
                    double m = (semigroup_at(*f.generator, t).matrix().transpose() * nu).cwiseAbs().sum();
                    double ratio = m / (env.value_at(t) * tv0);
                    if (ratio > worst) {
                        worst = ratio;
                        argw = t;
                    }
                }
            }
            ordered_json v;
            v["envelope"] = "semigroup_doeblin";
            v["norm"] = "TV";
            v["worst_ratio"] = worst;
            v["arg_worst"] = argw;
            bool pass = worst <= 1.0 + opt.tol;
            v["pass"] = pass;
            validations.push_back(v);
            if (!pass) any_violation = true;
        }
        if (f.generator && cont) {
            double worst = 0.0, argw = 0.0;
            Rng draw(opt.seed + 3);
            const RateFunction& env = cont->tv_envelope;
            for (std::size_t trial = 0; trial < std::min<std::size_t>(opt.n_random, 20); ++trial) {
                Vector nu = draw.next_zero_mean(n);
                double refV = (f.V.values().array() * nu.array().abs()).sum();
                for (std::size_t i = 1; i <= opt.grid_size; ++i) {
                    double t = opt.t_max * static_cast<double>(i) / static_cast<double>(opt.grid_size);
                    double m = (semigroup_at(*f.generator, t).matrix().transpose() * nu).cwiseAbs().sum();
                    double ratio = m / (env.bound_at(t) * refV);
                    if (ratio > worst) {
                        worst = ratio;
                        argw = t;
                    }
                }
            }
            ordered_json v;
            v["envelope"] = "subgeometric_semigroup_tv";
            v["norm"] = "TV";
            v["worst_ratio"] = worst;
            v["arg_worst"] = argw;
            bool pass = worst <= 1.0 + opt.tol;
            v["pass"] = pass;
            validations.push_back(v);
            if (!pass) any_violation = true;
        }

        // representative decay CSV with the fixed column layout
        {
            std::ostringstream csv;
            csv << "n_or_t,tv,v1_norm,v2_norm,envelope_tv,envelope_v1\n";
            double ref_v1 = rep_table.values[1][0];
            double ref_v2 = rep_table.values[2][0];
            for (std::size_t k = 0; k < rep_table.times.size(); ++k) {
                double env_tv = std::numeric_limits<double>::infinity();
                double env_v1 = std::numeric_limits<double>::infinity();
                for (const auto& run : runs) {
                    double ref = run.ref_norm == "tv" ? rep_table.values[0][0] : (run.ref_norm == "v1" ? ref_v1 : ref_v2);
                    double b = run.bound(rep_table.times[k], ref);
                    if (run.norm_tag == "tv") env_tv = std::min(env_tv, b);
                    if (run.norm_tag == "v1") env_v1 = std::min(env_v1, b);
                }
                csv << fmt(rep_table.times[k]) << ',' << fmt(rep_table.values[0][k]) << ','
                    << fmt(rep_table.values[1][k]) << ',' << fmt(rep_table.values[2][k]) << ',' << fmt(env_tv) << ','
                    << fmt(env_v1) << "\n";
            }
            result.csv_files.emplace_back(f.name + "_decay", csv.str());
        }
    }
    j["validations"] = validations;

    // --- structure checks ---
    {
        auto uni = uniqueness_check(S);
        ordered_json u;
        u["multiplicity"] = uni.multiplicity;
        u["unique"] = uni.unique;
        j["uniqueness"] = u;

        auto st = stationary_distribution(S, 1e-10);
        ordered_json s;
        s["residual"] = st.residual;
        s["unique"] = st.unique;
        s["method"] = st.method;
        s["converged"] = st.converged;
        j["stationary"] = s;

        Vector mu0 = Vector::Zero(static_cast<Eigen::Index>(n));
        mu0[0] = 1.0;
        auto ces = cesaro_invariant(S, mu0, 200000, 1e-10);
        ordered_json c;
        c["residual"] = ces.residual;
        c["horizon_used"] = ces.horizon_used;
        c["converged"] = ces.converged;
        j["cesaro"] = c;
    }

    j["failures"] = failures;

    ordered_json req = ordered_json::object();
    bool required_failed = false;
    for (const auto& r : f.require) {
        bool ok = analysis_ok.count(r) ? analysis_ok[r] : false;
        req[r] = ok;
        if (!ok) required_failed = true;
    }
    j["required"] = req;

    result.exit_code = any_violation ? 2 : (required_failed ? 1 : 0);
    j["exit_code"] = result.exit_code;
    return result;
}

CsvRoundTrip revalidate_csv(const std::string& csv_text, double slack) {
    CsvRoundTrip out;
    std::istringstream in(csv_text);
    std::string line;
    if (!std::getline(in, line)) return out;
    if (line != "n_or_t,tv,v1_norm,v2_norm,envelope_tv,envelope_v1") return out;
    out.pass = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<double, 6> vals{};
        std::size_t pos = 0;
        for (int c = 0; c < 6; ++c) {
            std::size_t next = line.find(',', pos);
            std::string cell = line.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
            vals[static_cast<std::size_t>(c)] = std::strtod(cell.c_str(), nullptr);
            pos = (next == std::string::npos) ? line.size() : next + 1;
        }
        ++out.rows;
        double rt = vals[1] / vals[4];  // tv vs envelope_tv
        double rv = vals[2] / vals[5];  // v1 vs envelope_v1
        out.worst_ratio = std::max({out.worst_ratio, rt, rv});
    }
    out.pass = out.worst_ratio <= 1.0 + slack;
    return out;
}

}  // namespace harris
