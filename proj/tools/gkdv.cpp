// gkdv: solitary waves of u_t = d/dx(-u_xx + f(u)), branch diagnostics, reduced
// modulation dynamics and full PDE experiments. See README.md for the exit-code table.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gkdv/acceptance.hpp"
#include "gkdv/errors.hpp"
#include "gkdv/evolution.hpp"
#include "gkdv/io.hpp"
#include "gkdv/linearization.hpp"
#include "gkdv/modulation.hpp"
#include "gkdv/nonlinearity.hpp"
#include "gkdv/reduced.hpp"
#include "gkdv/soliton.hpp"
#include "gkdv/wave_family.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gkdv;

namespace {

constexpr int kOk = 0;
constexpr int kNoWave = 2;
constexpr int kNumerical = 3;
constexpr int kUsage = 64;

struct Run {
    json config;
    fs::path out_dir;
    std::vector<fs::path> files;
    std::vector<StageTiming> timings;
    std::chrono::steady_clock::time_point stage_start = std::chrono::steady_clock::now();

    void stage_done(const std::string& name) {
        auto now = std::chrono::steady_clock::now();
        timings.push_back({name, std::chrono::duration<double>(now - stage_start).count()});
        stage_start = now;
    }
    void csv(const std::string& name, const std::vector<std::string>& header,
             const std::vector<std::vector<double>>& rows) {
        fs::path p = out_dir / name;
        write_csv(p, header, rows);
        files.push_back(p);
    }
    void jsn(const std::string& name, const json& j) {
        fs::path p = out_dir / name;
        write_json(p, j);
        files.push_back(p);
    }
    void finish() {
        write_manifest(out_dir, config, files, timings);
        std::cout << "wrote " << files.size() << " artifact(s) + manifest to " << out_dir.string()
                  << " (config " << config_hash(config) << ")\n";
    }
    void cleanup() {
        for (const auto& f : files) {
            std::error_code ec;
            fs::remove(f, ec);
        }
    }
};

fs::path resolve_out(const std::string& flag_out) {
    if (const char* env = std::getenv("GKDV_OUT")) return fs::path(env);
    return fs::path(flag_out);
}

// JSON config file values seed the flags; explicitly passed flags win.
void apply_config_file(CLI::App& app, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    json j;
    in >> j;
    for (auto it = j.begin(); it != j.end(); ++it) {
        auto* opt = app.get_option_no_throw("--" + it.key());
        if (!opt) throw CLI::ValidationError("--config", "unknown key '" + it.key() + "'");
        if (opt->count() > 0) continue;
        std::string v = it.value().is_string() ? it.value().get<std::string>()
                                               : it.value().dump();
        opt->add_result(v);
        opt->run_callback();
    }
}

json frame_json(const LinearizationFrame& fr) {
    return {{"c", fr.c},
            {"mu", fr.mu},
            {"lambda", fr.lambda},
            {"Lambda_bound", fr.Lambda},
            {"dN_dc", fr.Np},
            {"dI_dc", fr.Ip},
            {"chain_residual_e2", fr.chain_residual_e2},
            {"chain_residual_e3", fr.chain_residual_e3}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gkdv: generalized KdV soliton laboratory"};
    app.require_subcommand(1);

    std::string nl_spec = "kdv", out = "out", config_file, bracket = "0.02,0.06";
    double c = 1.0, L = 0.0, mu = 0.0, kmax = 10.0;
    double cmin = 0.5, cmax = 2.0;
    double eta_max = 0.0, eta0 = 0.0, zeta0 = 1e-4, C6 = 0.0, T = 10.0, dt = 0.0;
    double Ldom = 0.0, x0 = 0.0, lambda_prime = 0.0, E1 = 0.0;
    int n = 4001, samples = 33, ndom = 8192, kpts = 1000;
    bool do_experiment = false, normal_form = false;
    std::string suite = "full";

    auto add_common = [&](CLI::App* s) {
        s->add_option("--nl", nl_spec, "nonlinearity: kdv | power:p | minus:A,p,B,q | plus:...");
        s->add_option("--out", out, "output directory (env GKDV_OUT overrides)");
        s->add_option("--config", config_file, "JSON config; flags override its fields");
    };

    auto* s_sol = app.add_subcommand("soliton", "solitary-wave profile at one speed");
    add_common(s_sol);
    s_sol->add_option("--c", c, "wave speed");
    s_sol->add_option("--L", L, "half-width of the profile grid (0: automatic)");
    s_sol->add_option("--n", n, "grid points (forced odd)");

    auto* s_cur = app.add_subcommand("curve", "momentum curve c -> (E, N, I) and derivatives");
    add_common(s_cur);
    s_cur->add_option("--cmin", cmin, "lower speed");
    s_cur->add_option("--cmax", cmax, "upper speed");
    s_cur->add_option("--samples", samples, "curve samples");

    auto* s_cri = app.add_subcommand("critical", "critical speed c* where dN/dc = 0");
    add_common(s_cri);
    s_cri->add_option("--bracket", bracket, "speed bracket lo,hi");

    auto* s_spe = app.add_subcommand("spectrum", "linearization frame and essential spectrum");
    add_common(s_spe);
    s_spe->add_option("--c", c, "wave speed");
    s_spe->add_option("--mu", mu, "exponential weight (0: 0.3 sqrt(c))");
    s_spe->add_option("--kmax", kmax, "wavenumber range for the continuous spectrum");
    s_spe->add_option("--kpts", kpts, "wavenumber samples");

    auto* s_red = app.add_subcommand("reduced", "reduced (eta, zeta) dynamics near c*");
    add_common(s_red);
    s_red->add_option("--bracket", bracket, "speed bracket for c*");
    s_red->add_option("--eta-max", eta_max, "escape threshold (0: 0.05 c*)");
    s_red->add_option("--eta0", eta0, "initial eta (0: eta_max/50)");
    s_red->add_option("--zeta0", zeta0, "initial zeta");
    s_red->add_option("--C6", C6, "remainder constant (0: drop remainders)");
    s_red->add_option("--T", T, "time horizon");
    s_red->add_option("--dt", dt, "step (0: automatic)");
    s_red->add_flag("--normal-form", normal_form, "also integrate x' = lambda'/2 x^2 + E1");
    s_red->add_option("--x0", x0, "normal-form initial value (default eta0)");
    s_red->add_option("--lambda-prime", lambda_prime, "override fitted lambda'");
    s_red->add_option("--E1", E1, "normal-form drift term");

    auto* s_evo = app.add_subcommand("evolve", "periodic pseudo-spectral evolution");
    add_common(s_evo);
    s_evo->add_option("--c", c, "speed of the initial soliton");
    s_evo->add_option("--T", T, "time horizon");
    s_evo->add_option("--dt", dt, "step (0: CFL-limited)");
    s_evo->add_option("--Ldom", Ldom, "domain half-width (0: 4x profile grid)");
    s_evo->add_option("--ndom", ndom, "Fourier modes");
    s_evo->add_flag("--experiment", do_experiment,
                    "run the critical-soliton instability experiment instead");
    s_evo->add_option("--bracket", bracket, "speed bracket for c* (with --experiment)");
    s_evo->add_option("--zeta0", zeta0, "Jordan-mode seed (with --experiment)");

    auto* s_ver = app.add_subcommand("verify", "acceptance suite");
    s_ver->add_option("--suite", suite, "fast | full");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int r = app.exit(e);
        return r == 0 ? 0 : kUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    Run run;
    try {
        if (!config_file.empty()) apply_config_file(*sub, config_file);

        if (sub == s_ver) {
            auto results = run_acceptance(suite == "fast");
            bool all = true;
            for (const auto& r : results) {
                std::printf("[%s] %2d %-28s %s\n", r.pass ? "PASS" : "FAIL", r.id,
                            r.name.c_str(), r.detail.c_str());
                all = all && r.pass;
            }
            return all ? kOk : 1;
        }

        run.out_dir = resolve_out(out);
        Nonlinearity nl = Nonlinearity::parse(nl_spec);
        run.config = {{"subcommand", sub->get_name()}, {"nl", nl.to_json()}};

        if (sub == s_sol) {
            run.config["c"] = c;
            run.config["L"] = L;
            run.config["n"] = n;
            Grid g = L > 0 ? Grid::make(L, n) : Grid::default_for(c, n);
            auto p = build_profile(nl, c, g);
            run.stage_done("profile");
            auto fn = functionals(p, nl);
            std::vector<std::vector<double>> rows(g.n);
            for (int i = 0; i < g.n; ++i) rows[i] = {g.x[i], p.phi[i], p.dphi[i]};
            run.csv("profile.csv", {"x", "phi", "dphi"}, rows);
            run.jsn("summary.json", {{"c", c},
                                     {"amplitude", p.xi},
                                     {"E", fn.E},
                                     {"N", fn.N},
                                     {"I", fn.I},
                                     {"L", g.L},
                                     {"n", g.n}});
        } else if (sub == s_cur) {
            run.config["cmin"] = cmin;
            run.config["cmax"] = cmax;
            run.config["samples"] = samples;
            auto pts = momentum_curve(nl, cmin, cmax, samples);
            run.stage_done("curve");
            std::vector<std::vector<double>> rows;
            for (const auto& b : pts)
                rows.push_back({b.c, b.E, b.N, b.I, b.dN_dc, b.dI_dc, b.d2N_dc2});
            run.csv("curve.csv", {"c", "E", "N", "I", "dNdc", "dIdc", "d2Ndc2"}, rows);
        } else if (sub == s_cri) {
            run.config["bracket"] = bracket;
            double lo, hi;
            if (std::sscanf(bracket.c_str(), "%lf,%lf", &lo, &hi) != 2)
                throw std::invalid_argument("--bracket expects lo,hi");
            auto rep = critical_speed(nl, lo, hi);
            run.stage_done("critical");
            run.jsn("critical.json", {{"c_star", rep.c_star},
                                      {"dN_dc", rep.dN_dc},
                                      {"d2N_dc2", rep.d2N_dc2},
                                      {"dI_dc", rep.dI_dc},
                                      {"nondegenerate", rep.nondegenerate}});
        } else if (sub == s_spe) {
            run.config["c"] = c;
            run.config["mu"] = mu;
            run.config["kmax"] = kmax;
            run.config["kpts"] = kpts;
            double m = mu > 0 ? mu : default_mu(c);
            auto fr = build_frame(nl, c, Grid::default_for(c), m);
            run.stage_done("frame");
            auto ess = essential_spectrum(c, m, kpts, kmax);
            std::vector<std::vector<double>> rows;
            double kstep = 2.0 * kmax / (kpts - 1);
            for (int j = 0; j < kpts; ++j)
                rows.push_back({-kmax + j * kstep, ess[j].real(), ess[j].imag()});
            run.csv("spectrum.csv", {"k", "re", "im"}, rows);
            run.jsn("frame.json", frame_json(fr));
        } else if (sub == s_red) {
            run.config["bracket"] = bracket;
            run.config["zeta0"] = zeta0;
            run.config["C6"] = C6;
            run.config["T"] = T;
            double lo, hi;
            if (std::sscanf(bracket.c_str(), "%lf,%lf", &lo, &hi) != 2)
                throw std::invalid_argument("--bracket expects lo,hi");
            auto rep = critical_speed(nl, lo, hi);
            run.stage_done("critical");
            double em = eta_max > 0 ? eta_max : 0.05 * rep.c_star;
            double e0 = eta0 > 0 ? eta0 : em / 50.0;
            run.config["eta_max"] = em;
            run.config["eta0"] = e0;
            auto table = build_lambda_table(nl, rep.c_star, em);
            run.stage_done("lambda_table");
            RemainderModel rm;
            rm.bounded = C6 > 0;
            rm.C6 = C6;
            auto traj = integrate_reduced(table, e0, zeta0, rm, T, dt);
            run.stage_done("integrate");
            std::vector<std::vector<double>> rows;
            for (const auto& st : traj.states) rows.push_back({st.t, st.eta, st.zeta});
            run.csv("reduced.csv", {"t", "eta", "zeta"}, rows);
            json summary = {{"c_star", rep.c_star},
                            {"dir", table.dir},
                            {"lambda_prime", table.lambda_prime},
                            {"escaped", traj.escaped},
                            {"t_escape", traj.t_escape}};
            if (normal_form) {
                NormalFormParams par{lambda_prime != 0 ? lambda_prime : table.lambda_prime, E1};
                double xi0 = x0 != 0 ? x0 : e0;
                double nf_dt = dt > 0 ? dt : 1e-3 / std::max(std::abs(par.lambda_prime * em), 1e-12);
                auto nf = normal_form_flow(par, xi0, T, nf_dt);
                std::vector<std::vector<double>> nrows;
                for (std::size_t i = 0; i < nf.t.size(); ++i) nrows.push_back({nf.t[i], nf.x[i]});
                run.csv("normal_form.csv", {"t", "x"}, nrows);
                summary["lambda_prime_used"] = par.lambda_prime;
                summary["E1"] = E1;
            }
            run.jsn("summary.json", summary);
        } else if (sub == s_evo) {
            run.config["T"] = T;
            run.config["dt"] = dt;
            run.config["ndom"] = ndom;
            if (do_experiment) {
                run.config["bracket"] = bracket;
                run.config["zeta0"] = zeta0;
                double lo, hi;
                if (std::sscanf(bracket.c_str(), "%lf,%lf", &lo, &hi) != 2)
                    throw std::invalid_argument("--bracket expects lo,hi");
                auto rep = critical_speed(nl, lo, hi);
                run.stage_done("critical");
                ExperimentConfig cfg;
                cfg.zeta0 = zeta0;
                cfg.n_dom = ndom;
                if (T > 0) cfg.T = T;
                if (dt > 0) cfg.dt = dt;
                auto ex = instability_experiment(nl, rep.c_star, cfg);
                run.stage_done("experiment");
                std::vector<std::vector<double>> rows;
                for (const auto& p : ex.track.points)
                    rows.push_back({p.t, p.xi, p.eta, p.zeta, p.ups_l2mu, p.ups_h1mu, p.orbdist,
                                    p.ledger.E, p.ledger.N, p.ledger.I});
                run.csv("track.csv",
                        {"t", "xi", "eta", "zeta", "ups_L2mu", "ups_H1mu", "orbdist", "E", "N",
                         "I"},
                        rows);
                const auto& v = ex.verdict;
                run.jsn("verdict.json", {{"zeta0_used", v.zeta0_used},
                                         {"monotone", v.monotone},
                                         {"escaped", v.escaped},
                                         {"t_escape", v.t_escape},
                                         {"t_escape_reduced", v.t_escape_reduced},
                                         {"E1_fit", v.E1_fit},
                                         {"lambda_prime_fit", v.lambda_prime_fit},
                                         {"lambda_prime_table", v.lambda_prime_table},
                                         {"normal_form_rel_err", v.normal_form_rel_err},
                                         {"kappa_fit", v.kappa_fit},
                                         {"epsilon", v.epsilon},
                                         {"final_orbdist", v.final_orbdist},
                                         {"C6_fit", v.C6_fit},
                                         {"K_fit", v.K_fit}});
            } else {
                run.config["c"] = c;
                run.config["Ldom"] = Ldom;
                auto p = build_profile(nl, c);
                double Ld = Ldom > 0 ? Ldom : 4.0 * p.grid.L;
                Domain dom = Domain::make(Ld, ndom);
                auto u0 = embed_on_domain(dom, p.grid, p.phi, false);
                FieldState st = make_state(dom, u0, nl);
                Ledger l0 = st.ledger;
                double step = dt;
                if (step <= 0) {
                    double maxfp = 0.0;
                    for (double u : u0) maxfp = std::max(maxfp, std::abs(nl.eval(u, 1)));
                    double kcut = M_PI * (ndom / 3) / Ld;
                    step = std::min(1e-3, 0.5 * 2.8 / (kcut * std::max(maxfp, 1e-12)));
                }
                evolve(nl, st, T, step);
                run.stage_done("evolve");
                std::vector<std::vector<double>> rows(dom.n);
                for (int i = 0; i < dom.n; ++i) rows[i] = {dom.x[i], st.u[i]};
                run.csv("field.csv", {"x", "u"}, rows);
                run.jsn("summary.json",
                        {{"T", st.t},
                         {"dt", step},
                         {"E0", l0.E},
                         {"N0", l0.N},
                         {"I0", l0.I},
                         {"E", st.ledger.E},
                         {"N", st.ledger.N},
                         {"I", st.ledger.I}});
            }
        }
        run.finish();
        return kOk;
    } catch (const NoSolitaryWave& e) {
        run.cleanup();
        std::cerr << "no solitary wave: " << e.what() << "\n";
        return kNoWave;
    } catch (const CLI::Error& e) {
        run.cleanup();
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        run.cleanup();
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        run.cleanup();
        std::cerr << "error: " << e.what() << "\n";
        return kNumerical;
    }
}
