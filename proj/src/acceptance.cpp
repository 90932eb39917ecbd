#include "gkdv/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "gkdv/errors.hpp"
#include "gkdv/evolution.hpp"
#include "gkdv/linearization.hpp"
#include "gkdv/modulation.hpp"
#include "gkdv/nonlinearity.hpp"
#include "gkdv/reduced.hpp"
#include "gkdv/soliton.hpp"
#include "gkdv/wave_family.hpp"

namespace gkdv {

namespace {

double now_s() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

struct Ctx {
    Nonlinearity minus18 = Nonlinearity::minus_family(1, 6, 1, 8);
    double c_star = 0.0;
    CriticalReport crit{};
    bool have_crit = false;
    ExperimentResult exp;
    bool have_exp = false;

    const CriticalReport& critical() {
        if (!have_crit) {
            crit = critical_speed(minus18, 0.005, 0.03);
            c_star = crit.c_star;
            have_crit = true;
        }
        return crit;
    }
    const ExperimentResult& experiment() {
        if (!have_exp) {
            critical();
            exp = instability_experiment(minus18, c_star);
            have_exp = true;
        }
        return exp;
    }
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// ---- criterion bodies ----

CriterionResult c1_kdv_closed_form(Ctx&) {
    double t0 = now_s();
    auto nl = Nonlinearity::kdv();
    auto grid = Grid::make(20.0, 4001);
    auto p = build_profile(nl, 1.0, grid);
    double worst = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        double ch = std::cosh(0.5 * grid.x[i]);
        double exact = 0.5 / (ch * ch);
        worst = std::max(worst, std::abs(p.phi[i] - exact) / exact);
    }
    double dt = now_s() - t0;
    bool pass = worst < 1e-8 && dt < 1.0;
    return {1, "kdv closed form",
            pass, "max rel err " + fmt(worst) + " (tol 1e-8), " + fmt(dt) + " s (< 1 s)"};
}

CriterionResult c2_scaling_law(Ctx&) {
    double worst = 0.0;
    for (double pexp : {2.0, 3.0, 4.0, 6.0}) {
        auto nl = Nonlinearity::power(pexp);
        std::vector<double> lc, ln;
        for (double c : {0.5, 0.7937005259840998, 1.2599210498948732, 2.0}) {
            auto prof = build_profile(nl, c);
            lc.push_back(std::log(c));
            ln.push_back(std::log(functionals(prof, nl).N));
        }
        double n = lc.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < lc.size(); ++i) {
            sx += lc[i];
            sy += ln[i];
            sxx += lc[i] * lc[i];
            sxy += lc[i] * ln[i];
        }
        double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        double expect = (5.0 - pexp) / (2.0 * (pexp - 1.0));
        worst = std::max(worst, std::abs(slope - expect));
    }
    return {2, "momentum power-law slope", worst < 1e-4,
            "max |slope error| " + fmt(worst) + " (tol 1e-4)"};
}

CriterionResult c3_jordan_chain(Ctx&) {
    auto nl = Nonlinearity::kdv();
    auto measure = [&](int n, double& r1, double& r2) {
        auto grid = Grid::default_for(1.0, n);
        auto p = build_profile(nl, 1.0, grid);
        std::vector<double> e1(grid.n);
        for (int i = 0; i < grid.n; ++i) e1[i] = -p.dphi[i];
        auto He1 = apply_H(nl, p, e1);
        double num = 0, den = 0;
        for (int i = 5; i < grid.n - 5; ++i) {
            num += He1[i] * He1[i];
            den += e1[i] * e1[i];
        }
        r1 = std::sqrt(num / den);
        std::vector<double> mphi(grid.n);
        for (int i = 0; i < grid.n; ++i) mphi[i] = -p.phi[i];
        auto e2 = solve_H(nl, p, mphi);
        auto dHe2 = derivative(grid, apply_H(nl, p, e2), 1);
        num = 0;
        for (int i = 5; i < grid.n - 5; ++i) {
            double r = dHe2[i] - e1[i];
            num += r * r;
        }
        r2 = std::sqrt(num / den);
    };
    double r1a, r2a, r1b, r2b;
    measure(2001, r1a, r2a);
    measure(4001, r1b, r2b);  // default resolution
    double ratio1 = r1a / r1b, ratio2 = r2a / r2b;
    bool pass = r1b < 1e-6 && r2b < 1e-4 && ratio1 > 8.0 && ratio1 < 32.0 && ratio2 > 8.0 &&
                ratio2 < 32.0;
    return {3, "jordan chain residuals", pass,
            "|He1|/|e1| " + fmt(r1b) + " (tol 1e-6), |dHe2-e1|/|e1| " + fmt(r2b) +
                " (tol 1e-4), h->h/2 ratios " + fmt(ratio1) + ", " + fmt(ratio2) + " (~16)"};
}

CriterionResult c4_critical_speed(Ctx& ctx) {
    const auto& rep = ctx.critical();
    double gold = minimize_momentum(ctx.minus18, 0.005, 0.03);
    double rel = std::abs(rep.c_star - gold) / rep.c_star;
    bool pass = rel < 1e-6 && rep.nondegenerate;
    return {4, "critical speed consistency", pass,
            "brent " + fmt(rep.c_star) + " vs golden " + fmt(gold) + ", rel diff " + fmt(rel) +
                " (tol 1e-6), nondegenerate " + (rep.nondegenerate ? "yes" : "no")};
}

CriterionResult c5_lambda_diagnostics(Ctx& ctx) {
    const auto& rep = ctx.critical();
    const auto& nl = ctx.minus18;
    double cst = rep.c_star;
    auto fr0 = build_frame(nl, cst);
    bool pass = std::abs(fr0.lambda) < 1e-6 * fr0.Lambda;
    std::ostringstream det;
    det << "|lambda(c*)|/Lambda " << fmt(std::abs(fr0.lambda) / fr0.Lambda) << " (tol 1e-6)";
    bool signs = true, bound = true;
    for (int k = 1; k <= 5; ++k) {
        for (int s : {-1, +1}) {
            double c = cst * (1.0 + s * 0.01 * k);
            auto fr = build_frame(nl, c);
            double np = dN_dc(nl, c);
            if (fr.lambda * np >= 0.0) signs = false;
            if (std::abs(fr.lambda) > fr.Lambda) bound = false;
        }
    }
    double d = 1e-3 * cst;
    double lp = (build_frame(nl, cst + d).lambda - build_frame(nl, cst - d).lambda) / (2 * d);
    double lp_formula = -2.0 * rep.d2N_dc2 / (rep.dI_dc * rep.dI_dc);
    double taylor_err = std::abs(lp - lp_formula) / std::abs(lp_formula);
    det << ", sign(lambda)=-sign(N') " << (signs ? "yes" : "NO") << ", |lambda|<=Lambda "
        << (bound ? "yes" : "NO") << ", taylor slope rel err " << fmt(taylor_err) << " (tol 0.05)";
    pass = pass && signs && bound && taylor_err < 0.05;
    return {5, "lambda diagnostics", pass, det.str()};
}

CriterionResult c6_eigen_certificate(Ctx& ctx) {
    const auto& rep = ctx.critical();
    auto fr = build_frame(ctx.minus18, rep.c_star * 1.01);
    double r = eigen_residual(ctx.minus18, fr);
    return {6, "eigenvector certificate", r < 1e-4,
            "eigen residual " + fmt(r) + " at c*+0.01c* (tol 1e-4)"};
}

CriterionResult c7_fredholm(Ctx& ctx) {
    const auto& rep = ctx.critical();
    const auto& nl = ctx.minus18;
    auto p = build_profile(nl, rep.c_star);
    std::vector<double> e1(p.grid.n);
    for (int i = 0; i < p.grid.n; ++i) e1[i] = -p.dphi[i];
    bool flagged = false;
    try {
        solve_H(nl, p, e1);
    } catch (const FredholmViolation&) {
        flagged = true;
    }
    std::vector<double> mphi(p.grid.n);
    for (int i = 0; i < p.grid.n; ++i) mphi[i] = -p.phi[i];
    auto e2 = solve_H(nl, p, mphi);
    auto theta = cumint_right(p.grid, e2);
    SolveOptions opt;
    opt.left_bc = LeftBC::constant;
    opt.left_value = theta[0] / p.c;
    auto e3 = solve_H(nl, p, theta, opt);
    // Right-tail bound |e3| <= C (1+x) e^{-sqrt(c) x}, C fitted on the far tail
    // [0.4L, 0.5L] where the exponential rate is the content (the near field carries a
    // higher polynomial degree absorbed into C; exponential growth would overwhelm the
    // factor-5 slack over the e^{sqrt(c) L/2} span of the checked window).
    double sc = std::sqrt(p.c);
    double emax = 0.0;
    for (double v : e3) emax = std::max(emax, std::abs(v));
    double C = 0.0;
    for (int i = 0; i < p.grid.n; ++i) {
        double x = p.grid.x[i];
        if (x >= 0.4 * p.grid.L && x <= 0.5 * p.grid.L)
            C = std::max(C, std::abs(e3[i]) / ((1.0 + x) * std::exp(-sc * x)));
    }
    bool tail_ok = C > 0.0;
    for (int i = 0; i < p.grid.n - 5; ++i) {
        double x = p.grid.x[i];
        if (x < 0.4 * p.grid.L) continue;
        double env = 5.0 * C * (1.0 + x) * std::exp(-sc * x);
        if (env < 1e-12 * emax) continue;  // below the truncation floor
        if (std::abs(e3[i]) > env) tail_ok = false;
    }
    bool pass = flagged && tail_ok;
    return {7, "fredholm dichotomy", pass,
            std::string("R=e1 flagged ") + (flagged ? "yes" : "NO") + ", e3 right-tail bound " +
                (tail_ok ? "holds" : "VIOLATED")};
}

CriterionResult c8_essential_spectrum(Ctx&) {
    bool pass = true;
    for (double mu : {0.1, 0.3, 0.7}) {
        auto vals = essential_spectrum(1.0, mu, 1000, 20.0);
        for (auto z : vals)
            if (z.real() >= 0.0) pass = false;
    }
    auto vals0 = essential_spectrum(1.0, 0.0, 1000, 20.0);
    double worst = 0.0;
    for (auto z : vals0) worst = std::max(worst, std::abs(z.real()));
    pass = pass && worst < 1e-12;
    return {8, "essential spectrum", pass,
            "Re<0 for 0<mu<sqrt(c): " + std::string(pass ? "yes" : "NO") +
                ", max |Re| at mu=0: " + fmt(worst)};
}

CriterionResult c9_conservation(Ctx&) {
    double t0 = now_s();
    auto nl = Nonlinearity::kdv();
    auto p = build_profile(nl, 1.0);
    Domain dom = Domain::make(4.0 * p.grid.L, 8192);
    auto u0 = embed_on_domain(dom, p.grid, p.phi, false);
    FieldState s = make_state(dom, u0, nl);
    Ledger l0 = s.ledger;
    evolve(nl, s, 10.0, 1e-3);
    Ledger l1 = s.ledger;
    double dE = std::abs((l1.E - l0.E) / l0.E);
    double dN = std::abs((l1.N - l0.N) / l0.N);
    double dI = std::abs((l1.I - l0.I) / l0.I);
    auto target = spectral_shift(dom, u0, 10.0);
    double err = 0.0;
    for (int i = 0; i < dom.n; ++i) err += (s.u[i] - target[i]) * (s.u[i] - target[i]);
    err = std::sqrt(err * dom.dx);
    double wall = now_s() - t0;
    bool pass = dE < 1e-8 && dN < 1e-8 && dI < 1e-8 && err < 1e-4 && wall < 60.0;
    return {9, "conservation and translation", pass,
            "drift E " + fmt(dE) + " N " + fmt(dN) + " I " + fmt(dI) +
                " (tol 1e-8), translation err " + fmt(err) + " (tol 1e-4), " + fmt(wall) +
                " s (< 60 s)"};
}

CriterionResult c10_main_theorem(Ctx& ctx) {
    const auto& ex = ctx.experiment();
    const auto& v = ex.verdict;
    bool unstable_ok = v.monotone && v.escaped && v.final_orbdist > v.epsilon;
    double horizon = v.t_escape > 0 ? v.t_escape : 50.0;
    auto ctl = stable_control_experiment(Nonlinearity::power(2.0), 1.0, 1e-3, 1e-4, horizon);
    bool stable_ok = ctl.max_ratio < 10.0;
    std::ostringstream det;
    det << "monotone " << (v.monotone ? "yes" : "NO") << ", escaped "
        << (v.escaped ? "yes" : "NO") << " at t " << fmt(v.t_escape) << ", orbdist "
        << fmt(v.final_orbdist) << " > eps " << fmt(v.epsilon) << ": "
        << (v.final_orbdist > v.epsilon ? "yes" : "NO") << "; stable control max ratio "
        << fmt(ctl.max_ratio) << " (< 10)";
    return {10, "main theorem at desk scale", unstable_ok && stable_ok, det.str()};
}

CriterionResult c11_normal_form(Ctx& ctx) {
    const auto& v = ctx.experiment().verdict;
    double tdiff = std::abs(v.t_escape - v.t_escape_reduced) /
                   std::max(v.t_escape_reduced, 1e-300);
    bool pass = v.normal_form_rel_err < 0.25 && tdiff < 0.25 && v.t_escape > 0 &&
                v.t_escape_reduced > 0;
    return {11, "normal-form agreement", pass,
            "fit rel residual " + fmt(v.normal_form_rel_err) + " (tol 0.25), escape " +
                fmt(v.t_escape) + " vs reduced " + fmt(v.t_escape_reduced) + ", rel diff " +
                fmt(tdiff) + " (tol 0.25)"};
}

CriterionResult c12_reduced_exactness(Ctx& ctx) {
    const auto& rep = ctx.critical();
    double eta1 = 0.05 * rep.c_star;
    auto table = build_lambda_table(ctx.minus18, rep.c_star, eta1, 64);
    double eta0 = eta1 / 2.0;
    double zeta0 = 0.5 * table.Lam(eta0);
    auto traj = integrate_reduced(table, eta0, zeta0, RemainderModel{}, 1e4);
    double inv0 = zeta0 - table.Lam(eta0);
    double worst = 0.0, zmax = zeta0;
    bool barrier = true;
    for (const auto& st : traj.states) {
        worst = std::max(worst, std::abs((st.zeta - table.Lam(st.eta)) - inv0));
        zmax = std::max(zmax, std::abs(st.zeta));
        for (double C6 : {0.0, 0.5, 1.0})
            if (!(st.zeta < 3.0 * std::exp(2.0 * C6 * st.eta) * table.Lam(st.eta)))
                barrier = false;
    }
    double drift = worst / zmax;
    bool pass = drift < 1e-8 && barrier;
    return {12, "reduced-system exactness", pass,
            "first-integral rel drift " + fmt(drift) + " (tol 1e-8), barrier " +
                (barrier ? "holds" : "VIOLATED")};
}

}  // namespace

std::vector<CriterionResult> run_acceptance(bool fast) {
    Ctx ctx;
    using Fn = std::function<CriterionResult(Ctx&)>;
    struct Item {
        Fn fn;
        bool slow;
        int id;
        const char* name;
    };
    std::vector<Item> items = {
        {c1_kdv_closed_form, false, 1, "kdv closed form"},
        {c2_scaling_law, false, 2, "momentum power-law slope"},
        {c3_jordan_chain, false, 3, "jordan chain residuals"},
        {c4_critical_speed, false, 4, "critical speed consistency"},
        {c5_lambda_diagnostics, false, 5, "lambda diagnostics"},
        {c6_eigen_certificate, false, 6, "eigenvector certificate"},
        {c7_fredholm, false, 7, "fredholm dichotomy"},
        {c8_essential_spectrum, false, 8, "essential spectrum"},
        {c9_conservation, true, 9, "conservation and translation"},
        {c10_main_theorem, true, 10, "main theorem at desk scale"},
        {c11_normal_form, true, 11, "normal-form agreement"},
        {c12_reduced_exactness, false, 12, "reduced-system exactness"},
    };
    std::vector<CriterionResult> out;
    for (auto& it : items) {
        if (fast && it.slow) {
            out.push_back({it.id, it.name, true, "skipped (fast suite)"});
            continue;
        }
        try {
            out.push_back(it.fn(ctx));
        } catch (const std::exception& e) {
            out.push_back({it.id, it.name, false, std::string("exception: ") + e.what()});
        }
    }
    return out;
}

}  // namespace gkdv
