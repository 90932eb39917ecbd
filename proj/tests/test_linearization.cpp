#include <doctest.h>

#include <cmath>
#include <vector>

#include "gkdv/errors.hpp"
#include "gkdv/grid.hpp"
#include "gkdv/linearization.hpp"
#include "gkdv/soliton.hpp"
#include "gkdv/wave_family.hpp"

using namespace gkdv;

namespace {

const Nonlinearity& minus18() {
    static auto nl = Nonlinearity::minus_family(1.0, 6.0, 1.0, 8.0);
    return nl;
}

double rel_norm(const Grid& g, const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> d(g.n);
    for (int i = 0; i < g.n; ++i) d[i] = a[i] - b[i];
    return norm_l2(g, d) / norm_l2(g, b);
}

}  // namespace

TEST_CASE("kdv frame satisfies the chain identities") {
    auto nl = Nonlinearity::kdv();
    auto fr = build_frame(nl, 1.0);
    const auto& g = fr.profile.grid;

    // H e1 = 0 with e1 = -phi'
    auto He1 = apply_H(nl, fr.profile, fr.e1);
    CHECK(norm_l2(g, He1) / norm_l2(g, fr.e1) < 1e-6);

    // e1 is -phi'
    std::vector<double> mdphi(g.n);
    for (int i = 0; i < g.n; ++i) mdphi[i] = -fr.profile.dphi[i];
    CHECK(rel_norm(g, fr.e1, mdphi) < 1e-12);

    // d/dx(H e2) = e1
    CHECK(fr.chain_residual_e2 < 1e-4);
    CHECK(fr.chain_residual_e3 < 1e-4);

    // N' and I' against the finite-difference family derivatives
    CHECK(fr.Np == doctest::Approx(dN_dc(nl, 1.0)).epsilon(1e-6));
    CHECK(fr.Ip == doctest::Approx(dI_dc(nl, 1.0)).epsilon(1e-6));

    // Theta runs from -I' on the left to 0 on the right
    CHECK(fr.theta[0] == doctest::Approx(-fr.Ip).epsilon(1e-8));
    CHECK(std::abs(fr.theta[g.n - 1]) < 1e-12 * std::abs(fr.Ip));
}

TEST_CASE("e2 matches the family derivative") {
    auto nl = Nonlinearity::kdv();
    auto fr = build_frame(nl, 1.0);
    const auto& g = fr.profile.grid;
    double d = 1e-4;
    auto pp = build_profile(nl, 1.0 + d, g);
    auto pm = build_profile(nl, 1.0 - d, g);
    std::vector<double> fd(g.n);
    for (int i = 0; i < g.n; ++i) fd[i] = (pp.phi[i] - pm.phi[i]) / (2.0 * d);
    CHECK(rel_norm(g, fr.e2, fd) < 1e-6);
}

TEST_CASE("lambda changes sign with N' across the critical speed") {
    double c_star = 0.01538738757081973;
    auto lo = build_frame(minus18(), 0.97 * c_star);
    auto hi = build_frame(minus18(), 1.03 * c_star);
    CHECK(lo.Np < 0.0);
    CHECK(hi.Np > 0.0);
    CHECK(lo.lambda > 0.0);   // growing mode below c* (unstable side)
    CHECK(hi.lambda < 0.0);
    CHECK(std::abs(lo.lambda) <= lo.Lambda);
    CHECK(std::abs(hi.lambda) <= hi.Lambda);
    CHECK(eigen_residual(minus18(), lo) < 1e-4);
    CHECK(eigen_residual(minus18(), hi) < 1e-4);
    // <phi, e3> stays near (I')^2 / 2 through the degenerate point
    double pairing = inner(lo.profile.grid, lo.profile.phi, lo.e3);
    CHECK(pairing == doctest::Approx(0.5 * lo.Ip * lo.Ip).epsilon(0.05));
}

TEST_CASE("projection is the identity on the chain and idempotent") {
    auto fr = build_frame(Nonlinearity::kdv(), 1.0);
    const auto& g = fr.profile.grid;
    for (const auto* e : {&fr.e1, &fr.e2, &fr.e3}) {
        auto [pv, rest] = project_discrete(fr, *e);
        CHECK(rel_norm(g, pv, *e) < 1e-8);
        CHECK(norm_l2(g, rest) / norm_l2(g, *e) < 1e-8);
    }
    // generic v: P(Pv) = Pv and the remainder has vanishing pairings
    std::vector<double> v(g.n);
    for (int i = 0; i < g.n; ++i) v[i] = std::exp(-0.1 * g.x[i] * g.x[i]) * (1.0 + g.x[i]);
    auto [pv, rest] = project_discrete(fr, v);
    auto [ppv, rest2] = project_discrete(fr, pv);
    CHECK(rel_norm(g, ppv, pv) < 1e-8);
    for (const auto* gg : {&fr.g1, &fr.g2, &fr.g3})
        CHECK(std::abs(inner(g, *gg, rest)) <
              1e-8 * norm_l2(g, *gg) * norm_l2(g, v));
}

TEST_CASE("solve_H enforces the Fredholm condition") {
    auto nl = Nonlinearity::kdv();
    auto p = build_profile(nl, 1.0);
    std::vector<double> e1(p.grid.n);
    for (int i = 0; i < p.grid.n; ++i) e1[i] = -p.dphi[i];
    CHECK_THROWS_AS(solve_H(nl, p, e1), FredholmViolation);

    // solvable right-hand side: -phi (the e2 equation), residual check
    std::vector<double> mphi(p.grid.n);
    for (int i = 0; i < p.grid.n; ++i) mphi[i] = -p.phi[i];
    auto u = solve_H(nl, p, mphi);
    auto Hu = apply_H(nl, p, u);
    CHECK(rel_norm(p.grid, Hu, mphi) < 1e-6);
    // uniqueness normalization <e1, u> = 0
    CHECK(std::abs(inner(p.grid, e1, u)) < 1e-8 * norm_l2(p.grid, e1) * norm_l2(p.grid, u));
}

TEST_CASE("essential spectrum curve matches the symbol") {
    double c = 1.0, mu = 0.5;
    auto spec = essential_spectrum(c, mu, 201, 10.0);
    CHECK(spec.size() == 201);
    double worst = 0.0;
    for (int j = 0; j < 201; ++j) {
        double k = -10.0 + 20.0 * j / 200.0;
        std::complex<double> m(mu, -k);
        auto exact = m * m * m - c * m;
        worst = std::max(worst, std::abs(spec[j] - exact));
    }
    CHECK(worst < 1e-12);
    // strictly stable for 0 < mu < sqrt(c): max Re at k = 0 is mu^3 - c mu < 0
    for (const auto& z : spec) CHECK(z.real() <= mu * mu * mu - c * mu + 1e-12);
    // mu = 0: purely imaginary
    for (const auto& z : essential_spectrum(c, 0.0, 101)) CHECK(std::abs(z.real()) < 1e-14);
}

TEST_CASE("grid mismatch is rejected") {
    auto nl = Nonlinearity::kdv();
    auto p = build_profile(nl, 1.0);
    std::vector<double> wrong(17, 0.0);
    CHECK_THROWS_AS(apply_H(nl, p, wrong), GridMismatch);
}
