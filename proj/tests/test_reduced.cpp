#include <doctest.h>

#include <cmath>

#include "gkdv/errors.hpp"
#include "gkdv/reduced.hpp"

using namespace gkdv;

namespace {

// synthetic table with lambda(eta) = a + b*eta
LambdaTable linear_table(double a, double b, double eta_max, int m = 33) {
    LambdaTable tb;
    tb.c_star = 1.0;
    tb.eta_max = eta_max;
    tb.dir = 1;
    for (int j = 0; j < m; ++j) {
        double e = eta_max * j / (m - 1);
        tb.eta.push_back(e);
        tb.lambda.push_back(a + b * e);
    }
    tb.Lambda.assign(m, 0.0);
    for (int j = 1; j < m; ++j)
        tb.Lambda[j] = tb.Lambda[j - 1] +
                       0.5 * (tb.lambda[j] + tb.lambda[j - 1]) * (tb.eta[j] - tb.eta[j - 1]);
    tb.lambda_prime = b;
    return tb;
}

}  // namespace

TEST_CASE("table interpolation reproduces the sampled function exactly") {
    auto tb = linear_table(0.2, 3.0, 1.0);
    for (double e : {0.0, 0.13, 0.5, 0.77, 1.0}) {
        CHECK(tb.lam(e) == doctest::Approx(0.2 + 3.0 * e).epsilon(1e-14));
        // antiderivative of a linear function is exact for the piecewise-quadratic Lam
        CHECK(tb.Lam(e) == doctest::Approx(0.2 * e + 1.5 * e * e).epsilon(1e-13));
    }
}

TEST_CASE("reduced flow with lambda = 0 is straight-line drift") {
    auto tb = linear_table(0.0, 0.0, 1.0);
    double eta0 = 0.1, zeta0 = 0.05;
    auto tr = integrate_reduced(tb, eta0, zeta0, RemainderModel{}, 100.0);
    CHECK(tr.escaped);
    CHECK(tr.t_escape == doctest::Approx((1.0 - eta0) / zeta0).epsilon(1e-8));
    for (const auto& s : tr.states) CHECK(s.zeta == doctest::Approx(zeta0).epsilon(1e-12));
}

TEST_CASE("constant lambda matches the closed form") {
    double lam = 0.8, eta0 = 0.05, zeta0 = 0.01;
    auto tb = linear_table(lam, 0.0, 2.0);
    auto tr = integrate_reduced(tb, eta0, zeta0, RemainderModel{}, 50.0);
    // zeta = zeta0 e^{lam t}, eta = eta0 + zeta0 (e^{lam t} - 1)/lam
    double t_exact = std::log(1.0 + lam * (2.0 - eta0) / zeta0) / lam;
    CHECK(tr.escaped);
    CHECK(tr.t_escape == doctest::Approx(t_exact).epsilon(1e-7));
    const auto& mid = tr.states[tr.states.size() / 2];
    CHECK(mid.zeta == doctest::Approx(zeta0 * std::exp(lam * mid.t)).epsilon(1e-7));
}

TEST_CASE("first integral zeta - Lambda(eta) is conserved") {
    auto tb = linear_table(0.05, 2.0, 1.0);
    double eta0 = 0.02, zeta0 = 0.004;
    auto tr = integrate_reduced(tb, eta0, zeta0, RemainderModel{}, 1e4);
    double inv0 = zeta0 - tb.Lam(eta0);
    double worst = 0.0, zmax = 0.0;
    for (const auto& s : tr.states) {
        worst = std::max(worst, std::abs(s.zeta - tb.Lam(s.eta) - inv0));
        zmax = std::max(zmax, std::abs(s.zeta));
    }
    CHECK(worst / zmax < 1e-7);
}

TEST_CASE("quadratic remainders shift the escape in the expected direction") {
    auto tb = linear_table(0.1, 1.0, 1.0);
    auto base = integrate_reduced(tb, 0.05, 0.01, RemainderModel{}, 500.0);
    RemainderModel push{true, 0.5, +1, +1};
    RemainderModel drag{true, 0.5, -1, -1};
    auto fast = integrate_reduced(tb, 0.05, 0.01, push, 500.0);
    auto slow = integrate_reduced(tb, 0.05, 0.01, drag, 500.0);
    REQUIRE(base.escaped);
    REQUIRE(fast.escaped);
    REQUIRE(slow.escaped);
    CHECK(fast.t_escape < base.t_escape);
    CHECK(slow.t_escape > base.t_escape);
}

TEST_CASE("normal form without drift has the algebraic blowup solution") {
    NormalFormParams par{2.0, 0.0};  // x' = x^2
    double x0 = 0.1;
    auto tr = normal_form_flow(par, x0, 5.0, 1e-4, 1e3);
    double worst = 0.0;
    for (std::size_t j = 0; j < tr.t.size(); ++j) {
        double exact = x0 / (1.0 - x0 * tr.t[j]);
        worst = std::max(worst, std::abs(tr.x[j] - exact) / exact);
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("blowup estimate matches the separable-equation time") {
    NormalFormParams par{2.0, 0.0};
    double x0 = 0.1;  // x' = x^2 blows up at t = 1/x0 = 10
    try {
        normal_form_flow(par, x0, 100.0, 1e-4, 1e6);
        CHECK(false);
    } catch (const BlowupDetected& b) {
        CHECK(b.t_estimate == doctest::Approx(10.0).epsilon(1e-3));
    }
}

TEST_CASE("fixed points of the saddle-node normal form") {
    // x' = x^2 + E1 (lambda' = 2)
    auto rep = classify_fixed_points(NormalFormParams{2.0, -0.25});
    CHECK(rep.x_minus == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(rep.x_plus == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rep.minus_stable);
    CHECK(!rep.plus_stable);
    CHECK(!rep.semi_stable);

    auto deg = classify_fixed_points(NormalFormParams{2.0, 0.0});
    CHECK(deg.semi_stable);
    CHECK(deg.x_minus == 0.0);
    CHECK(deg.x_plus == 0.0);

    CHECK_THROWS_AS(classify_fixed_points(NormalFormParams{2.0, 0.25}), NoFixedPoints);
}

TEST_CASE("unstable side of the degenerate branch") {
    auto nl = Nonlinearity::minus_family(1.0, 6.0, 1.0, 8.0);
    CHECK(unstable_direction(nl, 0.01538738757081973) == -1);
}
