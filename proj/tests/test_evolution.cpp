#include <doctest.h>

#include <cmath>
#include <vector>

#include "gkdv/errors.hpp"
#include "gkdv/evolution.hpp"
#include "gkdv/soliton.hpp"

using namespace gkdv;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double w = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) w = std::max(w, std::abs(a[i] - b[i]));
    return w;
}

}  // namespace

TEST_CASE("fft round trip and wavenumber layout") {
    Domain dom = Domain::make(10.0, 256);
    CHECK(dom.x[0] == doctest::Approx(-10.0));
    std::vector<double> u(dom.n);
    for (int i = 0; i < dom.n; ++i)
        u[i] = std::sin(0.3 * dom.x[i]) + 0.2 * std::cos(2.0 * dom.x[i]);
    auto v = fft_forward(dom, u);
    auto back = fft_backward(dom, v);
    CHECK(max_abs_diff(u, back) < 1e-13);
    auto k = domain_wavenumbers(dom);
    CHECK(k[0] == 0.0);
    CHECK(k[1] == doctest::Approx(std::acos(-1.0) / dom.L));
}

TEST_CASE("spectral shift is exact and invertible") {
    Domain dom = Domain::make(8.0, 128);
    std::vector<double> u(dom.n);
    for (int i = 0; i < dom.n; ++i) u[i] = std::exp(std::sin(std::acos(-1.0) * dom.x[i] / 8.0));
    // shift by one grid cell equals an index rotation
    auto s1 = spectral_shift(dom, u, dom.dx);
    double worst = 0.0;
    for (int i = 0; i < dom.n; ++i)
        worst = std::max(worst, std::abs(s1[i] - u[(i - 1 + dom.n) % dom.n]));
    CHECK(worst < 1e-12);
    // generic shift, then back
    auto fwd = spectral_shift(dom, u, 1.2345);
    auto rt = spectral_shift(dom, fwd, -1.2345);
    CHECK(max_abs_diff(u, rt) < 1e-12);
}

TEST_CASE("zero data stays zero") {
    Domain dom = Domain::make(10.0, 128);
    auto nl = Nonlinearity::kdv();
    FieldState s = make_state(dom, std::vector<double>(dom.n, 0.0), nl);
    evolve(nl, s, 1.0, 1e-2);
    for (double v : s.u) CHECK(v == 0.0);
}

TEST_CASE("soliton translates at its speed and conserves the invariants") {
    auto nl = Nonlinearity::kdv();
    const double c = 1.0;
    Domain dom = Domain::make(40.0, 1024);
    std::vector<double> u0(dom.n);
    for (int i = 0; i < dom.n; ++i) {
        double y = std::cosh(0.5 * std::sqrt(c) * dom.x[i]);
        u0[i] = 0.5 * c / (y * y);
    }
    FieldState s = make_state(dom, u0, nl);
    Ledger l0 = s.ledger;
    const double T = 5.0;
    evolve(nl, s, T, 1e-3);
    auto exact = spectral_shift(dom, u0, c * T);
    CHECK(max_abs_diff(s.u, exact) < 1e-7);
    Ledger l1 = conserved(nl, s);
    CHECK(std::abs(l1.E - l0.E) < 1e-10 * std::abs(l0.E));
    CHECK(std::abs(l1.N - l0.N) < 1e-10 * l0.N);
    CHECK(std::abs(l1.I - l0.I) < 1e-10 * l0.I);
}

TEST_CASE("evolution commutes with translation") {
    auto nl = Nonlinearity::kdv();
    Domain dom = Domain::make(20.0, 512);
    std::vector<double> u0(dom.n);
    for (int i = 0; i < dom.n; ++i)
        u0[i] = 0.3 * std::sin(std::acos(-1.0) * dom.x[i] / 20.0) +
                0.1 * std::cos(std::acos(-1.0) * dom.x[i] / 5.0);
    EvolveOptions opt;
    opt.seam_check_every = 0;  // periodic data fills the box by design
    const double shift = 3.0, T = 0.5, dt = 5e-4;
    FieldState a = make_state(dom, u0, nl);
    evolve(nl, a, T, dt, opt);
    auto a_shifted = spectral_shift(dom, a.u, shift);
    FieldState b = make_state(dom, spectral_shift(dom, u0, shift), nl);
    evolve(nl, b, T, dt, opt);
    CHECK(max_abs_diff(a_shifted, b.u) < 1e-10);
}

TEST_CASE("cfl guard rejects an oversized step") {
    auto nl = Nonlinearity::kdv();
    Domain dom = Domain::make(10.0, 256);
    std::vector<double> u0(dom.n);
    for (int i = 0; i < dom.n; ++i) u0[i] = 2.0 * std::exp(-dom.x[i] * dom.x[i]);
    FieldState s = make_state(dom, u0, nl);
    CHECK_THROWS_AS(evolve(nl, s, 1.0, 1.0), CFLViolation);
}

TEST_CASE("seam monitor flags wrap-around") {
    auto nl = Nonlinearity::kdv();
    Domain dom = Domain::make(20.0, 512);
    // soliton placed near the right edge runs into the seam almost immediately
    std::vector<double> u0(dom.n);
    for (int i = 0; i < dom.n; ++i) {
        double y = std::cosh(0.5 * (dom.x[i] - 18.0));
        u0[i] = 0.5 / (y * y);
    }
    FieldState s = make_state(dom, u0, nl);
    CHECK_THROWS_AS(evolve(nl, s, 10.0, 1e-3), SeamContamination);
}
