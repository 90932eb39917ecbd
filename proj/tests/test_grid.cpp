#include <doctest.h>

#include <cmath>
#include <vector>

#include "gkdv/grid.hpp"

using namespace gkdv;

namespace {

std::vector<double> sample(const Grid& g, double (*f)(double)) {
    std::vector<double> v(g.n);
    for (int i = 0; i < g.n; ++i) v[i] = f(g.x[i]);
    return v;
}

}  // namespace

TEST_CASE("grid layout") {
    auto g = Grid::make(5.0, 100);  // even count is bumped to odd
    CHECK(g.n == 101);
    CHECK(g.x[g.center()] == 0.0);
    CHECK(g.x[0] == doctest::Approx(-5.0));
    CHECK(g.x[g.n - 1] == doctest::Approx(5.0));
    CHECK(g.h == doctest::Approx(0.1));
}

TEST_CASE("simpson weights integrate a gaussian to machine precision") {
    auto g = Grid::make(10.0, 801);
    auto v = sample(g, +[](double x) { return std::exp(-x * x); });
    CHECK(integrate(g, v) == doctest::Approx(std::sqrt(std::acos(-1.0))).epsilon(1e-13));
}

TEST_CASE("simpson is exact for cubics") {
    auto g = Grid::make(1.0, 21);
    auto v = sample(g, +[](double x) { return x * x * x + x * x; });
    CHECK(integrate(g, v) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("quadrature converges at 4th order") {
    auto err = [](int n) {
        auto g = Grid::make(1.0, n);
        std::vector<double> v(g.n);
        for (int i = 0; i < g.n; ++i) v[i] = std::cos(3.0 * g.x[i]);
        return std::abs(integrate(g, v) - 2.0 * std::sin(3.0) / 3.0);
    };
    double ratio = err(21) / err(41);
    CHECK(ratio > 10.0);
    CHECK(ratio < 24.0);
}

TEST_CASE("inner and norm are consistent") {
    auto g = Grid::make(3.0, 301);
    auto v = sample(g, +[](double x) { return std::exp(-x * x / 2.0); });
    CHECK(norm_l2(g, v) == doctest::Approx(std::sqrt(inner(g, v, v))).epsilon(1e-14));
}

TEST_CASE("cumulative integrals hit the closed form") {
    auto g = Grid::make(4.0, 401);
    auto v = sample(g, +[](double x) { return std::cos(x); });
    auto cl = cumint_left(g, v);
    auto cr = cumint_right(g, v);
    CHECK(cl[0] == 0.0);
    CHECK(cr[g.n - 1] == 0.0);
    for (int i = 0; i < g.n; i += 37) {
        CHECK(cl[i] == doctest::Approx(std::sin(g.x[i]) - std::sin(-4.0)).epsilon(1e-7));
        CHECK(cr[i] == doctest::Approx(std::sin(g.x[i]) - std::sin(4.0)).epsilon(1e-7));
    }
    // 4th-order convergence of the cumulative rule
    auto werr = [](int n) {
        auto gg = Grid::make(4.0, n);
        std::vector<double> vv(gg.n);
        for (int i = 0; i < gg.n; ++i) vv[i] = std::cos(gg.x[i]);
        auto c = cumint_left(gg, vv);
        double w = 0.0;
        for (int i = 0; i < gg.n; ++i)
            w = std::max(w, std::abs(c[i] - (std::sin(gg.x[i]) - std::sin(-4.0))));
        return w;
    };
    double ratio = werr(201) / werr(401);
    CHECK(ratio > 8.0);
    CHECK(ratio < 40.0);
    // the two directions differ by the total integral at every node
    double total = integrate(g, v);
    for (int i = 0; i < g.n; i += 57)
        CHECK(cl[i] - cr[i] == doctest::Approx(total).epsilon(1e-7));
}

TEST_CASE("fornberg weights reproduce the standard stencils") {
    std::vector<double> xs = {-1.0, 0.0, 1.0};
    auto w2 = fd_weights(0.0, xs, 2);
    CHECK(w2[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(w2[1] == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(w2[2] == doctest::Approx(1.0).epsilon(1e-14));
    std::vector<double> xs5 = {-2.0, -1.0, 0.0, 1.0, 2.0};
    auto w1 = fd_weights(0.0, xs5, 1);
    CHECK(w1[0] == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
    CHECK(w1[4] == doctest::Approx(-1.0 / 12.0).epsilon(1e-14));
}

TEST_CASE("fornberg weights are exact on polynomials at off-center points") {
    std::vector<double> xs = {0.0, 0.7, 1.1, 2.0, 3.5};
    auto w = fd_weights(1.3, xs, 1);
    // d/dx (x^3) at 1.3 = 5.07
    double acc = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) acc += w[j] * xs[j] * xs[j] * xs[j];
    CHECK(acc == doctest::Approx(3.0 * 1.3 * 1.3).epsilon(1e-12));
}

TEST_CASE("grid derivative is 4th order including the bands") {
    auto err = [](int n, int order) {
        auto g = Grid::make(2.0, n);
        std::vector<double> v(g.n);
        for (int i = 0; i < g.n; ++i) v[i] = std::sin(2.0 * g.x[i]);
        auto d = derivative(g, v, order);
        double worst = 0.0;
        for (int i = 0; i < g.n; ++i) {
            double exact = order == 1 ? 2.0 * std::cos(2.0 * g.x[i])
                                      : -4.0 * std::sin(2.0 * g.x[i]);
            worst = std::max(worst, std::abs(d[i] - exact));
        }
        return worst;
    };
    for (int order : {1, 2}) {
        double ratio = err(101, order) / err(201, order);
        CHECK(ratio > 8.0);
        CHECK(ratio < 40.0);
        CHECK(err(201, order) < 1e-5);
    }
}
