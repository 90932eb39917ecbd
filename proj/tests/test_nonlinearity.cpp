#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gkdv/errors.hpp"
#include "gkdv/nonlinearity.hpp"

using namespace gkdv;

TEST_CASE("kdv normalization") {
    auto nl = Nonlinearity::kdv();
    CHECK(nl.eval(0.0) == 0.0);
    CHECK(nl.eval(2.0) == doctest::Approx(-12.0).epsilon(1e-15));
    CHECK(nl.eval(2.0, 1) == doctest::Approx(-12.0).epsilon(1e-15));
    CHECK(nl.eval(2.0, 2) == doctest::Approx(-6.0).epsilon(1e-15));
    CHECK(nl.eval(2.0, 3) == 0.0);
    CHECK(nl.primitive(2.0) == doctest::Approx(-8.0).epsilon(1e-15));
    CHECK(nl.primitive(0.0) == 0.0);
}

TEST_CASE("power family values") {
    auto nl = Nonlinearity::power(6.0);
    CHECK(nl.eval(2.0) == doctest::Approx(-64.0).epsilon(1e-15));
    CHECK(nl.primitive(2.0) == doctest::Approx(-128.0 / 7.0).epsilon(1e-15));
    CHECK(nl.integer_exponents());
}

TEST_CASE("derivatives match finite differences") {
    auto nl = Nonlinearity::minus_family(1.0, 6.0, 1.0, 8.0);
    const double h = 1e-5;
    for (double u : {0.2, 0.5, 0.8}) {
        for (int m = 1; m <= 3; ++m) {
            double fd = (nl.eval(u + h, m - 1) - nl.eval(u - h, m - 1)) / (2.0 * h);
            CHECK(nl.eval(u, m) == doctest::Approx(fd).epsilon(1e-7));
        }
        // primitive: F' = f
        double fd = (nl.primitive(u + h) - nl.primitive(u - h)) / (2.0 * h);
        CHECK(nl.eval(u) == doctest::Approx(fd).epsilon(1e-8));
    }
}

TEST_CASE("eval_array matches pointwise eval") {
    auto nl = Nonlinearity::minus_family(1.0, 6.0, 1.0, 8.0);
    std::vector<double> u = {0.0, 0.1, 0.37, 0.62, 1.0, -0.25};
    std::vector<double> out(u.size());
    nl.eval_array(u.data(), out.data(), u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        CHECK(out[i] == doctest::Approx(nl.eval(u[i])).epsilon(1e-14));
}

TEST_CASE("validation rejects degenerate families") {
    CHECK_THROWS_AS(Nonlinearity::power(1.0), std::invalid_argument);
    CHECK_THROWS_AS(Nonlinearity::minus_family(1.0, 8.0, 1.0, 6.0), std::invalid_argument);
    CHECK_THROWS_AS(Nonlinearity::minus_family(-1.0, 6.0, 1.0, 8.0), std::invalid_argument);
    // f = +u^2 - eps*u^3 + u^4 stays positive for small eps on (0, u_max]
    CHECK_THROWS_AS(Nonlinearity::plus_family(1.0, 2.0, 1e-6, 3.0, 1.0, 4.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(Nonlinearity::custom({}), std::invalid_argument);
}

TEST_CASE("fractional exponent at negative base throws") {
    auto nl = Nonlinearity::custom({{-1.0, 2.5}});
    CHECK(nl.eval(1.0) == doctest::Approx(-1.0));
    CHECK(!nl.integer_exponents());
    CHECK_THROWS_AS(nl.eval(-0.5), NegativeBase);
}

TEST_CASE("parse round trips the CLI forms") {
    for (const char* spec : {"kdv", "power:6", "minus:1,6,1,8", "custom:-2^3,0.5^5"}) {
        auto nl = Nonlinearity::parse(spec);
        auto nl2 = Nonlinearity::from_json(nl.to_json());
        CHECK(nl.describe() == nl2.describe());
        for (double u : {0.1, 0.45, 0.9})
            CHECK(nl.eval(u) == doctest::Approx(nl2.eval(u)).epsilon(1e-15));
    }
}

TEST_CASE("parse rejects malformed specs") {
    CHECK_THROWS_AS(Nonlinearity::parse(""), std::invalid_argument);
    CHECK_THROWS_AS(Nonlinearity::parse("power"), std::invalid_argument);
    CHECK_THROWS_AS(Nonlinearity::parse("power:abc"), std::invalid_argument);
    CHECK_THROWS_AS(Nonlinearity::parse("minus:1,6"), std::invalid_argument);
    CHECK_THROWS_AS(Nonlinearity::parse("sine"), std::invalid_argument);
    CHECK_THROWS_AS(Nonlinearity::parse("custom:2*3"), std::invalid_argument);
}

TEST_CASE("kdv parse agrees with the factory") {
    auto a = Nonlinearity::kdv();
    auto b = Nonlinearity::parse("kdv");
    CHECK(a.eval(0.7) == b.eval(0.7));
    CHECK(a.kind() == b.kind());
}
