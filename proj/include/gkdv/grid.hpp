#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace gkdv {

// Uniform symmetric grid on [-L, L] with a node at x = 0 (n forced odd).
struct Grid {
    double L = 0.0;
    int n = 0;
    double h = 0.0;
    std::vector<double> x;

    static Grid make(double L, int n) {
        if (n % 2 == 0) ++n;  // node at 0 requires odd count
        Grid g;
        g.L = L;
        g.n = n;
        g.h = 2.0 * L / (n - 1);
        g.x.resize(n);
        for (int i = 0; i < n; ++i) g.x[i] = -L + g.h * i;
        g.x[(n - 1) / 2] = 0.0;
        return g;
    }

    // e^{-sqrt(c) L} <= e^{-30} keeps truncation below all stated tolerances.
    static Grid default_for(double c, int n = 4001) {
        return make(std::max(20.0, 30.0 / std::sqrt(c)), n);
    }

    int center() const { return (n - 1) / 2; }
    bool same_as(const Grid& o) const { return n == o.n && L == o.L; }
};

// Composite Simpson weights (n odd). 4th-order for smooth decaying integrands.
std::vector<double> simpson_weights(const Grid& g);

double integrate(const Grid& g, const std::vector<double>& f);
double inner(const Grid& g, const std::vector<double>& a, const std::vector<double>& b);
double norm_l2(const Grid& g, const std::vector<double>& a);

// Cumulative integral from the left end: out[i] = int_{-L}^{x_i} f. O(h^4) via
// sliding 4-point Newton-Cotes on each interval.
std::vector<double> cumint_left(const Grid& g, const std::vector<double>& f);
// out[i] = int_{+L}^{x_i} f (decreasing from 0 at the right end when f > 0).
std::vector<double> cumint_right(const Grid& g, const std::vector<double>& f);

// Fornberg finite-difference weights: derivative of order m at x0 from nodes xs.
std::vector<double> fd_weights(double x0, const std::vector<double>& xs, int m);

// 4th-order derivative of a grid function (centered interior, one-sided bands).
std::vector<double> derivative(const Grid& g, const std::vector<double>& f, int order);

}  // namespace gkdv
