#include "gkdv/grid.hpp"

#include <cassert>
#include <stdexcept>

namespace gkdv {

std::vector<double> simpson_weights(const Grid& g) {
    std::vector<double> w(g.n, 0.0);
    // n odd: pattern 1,4,2,4,...,4,1 times h/3
    for (int i = 0; i < g.n; ++i) w[i] = (i % 2 == 1) ? 4.0 : 2.0;
    w[0] = w[g.n - 1] = 1.0;
    for (auto& v : w) v *= g.h / 3.0;
    return w;
}

double integrate(const Grid& g, const std::vector<double>& f) {
    assert(int(f.size()) == g.n);
    double s4 = 0.0, s2 = 0.0;
    for (int i = 1; i < g.n - 1; i += 2) s4 += f[i];
    for (int i = 2; i < g.n - 1; i += 2) s2 += f[i];
    return g.h / 3.0 * (f[0] + f[g.n - 1] + 4.0 * s4 + 2.0 * s2);
}

double inner(const Grid& g, const std::vector<double>& a, const std::vector<double>& b) {
    assert(a.size() == b.size() && int(a.size()) == g.n);
    double s4 = 0.0, s2 = 0.0;
    for (int i = 1; i < g.n - 1; i += 2) s4 += a[i] * b[i];
    for (int i = 2; i < g.n - 1; i += 2) s2 += a[i] * b[i];
    return g.h / 3.0 * (a[0] * b[0] + a[g.n - 1] * b[g.n - 1] + 4.0 * s4 + 2.0 * s2);
}

double norm_l2(const Grid& g, const std::vector<double>& a) {
    return std::sqrt(inner(g, a, a));
}

std::vector<double> cumint_left(const Grid& g, const std::vector<double>& f) {
    const int n = g.n;
    const double h = g.h;
    std::vector<double> out(n, 0.0);
    if (n < 4) throw std::invalid_argument("cumint needs n >= 4");
    auto seg = [&](int a, double c0, double c1, double c2, double c3) {
        return h * (c0 * f[a] + c1 * f[a + 1] + c2 * f[a + 2] + c3 * f[a + 3]) / 24.0;
    };
    for (int i = 0; i < n - 1; ++i) {
        double piece;
        if (i == 0)
            piece = seg(0, 9, 19, -5, 1);
        else if (i == n - 2)
            piece = seg(n - 4, 1, -5, 19, 9);
        else
            piece = seg(i - 1, -1, 13, 13, -1);
        out[i + 1] = out[i] + piece;
    }
    return out;
}

std::vector<double> cumint_right(const Grid& g, const std::vector<double>& f) {
    auto left = cumint_left(g, f);
    double total = left.back();
    for (auto& v : left) v -= total;
    return left;
}

std::vector<double> fd_weights(double x0, const std::vector<double>& xs, int m) {
    // Fornberg (1988) recursion.
    const int nd = int(xs.size()) - 1;
    std::vector<std::vector<double>> c(nd + 1, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i <= nd; ++i) {
        int mn = std::min(i, m);
        double c2 = 1.0;
        double c5 = c4;
        c4 = xs[i] - x0;
        for (int j = 0; j < i; ++j) {
            double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(nd + 1);
    for (int i = 0; i <= nd; ++i) w[i] = c[i][m];
    return w;
}

std::vector<double> derivative(const Grid& g, const std::vector<double>& f, int order) {
    const int n = g.n;
    if (int(f.size()) != n) throw std::invalid_argument("derivative: size mismatch");
    std::vector<double> out(n, 0.0);
    const int half = 2;   // centered 5-point stencil
    const int width = 6;  // one-sided 6-point stencils keep 4th order at the bands
    auto weights_at = [&](int i, int a, int len) {
        std::vector<double> xs(len);
        for (int k = 0; k < len; ++k) xs[k] = g.x[a + k];
        return fd_weights(g.x[i], xs, order);
    };
    std::vector<double> wc = weights_at(half, 0, 5);  // interior (translation invariant)
    for (int i = half; i <= n - 1 - half; ++i) {
        double s = 0.0;
        for (int k = 0; k < 5; ++k) s += wc[k] * f[i - half + k];
        out[i] = s;
    }
    for (int i = 0; i < half; ++i) {
        auto w = weights_at(i, 0, width);
        double s = 0.0;
        for (int k = 0; k < width; ++k) s += w[k] * f[k];
        out[i] = s;
    }
    for (int i = n - half; i < n; ++i) {
        auto w = weights_at(i, n - width, width);
        double s = 0.0;
        for (int k = 0; k < width; ++k) s += w[k] * f[n - width + k];
        out[i] = s;
    }
    return out;
}

}  // namespace gkdv
