#include "gkdv/wave_family.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "gkdv/errors.hpp"

namespace gkdv {

Functionals functionals(const SolitonProfile& p, const Nonlinearity& nl) {
    const int n = p.grid.n;
    std::vector<double> e(n), nn(n);
    for (int i = 0; i < n; ++i) {
        e[i] = 0.5 * p.dphi[i] * p.dphi[i] + nl.primitive(p.phi[i]);
        nn[i] = 0.5 * p.phi[i] * p.phi[i];
    }
    Functionals out;
    out.E = integrate(p.grid, e);
    out.N = integrate(p.grid, nn);
    out.I = integrate(p.grid, p.phi);
    return out;
}

namespace {

Functionals fn_at(const Nonlinearity& nl, double c) {
    auto p = build_profile(nl, c);
    return functionals(p, nl);
}

// central difference with one Richardson level
double d1(const std::function<double(double)>& f, double c, double d) {
    auto D = [&](double step) { return (f(c + step) - f(c - step)) / (2.0 * step); };
    return (4.0 * D(d / 2) - D(d)) / 3.0;
}

double d2(const std::function<double(double)>& f, double c, double d) {
    double fc = f(c);
    auto S = [&](double step) { return (f(c + step) - 2.0 * fc + f(c - step)) / (step * step); };
    return (4.0 * S(d / 2) - S(d)) / 3.0;
}

}  // namespace

double dN_dc(const Nonlinearity& nl, double c) {
    return d1([&](double s) { return fn_at(nl, s).N; }, c, 1e-4 * c);
}

double dI_dc(const Nonlinearity& nl, double c) {
    return d1([&](double s) { return fn_at(nl, s).I; }, c, 1e-4 * c);
}

double dE_dc(const Nonlinearity& nl, double c) {
    return d1([&](double s) { return fn_at(nl, s).E; }, c, 1e-4 * c);
}

double d2N_dc2(const Nonlinearity& nl, double c) {
    return d2([&](double s) { return fn_at(nl, s).N; }, c, 2e-3 * c);
}

BranchPoint branch_point(const Nonlinearity& nl, double c) {
    BranchPoint bp;
    bp.c = c;
    auto f = fn_at(nl, c);
    bp.E = f.E;
    bp.N = f.N;
    bp.I = f.I;
    bp.dN_dc = dN_dc(nl, c);
    bp.dI_dc = dI_dc(nl, c);
    bp.d2N_dc2 = d2N_dc2(nl, c);
    return bp;
}

std::vector<BranchPoint> momentum_curve(const Nonlinearity& nl, double c_min, double c_max,
                                        int samples) {
    if (!(c_min < c_max) || samples < 2)
        throw std::invalid_argument("momentum_curve: bad range or sample count");
    std::vector<BranchPoint> out;
    out.reserve(samples);
    const double pi = std::acos(-1.0);
    for (int k = 0; k < samples; ++k) {
        // Chebyshev clustering resolves the endpoints where N_c blows up.
        double theta = pi * (samples - 1 - k) / (samples - 1);
        double c = 0.5 * (c_min + c_max) + 0.5 * (c_max - c_min) * std::cos(theta);
        try {
            out.push_back(branch_point(nl, c));
        } catch (const NoSolitaryWave&) {
            continue;  // outside the admissible sub-interval
        } catch (const SonicLimit&) {
            continue;
        }
    }
    if (out.empty()) throw NoSolitaryWave("momentum_curve: no admissible speed in range");
    return out;
}

namespace {

bool admissible(const Nonlinearity& nl, double c) {
    try {
        amplitude(nl, c);
        return true;
    } catch (const NoSolitaryWave&) {
        return false;
    } catch (const SonicLimit&) {
        return false;
    }
}

}  // namespace

CriticalReport critical_speed(const Nonlinearity& nl, double c_lo, double c_hi) {
    if (!(0 < c_lo && c_lo < c_hi)) throw std::invalid_argument("critical_speed: bad bracket");
    if (!admissible(nl, c_lo))
        throw NoSolitaryWave("critical_speed: lower bracket end is not admissible");
    if (!admissible(nl, c_hi)) {
        // shrink toward the sonic limit by bisection
        double lo = c_lo, hi = c_hi;
        for (int it = 0; it < 60 && (hi - lo) > 1e-9 * c_hi; ++it) {
            double mid = 0.5 * (lo + hi);
            (admissible(nl, mid) ? lo : hi) = mid;
        }
        c_hi = lo * (1.0 - 5e-3);  // margin for the finite-difference stencils
    }
    auto g = [&](double c) { return dN_dc(nl, c); };
    double fa = g(c_lo), fb = g(c_hi);
    // N has a single interior minimum on the admissible branch; a same-sign bracket
    // means the root lies outside it, so expand geometrically toward the root. The
    // expansion stops where the family has no root (monotone N) or the build degrades.
    for (int it = 0; it < 16 && fa * fb > 0.0; ++it) {
        try {
            if (fa > 0.0) {
                c_lo /= 2.0;
                if (!admissible(nl, c_lo)) break;
                fa = g(c_lo);
            } else {
                double next = c_hi * 2.0;
                if (!admissible(nl, next)) break;
                c_hi = next;
                fb = g(c_hi);
            }
        } catch (const Error&) {
            break;
        }
    }
    if (fa * fb > 0.0)
        throw NoSignChange("dN/dc does not change sign on the (admissible) bracket");
    // Brent's method
    double a = c_lo, b = c_hi;
    if (std::abs(fa) < std::abs(fb)) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    double cprev = a, fc = fa, d = b - a, e = d;
    const double tol_rel = 1e-8;
    for (int it = 0; it < 200; ++it) {
        if (fb * fc > 0.0) {
            cprev = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = cprev;
            cprev = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        double tol1 = 2.0 * 1e-16 * std::abs(b) + 0.5 * tol_rel * std::abs(b);
        double xm = 0.5 * (cprev - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) break;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double s = fb / fa, p, q;
            if (a == cprev) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                double qq = fa / fc, r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol1 ? d : (xm > 0 ? tol1 : -tol1);
        fb = g(b);
    }
    CriticalReport rep;
    rep.c_star = b;
    rep.dN_dc = fb;
    rep.d2N_dc2 = d2N_dc2(nl, b);
    rep.dI_dc = dI_dc(nl, b);
    auto f = fn_at(nl, b);
    rep.nondegenerate = std::abs(rep.d2N_dc2) > 1e-6 * f.N / (b * b) &&
                        std::abs(rep.dI_dc) > 1e-6 * f.I / b;
    return rep;
}

double minimize_momentum(const Nonlinearity& nl, double c_lo, double c_hi, double tol_rel) {
    // Golden section down to a width where quadrature noise starts to dominate the
    // comparison, then parabolic-vertex polish (noise-robust for a smooth minimum).
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    const double golden_tol = std::max(tol_rel, 1e-5);
    double a = c_lo, b = c_hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = fn_at(nl, x1).N, f2 = fn_at(nl, x2).N;
    while (b - a > golden_tol * b) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = fn_at(nl, x1).N;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = fn_at(nl, x2).N;
        }
    }
    double c0 = 0.5 * (a + b);
    for (int pass = 0; pass < 2; ++pass) {
        double d = 1e-3 * c0;
        double fm = fn_at(nl, c0 - d).N, fc = fn_at(nl, c0).N, fp = fn_at(nl, c0 + d).N;
        double denom = fp - 2.0 * fc + fm;
        if (denom <= 0.0) break;
        double step = -0.5 * d * (fp - fm) / denom;
        step = std::clamp(step, -5.0 * d, 5.0 * d);
        c0 += step;
    }
    return c0;
}

}  // namespace gkdv
