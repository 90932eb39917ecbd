#include "gkdv/reduced.hpp"

#include <algorithm>
#include <cmath>

#include "gkdv/errors.hpp"
#include "gkdv/linearization.hpp"
#include "gkdv/wave_family.hpp"

namespace gkdv {

double LambdaTable::lam(double e) const {
    if (e <= eta.front()) return lambda.front();
    if (e >= eta.back()) return lambda.back();
    auto it = std::upper_bound(eta.begin(), eta.end(), e);
    std::size_t j = it - eta.begin();
    double w = (e - eta[j - 1]) / (eta[j] - eta[j - 1]);
    return (1.0 - w) * lambda[j - 1] + w * lambda[j];
}

double LambdaTable::Lam(double e) const {
    if (e <= eta.front()) return Lambda.front();
    if (e >= eta.back()) return Lambda.back() + lambda.back() * (e - eta.back());
    auto it = std::upper_bound(eta.begin(), eta.end(), e);
    std::size_t j = it - eta.begin();
    // exact antiderivative of the piecewise-linear lam(): quadratic within a segment
    double de = eta[j] - eta[j - 1];
    double d = e - eta[j - 1];
    double slope = (lambda[j] - lambda[j - 1]) / de;
    return Lambda[j - 1] + lambda[j - 1] * d + 0.5 * slope * d * d;
}

int unstable_direction(const Nonlinearity& nl, double c_star) {
    double d = 2e-3 * c_star;
    return dN_dc(nl, c_star + d) < 0.0 ? +1 : -1;
}

LambdaTable build_lambda_table(const Nonlinearity& nl, double c_star, double eta_max, int samples,
                               int dir) {
    if (samples < 4) throw std::invalid_argument("build_lambda_table: need >= 4 samples");
    LambdaTable tb;
    tb.c_star = c_star;
    tb.eta_max = eta_max;
    tb.dir = dir != 0 ? dir : unstable_direction(nl, c_star);
    tb.eta.resize(samples);
    tb.lambda.resize(samples);
    for (int j = 0; j < samples; ++j) {
        double e = eta_max * j / (samples - 1);
        double c = c_star + tb.dir * e;
        auto p = build_profile(nl, c);
        std::vector<double> mphi(p.grid.n);
        for (int i = 0; i < p.grid.n; ++i) mphi[i] = -p.phi[i];
        auto e2 = solve_H(nl, p, mphi);
        auto theta = cumint_right(p.grid, e2);
        auto le = lambda_and_e3(nl, p, e2, theta);
        tb.eta[j] = e;
        tb.lambda[j] = le.lambda;
    }
    tb.Lambda.assign(samples, 0.0);
    for (int j = 1; j < samples; ++j)
        tb.Lambda[j] = tb.Lambda[j - 1] +
                       0.5 * (tb.lambda[j] + tb.lambda[j - 1]) * (tb.eta[j] - tb.eta[j - 1]);
    // slope at 0 by least squares through the first quarter of the table
    int m = std::max(3, samples / 4);
    double sxx = 0.0, sxy = 0.0;
    for (int j = 0; j < m; ++j) {
        sxx += tb.eta[j] * tb.eta[j];
        sxy += tb.eta[j] * (tb.lambda[j] - tb.lambda[0]);
    }
    tb.lambda_prime = sxy / sxx;
    return tb;
}

ReducedTrajectory integrate_reduced(const LambdaTable& table, double eta0, double zeta0,
                                    const RemainderModel& rem, double T, double dt) {
    if (dt <= 0.0) {
        double rate = std::max(table.lam(table.eta_max), 1e-12);
        dt = std::min(1e-3 / rate, T / 1000.0);
    }
    if (!(dt > 0) || T / dt > 5e8) throw StepSizeUnderflow("integrate_reduced: step too small");
    auto f = [&](double eta, double zeta, double& de, double& dz) {
        double r1 = rem.bounded ? rem.sign1 * rem.C6 * zeta * zeta : 0.0;
        double r2 = rem.bounded ? rem.sign2 * rem.C6 * zeta * zeta : 0.0;
        de = zeta + r1;
        dz = table.lam(eta) * zeta + r2;
    };
    ReducedTrajectory out;
    long steps = long(std::ceil(T / dt));
    long keep_every = std::max(1L, steps / 20000);
    double eta = eta0, zeta = zeta0, t = 0.0;
    out.states.push_back({t, eta, zeta});
    for (long s = 0; s < steps; ++s) {
        double k1e, k1z, k2e, k2z, k3e, k3z, k4e, k4z;
        f(eta, zeta, k1e, k1z);
        f(eta + 0.5 * dt * k1e, zeta + 0.5 * dt * k1z, k2e, k2z);
        f(eta + 0.5 * dt * k2e, zeta + 0.5 * dt * k2z, k3e, k3z);
        f(eta + dt * k3e, zeta + dt * k3z, k4e, k4z);
        double eta_n = eta + dt / 6.0 * (k1e + 2 * k2e + 2 * k3e + k4e);
        double zeta_n = zeta + dt / 6.0 * (k1z + 2 * k2z + 2 * k3z + k4z);
        double t_n = t + dt;
        if (eta_n >= table.eta_max) {
            double w = (table.eta_max - eta) / (eta_n - eta);
            out.escaped = true;
            out.t_escape = t + w * dt;
            out.states.push_back({out.t_escape, table.eta_max, zeta + w * (zeta_n - zeta)});
            return out;
        }
        eta = eta_n;
        zeta = zeta_n;
        t = t_n;
        if (s % keep_every == 0 || s == steps - 1) out.states.push_back({t, eta, zeta});
    }
    return out;
}

NormalFormTrajectory normal_form_flow(const NormalFormParams& par, double x0, double T, double dt,
                                      double x_bound) {
    if (!(dt > 0)) throw StepSizeUnderflow("normal_form_flow: dt must be positive");
    auto f = [&](double x) { return 0.5 * par.lambda_prime * x * x + par.E1; };
    NormalFormTrajectory out;
    double x = x0, t = 0.0;
    long steps = long(std::ceil(T / dt));
    out.t.push_back(t);
    out.x.push_back(x);
    for (long s = 0; s < steps; ++s) {
        double k1 = f(x);
        double k2 = f(x + 0.5 * dt * k1);
        double k3 = f(x + 0.5 * dt * k2);
        double k4 = f(x + dt * k3);
        x += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        t += dt;
        if (!std::isfinite(x) || std::abs(x) > x_bound) {
            double est = par.lambda_prime * x0 != 0.0 ? 2.0 / (par.lambda_prime * x0) : T;
            throw BlowupDetected("normal_form_flow: |x| crossed the bound at t = " +
                                     std::to_string(t),
                                 est);
        }
        out.t.push_back(t);
        out.x.push_back(x);
    }
    return out;
}

FixedPointReport classify_fixed_points(const NormalFormParams& par) {
    if (par.lambda_prime == 0.0)
        throw NoFixedPoints("classify_fixed_points: lambda_prime = 0");
    if (par.E1 == 0.0) return {0.0, 0.0, false, false, true};
    double disc = -2.0 * par.E1 / par.lambda_prime;
    if (disc < 0.0)
        throw NoFixedPoints("no fixed points: E1 and lambda_prime/2 have the same sign");
    double r = std::sqrt(disc);
    FixedPointReport rep;
    rep.x_minus = -r;
    rep.x_plus = +r;
    // flow derivative lambda_prime * x at each root
    rep.minus_stable = par.lambda_prime * rep.x_minus < 0.0;
    rep.plus_stable = par.lambda_prime * rep.x_plus < 0.0;
    rep.semi_stable = false;
    return rep;
}

}  // namespace gkdv
