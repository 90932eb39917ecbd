#pragma once

#include <vector>

#include "gkdv/nonlinearity.hpp"

namespace gkdv {

// lambda(eta) = lambda_{c* + dir*eta} sampled on [0, eta_max], with the cumulative
// antiderivative Lambda(eta). dir = +-1 selects the unstable side of the branch.
struct LambdaTable {
    double c_star = 0.0;
    double eta_max = 0.0;
    int dir = 1;
    std::vector<double> eta;
    std::vector<double> lambda;
    std::vector<double> Lambda;  // cumulative trapezoid of lambda
    double lambda_prime = 0.0;   // slope at 0 from the first table segment fit

    double lam(double e) const;   // linear interpolation
    double Lam(double e) const;
};

struct ReducedState {
    double t;
    double eta;
    double zeta;
};

struct NormalFormParams {
    double lambda_prime;
    double E1;
};

// Determines the unstable side: dir = +1 if N' < 0 just above c*, else -1.
int unstable_direction(const Nonlinearity& nl, double c_star);

LambdaTable build_lambda_table(const Nonlinearity& nl, double c_star, double eta_max,
                               int samples = 64, int dir = 0);

struct RemainderModel {
    bool bounded = false;  // false: R_j = 0
    double C6 = 1.0;
    int sign1 = 1;  // R_1 = sign1 * C6 * zeta^2
    int sign2 = 1;  // R_2 = sign2 * C6 * zeta^2
};

// RK4 on eta' = zeta + R1, zeta' = lambda(eta) zeta + R2; stops once eta >= eta_max and
// records the (interpolated) escape time, or runs to T.
struct ReducedTrajectory {
    std::vector<ReducedState> states;
    bool escaped = false;
    double t_escape = -1.0;
};
ReducedTrajectory integrate_reduced(const LambdaTable& table, double eta0, double zeta0,
                                    const RemainderModel& rem, double T, double dt = 0.0);

// x' = lambda_prime/2 x^2 + E1. Throws BlowupDetected (with the separable-equation
// estimate) once |x| crosses x_bound.
struct NormalFormTrajectory {
    std::vector<double> t;
    std::vector<double> x;
};
NormalFormTrajectory normal_form_flow(const NormalFormParams& par, double x0, double T,
                                      double dt, double x_bound = 1e6);

struct FixedPointReport {
    double x_minus, x_plus;   // roots, x_minus < x_plus
    bool minus_stable, plus_stable;
    bool semi_stable;         // E1 == 0 degenerate root at x = 0
};
FixedPointReport classify_fixed_points(const NormalFormParams& par);

}  // namespace gkdv
