#pragma once

#include <array>
#include <complex>
#include <vector>

#include "gkdv/nonlinearity.hpp"
#include "gkdv/soliton.hpp"

namespace gkdv {

// H_c = -d^2/dx^2 + f'(phi_c) + c on the profile grid, Jordan chain e1,e2,e3, adjoint
// chain g1,g2,g3, eigenvalue lambda_c and the pairing matrix T.
struct LinearizationFrame {
    double c = 0.0;
    double mu = 0.0;
    SolitonProfile profile;
    std::vector<double> e1, e2, e3;
    std::vector<double> g1, g2, g3;
    std::vector<double> theta;  // Theta(x) = int_{+inf}^x e2
    double lambda = 0.0;
    double Np = 0.0;      // N'_c = <phi, e2>
    double Ip = 0.0;      // I'_c = int e2
    double alpha = 0.0;   // <g1, e3>
    double beta = 0.0;    // <g2, e3>
    double gamma = 0.0;   // <g3, e3>
    std::array<std::array<double, 3>, 3> T{};
    double Lambda = 0.0;  // max |f''(phi) phi'|, eigenvalue bound
    double chain_residual_e2 = 0.0;  // ||d/dx(H e2) - e1|| / ||e1||
    double chain_residual_e3 = 0.0;  // ||d/dx(H e3) - e2 - lambda e3|| / ||e1||
};

double default_mu(double c);

std::vector<double> apply_H(const Nonlinearity& nl, const SolitonProfile& p,
                            const std::vector<double>& v);

enum class LeftBC { decay, constant };

struct SolveOptions {
    LeftBC left_bc = LeftBC::decay;
    double left_value = 0.0;      // for LeftBC::constant
    double fredholm_tol = 1e-4;   // relative pairing |<e1,R>|/(||e1|| ||R||)
    bool check_fredholm = true;   // only meaningful with the decay left BC
};

// Bordered banded solve of H u = R with Robin right BC u' = -sqrt(c) u at +L and the
// requested left BC; uniqueness fixed by <e1, u> = 0. Throws FredholmViolation when the
// solvability pairing exceeds tolerance under the decay left BC.
std::vector<double> solve_H(const Nonlinearity& nl, const SolitonProfile& p,
                            const std::vector<double>& R, const SolveOptions& opt = {});

LinearizationFrame build_frame(const Nonlinearity& nl, double c, const Grid& grid, double mu);
LinearizationFrame build_frame(const Nonlinearity& nl, double c);

// Self-consistent (lambda_c, e3) for N'_c != 0 via fixed-point iteration on
// lambda = -N'_c / <phi, e3> with the chain solve H e3 = Theta + lambda E3.
// Exposed separately for testing; build_frame calls it.
struct LambdaE3 {
    double lambda;
    std::vector<double> e3;
    int iterations;
};
LambdaE3 lambda_and_e3(const Nonlinearity& nl, const SolitonProfile& p,
                       const std::vector<double>& e2, const std::vector<double>& theta,
                       int max_iter = 50, double tol = 1e-12);

// ||d/dx(H psi) - lambda psi|| / ||psi|| with psi = e1 + lambda e2 + lambda^2 e3,
// measured on the grid interior.
double eigen_residual(const Nonlinearity& nl, const LinearizationFrame& fr);

// lambda_cont(k) = (mu - ik)^3 - c (mu - ik) on a symmetric k grid.
std::vector<std::complex<double>> essential_spectrum(double c, double mu, int k_samples,
                                                     double k_max = 10.0);

// Spectral projection P v = sum_{jk} (T^{-1})_{jk} <g_k, v> e_j; returns (P v, v - P v).
std::pair<std::vector<double>, std::vector<double>> project_discrete(
    const LinearizationFrame& fr, const std::vector<double>& v);

}  // namespace gkdv
