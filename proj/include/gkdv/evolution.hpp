#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "gkdv/nonlinearity.hpp"

namespace gkdv {

// Periodic pseudo-spectral domain [-L_dom, L_dom), n_dom a power of two preferred.
struct Domain {
    double L = 0.0;
    int n = 0;
    double dx = 0.0;
    std::vector<double> x;

    static Domain make(double L, int n);
};

struct Ledger {
    double E, N, I;
};

struct FieldState {
    Domain dom;
    std::vector<double> u;
    double t = 0.0;
    Ledger ledger{};
};

Ledger conserved(const Nonlinearity& nl, const FieldState& s);

FieldState make_state(const Domain& dom, std::vector<double> u0, const Nonlinearity& nl);

struct EvolveOptions {
    double cfl = 2.8;              // advective bound dt <= cfl/(k_max_dealiased * max|f'(u)|)
    double seam_floor_rel = 1e-6;  // SeamContamination when edge |u| exceeds this * max|u0|
    int seam_check_every = 100;    // steps between seam checks (0 disables)
    int seam_band = 0;             // nodes per edge; 0 -> 2% of the domain
};

// Integrating-factor RK4 for u_t = d/dx(-u_xx + f(u)): exact e^{i k^3 t} factor for the
// dispersive part, 2/3-rule dealiased nonlinear flux.
void evolve(const Nonlinearity& nl, FieldState& state, double T, double dt,
            const EvolveOptions& opt = {});

// Spectral circular shift u(x) -> u(x - s).
std::vector<double> spectral_shift(const Domain& dom, const std::vector<double>& u, double s);

// One-sided (r2c) spectra with coefficients normalized so that
// u(x) = v[0] + 2 sum_{j>=1} Re(v[j] e^{i k_j x}) (Nyquist counted once).
std::vector<std::complex<double>> fft_forward(const Domain& dom, const std::vector<double>& u);
std::vector<double> fft_backward(const Domain& dom, const std::vector<std::complex<double>>& v);
std::vector<double> domain_wavenumbers(const Domain& dom);

}  // namespace gkdv
