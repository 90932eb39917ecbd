#pragma once

#include <vector>

#include "gkdv/grid.hpp"
#include "gkdv/nonlinearity.hpp"

namespace gkdv {

struct SolitonProfile {
    double c = 0.0;
    double xi = 0.0;  // amplitude phi(0)
    Grid grid;
    std::vector<double> phi;
    std::vector<double> dphi;
};

// Smallest xi > 0 with c xi^2/2 + F(xi) = 0, positivity of the energy integrand on
// (0, xi), and c xi + f(xi) < 0 (else SonicLimit). Throws NoSolitaryWave when the
// scan up to scan_bound finds no sign change.
double amplitude(const Nonlinearity& nl, double c, double scan_bound = 0.0);

// Integrates phi' = -sqrt(c phi^2 + 2F(phi)) for x > 0 with a series start at the
// turning point, then reflects. residual_tol bounds the stationary-equation residual
// relative to c*xi (4th-order check).
SolitonProfile build_profile(const Nonlinearity& nl, double c, const Grid& grid,
                             double residual_tol = 1e-7);
SolitonProfile build_profile(const Nonlinearity& nl, double c);

// Independent route: x(phi) by quadrature of Eq. dx = -du/sqrt(c u^2 + 2F(u)) with the
// square-root singularity removed by the substitution u = xi - s^2; returns x for the
// requested profile value. Used as a cross-check oracle against the ODE route.
double x_of_phi(const Nonlinearity& nl, double c, double phi_value);

// e2 = d(phi_c)/dc via the linear solve H e2 = -phi (implemented with the
// linearization module's banded solver).
std::vector<double> dprofile_dc(const Nonlinearity& nl, double c, const Grid& grid);

}  // namespace gkdv
