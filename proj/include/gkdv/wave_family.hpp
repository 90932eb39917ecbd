#pragma once

#include <vector>

#include "gkdv/nonlinearity.hpp"
#include "gkdv/soliton.hpp"

namespace gkdv {

struct Functionals {
    double E;  // int 1/2 (phi')^2 + F(phi)
    double N;  // int 1/2 phi^2
    double I;  // int phi
};

struct BranchPoint {
    double c;
    double E, N, I;
    double dN_dc, dI_dc, d2N_dc2;
};

struct CriticalReport {
    double c_star;
    double dN_dc;    // ~0 at the root
    double d2N_dc2;
    double dI_dc;
    bool nondegenerate;
};

Functionals functionals(const SolitonProfile& p, const Nonlinearity& nl);

// Derivatives of c -> (E, N, I) by central differences with one Richardson level.
// First derivatives use step 1e-4*c; the second derivative uses 2e-3*c (roundoff in the
// quadrature would otherwise dominate at small c).
double dN_dc(const Nonlinearity& nl, double c);
double dI_dc(const Nonlinearity& nl, double c);
double dE_dc(const Nonlinearity& nl, double c);
double d2N_dc2(const Nonlinearity& nl, double c);

BranchPoint branch_point(const Nonlinearity& nl, double c);

// Chebyshev-clustered speeds on [c_min, c_max]; inadmissible speeds are skipped and the
// admissible sub-interval reported through the returned points.
std::vector<BranchPoint> momentum_curve(const Nonlinearity& nl, double c_min, double c_max,
                                        int samples);

// Brent root of c -> dN/dc on the bracket (auto-shrunk to the admissible sub-interval).
CriticalReport critical_speed(const Nonlinearity& nl, double c_lo, double c_hi);

// Independent oracle: golden-section minimization of c -> N_c on the bracket.
double minimize_momentum(const Nonlinearity& nl, double c_lo, double c_hi, double tol_rel = 1e-9);

}  // namespace gkdv
