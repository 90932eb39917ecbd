#pragma once

#include <optional>
#include <vector>

#include "gkdv/evolution.hpp"
#include "gkdv/linearization.hpp"
#include "gkdv/nonlinearity.hpp"
#include "gkdv/reduced.hpp"

namespace gkdv {

// Frames on a common profile grid at speeds bracketing the escape window
// c = c_star + dir*eta, eta in [eta_lo, eta_hi]. Vector quantities are interpolated in c
// with 4-point Lagrange stencils.
class FrameFamily {
public:
    struct Member {
        double c;
        double xi;
        std::vector<double> phi, dphi, e2, e3, g1, g2, g3;
        double lambda;
    };

    FrameFamily(const Nonlinearity& nl, double c_star, int dir, double eta_lo, double eta_hi,
                int members = 17);

    Member at(double eta) const;  // eta in family coordinates (c = c_star + dir*eta)
    const Grid& grid() const { return grid_; }
    double c_star() const { return c_star_; }
    int dir() const { return dir_; }
    double eta_lo() const { return eta_lo_; }
    double eta_hi() const { return eta_hi_; }
    const std::vector<LinearizationFrame>& frames() const { return frames_; }

    LambdaTable lambda_table(double eta_max) const;

private:
    double c_star_;
    int dir_;
    double eta_lo_, eta_hi_;
    Grid grid_;
    std::vector<double> etas_;
    std::vector<LinearizationFrame> frames_;
};

struct ModulationPoint {
    double t;
    double sigma;  // total shift = xi + int c dt'
    double xi;
    double eta;    // dir*(c - c_star) >= 0 on the unstable side
    double zeta;   // Jordan-mode amplitude in escape coordinates
    double ups_l2mu;
    double ups_h1mu;
    double orbdist;
    Ledger ledger;
};

struct ModulationTrack {
    std::vector<ModulationPoint> points;
    bool escaped = false;
    bool tube_exit = false;  // NewtonDiverged before eta_1
    double t_escape = -1.0;
};

struct ExtractResult {
    double sigma, eta, zeta;
    std::vector<double> upsilon;  // on the family profile grid, recentered
};

// Damped Newton on the three pairing constraints <g_j, u(.+sigma)-phi-zeta*e3> = 0.
ExtractResult modulation_extract(const FieldState& u, const FrameFamily& family, double sigma0,
                                 double eta0, double zeta0, double tol = 1e-10,
                                 int max_iter = 25);

// inf over shifts of ||u - phi_ref(. - s)||_{H^1} on the periodic domain.
struct OrbitalDistance {
    double distance;
    double shift;
};
OrbitalDistance orbital_distance(const Nonlinearity& nl, const FieldState& u, double c_ref);

struct ExperimentConfig {
    double eta1_rel = 0.05;    // eta_1 = eta1_rel * c_star
    double zeta0 = 1e-4;
    double eta0_rel = 1e-3;    // eta_0 = eta0_rel * c_star
    double T = 0.0;            // 0: auto from the reduced-model escape estimate
    double dt = 0.0;           // 0: auto
    double dt_sample = 0.1;
    int n_dom = 8192;
    int family_members = 17;
    double mu = 0.0;           // 0: 0.3*sqrt(c_star)
};

struct ExperimentVerdict {
    double zeta0_used = 0.0;  // cfg.zeta0 capped by the H1 smallness premise
    bool monotone = false;
    bool escaped = false;
    double t_escape = -1.0;
    double t_escape_reduced = -1.0;
    double E1_fit = 0.0;           // in escape coordinates (eta = dir*(c - c_star))
    double lambda_prime_fit = 0.0;
    double lambda_prime_table = 0.0;
    double normal_form_rel_err = 1.0;
    double kappa_fit = 0.0;
    double epsilon = 0.0;          // eta_1 * kappa_fit / 2
    double final_orbdist = 0.0;
    double C6_fit = 0.0;
    double K_fit = 0.0;            // sup ||ups||_{L2_mu} / zeta
};

struct ExperimentResult {
    ModulationTrack track;
    ExperimentVerdict verdict;
    LambdaTable table;
    int dir = 1;
};

ExperimentResult instability_experiment(const Nonlinearity& nl, double c_star,
                                        const ExperimentConfig& cfg = {});

// Same perturbation protocol at a stable branch point; reports the orbital-distance
// history against phi_c.
struct StableControlResult {
    std::vector<double> t;
    std::vector<double> orbdist;
    double initial_distance = 0.0;
    double max_ratio = 0.0;  // max orbdist / initial_distance
};
StableControlResult stable_control_experiment(const Nonlinearity& nl, double c, double eta0_rel,
                                              double zeta0, double T, double dt = 0.0,
                                              int n_dom = 8192);

// Initial-data embedding helper (exposed for tests): profile-grid function onto the
// periodic domain, with an optional smoothstep taper of the constant left tail.
std::vector<double> embed_on_domain(const Domain& dom, const Grid& grid,
                                    const std::vector<double>& values, bool taper_left_tail);

}  // namespace gkdv
