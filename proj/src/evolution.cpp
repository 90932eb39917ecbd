#include "gkdv/evolution.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>

#include "gkdv/errors.hpp"

namespace gkdv {

Domain Domain::make(double L, int n) {
    if (!(L > 0) || n < 8) throw std::invalid_argument("Domain: bad parameters");
    Domain d;
    d.L = L;
    d.n = n;
    d.dx = 2.0 * L / n;
    d.x.resize(n);
    for (int i = 0; i < n; ++i) d.x[i] = -L + i * d.dx;
    return d;
}

namespace {

using cplx = std::complex<double>;

// One forward/backward r2c plan pair per transform size, reused across steps.
struct Fft {
    int n = 0;
    int nc = 0;
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan fwd{}, bwd{};

    explicit Fft(int n_) : n(n_), nc(n_ / 2 + 1) {
        real = fftw_alloc_real(n);
        spec = fftw_alloc_complex(nc);
        fwd = fftw_plan_dft_r2c_1d(n, real, spec, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_1d(n, spec, real, FFTW_ESTIMATE);
    }
    ~Fft() {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(real);
        fftw_free(spec);
    }
    Fft(const Fft&) = delete;

    void forward(const double* u, cplx* out) {
        std::copy(u, u + n, real);
        fftw_execute(fwd);
        for (int j = 0; j < nc; ++j) out[j] = cplx(spec[j][0], spec[j][1]) / double(n);
    }
    void backward(const cplx* v, double* out) {
        for (int j = 0; j < nc; ++j) {
            spec[j][0] = v[j].real();
            spec[j][1] = v[j].imag();
        }
        fftw_execute(bwd);
        std::copy(real, real + n, out);
    }
};

Fft& fft_for(int n) {
    static std::map<int, std::unique_ptr<Fft>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<Fft>(n);
    return *slot;
}

std::vector<double> wavenumbers(const Domain& d) {
    int nc = d.n / 2 + 1;
    std::vector<double> k(nc);
    for (int j = 0; j < nc; ++j) k[j] = M_PI * j / d.L;
    return k;
}

}  // namespace

Ledger conserved(const Nonlinearity& nl, const FieldState& s) {
    const Domain& d = s.dom;
    auto& fft = fft_for(d.n);
    int nc = d.n / 2 + 1;
    std::vector<cplx> v(nc);
    fft.forward(s.u.data(), v.data());
    auto k = wavenumbers(d);
    for (int j = 0; j < nc; ++j) v[j] *= cplx(0.0, k[j]);
    std::vector<double> ux(d.n);
    fft.backward(v.data(), ux.data());
    Ledger led{0.0, 0.0, 0.0};
    for (int i = 0; i < d.n; ++i) {
        led.E += 0.5 * ux[i] * ux[i] + nl.primitive(s.u[i]);
        led.N += 0.5 * s.u[i] * s.u[i];
        led.I += s.u[i];
    }
    led.E *= d.dx;
    led.N *= d.dx;
    led.I *= d.dx;
    return led;
}

FieldState make_state(const Domain& dom, std::vector<double> u0, const Nonlinearity& nl) {
    if (int(u0.size()) != dom.n) throw std::invalid_argument("make_state: size mismatch");
    FieldState s;
    s.dom = dom;
    s.u = std::move(u0);
    s.t = 0.0;
    s.ledger = conserved(nl, s);
    return s;
}

void evolve(const Nonlinearity& nl, FieldState& state, double T, double dt,
            const EvolveOptions& opt) {
    if (T <= 0.0) return;
    const Domain& d = state.dom;
    const int n = d.n;
    const int nc = n / 2 + 1;
    auto& fft = fft_for(n);
    auto k = wavenumbers(d);
    const int j_cut = n / 3;  // 2/3-rule dealiasing

    double maxfp = 0.0;
    for (double u : state.u) maxfp = std::max(maxfp, std::abs(nl.eval(u, 1)));
    const double k_cut = k[std::min(j_cut, nc - 1)];
    if (dt * k_cut * maxfp > opt.cfl)
        throw CFLViolation("evolve: dt exceeds the advective bound cfl/(k_cut * max|f'(u)|)");

    long steps = std::max(1L, long(std::llround(T / dt)));
    dt = T / steps;

    std::vector<cplx> Eh(nc), Ef(nc);  // exp(i k^3 dt/2), exp(i k^3 dt)
    for (int j = 0; j < nc; ++j) {
        double th = k[j] * k[j] * k[j] * dt / 2.0;
        Eh[j] = cplx(std::cos(th), std::sin(th));
        Ef[j] = Eh[j] * Eh[j];
    }

    std::vector<cplx> v(nc), a(nc), b(nc), c(nc), e(nc), tmp(nc);
    std::vector<double> uphys(n), fu(n);
    fft.forward(state.u.data(), v.data());

    // nonlinear flux N(v) = i k FFT(f(u)), dealiased
    auto NL = [&](const std::vector<cplx>& w, std::vector<cplx>& out, bool keep_phys) {
        for (int j = 0; j < nc; ++j) tmp[j] = j < j_cut ? w[j] : cplx(0.0, 0.0);
        fft.backward(tmp.data(), uphys.data());
        nl.eval_array(uphys.data(), fu.data(), n);
        fft.forward(fu.data(), out.data());
        for (int j = 0; j < nc; ++j) out[j] = j < j_cut ? cplx(0.0, k[j]) * out[j] : cplx(0.0, 0.0);
        (void)keep_phys;
    };

    int band = opt.seam_band > 0 ? opt.seam_band : std::max(2, n / 50);
    double seam_floor = 0.0;
    if (opt.seam_check_every > 0) {
        double umax = 0.0;
        for (double u : state.u) umax = std::max(umax, std::abs(u));
        seam_floor = opt.seam_floor_rel * umax;
    }

    for (long s = 0; s < steps; ++s) {
        NL(v, a, true);
        // seam monitor on the physical field just computed
        if (opt.seam_check_every > 0 && s % opt.seam_check_every == 0) {
            double edge = 0.0;
            for (int i = 0; i < band; ++i)
                edge = std::max({edge, std::abs(uphys[i]), std::abs(uphys[n - 1 - i])});
            if (edge > seam_floor)
                throw SeamContamination("evolve: |u| at the periodic seam exceeds the floor at t=" +
                                        std::to_string(state.t + s * dt));
        }
        for (int j = 0; j < nc; ++j) tmp[j] = Eh[j] * (v[j] + 0.5 * dt * a[j]);
        NL(tmp, b, false);
        for (int j = 0; j < nc; ++j) tmp[j] = Eh[j] * v[j] + 0.5 * dt * b[j];
        NL(tmp, c, false);
        for (int j = 0; j < nc; ++j) tmp[j] = Ef[j] * v[j] + dt * Eh[j] * c[j];
        NL(tmp, e, false);
        for (int j = 0; j < nc; ++j)
            v[j] = Ef[j] * v[j] +
                   dt / 6.0 * (Ef[j] * a[j] + 2.0 * Eh[j] * (b[j] + c[j]) + e[j]);
    }
    fft.backward(v.data(), state.u.data());
    state.t += T;
    state.ledger = conserved(nl, state);
}

std::vector<std::complex<double>> fft_forward(const Domain& dom, const std::vector<double>& u) {
    auto& fft = fft_for(dom.n);
    std::vector<cplx> v(dom.n / 2 + 1);
    fft.forward(u.data(), v.data());
    return v;
}

std::vector<double> fft_backward(const Domain& dom, const std::vector<std::complex<double>>& v) {
    auto& fft = fft_for(dom.n);
    std::vector<double> out(dom.n);
    fft.backward(v.data(), out.data());
    return out;
}

std::vector<double> domain_wavenumbers(const Domain& dom) { return wavenumbers(dom); }

std::vector<double> spectral_shift(const Domain& dom, const std::vector<double>& u, double s) {
    auto& fft = fft_for(dom.n);
    int nc = dom.n / 2 + 1;
    std::vector<cplx> v(nc);
    fft.forward(u.data(), v.data());
    auto k = wavenumbers(dom);
    for (int j = 0; j < nc; ++j) {
        double th = -k[j] * s;
        v[j] *= cplx(std::cos(th), std::sin(th));
    }
    if (dom.n % 2 == 0) v[nc - 1] = cplx(v[nc - 1].real(), 0.0);  // keep the field real
    std::vector<double> out(dom.n);
    fft.backward(v.data(), out.data());
    return out;
}

}  // namespace gkdv
