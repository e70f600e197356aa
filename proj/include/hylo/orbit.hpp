#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hylo/field.hpp"
#include "hylo/grids.hpp"
#include "hylo/interp.hpp"
#include "hylo/radial.hpp"

namespace hylo {

// Exact reference solutions used for initial data and for the orbital
// stability norm: a soliton boosted to speed v along x (on the torus) or a
// rigidly rotating vortex (on the polar grid).
struct TheoreticalOrbit {
    enum class Kind { translating_soliton, rotating_vortex };
    Kind kind = Kind::translating_soliton;
    ProfileInterpolant profile;
    double omega = 0.0;
    int ell = 0;
    double v = 0.0;
    double gamma = 1.0;
    double cx = 0.0, cy = 0.0;  // initial center on the torus

    double period() const { return two_pi / std::abs(omega); }
};

inline TheoreticalOrbit make_translating_orbit(const RadialProfile& p, double v, double cx,
                                               double cy) {
    if (p.ell != 0) throw std::invalid_argument("translating orbit requires an ell = 0 profile");
    if (!(std::abs(v) < 1.0)) throw std::invalid_argument("boost speed must satisfy |v| < 1");
    TheoreticalOrbit o;
    o.kind = TheoreticalOrbit::Kind::translating_soliton;
    o.profile = ProfileInterpolant(p.u, p.grid.dr, p.ell);
    o.omega = p.omega;
    o.ell = 0;
    o.v = v;
    o.gamma = 1.0 / std::sqrt(1.0 - v * v);
    o.cx = cx;
    o.cy = cy;
    return o;
}

inline TheoreticalOrbit make_rotating_orbit(const RadialProfile& p) {
    TheoreticalOrbit o;
    o.kind = TheoreticalOrbit::Kind::rotating_vortex;
    o.profile = ProfileInterpolant(p.u, p.grid.dr, p.ell);
    o.omega = p.omega;
    o.ell = p.ell;
    return o;
}

template <class Grid>
struct OrbitSample {
    std::vector<Complex> psi;
    std::vector<Complex> psi_t;
};

namespace orbitdetail {

inline double wrap_min_image(double x, double L) {
    x = std::fmod(x, L);
    if (x > 0.5 * L) x -= L;
    if (x < -0.5 * L) x += L;
    return x;
}

}  // namespace orbitdetail

// Boosted soliton psi(x, y, t) = u(rho) exp(-i omega gamma (t - v x)),
// rho^2 = gamma^2 (x - cx - v t)^2 + (y - cy)^2, with the profile argument
// taken in the minimal periodic image. psi_t by the chain rule.
inline OrbitSample<TorusGrid> eval_orbit(const TheoreticalOrbit& o, const TorusGrid& g, double t) {
    if (o.kind != TheoreticalOrbit::Kind::translating_soliton)
        throw std::invalid_argument("rotating orbits are evaluated on the polar grid");
    const double L = g.L();
    if (o.profile.value(0.5 * L) > 1e-8 * o.profile.peak_value())
        throw std::runtime_error("orbit support overflow: torus side too small");
    OrbitSample<TorusGrid> out;
    out.psi.resize(g.size());
    out.psi_t.resize(g.size());
    const double w = o.omega, ga = o.gamma, v = o.v;
    for (int iy = 0; iy < g.Nx; ++iy) {
        double Y = orbitdetail::wrap_min_image(g.y(iy) - o.cy, L);
        for (int ix = 0; ix < g.Nx; ++ix) {
            double X = orbitdetail::wrap_min_image(g.x(ix) - o.cx - v * t, L);
            double gX = ga * X;
            double rho = std::sqrt(gX * gX + Y * Y);
            double u = o.profile.value(rho);
            double phase = -w * ga * (t - v * g.x(ix));
            Complex e{std::cos(phase), std::sin(phase)};
            std::size_t k = g.idx(ix, iy);
            out.psi[k] = u * e;
            double radial = rho > 1e-12 ? -v * ga * ga * X / rho * o.profile.derivative(rho) : 0.0;
            out.psi_t[k] = e * Complex(radial, -w * ga * u);
        }
    }
    return out;
}

// Rotating vortex psi(r, theta, t) = u(r) exp(i (ell theta - omega t)),
// psi_t = -i omega psi.
inline OrbitSample<PolarGrid> eval_orbit(const TheoreticalOrbit& o, const PolarGrid& g, double t) {
    if (o.kind != TheoreticalOrbit::Kind::rotating_vortex)
        throw std::invalid_argument("translating orbits are evaluated on the torus");
    double peak = o.profile.peak_value();
    if (o.profile.value(g.r_max()) > 1e-8 * peak)
        throw std::runtime_error("orbit support overflow: polar r_max too small");
    if (o.profile.value(g.r_min) > 1e-2 * peak)
        throw std::runtime_error("orbit support overflow: polar r_min cuts into the vortex");
    OrbitSample<PolarGrid> out;
    out.psi.resize(g.size());
    out.psi_t.resize(g.size());
    const double w = o.omega;
    std::vector<double> u_ring(g.Nr + 1);
    for (int i = 0; i <= g.Nr; ++i) u_ring[i] = o.profile.value(g.r(i));
    for (int i = 0; i <= g.Nr; ++i) {
        for (int j = 0; j < g.Ntheta; ++j) {
            double phase = o.ell * g.theta(j) - w * t;
            Complex val = u_ring[i] * Complex{std::cos(phase), std::sin(phase)};
            std::size_t k = g.idx(i, j);
            out.psi[k] = val;
            out.psi_t[k] = Complex(0.0, -w) * val;
        }
    }
    return out;
}

// Leap-frog initial data: psi sampled at t = 0, psi_t sampled at t = -dt/2
// (the half-step shift matches the scheme's staggering and makes the orbital
// stability norm vanish at n = 0).
template <class Grid>
FieldState<Grid> init_from_orbit(const TheoreticalOrbit& o, const Grid& g, double dt) {
    FieldState<Grid> s;
    s.grid = g;
    s.dt = dt;
    s.n = 0;
    s.psi = eval_orbit(o, g, 0.0).psi;
    s.psi_t = eval_orbit(o, g, -0.5 * dt).psi_t;
    return s;
}

}  // namespace hylo
