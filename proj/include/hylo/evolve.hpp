#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "hylo/field.hpp"
#include "hylo/grids.hpp"
#include "hylo/potential.hpp"

// Staggered leap-frog integration of psi_tt = Delta psi - W'(psi):
//   psi_t^{n+1/2} = psi_t^{n-1/2} + dt (Delta_h psi^n - W'(psi^n))
//   psi^{n+1}     = psi^n + dt psi_t^{n+1/2}
// with W'(psi) = [F'(|psi|)/|psi|] psi (value 0 at psi = 0). The Laplacian is
// the 5-point periodic stencil on the torus and
// psi_rr + psi_r / r + psi_thth / r^2 on the polar grid, where the boundary
// rings stay frozen at their initial (Dirichlet) data.

namespace hylo {

template <class PotFn>
void accel_into(const TorusGrid& g, const std::vector<Complex>& psi, const PotFn& f,
                std::vector<Complex>& out) {
    const double idx2 = 1.0 / (g.dx * g.dx);
    out.resize(psi.size());
    for (int iy = 0; iy < g.Nx; ++iy) {
        int yp = iy + 1 == g.Nx ? 0 : iy + 1;
        int ym = iy == 0 ? g.Nx - 1 : iy - 1;
        for (int ix = 0; ix < g.Nx; ++ix) {
            int xp = ix + 1 == g.Nx ? 0 : ix + 1;
            int xm = ix == 0 ? g.Nx - 1 : ix - 1;
            std::size_t k = g.idx(ix, iy);
            Complex lap = (psi[g.idx(xp, iy)] + psi[g.idx(xm, iy)] + psi[g.idx(ix, yp)] +
                           psi[g.idx(ix, ym)] - 4.0 * psi[k]) *
                          idx2;
            out[k] = lap - f.Fprime_over_s(std::abs(psi[k])) * psi[k];
        }
    }
}

template <class PotFn>
void accel_into(const PolarGrid& g, const std::vector<Complex>& psi, const PotFn& f,
                std::vector<Complex>& out) {
    const double idr2 = 1.0 / (g.dr * g.dr);
    const double idt2 = 1.0 / (g.dtheta() * g.dtheta());
    out.assign(psi.size(), Complex{0.0, 0.0});
    for (int i = 1; i < g.Nr; ++i) {
        const double r = g.r(i);
        const double ir2_t = idt2 / (r * r);
        const double ir_2dr = 1.0 / (2.0 * g.dr * r);
        for (int j = 0; j < g.Ntheta; ++j) {
            int jp = j + 1 == g.Ntheta ? 0 : j + 1;
            int jm = j == 0 ? g.Ntheta - 1 : j - 1;
            std::size_t k = g.idx(i, j);
            Complex up = psi[g.idx(i + 1, j)], um = psi[g.idx(i - 1, j)];
            Complex lap = (up - 2.0 * psi[k] + um) * idr2 + (up - um) * ir_2dr +
                          (psi[g.idx(i, jp)] - 2.0 * psi[k] + psi[g.idx(i, jm)]) * ir2_t;
            out[k] = lap - f.Fprime_over_s(std::abs(psi[k])) * psi[k];
        }
    }
}

// Acceleration Delta_h psi - W'(psi) at the current psi.
template <class Grid>
std::vector<Complex> acceleration(const Grid& g, const std::vector<Complex>& psi,
                                  const PotentialSpec& pot) {
    std::vector<Complex> a;
    with_fast_potential(pot, [&](auto f) { accel_into(g, psi, f, a); });
    return a;
}

template <class Grid, class PotFn>
void leapfrog_step_inplace(FieldState<Grid>& s, const PotFn& f, std::vector<Complex>& scratch) {
    accel_into(s.grid, s.psi, f, scratch);
    const double dt = s.dt;
    for (std::size_t k = 0; k < s.psi.size(); ++k) {
        s.psi_t[k] += dt * scratch[k];
        s.psi[k] += dt * s.psi_t[k];
    }
    ++s.n;
}

// Single kick-drift step (functional form).
template <class Grid>
FieldState<Grid> leapfrog_step(const FieldState<Grid>& s, const PotentialSpec& pot) {
    FieldState<Grid> out = s;
    std::vector<Complex> scratch;
    with_fast_potential(pot, [&](auto f) { leapfrog_step_inplace(out, f, scratch); });
    return out;
}

// Exact time reversal: advances the stored velocity by one kick so it sits at
// t_n + dt/2, then negates it. Running the scheme forward from the reversed
// state retraces the trajectory.
template <class Grid>
void reverse_in_place(FieldState<Grid>& s, const PotentialSpec& pot) {
    std::vector<Complex> a = acceleration(s.grid, s.psi, pot);
    for (std::size_t k = 0; k < s.psi.size(); ++k) s.psi_t[k] = -(s.psi_t[k] + s.dt * a[k]);
    s.n = 0;
}

}  // namespace hylo
