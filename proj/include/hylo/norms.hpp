#pragma once

#include <cmath>
#include <vector>

#include "hylo/field.hpp"
#include "hylo/grids.hpp"

// Discrete L2 and H1 norms by classical fourth-order Simpson quadrature.
// Gradients use central differences respecting the grid topology: periodic
// wrap on the torus, one-sided 2nd-order stencils at the polar radial
// boundaries, and the polar gradient components (d_r psi, r^-1 d_theta psi).

namespace hylo {

// Simpson coefficients over a closed interval with n even subintervals:
// {1, 4, 2, ..., 2, 4, 1} / 3.
inline std::vector<double> simpson_coeffs_closed(int n) {
    if (n < 2 || n % 2 != 0) throw std::runtime_error("quadrature parity error");
    std::vector<double> c(n + 1);
    for (int i = 0; i <= n; ++i)
        c[i] = (i == 0 || i == n) ? 1.0 / 3.0 : (i % 2 == 1 ? 4.0 / 3.0 : 2.0 / 3.0);
    return c;
}

// Periodic Simpson coefficients (node n identified with node 0).
inline std::vector<double> simpson_coeffs_periodic(int n) {
    if (n < 2 || n % 2 != 0) throw std::runtime_error("quadrature parity error");
    std::vector<double> c(n);
    for (int i = 0; i < n; ++i) c[i] = i % 2 == 1 ? 4.0 / 3.0 : 2.0 / 3.0;
    return c;
}

// Integral over the torus of a nodal density (Simpson weights; used for the
// discrete norms).
template <class DensityFn>
double integrate(const TorusGrid& g, DensityFn&& f) {
    auto c = simpson_coeffs_periodic(g.Nx);
    double acc = 0.0;
    for (int iy = 0; iy < g.Nx; ++iy) {
        double row = 0.0;
        for (int ix = 0; ix < g.Nx; ++ix) row += c[ix] * f(ix, iy);
        acc += c[iy] * row;
    }
    return acc * g.dx * g.dx;
}

// Uniform cell-sum integral on the torus (the periodic trapezoid rule). This
// is the quadrature under which the leap-frog scheme conserves charge
// exactly; first integrals use it so their drift reflects the scheme, not
// the sampling. On smooth periodic fields it is spectrally accurate.
template <class DensityFn>
double integrate_cells(const TorusGrid& g, DensityFn&& f) {
    double acc = 0.0;
    for (int iy = 0; iy < g.Nx; ++iy) {
        double row = 0.0;
        for (int ix = 0; ix < g.Nx; ++ix) row += f(ix, iy);
        acc += row;
    }
    return acc * g.dx * g.dx;
}

// Integral over the annulus of a nodal density (the r dr dtheta measure).
template <class DensityFn>
double integrate(const PolarGrid& g, DensityFn&& f) {
    auto cr = simpson_coeffs_closed(g.Nr);
    auto ct = simpson_coeffs_periodic(g.Ntheta);
    double acc = 0.0;
    for (int i = 0; i <= g.Nr; ++i) {
        double ring = 0.0;
        for (int j = 0; j < g.Ntheta; ++j) ring += ct[j] * f(i, j);
        acc += cr[i] * g.r(i) * ring;
    }
    return acc * g.dr * g.dtheta();
}

namespace gradient {

// d/dx and d/dy on the torus, periodic central differences.
inline void torus(const TorusGrid& g, const std::vector<Complex>& psi, int ix, int iy, Complex& gx,
                  Complex& gy) {
    int xp = ix + 1 == g.Nx ? 0 : ix + 1;
    int xm = ix == 0 ? g.Nx - 1 : ix - 1;
    int yp = iy + 1 == g.Nx ? 0 : iy + 1;
    int ym = iy == 0 ? g.Nx - 1 : iy - 1;
    gx = (psi[g.idx(xp, iy)] - psi[g.idx(xm, iy)]) / (2.0 * g.dx);
    gy = (psi[g.idx(ix, yp)] - psi[g.idx(ix, ym)]) / (2.0 * g.dx);
}

// d/dr (one-sided at the boundary rings) and r^-1 d/dtheta on the annulus.
inline void polar(const PolarGrid& g, const std::vector<Complex>& psi, int i, int j, Complex& gr,
                  Complex& gt_over_r) {
    int jp = j + 1 == g.Ntheta ? 0 : j + 1;
    int jm = j == 0 ? g.Ntheta - 1 : j - 1;
    if (i == 0)
        gr = (-3.0 * psi[g.idx(0, j)] + 4.0 * psi[g.idx(1, j)] - psi[g.idx(2, j)]) / (2.0 * g.dr);
    else if (i == g.Nr)
        gr = (3.0 * psi[g.idx(i, j)] - 4.0 * psi[g.idx(i - 1, j)] + psi[g.idx(i - 2, j)]) /
             (2.0 * g.dr);
    else
        gr = (psi[g.idx(i + 1, j)] - psi[g.idx(i - 1, j)]) / (2.0 * g.dr);
    gt_over_r = (psi[g.idx(i, jp)] - psi[g.idx(i, jm)]) / (2.0 * g.dtheta() * g.r(i));
}

}  // namespace gradient

inline double discrete_l2_norm(const TorusGrid& g, const std::vector<Complex>& psi) {
    return std::sqrt(integrate(g, [&](int ix, int iy) { return std::norm(psi[g.idx(ix, iy)]); }));
}

inline double discrete_l2_norm(const PolarGrid& g, const std::vector<Complex>& psi) {
    return std::sqrt(integrate(g, [&](int i, int j) { return std::norm(psi[g.idx(i, j)]); }));
}

inline double discrete_h1_norm(const TorusGrid& g, const std::vector<Complex>& psi) {
    return std::sqrt(integrate(g, [&](int ix, int iy) {
        Complex gx, gy;
        gradient::torus(g, psi, ix, iy, gx, gy);
        return std::norm(psi[g.idx(ix, iy)]) + std::norm(gx) + std::norm(gy);
    }));
}

inline double discrete_h1_norm(const PolarGrid& g, const std::vector<Complex>& psi) {
    return std::sqrt(integrate(g, [&](int i, int j) {
        Complex gr, gt;
        gradient::polar(g, psi, i, j, gr, gt);
        return std::norm(psi[g.idx(i, j)]) + std::norm(gr) + std::norm(gt);
    }));
}

// Distance versions, ||a - b||, evaluated without forming the difference field.
template <class Grid>
double discrete_l2_dist(const Grid& g, const std::vector<Complex>& a,
                        const std::vector<Complex>& b) {
    std::vector<Complex> d(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) d[k] = a[k] - b[k];
    return discrete_l2_norm(g, d);
}

template <class Grid>
double discrete_h1_dist(const Grid& g, const std::vector<Complex>& a,
                        const std::vector<Complex>& b) {
    std::vector<Complex> d(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) d[k] = a[k] - b[k];
    return discrete_h1_norm(g, d);
}

}  // namespace hylo
