#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hylo/common.hpp"

namespace hylo {

// Square periodic domain [0, L) x [0, L), L = Nx * dx, Nx even.
struct TorusGrid {
    double dx = 1.0;
    int Nx = 0;

    double L() const { return Nx * dx; }
    std::size_t size() const { return static_cast<std::size_t>(Nx) * Nx; }
    std::size_t idx(int ix, int iy) const { return static_cast<std::size_t>(iy) * Nx + ix; }
    double x(int ix) const { return ix * dx; }
    double y(int iy) const { return iy * dx; }

    void validate() const {
        if (!(dx > 0.0)) throw std::invalid_argument("TorusGrid: dx must be positive");
        if (Nx < 4) throw std::invalid_argument("TorusGrid: Nx must be >= 4");
        if (Nx % 2 != 0) throw std::runtime_error("quadrature parity error: Nx must be even");
    }
};

inline TorusGrid make_torus_grid(double L_target, double dx) {
    TorusGrid g{dx, ceil_even(L_target / dx)};
    g.validate();
    return g;
}

// Annular polar grid: rings r_i = r_min + i dr (i = 0..Nr), Ntheta uniform
// angular sectors. Rings 0 and Nr carry Dirichlet data. The arc constraint
// r_max * dtheta <= dr keeps the circumferential spacing at least as fine as
// the radial one.
struct PolarGrid {
    double r_min = 0.0;
    double dr = 1.0;
    int Nr = 0;
    int Ntheta = 0;

    double r_max() const { return r_min + Nr * dr; }
    double dtheta() const { return two_pi / Ntheta; }
    double r(int i) const { return r_min + i * dr; }
    double theta(int j) const { return j * dtheta(); }
    std::size_t size() const { return static_cast<std::size_t>(Nr + 1) * Ntheta; }
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * Ntheta + j; }

    void validate() const {
        if (!(dr > 0.0) || r_min < 0.0) throw std::invalid_argument("PolarGrid: bad spacing");
        if (Nr < 4 || Ntheta < 8) throw std::invalid_argument("PolarGrid: grid too small");
        if (Nr % 2 != 0 || Ntheta % 2 != 0)
            throw std::runtime_error("quadrature parity error: Nr and Ntheta must be even");
        if (r_max() * dtheta() > dr * (1.0 + 1e-9))
            throw std::invalid_argument("PolarGrid: arc constraint r_max*dtheta <= dr violated");
    }
};

// Builds a polar grid covering [r_min_target, r_max_target]. r_min snaps to a
// half-cell offset (k + 1/2) dr so no ring sits at r = 0; Ntheta is the
// smallest even count satisfying the arc constraint at r_max.
inline PolarGrid make_polar_grid(double dr, double r_max_target, double r_min_target = 0.0) {
    PolarGrid g;
    g.dr = dr;
    int k = static_cast<int>(std::floor(r_min_target / dr - 0.5 + 1e-12));
    if (k < 0) k = 0;
    g.r_min = (k + 0.5) * dr;
    g.Nr = ceil_even((r_max_target - g.r_min) / dr);
    g.Ntheta = ceil_even(two_pi * g.r_max() / dr);
    g.validate();
    return g;
}

}  // namespace hylo
