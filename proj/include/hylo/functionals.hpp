#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hylo/potential.hpp"
#include "hylo/radial.hpp"

// Reduced functionals on radial profiles. All integrals are 2D polar
// integrals, int . dx = 2 pi int_0^rt (.) r dr, by composite Simpson
// quadrature on the profile grid.

namespace hylo {

// int u^2 dx. Strictly positive unless u == 0.
inline double charge_integral(const RadialProfile& p) {
    double q = integrate_radial(p.grid, [&](int j) { return p.u[j] * p.u[j]; });
    if (!(q > 0.0)) throw std::runtime_error("degenerate profile: vanishing charge integral");
    return q;
}

// omega(u, h) = -h / int u^2 dx; always negative for h > 0.
inline double omega_from_charge(const RadialProfile& p, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("omega_from_charge: h must be positive");
    return -h / charge_integral(p);
}

// E(u, omega, ell) = int [ 1/2 u'^2 + 1/2 (omega^2 + ell^2/r^2) u^2 + F(u) ] dx.
// The centrifugal integrand at r = 0 is defined as 0 (u vanishes there).
inline double energy(const RadialProfile& p, const PotentialSpec& pot) {
    const auto du = radial_derivative(p.u, p.grid.dr);
    const double om2 = p.omega * p.omega;
    const double l2 = static_cast<double>(p.ell) * p.ell;
    return integrate_radial(p.grid, [&](int j) {
        double r = p.grid.r(j);
        double cent = (j == 0 || l2 == 0.0) ? 0.0 : l2 / (r * r);
        double u = p.u[j];
        return 0.5 * du[j] * du[j] + 0.5 * (om2 + cent) * u * u + pot.F(u);
    });
}

// J_h(u, ell) = int [ 1/2 u'^2 + 1/2 (ell^2/r^2) u^2 + N(u) ] dx
//             + 1/2 ( h^2 / ||u||_2^2 + m^2 ||u||_2^2 ).
// Coincides with E(u, omega(u,h), ell).
inline double j_functional(const RadialProfile& p, const PotentialSpec& pot, double h) {
    const double q = charge_integral(p);
    const auto du = radial_derivative(p.u, p.grid.dr);
    const double l2 = static_cast<double>(p.ell) * p.ell;
    double bulk = integrate_radial(p.grid, [&](int j) {
        double r = p.grid.r(j);
        double cent = (j == 0 || l2 == 0.0) ? 0.0 : l2 / (r * r);
        double u = p.u[j];
        return 0.5 * du[j] * du[j] + 0.5 * cent * u * u + pot.N(u);
    });
    return bulk + 0.5 * (h * h / q + pot.m * pot.m * q);
}

// Lambda_h(u, ell) = J_h(u, ell) / h.
inline double hylomorphy_ratio(const RadialProfile& p, const PotentialSpec& pot) {
    return j_functional(p, pot, p.h) / p.h;
}

// Sampled alpha_0 = min over a log-spaced s-grid of F(s) / (s^2/2).
inline double alpha0_sampled(const PotentialSpec& pot, double s_max, int n = 10000) {
    if (!(s_max > 0.0)) throw std::invalid_argument("alpha0_sampled: s_max must be positive");
    const double s_lo = s_max * 1e-4;
    const double step = std::log(s_max / s_lo) / (n - 1);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        double s = s_lo * std::exp(i * step);
        best = std::min(best, pot.F(s) / (0.5 * s * s));
    }
    return best;
}

// Rayleigh-type quotient of the annulus test function with plateau s0 on
// [Rn, 2 Rn], unit-width linear ramps, winding ell = 1:
//   alpha(u) = int( 1/2 |grad u|^2 + 1/2 u^2/r^2 + F(u) ) dx / int( u^2/2 ) dx.
inline double annulus_alpha(const PotentialSpec& pot, double s0, double Rn) {
    if (!(Rn > 2.0)) throw std::invalid_argument("annulus_alpha: Rn must exceed 2");
    const double r_out = 2.0 * Rn + 2.0;
    const double dr = 0.02;
    RadialGrid grid = make_radial_grid(r_out, dr);
    std::vector<double> u(grid.J + 1, 0.0);
    for (int j = 0; j <= grid.J; ++j) {
        double r = grid.r(j);
        if (r <= Rn - 1.0 || r >= 2.0 * Rn + 1.0) continue;
        if (r < Rn) u[j] = s0 * (r - Rn + 1.0);
        else if (r <= 2.0 * Rn) u[j] = s0;
        else u[j] = s0 * (2.0 * Rn - r + 1.0);
    }
    const auto du = radial_derivative(u, dr);
    double num = integrate_radial(grid, [&](int j) {
        double r = grid.r(j);
        double cent = j == 0 ? 0.0 : 1.0 / (r * r);
        return 0.5 * du[j] * du[j] + 0.5 * cent * u[j] * u[j] + pot.F(u[j]);
    });
    double den = integrate_radial(grid, [&](int j) { return 0.5 * u[j] * u[j]; });
    return num / den;
}

// Evaluates the annulus quotient along an increasing sequence of radii.
// s0 must be a genuine hylomorphy point, N(s0) < 0.
inline std::vector<std::pair<double, double>> hylomorphy_probe(const PotentialSpec& pot, double s0,
                                                               const std::vector<double>& Rn_list) {
    if (!(pot.N(s0) < 0.0))
        throw std::runtime_error("hylomorphy point invalid: N(s0) >= 0 at s0=" + fmt_g17(s0));
    for (std::size_t i = 1; i < Rn_list.size(); ++i)
        if (!(Rn_list[i] > Rn_list[i - 1]))
            throw std::invalid_argument("hylomorphy_probe: Rn_list must be increasing");
    std::vector<std::pair<double, double>> out;
    out.reserve(Rn_list.size());
    for (double Rn : Rn_list) out.emplace_back(Rn, annulus_alpha(pot, s0, Rn));
    return out;
}

}  // namespace hylo
