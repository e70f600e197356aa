#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hylo/functionals.hpp"
#include "hylo/interp.hpp"
#include "hylo/potential.hpp"
#include "hylo/radial.hpp"

// Charge-constrained gradient flow
//   du/dtau = Delta u - F'(u) + (omega^2 - ell^2/r^2) u,   omega = -h / int u^2 dx,
// discretized with the compact central-difference stencil. The stencil is the
// exact gradient of the discrete objective lambda_h below with respect to the
// r-weighted inner product <f,g> = sum_j w_j f_j g_j built from cell volumes,
// so every step is literal projected gradient descent on lambda_h.

namespace hylo {

struct InitialGuessSpec {
    enum class Kind { annulus_bump, gaussian_ring, file };
    Kind kind = Kind::gaussian_ring;
    double amplitude = 1.0;
    double rc = 0.0;     // 0 -> max(1, sqrt(h)/3)
    double sigma = 0.0;  // 0 -> rc/2
    std::string file_path;
};

struct FlowConfig {
    double r_tilde = 60.0;
    double dr = 0.1;
    double dtau = 0.0;  // 0 -> min(0.2, 1.8/(4.5 + ell^2)) * dr^2
    double e_omega = 1e-11;
    double e_lambda = 1e-10;
    std::int64_t max_steps = 6'000'000;
    std::int64_t trace_every = 2000;
    InitialGuessSpec init;

    double effective_dtau(int ell) const {
        if (dtau > 0.0) return dtau;
        double l2 = static_cast<double>(ell) * ell;
        return std::min(0.2, 1.8 / (4.5 + l2)) * dr * dr;
    }

    void validate(int ell) const {
        if (!(r_tilde > 0.0 && dr > 0.0)) throw std::invalid_argument("FlowConfig: bad grid");
        double dt = effective_dtau(ell);
        if (!(dt <= 0.25 * dr * dr + 1e-15))
            throw std::invalid_argument("FlowConfig: dtau exceeds 0.25*dr^2 stability margin");
        if (!(e_omega <= 1e-6)) throw std::invalid_argument("FlowConfig: e_omega must be <= 1e-6");
        if (max_steps < 1) throw std::invalid_argument("FlowConfig: max_steps must be >= 1");
    }
};

struct FlowTrace {
    struct Row {
        std::int64_t step;
        double omega;
        double lambda;
        double max_residual;
    };
    std::vector<Row> rows;
    RadialProfile final;
    bool converged = false;
    std::int64_t steps_used = 0;
    double final_lambda = 0.0;    // discrete flow objective at the last iterate
    double final_residual = 0.0;  // r-weighted L2 norm of the Euler-Lagrange residual
    double residual_tol = 0.0;    // reported reference 1e-6 * max(1, ||u||_2)
    double max_lambda_increase = 0.0;
    bool boundary_warning = false;
};

namespace flowdetail {

using hylo::with_fast_potential;

// Cell-volume weights of the discrete inner product. The axis cell
// [0, dr/2] only carries weight for ell = 0 (otherwise u_0 is pinned to 0).
inline std::vector<double> cell_weights(const RadialGrid& g) {
    std::vector<double> w(g.J + 1, 0.0);
    w[0] = pi * g.dr * g.dr / 4.0;
    for (int j = 1; j < g.J; ++j) w[j] = two_pi * g.r(j) * g.dr;
    return w;
}

}  // namespace flowdetail

// Discrete charge sum(w_j u_j^2) used by the flow to enforce h.
inline double flow_charge(const RadialGrid& grid, const std::vector<double>& u) {
    auto w = flowdetail::cell_weights(grid);
    double q = 0.0;
    for (int j = 0; j < grid.J; ++j) q += w[j] * u[j] * u[j];
    return q;
}

// Discrete objective lambda_h(u) = J_h(u)/h with the flux form of the
// gradient term; its exact gradient is the flow stencil below.
inline double flow_lambda(const RadialGrid& grid, const std::vector<double>& u, int ell, double h,
                          const PotentialSpec& pot) {
    return flowdetail::with_fast_potential(pot, [&](auto f) {
        const double dr = grid.dr;
        const double l2 = static_cast<double>(ell) * ell;
        double flux = 0.0, nodes = 0.0, q = 0.0;
        {
            // axis cell
            double w0 = pi * dr * dr / 4.0;
            nodes += w0 * f.N(u[0]);
            q += w0 * u[0] * u[0];
        }
        for (int j = 0; j < grid.J; ++j) {
            double rhalf = (j + 0.5) * dr;
            double d = u[j + 1] - u[j];
            flux += rhalf * d * d;
            if (j >= 1) {
                double w = two_pi * grid.r(j) * dr;
                double cent = l2 == 0.0 ? 0.0 : 0.5 * l2 * u[j] * u[j] / (grid.r(j) * grid.r(j));
                nodes += w * (cent + f.N(u[j]));
                q += w * u[j] * u[j];
            }
        }
        double J = pi / dr * flux + nodes + 0.5 * (h * h / q + f.m2() * q);
        return J / h;
    });
}

// Flow right-hand side -h d(lambda_h): compact radial Laplacian, potential
// derivative and centrifugal/frequency terms. For ell = 0 node 0 is free and
// the axis Laplacian 4 (u_1 - u_0)/dr^2 applies.
inline void flow_rhs(const RadialGrid& grid, const std::vector<double>& u, int ell, double omega,
                     const PotentialSpec& pot, std::vector<double>& rhs) {
    flowdetail::with_fast_potential(pot, [&](auto f) {
        const double dr = grid.dr;
        const double idr2 = 1.0 / (dr * dr);
        const double om2 = omega * omega;
        const double l2 = static_cast<double>(ell) * ell;
        rhs.assign(grid.J + 1, 0.0);
        if (ell == 0) rhs[0] = 4.0 * (u[1] - u[0]) * idr2 - f.Fprime(u[0]) + om2 * u[0];
        for (int j = 1; j < grid.J; ++j) {
            double r = grid.r(j);
            double lap = (u[j + 1] - 2.0 * u[j] + u[j - 1]) * idr2 +
                         (u[j + 1] - u[j - 1]) / (2.0 * dr * r);
            double cent = l2 == 0.0 ? 0.0 : l2 / (r * r);
            rhs[j] = lap - f.Fprime(u[j]) + (om2 - cent) * u[j];
        }
    });
}

// One explicit Euler step with positivity projection and per-step charge
// enforcement. A vanishing profile is a fixed point.
inline RadialProfile flow_step(const RadialProfile& p, const PotentialSpec& pot,
                               const FlowConfig& cfg) {
    cfg.validate(p.ell);
    RadialProfile out = p;
    bool all_zero = true;
    for (double v : p.u)
        if (v != 0.0) {
            all_zero = false;
            break;
        }
    if (all_zero) return out;

    const double dtau = cfg.effective_dtau(p.ell);
    std::vector<double> rhs;
    flow_rhs(p.grid, p.u, p.ell, p.omega, pot, rhs);
    const int j_lo = p.ell == 0 ? 0 : 1;
    for (int j = j_lo; j < p.grid.J; ++j) out.u[j] = std::max(0.0, p.u[j] + dtau * rhs[j]);
    if (p.ell != 0) out.u[0] = 0.0;
    out.u[p.grid.J] = 0.0;
    double q = flow_charge(p.grid, out.u);
    if (!std::isfinite(q) || !(q > 0.0)) throw std::runtime_error("flow blow-up at step 0");
    out.omega = -p.h / q;
    return out;
}

namespace flowdetail {

inline std::vector<double> initial_guess(const InitialGuessSpec& spec, const RadialGrid& grid,
                                         int ell, double h) {
    std::vector<double> u(grid.J + 1, 0.0);
    if (spec.kind == InitialGuessSpec::Kind::file) {
        ProfileFile pf = read_profile_csv(spec.file_path);
        ProfileInterpolant ip(pf.profile.u, pf.profile.grid.dr, pf.profile.ell);
        for (int j = 0; j <= grid.J; ++j) u[j] = std::max(0.0, ip.value(grid.r(j)));
    } else {
        double rc = spec.rc > 0.0 ? spec.rc : std::max(1.0, std::sqrt(h) / 3.0);
        double sg = spec.sigma > 0.0 ? spec.sigma : 0.5 * rc;
        double A = spec.amplitude;
        int la = std::abs(ell);
        for (int j = (la > 0 ? 1 : 0); j <= grid.J; ++j) {
            double r = grid.r(j);
            double x = (r - rc) / sg;
            if (spec.kind == InitialGuessSpec::Kind::gaussian_ring) {
                double lg = la > 0 ? la * std::log(r / rc) : 0.0;
                u[j] = A * std::exp(lg - x * x);
            } else {
                u[j] = A * std::max(0.0, 1.0 - x * x);
            }
        }
    }
    if (ell != 0) u[0] = 0.0;
    u[grid.J] = 0.0;
    return u;
}

}  // namespace flowdetail

// Gradient-flow minimization of lambda_h at fixed charge h. Stops when the
// per-step relative changes of omega and lambda both fall below the
// configured thresholds. ell = 0 switches the axis condition from Dirichlet
// to Neumann (free node with the regular axis Laplacian).
inline FlowTrace solve_charge_flow(const PotentialSpec& pot, int ell, double h,
                                   const FlowConfig& cfg) {
    cfg.validate(ell);
    if (!(h > 0.0)) throw std::invalid_argument("solve: h must be positive");
    RadialGrid grid = make_radial_grid(cfg.r_tilde, cfg.dr);
    const double dtau = cfg.effective_dtau(ell);
    const int j_lo = ell == 0 ? 0 : 1;
    const double l2 = static_cast<double>(ell) * ell;
    const double idr2 = 1.0 / (grid.dr * grid.dr);

    std::vector<double> u = flowdetail::initial_guess(cfg.init, grid, ell, h);
    auto w = flowdetail::cell_weights(grid);

    FlowTrace trace;
    return flowdetail::with_fast_potential(pot, [&](auto f) -> FlowTrace {
        const double m2 = f.m2();
        auto lambda_and_charge = [&](const std::vector<double>& v, double& q_out) {
            double flux = 0.0, nodes = w[0] * f.N(v[0]), q = w[0] * v[0] * v[0];
            for (int j = 0; j < grid.J; ++j) {
                double d = v[j + 1] - v[j];
                flux += (j + 0.5) * grid.dr * d * d;
                if (j >= 1) {
                    double cent =
                        l2 == 0.0 ? 0.0 : 0.5 * l2 * v[j] * v[j] / (grid.r(j) * grid.r(j));
                    nodes += w[j] * (cent + f.N(v[j]));
                    q += w[j] * v[j] * v[j];
                }
            }
            q_out = q;
            return (pi / grid.dr * flux + nodes + 0.5 * (h * h / q + m2 * q)) / h;
        };

        double q = 0.0;
        double lambda = lambda_and_charge(u, q);
        if (!(q > 0.0)) throw std::runtime_error("degenerate profile: initial guess vanishes");
        double omega = -h / q;

        std::vector<double> rhs(grid.J + 1, 0.0);
        std::int64_t step = 0;
        bool converged = false;

        auto record = [&](double max_res) {
            trace.rows.push_back({step, omega, lambda, max_res});
        };

        double max_res = 0.0;
        for (step = 0; step < cfg.max_steps; ++step) {
            const double om2 = omega * omega;
            max_res = 0.0;
            if (ell == 0) {
                rhs[0] = 4.0 * (u[1] - u[0]) * idr2 - f.Fprime(u[0]) + om2 * u[0];
                max_res = std::abs(rhs[0]);
            }
            for (int j = 1; j < grid.J; ++j) {
                double r = grid.r(j);
                double lap =
                    (u[j + 1] - 2.0 * u[j] + u[j - 1]) * idr2 + (u[j + 1] - u[j - 1]) / (2.0 * grid.dr * r);
                double cent = l2 == 0.0 ? 0.0 : l2 / (r * r);
                double v = lap - f.Fprime(u[j]) + (om2 - cent) * u[j];
                rhs[j] = v;
                max_res = std::max(max_res, std::abs(v));
            }
            if (step % cfg.trace_every == 0) record(max_res);

            for (int j = j_lo; j < grid.J; ++j) u[j] = std::max(0.0, u[j] + dtau * rhs[j]);

            double q_new = 0.0;
            double lambda_new = lambda_and_charge(u, q_new);
            if (!std::isfinite(lambda_new) || !std::isfinite(q_new) || !(q_new > 0.0))
                throw std::runtime_error("flow blow-up at step " + std::to_string(step));
            double omega_new = -h / q_new;

            trace.max_lambda_increase = std::max(trace.max_lambda_increase, lambda_new - lambda);
            bool omega_ok = std::abs(omega_new - omega) < cfg.e_omega * std::abs(omega);
            bool lambda_ok = std::abs(lambda_new - lambda) < cfg.e_lambda * std::abs(lambda);
            omega = omega_new;
            lambda = lambda_new;
            if (omega_ok && lambda_ok) {
                converged = true;
                ++step;
                break;
            }
        }

        trace.converged = converged;
        trace.steps_used = step;
        trace.final_lambda = lambda;

        RadialProfile prof;
        prof.grid = grid;
        prof.u = u;
        prof.ell = ell;
        prof.h = h;
        prof.omega = omega_from_charge(prof, h);  // Simpson convention for the artifact

        // Euler-Lagrange residual of the output profile, r-weighted L2 norm.
        flow_rhs(grid, u, ell, prof.omega, pot, rhs);
        double res2 = 0.0;
        for (int j = j_lo; j < grid.J; ++j) res2 += w[j] * rhs[j] * rhs[j];
        trace.final_residual = std::sqrt(res2);
        trace.residual_tol = 1e-6 * std::max(1.0, std::sqrt(charge_integral(prof)));

        double umax = *std::max_element(u.begin(), u.end());
        for (int j = 0; j <= grid.J; ++j)
            if (grid.r(j) > 0.9 * grid.r_tilde() && u[j] > 1e-8 * umax) {
                trace.boundary_warning = true;  // support touches boundary
                break;
            }

        record(trace.rows.empty() ? 0.0 : max_res);
        trace.final = std::move(prof);
        return trace;
    });
}

// Vortex profile, ell != 0: Dirichlet at both ends.
inline FlowTrace solve_profile(const PotentialSpec& pot, int ell, double h, const FlowConfig& cfg) {
    if (ell == 0) throw std::invalid_argument("solve_profile: ell must be nonzero (use solve_soliton)");
    return solve_charge_flow(pot, ell, h, cfg);
}

// Non-rotating soliton: ell = 0, Neumann axis condition u'(0) = 0.
inline FlowTrace solve_soliton(const PotentialSpec& pot, double h, const FlowConfig& cfg) {
    return solve_charge_flow(pot, 0, h, cfg);
}

}  // namespace hylo
