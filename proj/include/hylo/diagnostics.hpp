#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hylo/evolve.hpp"
#include "hylo/field.hpp"
#include "hylo/norms.hpp"
#include "hylo/orbit.hpp"

// First integrals and the discrete orbital stability norm. All integrals use
// Simpson quadrature; the velocity entering an integral at level n is the
// time-centered average of psi_t^{n-1/2} and psi_t^{n+1/2}, which removes the
// leading staggering bias.

namespace hylo {

struct FirstIntegrals {
    double energy = 0.0;
    double charge = 0.0;
    double angmom = 0.0;
    double momentum_x = 0.0;
    double momentum_y = 0.0;
};

struct DiagnosticsRecord {
    double t = 0.0;
    double energy = 0.0;
    double charge = 0.0;
    double angmom = 0.0;
    double momentum_x = 0.0;
    double momentum_y = 0.0;
    double delta_os = 0.0;
};

namespace diagdetail {

template <class Grid>
std::vector<Complex> centered_velocity(const FieldState<Grid>& s, const PotentialSpec& pot) {
    std::vector<Complex> a = acceleration(s.grid, s.psi, pot);
    for (std::size_t k = 0; k < a.size(); ++k) a[k] = s.psi_t[k] + 0.5 * s.dt * a[k];
    return a;
}

}  // namespace diagdetail

// Energy, charge, angular momentum about the domain center and linear
// momentum of a torus state. Cell sums (integrate_cells) keep the charge an
// exact invariant of the stepping; Simpson weights would sample the moving
// density with an alternating-weight aliasing error several orders larger.
inline FirstIntegrals first_integrals(const TorusState& s, const PotentialSpec& pot) {
    const TorusGrid& g = s.grid;
    std::vector<Complex> vc = diagdetail::centered_velocity(s, pot);
    FirstIntegrals out;
    const double c0 = 0.5 * g.L();
    out.energy = with_fast_potential(pot, [&](auto f) {
        return integrate_cells(g, [&](int ix, int iy) {
            Complex gx, gy;
            gradient::torus(g, s.psi, ix, iy, gx, gy);
            std::size_t k = g.idx(ix, iy);
            return 0.5 * std::norm(vc[k]) + 0.5 * (std::norm(gx) + std::norm(gy)) +
                   f.F(std::abs(s.psi[k]));
        });
    });
    out.charge = integrate_cells(g, [&](int ix, int iy) {
        std::size_t k = g.idx(ix, iy);
        return std::imag(vc[k] * std::conj(s.psi[k]));
    });
    out.angmom = integrate_cells(g, [&](int ix, int iy) {
        Complex gx, gy;
        gradient::torus(g, s.psi, ix, iy, gx, gy);
        std::size_t k = g.idx(ix, iy);
        Complex dtheta_psi = (g.x(ix) - c0) * gy - (g.y(iy) - c0) * gx;
        return std::real(dtheta_psi * std::conj(vc[k]));
    });
    out.momentum_x = -integrate_cells(g, [&](int ix, int iy) {
        Complex gx, gy;
        gradient::torus(g, s.psi, ix, iy, gx, gy);
        return std::real(vc[g.idx(ix, iy)] * std::conj(gx));
    });
    out.momentum_y = -integrate_cells(g, [&](int ix, int iy) {
        Complex gx, gy;
        gradient::torus(g, s.psi, ix, iy, gx, gy);
        return std::real(vc[g.idx(ix, iy)] * std::conj(gy));
    });
    return out;
}

inline FirstIntegrals first_integrals(const PolarState& s, const PotentialSpec& pot) {
    const PolarGrid& g = s.grid;
    std::vector<Complex> vc = diagdetail::centered_velocity(s, pot);
    FirstIntegrals out;
    out.energy = with_fast_potential(pot, [&](auto f) {
        return integrate(g, [&](int i, int j) {
            Complex gr, gt;
            gradient::polar(g, s.psi, i, j, gr, gt);
            std::size_t k = g.idx(i, j);
            return 0.5 * std::norm(vc[k]) + 0.5 * (std::norm(gr) + std::norm(gt)) +
                   f.F(std::abs(s.psi[k]));
        });
    });
    out.charge = integrate(g, [&](int i, int j) {
        std::size_t k = g.idx(i, j);
        return std::imag(vc[k] * std::conj(s.psi[k]));
    });
    // x cross grad reduces to d/dtheta on the polar grid
    out.angmom = integrate(g, [&](int i, int j) {
        int jp = j + 1 == g.Ntheta ? 0 : j + 1;
        int jm = j == 0 ? g.Ntheta - 1 : j - 1;
        Complex dth = (s.psi[g.idx(i, jp)] - s.psi[g.idx(i, jm)]) / (2.0 * g.dtheta());
        return std::real(dth * std::conj(vc[g.idx(i, j)]));
    });
    out.momentum_x = -integrate(g, [&](int i, int j) {
        Complex gr, gt;
        gradient::polar(g, s.psi, i, j, gr, gt);
        double th = g.theta(j);
        Complex dx_psi = std::cos(th) * gr - std::sin(th) * gt;
        return std::real(vc[g.idx(i, j)] * std::conj(dx_psi));
    });
    out.momentum_y = -integrate(g, [&](int i, int j) {
        Complex gr, gt;
        gradient::polar(g, s.psi, i, j, gr, gt);
        double th = g.theta(j);
        Complex dy_psi = std::sin(th) * gr + std::cos(th) * gt;
        return std::real(vc[g.idx(i, j)] * std::conj(dy_psi));
    });
    return out;
}

// The two distances entering delta_OS: the H1 mismatch of psi at t = n dt
// and the L2 mismatch of the staggered velocity at t = (n - 1/2) dt, each
// also available as a fraction of its own orbit norm. delta_OS itself scales
// the summed distances by the summed t = 0 orbit norms; a numerical solution
// fully decorrelated from the orbit then plateaus near sqrt(2), which is the
// level the coarse-grid experiments are judged against.
struct OsNormTerms {
    double field_dist = 0.0;     // ||psi^n - psi_th(n dt)||_H1
    double velocity_dist = 0.0;  // ||psi_t^{n-1/2} - psi_t_th((n-1/2) dt)||_L2
    double field_norm = 0.0;     // ||psi_th(0)||_H1
    double velocity_norm = 0.0;  // ||psi_t_th(-dt/2)||_L2
    double field_fraction() const { return field_dist / field_norm; }
    double velocity_fraction() const { return velocity_dist / velocity_norm; }
    double total() const { return (field_dist + velocity_dist) / (field_norm + velocity_norm); }
};

template <class Grid>
OsNormTerms orbital_stability_terms(const FieldState<Grid>& s, const TheoreticalOrbit& o) {
    const Grid& g = s.grid;
    OrbitSample<Grid> ref_now = eval_orbit(o, g, s.t());
    OrbitSample<Grid> ref_half = eval_orbit(o, g, (s.n - 0.5) * s.dt);
    OrbitSample<Grid> ref0 = eval_orbit(o, g, 0.0);
    OrbitSample<Grid> ref0_half = eval_orbit(o, g, -0.5 * s.dt);
    OsNormTerms terms;
    terms.field_norm = discrete_h1_norm(g, ref0.psi);
    terms.velocity_norm = discrete_l2_norm(g, ref0_half.psi_t);
    if (!(terms.field_norm > 0.0) || !(terms.velocity_norm > 0.0))
        throw std::runtime_error("degenerate orbit normalization");
    terms.field_dist = discrete_h1_dist(g, s.psi, ref_now.psi);
    terms.velocity_dist = discrete_l2_dist(g, s.psi_t, ref_half.psi_t);
    return terms;
}

// delta_OS at the state's current step.
template <class Grid>
double orbital_stability_norm(const FieldState<Grid>& s, const TheoreticalOrbit& o) {
    return orbital_stability_terms(s, o).total();
}

// --- drift statistics ------------------------------------------------------

struct DriftStat {
    double mean = 0.0;
    double min_rel_dev = 0.0;
    double max_rel_dev = 0.0;
};

struct DriftReport {
    DriftStat energy, charge, angmom;
    std::optional<double> rupture_time;
    double rupture_threshold = 0.0;
};

namespace diagdetail {

template <class Getter>
DriftStat drift_stat(const std::vector<DiagnosticsRecord>& recs, Getter&& get) {
    DriftStat st;
    double sum = 0.0;
    for (const auto& r : recs) sum += get(r);
    st.mean = sum / static_cast<double>(recs.size());
    double scale = std::abs(st.mean) > 1e-300 ? std::abs(st.mean) : 1.0;
    st.min_rel_dev = std::numeric_limits<double>::infinity();
    st.max_rel_dev = -std::numeric_limits<double>::infinity();
    for (const auto& r : recs) {
        double dev = (get(r) - st.mean) / scale;
        st.min_rel_dev = std::min(st.min_rel_dev, dev);
        st.max_rel_dev = std::max(st.max_rel_dev, dev);
    }
    return st;
}

}  // namespace diagdetail

// Per-integral deviations about the time average, plus the earliest time the
// orbital stability norm crossed the rupture threshold.
inline DriftReport drift_report(const std::vector<DiagnosticsRecord>& recs,
                                double rupture_threshold) {
    if (recs.size() < 2) throw std::invalid_argument("drift_report: need at least 2 records");
    DriftReport rep;
    rep.rupture_threshold = rupture_threshold;
    rep.energy = diagdetail::drift_stat(recs, [](const DiagnosticsRecord& r) { return r.energy; });
    rep.charge = diagdetail::drift_stat(recs, [](const DiagnosticsRecord& r) { return r.charge; });
    rep.angmom = diagdetail::drift_stat(recs, [](const DiagnosticsRecord& r) { return r.angmom; });
    for (const auto& r : recs) {
        if (r.delta_os > rupture_threshold) {
            rep.rupture_time = r.t;
            break;
        }
    }
    return rep;
}

}  // namespace hylo
