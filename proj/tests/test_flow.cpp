#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hylo/flow.hpp"
#include "hylo/functionals.hpp"

using namespace hylo;

namespace {

RadialProfile random_positive_profile(std::mt19937& rng, int ell, double dr = 0.25,
                                      double r_tilde = 15.0) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    RadialProfile p;
    p.grid = make_radial_grid(r_tilde, dr);
    p.u.assign(p.grid.J + 1, 0.0);
    int nb = 1 + static_cast<int>(uni(rng) * 2);
    for (int b = 0; b < nb; ++b) {
        double rc = 2.5 + 8.0 * uni(rng);
        double sg = 1.0 + 1.5 * uni(rng);
        double A = 0.4 + 1.6 * uni(rng);
        for (int j = 1; j < p.grid.J; ++j) {
            double x = (p.grid.r(j) - rc) / sg;
            p.u[j] += A * std::exp(-x * x);
        }
    }
    if (ell != 0)
        for (int j = 1; j < p.grid.J; ++j) {
            double r = p.grid.r(j);
            p.u[j] *= 1.0 - std::exp(-r * r / 2.0);
        }
    p.ell = ell;
    p.h = 20.0 + 400.0 * uni(rng);
    p.omega = -p.h / flow_charge(p.grid, p.u);
    return p;
}

// Cell-volume weights matching the flow's discrete inner product.
std::vector<double> weights(const RadialGrid& g) {
    std::vector<double> w(g.J + 1, 0.0);
    w[0] = pi * g.dr * g.dr / 4.0;
    for (int j = 1; j < g.J; ++j) w[j] = two_pi * g.r(j) * g.dr;
    return w;
}

// 4th-order five-point finite-difference gradient of lambda_h in u_j,
// converted to the r-weighted inner product.
double fd_gradient(const RadialProfile& p, const PotentialSpec& pot, int j, double wj) {
    std::vector<double> u = p.u;
    double scale = 1.0;
    for (double v : u) scale = std::max(scale, std::abs(v));
    double delta = 1e-3 * scale;
    auto lam = [&](double uj) {
        u[j] = uj;
        return flow_lambda(p.grid, u, p.ell, p.h, pot);
    };
    double u0 = p.u[j];
    double g = (lam(u0 - 2 * delta) - 8.0 * lam(u0 - delta) + 8.0 * lam(u0 + delta) -
                lam(u0 + 2 * delta)) /
               (12.0 * delta);
    u[j] = u0;
    return g / wj;
}

}  // namespace

TEST_CASE("vanishing profile is a fixed point of the flow step") {
    PotentialSpec pot = make_log_potential();
    RadialProfile p;
    p.grid = make_radial_grid(8.0, 0.25);
    p.u.assign(p.grid.J + 1, 0.0);
    p.ell = 1;
    p.h = 10.0;
    p.omega = -1.0;
    FlowConfig cfg;
    cfg.r_tilde = 8.0;
    cfg.dr = 0.25;
    RadialProfile out = flow_step(p, pot, cfg);
    for (double v : out.u) CHECK(v == 0.0);
}

TEST_CASE("flow RHS equals -h times the discrete gradient of lambda_h") {
    PotentialSpec pot = make_log_potential();
    std::mt19937 rng(17);
    for (int rep = 0; rep < 4; ++rep) {
        int ell = rep % 2 == 0 ? 1 : 3;
        RadialProfile p = random_positive_profile(rng, ell);
        auto w = weights(p.grid);
        std::vector<double> rhs;
        flow_rhs(p.grid, p.u, p.ell, p.omega, pot, rhs);
        double rhs_max = 0.0;
        for (int j = 1; j < p.grid.J; ++j) rhs_max = std::max(rhs_max, std::abs(rhs[j]));
        // relative 1e-6 on significant components; the absolute floor
        // 1e-9 * ||rhs||_inf covers the finite-difference oracle's own
        // cancellation noise on far-field nodes where the RHS vanishes
        for (int j = 1; j < p.grid.J; j += 3) {
            double oracle = -p.h * fd_gradient(p, pot, j, w[j]);
            CHECK(std::abs(rhs[j] - oracle) <=
                  1e-6 * std::abs(oracle) + 1e-9 * rhs_max);
        }
    }
}

TEST_CASE("flow RHS for the soliton includes the axis node") {
    PotentialSpec pot = make_log_potential();
    std::mt19937 rng(23);
    RadialProfile p = random_positive_profile(rng, 0);
    p.u[0] = p.u[1];  // nonzero axis value
    p.omega = -p.h / flow_charge(p.grid, p.u);
    auto w = weights(p.grid);
    std::vector<double> rhs;
    flow_rhs(p.grid, p.u, p.ell, p.omega, pot, rhs);
    double oracle = -p.h * fd_gradient(p, pot, 0, w[0]);
    CHECK(rhs[0] == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("descent direction: <rhs, fd gradient>_w <= 0 and one-step decrease") {
    PotentialSpec pot = make_log_potential();
    std::mt19937 rng(29);
    for (int rep = 0; rep < 3; ++rep) {
        RadialProfile p = random_positive_profile(rng, 1);
        auto w = weights(p.grid);
        std::vector<double> rhs;
        flow_rhs(p.grid, p.u, p.ell, p.omega, pot, rhs);
        double inner = 0.0;
        for (int j = 1; j < p.grid.J; j += 2) inner += w[j] * rhs[j] * fd_gradient(p, pot, j, w[j]);
        CHECK(inner <= 0.0);

        FlowConfig cfg;
        cfg.r_tilde = p.grid.r_tilde();
        cfg.dr = p.grid.dr;
        cfg.dtau = 0.1 * p.grid.dr * p.grid.dr;
        double lam0 = flow_lambda(p.grid, p.u, p.ell, p.h, pot);
        RadialProfile q = flow_step(p, pot, cfg);
        double lam1 = flow_lambda(q.grid, q.u, q.ell, q.h, pot);
        CHECK(lam1 < lam0);
        // charge enforcement is exact by construction
        CHECK(-q.omega * flow_charge(q.grid, q.u) == doctest::Approx(q.h).epsilon(1e-12));
    }
}

TEST_CASE("config validation enforces the stability margin and thresholds") {
    FlowConfig cfg;
    cfg.r_tilde = 10.0;
    cfg.dr = 0.25;
    cfg.dtau = 0.3 * cfg.dr * cfg.dr;
    CHECK_THROWS_AS(cfg.validate(1), std::invalid_argument);
    cfg.dtau = 0.0;
    cfg.e_omega = 1e-5;
    CHECK_THROWS_AS(cfg.validate(1), std::invalid_argument);
    cfg.e_omega = 1e-9;
    CHECK_NOTHROW(cfg.validate(1));
    // the ell-aware default shrinks with the winding number
    CHECK(cfg.effective_dtau(4) < cfg.effective_dtau(1));
    CHECK(cfg.effective_dtau(1) == doctest::Approx(0.2 * cfg.dr * cfg.dr));
}

TEST_CASE("overflowing initial data reports flow blow-up") {
    PotentialSpec pot = make_log_potential();
    FlowConfig cfg;
    cfg.r_tilde = 10.0;
    cfg.dr = 0.25;
    cfg.max_steps = 100;
    cfg.init.amplitude = 1e200;  // u^2 overflows the charge sum
    CHECK_THROWS_WITH_AS(solve_profile(pot, 1, 20.0, cfg), doctest::Contains("flow blow-up"),
                         std::runtime_error);
}

TEST_CASE("small vortex solve: converged minimizer with the expected structure") {
    PotentialSpec pot = make_log_potential();
    FlowConfig cfg;
    cfg.r_tilde = 40.0;
    cfg.dr = 0.25;
    cfg.e_omega = 1e-10;
    cfg.e_lambda = 1e-12;
    FlowTrace tr = solve_profile(pot, 1, 100.0, cfg);
    CHECK(tr.converged);
    const RadialProfile& p = tr.final;
    CHECK(p.omega < 0.0);
    CHECK(std::abs(p.omega) < 1.0);
    CHECK(hylomorphy_ratio(p, pot) < 1.0);
    CHECK(tr.max_lambda_increase <= 1e-12);
    CHECK(p.u[0] == 0.0);
    CHECK(p.u[p.grid.J] == 0.0);
    // omega consistency in the Simpson convention (module invariant)
    CHECK(std::abs(p.omega - omega_from_charge(p, p.h)) <= 1e-10 * std::abs(p.omega));
    // Euler-Lagrange residual is small at the minimizer
    CHECK(tr.final_residual <= 1e-4 * std::sqrt(charge_integral(p)));
    // trace rows are monotone in lambda and omega stays negative throughout
    for (std::size_t i = 1; i < tr.rows.size(); ++i)
        CHECK(tr.rows[i].lambda <= tr.rows[i - 1].lambda + 1e-12);
    for (const auto& row : tr.rows) CHECK(row.omega < 0.0);
}

TEST_CASE("soliton solve: single interior maximum at the axis, lower energy than the vortex") {
    PotentialSpec pot = make_log_potential();
    FlowConfig cfg;
    cfg.r_tilde = 40.0;
    cfg.dr = 0.25;
    cfg.e_omega = 1e-10;
    cfg.e_lambda = 1e-12;
    FlowTrace sol = solve_soliton(pot, 100.0, cfg);
    CHECK(sol.converged);
    const RadialProfile& s = sol.final;
    int argmax = 0;
    for (int j = 0; j <= s.grid.J; ++j)
        if (s.u[j] > s.u[argmax]) argmax = j;
    CHECK(argmax == 0);
    for (int j = 0; j < s.grid.J; ++j) CHECK(s.u[j + 1] <= s.u[j] + 1e-10);

    FlowTrace vort = solve_profile(pot, 1, 100.0, cfg);
    CHECK(energy(s, pot) < energy(vort.final, pot));
}

TEST_CASE("omega is insensitive to doubling the domain") {
    PotentialSpec pot = make_log_potential();
    FlowConfig cfg;
    cfg.dr = 0.25;
    cfg.e_omega = 1e-13;
    cfg.e_lambda = 1e-14;
    cfg.r_tilde = 60.0;
    FlowTrace a = solve_profile(pot, 1, 50.0, cfg);
    cfg.r_tilde = 120.0;
    FlowTrace b = solve_profile(pot, 1, 50.0, cfg);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK_FALSE(a.boundary_warning);
    CHECK(std::abs(a.final.omega - b.final.omega) < 1e-8 * std::abs(b.final.omega));
}

TEST_CASE("omega converges at second order under grid refinement") {
    PotentialSpec pot = make_log_potential();
    auto omega_at = [&](double dr) {
        FlowConfig cfg;
        cfg.r_tilde = 30.0;
        cfg.dr = dr;
        cfg.e_omega = 1e-12;
        cfg.e_lambda = 1e-13;
        FlowTrace tr = solve_profile(pot, 1, 50.0, cfg);
        REQUIRE(tr.converged);
        return tr.final.omega;
    };
    double w1 = omega_at(0.3), w2 = omega_at(0.15), w_ref = omega_at(0.075);
    double e1 = std::abs(w1 - w_ref), e2 = std::abs(w2 - w_ref);
    CHECK(e1 / e2 >= 3.0);
}

TEST_CASE("support touching the boundary raises the warning flag") {
    PotentialSpec pot = make_log_potential();
    FlowConfig cfg;
    cfg.r_tilde = 14.0;  // too small for the h=100 vortex tail
    cfg.dr = 0.25;
    cfg.e_omega = 1e-9;
    cfg.e_lambda = 1e-11;
    FlowTrace tr = solve_profile(pot, 1, 100.0, cfg);
    CHECK(tr.boundary_warning);
}

TEST_CASE("initial guess variants converge to the same minimizer") {
    PotentialSpec pot = make_log_potential();
    FlowConfig cfg;
    cfg.r_tilde = 40.0;
    cfg.dr = 0.25;
    cfg.e_omega = 1e-11;
    cfg.e_lambda = 1e-12;
    FlowTrace g1 = solve_profile(pot, 1, 100.0, cfg);
    cfg.init.kind = InitialGuessSpec::Kind::annulus_bump;
    cfg.init.rc = 6.0;
    cfg.init.sigma = 4.0;
    FlowTrace g2 = solve_profile(pot, 1, 100.0, cfg);
    REQUIRE(g1.converged);
    REQUIRE(g2.converged);
    CHECK(g1.final.omega == doctest::Approx(g2.final.omega).epsilon(1e-6));

    // file-based initial guess restarts from the converged profile and stays there
    std::string path = "test_flow_guess.csv";
    write_profile_csv(path, g1.final, pot.m);
    cfg.init.kind = InitialGuessSpec::Kind::file;
    cfg.init.file_path = path;
    cfg.max_steps = 20000;
    FlowTrace g3 = solve_profile(pot, 1, 100.0, cfg);
    CHECK(g3.converged);
    CHECK(g3.final.omega == doctest::Approx(g1.final.omega).epsilon(1e-8));
    CHECK(g3.steps_used < 20000);
    std::remove(path.c_str());
}
