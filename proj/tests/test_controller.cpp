#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <helix/controller.hpp>

using namespace helix;
using namespace helix::control;

namespace {

constexpr double kPi = std::numbers::pi;

guidance::GuidanceParams make_guidance(double alpha_d, double sigma0, double k_d,
                                       double delta_los) {
    guidance::GuidanceParams p;
    p.alpha_d = alpha_d;
    p.sigma0 = sigma0;
    p.k_d = k_d;
    p.delta_los = delta_los;
    return p;
}

TrsProblem random_problem(std::mt19937_64& rng, bool force_equal_weights) {
    std::uniform_real_distribution<double> curvature(0.1, 10.0);
    std::uniform_real_distribution<double> gradient(-20.0, 20.0);
    std::uniform_real_distribution<double> radius(0.5, 20.0);
    TrsProblem p;
    p.a11 = curvature(rng);
    p.a22 = force_equal_weights ? p.a11 : curvature(rng);
    p.g = {gradient(rng), gradient(rng)};
    p.omega_so = radius(rng);
    return p;
}

}  // namespace

// ============================================================================
// Subproblem assembly
// ============================================================================

TEST_CASE("subproblem assembly literal example") {
    ControllerParams params;
    params.omega_so = 5.0;
    params.q1 = 1.0;
    params.q2 = 3.0;
    params.omega0 = 1.0;
    params.e11_hat = 2.0;
    params.d_mu_hat = {0.0, 0.2};

    const TrsProblem p = build_trs({0.9, 1.2}, params);
    CHECK(p.a11 == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(p.a22 == doctest::Approx(12.0).epsilon(1e-15));
    CHECK(p.g.x == doctest::Approx(-1.8).epsilon(1e-15));
    CHECK(p.g.z == doctest::Approx(-6.0).epsilon(1e-15));
    CHECK(p.omega_so == 5.0);

    // Objective at the origin is zero; at the free minimiser it is negative.
    CHECK(trs_objective(p, {0.0, 0.0}) == 0.0);
    CHECK(trs_objective(p, {0.45, 0.5}) < 0.0);
}

TEST_CASE("the unconstrained minimiser is the nominal model inversion") {
    std::mt19937_64 rng(0x5eed2001);
    std::uniform_real_distribution<double> vel(-3.0, 3.0);
    std::uniform_real_distribution<double> gain(0.5, 3.0);
    std::uniform_real_distribution<double> weight(0.1, 5.0);

    for (int i = 0; i < 500; ++i) {
        ControllerParams params;
        params.omega_so = 1e9;  // effectively unconstrained
        params.q1 = weight(rng);
        params.q2 = weight(rng);
        params.omega0 = 1.0;
        params.e11_hat = gain(rng);
        params.d_mu_hat = {vel(rng), vel(rng)};
        const Vec2 v_des{vel(rng), vel(rng)};

        const TrsSolution sol = solve_trs(build_trs(v_des, params));
        const Vec2 nominal = (v_des - params.d_mu_hat) / params.e11_hat;
        CHECK_FALSE(sol.saturated);
        CHECK(norm(sol.u - nominal) <= 1e-12 * std::max(1.0, norm(nominal)));
    }
}

// ============================================================================
// Exact solves
// ============================================================================

TEST_CASE("interior solutions leave the dual variable at zero") {
    TrsProblem p;
    p.a11 = 4.0;
    p.a22 = 12.0;
    p.g = {-1.8, -6.0};
    p.omega_so = 5.0;

    const TrsSolution sol = solve_trs(p);
    CHECK_FALSE(sol.saturated);
    CHECK(sol.lambda == 0.0);
    CHECK(sol.u.x == doctest::Approx(0.45).epsilon(1e-14));
    CHECK(sol.u.z == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(sol.kkt_residual <= 1e-12);
}

TEST_CASE("saturated equal-weight solution in closed form") {
    // a = 1, g = (-3, -4), omega_so = 1: the minimiser is the unit vector
    // along -g and the dual variable is |g|/omega_so - a = 4.
    TrsProblem p;
    p.a11 = p.a22 = 1.0;
    p.g = {-3.0, -4.0};
    p.omega_so = 1.0;

    for (const TrsSolution& sol : {solve_trs(p), solve_trs_quartic(p)}) {
        CHECK(sol.saturated);
        CHECK(sol.u.x == doctest::Approx(0.6).epsilon(1e-12));
        CHECK(sol.u.z == doctest::Approx(0.8).epsilon(1e-12));
        CHECK(sol.lambda == doctest::Approx(4.0).epsilon(1e-12));
        CHECK(sol.kkt_residual <= 1e-10);
    }
}

TEST_CASE("both solvers satisfy the KKT conditions on random problems") {
    std::mt19937_64 rng(0x5eed2002);
    for (int i = 0; i < 2000; ++i) {
        const TrsProblem p = random_problem(rng, i % 5 == 0);
        const TrsSolution a = solve_trs(p);
        const TrsSolution b = solve_trs_quartic(p);

        CHECK(a.kkt_residual <= 1e-9);
        CHECK(b.kkt_residual <= 1e-9);
        CHECK(norm(a.u) <= p.omega_so * (1.0 + 1e-12));
        CHECK(norm(b.u) <= p.omega_so * (1.0 + 1e-12));

        // The two independent solvers agree.
        CHECK(norm(a.u - b.u) <= 1e-9 * std::max(1.0, norm(a.u)));
        CHECK(std::abs(a.lambda - b.lambda) <= 1e-9 * std::max(1.0, a.lambda));

        // Interior iff the free minimiser is inside the ball.
        const double free_norm = std::hypot(p.g.x / p.a11, p.g.z / p.a22);
        CHECK(a.saturated == (free_norm >= p.omega_so));
    }
}

TEST_CASE("solver minimum beats a direct grid enumeration") {
    std::mt19937_64 rng(0x5eed2003);
    constexpr int kGrid = 101;

    for (int trial = 0; trial < 50; ++trial) {
        const TrsProblem p = random_problem(rng, trial % 4 == 0);
        const TrsSolution sol = solve_trs(p);
        const double f_star = trs_objective(p, sol.u);

        // Exhaustive evaluation over a uniform grid covering the disk.
        const double h = 2.0 * p.omega_so / (kGrid - 1);
        double f_grid = std::numeric_limits<double>::infinity();
        for (int ix = 0; ix < kGrid; ++ix) {
            for (int iz = 0; iz < kGrid; ++iz) {
                const Vec2 u{-p.omega_so + ix * h, -p.omega_so + iz * h};
                if (norm_sq(u) <= p.omega_so * p.omega_so) {
                    f_grid = std::min(f_grid, trs_objective(p, u));
                }
            }
        }

        // The exact solution is no worse than any grid point, and the grid
        // comes within a Lipschitz step of the optimum.
        const double lipschitz =
            std::max(p.a11, p.a22) * p.omega_so + norm(p.g);
        CHECK(f_star <= f_grid + 1e-9 * std::max(1.0, std::abs(f_grid)));
        CHECK(f_grid <= f_star + lipschitz * h * std::numbers::sqrt2 + 1e-9);
    }
}

TEST_CASE("solutions are invariant under uniform objective scaling") {
    std::mt19937_64 rng(0x5eed2004);
    std::uniform_real_distribution<double> scale_draw(0.01, 100.0);

    for (int i = 0; i < 500; ++i) {
        const TrsProblem p = random_problem(rng, i % 3 == 0);
        const double c = scale_draw(rng);
        TrsProblem scaled = p;
        scaled.a11 *= c;
        scaled.a22 *= c;
        scaled.g *= c;

        const TrsSolution base = solve_trs(p);
        const TrsSolution after = solve_trs(scaled);
        CHECK(norm(after.u - base.u) <= 1e-9 * std::max(1.0, norm(base.u)));
        CHECK(after.lambda == doctest::Approx(c * base.lambda).epsilon(1e-8));
    }
}

TEST_CASE("KKT report flags violations in forged solutions") {
    TrsProblem p;
    p.a11 = p.a22 = 1.0;
    p.g = {-3.0, -4.0};
    p.omega_so = 1.0;

    TrsSolution forged;
    forged.u = {1.5, 0.0};  // outside the ball
    forged.lambda = -1.0;   // dual-infeasible
    const KktReport report = verify_kkt(p, forged);
    CHECK(report.norm_violation == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(report.dual_violation == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(report.stationarity > 0.0);
    CHECK(report.max_residual >= report.stationarity);
}

TEST_CASE("solvers reject ill-posed subproblems") {
    TrsProblem p;
    p.a11 = 0.0;
    p.a22 = 1.0;
    p.g = {1.0, 1.0};
    p.omega_so = 1.0;
    CHECK_THROWS_AS(solve_trs(p), std::invalid_argument);
    CHECK_THROWS_AS(solve_trs_quartic(p), std::invalid_argument);

    p.a11 = 1.0;
    p.omega_so = 0.0;
    CHECK_THROWS_AS(solve_trs(p), std::invalid_argument);
}

// ============================================================================
// Closed-form control law
// ============================================================================

TEST_CASE("unsaturated commands track the desired velocity exactly") {
    const guidance::GuidanceParams g = make_guidance(1.0, 0.1, 0.5, 0.5);
    const guidance::PathSpec path{0.0};
    const ControllerParams params = ControllerParams::equal_weight(10.0);

    const Vec2 p{0.0, 0.1};
    const double s = -0.2;
    const ControlDecision decision = control_law(p, s, path, g, params);
    const Vec2 v_des = guidance::ilos_field(p, s, path, g);

    CHECK_FALSE(decision.saturated);
    CHECK(norm(decision.u - v_des) <= 1e-14);  // e11_hat = 1, d_mu_hat = 0
}

TEST_CASE("saturated commands sit exactly on the rate budget") {
    const guidance::GuidanceParams g = make_guidance(100.0, 0.0, 0.5, 0.5);
    const guidance::PathSpec path{0.0};
    const ControllerParams params = ControllerParams::equal_weight(2.0);

    const ControlDecision decision = control_law({0.0, 0.5}, 0.0, path, g, params);
    CHECK(decision.saturated);
    CHECK(norm(decision.u) == doctest::Approx(2.0).epsilon(1e-14));

    // Direction follows the desired velocity.
    const Vec2 v_des = guidance::ilos_field({0.0, 0.5}, 0.0, path, g);
    const double cross = decision.u.x * v_des.z - decision.u.z * v_des.x;
    CHECK(std::abs(cross) <= 1e-12 * norm(v_des));
    CHECK(dot(decision.u, v_des) > 0.0);
}

TEST_CASE("control law equals the exact subproblem solution") {
    std::mt19937_64 rng(0x5eed2005);
    std::uniform_real_distribution<double> coord(-0.5, 0.5);
    std::uniform_real_distribution<double> gain(1.0, 200.0);
    std::uniform_real_distribution<double> mix(0.0, 0.3);
    std::uniform_real_distribution<double> look(0.05, 2.0);
    std::uniform_real_distribution<double> budget(0.5, 30.0);
    std::uniform_real_distribution<double> omega0_draw(0.5, 5.0);
    std::uniform_real_distribution<double> e11_draw(0.3, 3.0);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    std::uniform_real_distribution<double> dist(-0.5, 0.5);

    int saturated_seen = 0;
    for (int i = 0; i < 2000; ++i) {
        const guidance::GuidanceParams g = make_guidance(gain(rng), mix(rng), 0.5, look(rng));
        const guidance::PathSpec path{angle(rng)};
        const ControllerParams params = ControllerParams::equal_weight(
            budget(rng), omega0_draw(rng), e11_draw(rng), {dist(rng), dist(rng)});
        const Vec2 p{coord(rng), coord(rng)};
        const double s = coord(rng);

        const ControlDecision decision = control_law(p, s, path, g, params);
        const Vec2 v_des = guidance::ilos_field(p, s, path, g);
        const TrsSolution sol = solve_trs(build_trs(v_des, params));

        CHECK(norm(decision.u - sol.u) <= 1e-11 * std::max(1.0, norm(sol.u)));
        CHECK(decision.saturated == sol.saturated);
        CHECK(norm(decision.u) <= params.omega_so * (1.0 + 1e-12));
        saturated_seen += decision.saturated ? 1 : 0;
    }
    // The draw ranges must exercise both branches.
    CHECK(saturated_seen > 200);
    CHECK(saturated_seen < 1800);
}

TEST_CASE("the closed form does not depend on the omega0 convention") {
    const guidance::GuidanceParams g = make_guidance(50.0, 0.05, 0.5, 0.3);
    const guidance::PathSpec path{0.4};
    const Vec2 p{0.05, -0.2};
    const double s = 0.7;

    const ControlDecision ref =
        control_law(p, s, path, g, ControllerParams::equal_weight(3.0, 1.0));
    for (const double omega0 : {0.25, 0.5, 2.0, 7.0}) {
        const ControlDecision other =
            control_law(p, s, path, g, ControllerParams::equal_weight(3.0, omega0));
        CHECK(norm(other.u - ref.u) <= 1e-12 * std::max(1.0, norm(ref.u)));
        CHECK(other.saturated == ref.saturated);
    }
}

TEST_CASE("commands are continuous across the saturation boundary") {
    const guidance::GuidanceParams g = make_guidance(10.0, 0.0, 0.5, 1.0);
    const guidance::PathSpec path{0.0};
    // With alpha*delta = 10 and omega_so = 10*hypot(1, eps) the boundary in
    // eps sits where hypot(1, eps) hits omega_so/10.
    const ControllerParams params = ControllerParams::equal_weight(10.0 * std::sqrt(2.0));

    // eps = 1 is exactly the switching point; probe both sides.
    const double eps = 1.0;
    for (const double delta : {1e-6, 1e-9}) {
        const Vec2 below{0.0, eps - delta};
        const Vec2 above{0.0, eps + delta};
        const Vec2 u_below = control_law(below, 0.0, path, g, params).u;
        const Vec2 u_above = control_law(above, 0.0, path, g, params).u;
        // Lipschitz in the position with constant alpha_d (sigma0 = 0).
        CHECK(norm(u_above - u_below) <= 3.0 * g.alpha_d * delta + 1e-12);
    }
}

TEST_CASE("commands obey the guidance-field Lipschitz bound") {
    std::mt19937_64 rng(0x5eed2006);
    std::uniform_real_distribution<double> coord(-0.5, 0.5);
    std::uniform_real_distribution<double> gain(1.0, 50.0);
    std::uniform_real_distribution<double> mix(0.0, 0.4);
    std::uniform_real_distribution<double> look(0.1, 2.0);
    std::uniform_real_distribution<double> budget(0.5, 20.0);
    std::uniform_real_distribution<double> angle(-kPi, kPi);

    for (int i = 0; i < 1000; ++i) {
        const guidance::GuidanceParams g = make_guidance(gain(rng), mix(rng), 0.3, look(rng));
        const guidance::PathSpec path{angle(rng)};
        const ControllerParams params = ControllerParams::equal_weight(budget(rng));

        const Vec2 p1{coord(rng), coord(rng)};
        const Vec2 p2{coord(rng), coord(rng)};
        const double s1 = coord(rng);
        const double s2 = coord(rng);

        const Vec2 u1 = control_law(p1, s1, path, g, params).u;
        const Vec2 u2 = control_law(p2, s2, path, g, params).u;

        // Saturation is a 1-Lipschitz projection on top of the affine field
        // (e11_hat = 1), so the sharp constant is alpha_d sqrt(1+sigma0^2).
        const double lipschitz = g.alpha_d * std::hypot(1.0, g.sigma0);
        const double dist = std::sqrt(norm_sq(p1 - p2) + (s1 - s2) * (s1 - s2));
        CHECK(norm(u1 - u2) <= lipschitz * dist * (1.0 + 1e-9) + 1e-12);
    }
}

TEST_CASE("control law rejects unequal weights and bad parameters") {
    const guidance::GuidanceParams g = make_guidance(1.0, 0.0, 0.5, 1.0);
    const guidance::PathSpec path{0.0};

    ControllerParams unequal = ControllerParams::equal_weight(1.0);
    unequal.q2 = 2.0 * unequal.q1;
    CHECK_THROWS_AS(control_law({0, 0}, 0.0, path, g, unequal), std::invalid_argument);

    ControllerParams bad = ControllerParams::equal_weight(1.0);
    bad.omega_so = 0.0;
    CHECK_THROWS_AS(control_law({0, 0}, 0.0, path, g, bad), std::invalid_argument);
    bad = ControllerParams::equal_weight(1.0);
    bad.e11_hat = 0.0;
    CHECK_THROWS_AS(control_law({0, 0}, 0.0, path, g, bad), std::invalid_argument);
    bad = ControllerParams::equal_weight(1.0);
    bad.omega0 = -1.0;
    CHECK_THROWS_AS(control_law({0, 0}, 0.0, path, g, bad), std::invalid_argument);
}
