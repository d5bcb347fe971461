#pragma once

#include <helix/guidance.hpp>
#include <helix/linalg.hpp>

// Velocity-tracking control under a hard rotation-rate budget.  The actuation
// magnetics impose a step-out rate omega_so: commands with |u| beyond it lose
// synchronisation, so the tracking objective is minimised subject to
// |u| <= omega_so.  With a diagonal quadratic objective this is a planar
// trust-region subproblem solved exactly, either by a scalar root search on
// the dual variable or by the closed-form quartic it satisfies.

namespace helix::control {

// ============================================================================
// Parameters
// ============================================================================

// omega_so (rad/s) is the saturation radius; q1, q2 (> 0) weight the velocity
// mismatch components; omega0 (> 0) is the proportional gain of the
// equal-weight closed form; e11_hat (m, non-zero) the model estimate of the
// propulsion gain and d_mu_hat (m/s) the disturbance estimate used by the
// controller.
struct ControllerParams {
    double omega_so = 0.0;
    double q1 = 1.0;
    double q2 = 1.0;
    double omega0 = 1.0;
    double e11_hat = 1.0;
    Vec2 d_mu_hat;

    // Equal weights chosen so that the unsaturated command reduces to the
    // nominal inversion (v_des - d_mu_hat) / e11_hat, independent of omega0.
    [[nodiscard]] static ControllerParams equal_weight(double omega_so, double omega0 = 1.0,
                                                       double e11_hat = 1.0,
                                                       const Vec2& d_mu_hat = {});
};

// Throws std::invalid_argument outside the admissible ranges.
void validate(const ControllerParams& params);

// ============================================================================
// Trust-region subproblem
// ============================================================================

// minimise  0.5 u^T diag(a11, a22) u + g^T u   subject to  |u| <= omega_so,
// with a11, a22 > 0.
struct TrsProblem {
    double a11 = 0.0;
    double a22 = 0.0;
    Vec2 g;
    double omega_so = 0.0;
};

// Exact minimiser together with the dual variable lambda of the norm
// constraint (zero at interior solutions) and the worst KKT residual.
struct TrsSolution {
    Vec2 u;
    double lambda = 0.0;
    bool saturated = false;
    double kkt_residual = 0.0;
};

// Assemble the subproblem for tracking v_des:  A = e11_hat^2 diag(q1, q2) and
// g = e11_hat diag(q1, q2) (d_mu_hat - v_des), so the unconstrained minimiser
// is the nominal inversion of the velocity model.
[[nodiscard]] TrsProblem build_trs(const Vec2& v_des, const ControllerParams& params);

[[nodiscard]] double trs_objective(const TrsProblem& problem, const Vec2& u);

// Exact solve via monotone bisection (plus a Newton polish) on the secular
// equation of the dual variable.  Throws std::runtime_error if the root
// search fails to converge within its iteration budget.
[[nodiscard]] TrsSolution solve_trs(const TrsProblem& problem);

// Exact solve via the quartic satisfied by the shifted dual variable, with
// roots obtained from the companion-matrix eigenvalues.  Agrees with
// solve_trs to tight tolerance; kept as an independent implementation.
[[nodiscard]] TrsSolution solve_trs_quartic(const TrsProblem& problem);

// KKT residuals of a claimed solution (all absolute, all >= 0):
// constraint violation max(0, |u| - omega_so), stationarity
// |(A + lambda I) u + g|, complementary slackness |lambda (|u| - omega_so)|,
// dual feasibility max(0, -lambda), and their maximum.
struct KktReport {
    double norm_violation = 0.0;
    double stationarity = 0.0;
    double complementarity = 0.0;
    double dual_violation = 0.0;
    double max_residual = 0.0;
};

[[nodiscard]] KktReport verify_kkt(const TrsProblem& problem, const TrsSolution& solution);

// ============================================================================
// Closed-form control law
// ============================================================================

struct ControlDecision {
    Vec2 u;
    bool saturated = false;
};

// Saturated tracking command for the ILOS desired-velocity field at position
// p with integral state s.  Requires equal weights (q1 == q2); the command is
// -omega0 g when |g| omega0 <= omega_so and the radial projection
// -omega_so g / |g| beyond.  For parameters built via equal_weight this is
// the exact subproblem minimiser.
[[nodiscard]] ControlDecision control_law(const Vec2& p, double s,
                                          const guidance::PathSpec& path,
                                          const guidance::GuidanceParams& guidance_params,
                                          const ControllerParams& params);

}  // namespace helix::control
