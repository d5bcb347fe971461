#pragma once

#include <helix/linalg.hpp>

// Straight-line path following in the x-z plane.  The reference path runs
// through the origin at angle theta_r; guidance produces a desired velocity
// from the cross-track error via an integral line-of-sight (ILOS) law, and
// the closed-loop cross-track/integral error dynamics admit a quadratic
// Lyapunov certificate whose conditions are reproduced here verbatim.

namespace helix::guidance {

// ============================================================================
// Path frame
// ============================================================================

// Straight reference path through the origin at angle theta_r (rad, measured
// from the +x axis, normalised to (-pi, pi]).
struct PathSpec {
    double theta_r = 0.0;
};

// Position resolved in the path frame: eps is the signed cross-track error
// (positive on the left of the path direction), z the along-track coordinate.
struct ErrorCoords {
    double eps = 0.0;
    double z = 0.0;
};

// Unit tangent / left normal of the path.
[[nodiscard]] Vec2 path_direction(const PathSpec& path);
[[nodiscard]] Vec2 path_normal(const PathSpec& path);

// Cartesian projection onto the path frame.
[[nodiscard]] ErrorCoords to_path_frame(const Vec2& p, const PathSpec& path);

// Same map evaluated through polar coordinates (|p| and bearing relative to
// the path).  Used as an independent cross-check of to_path_frame.
[[nodiscard]] ErrorCoords to_path_frame_polar(const Vec2& p, const PathSpec& path);

// Inverse map back to world coordinates.
[[nodiscard]] Vec2 from_path_frame(const ErrorCoords& coords, const PathSpec& path);

// ============================================================================
// ILOS guidance
// ============================================================================

// Guidance gains.  alpha_d (1/s) scales the whole field, delta_los (m) is the
// look-ahead distance, sigma0 (dimensionless) the integral mixing gain and
// k_d (1/s) the integral leak.  sigma0 = 0 recovers conventional LOS.
struct GuidanceParams {
    double alpha_d = 0.0;
    double sigma0 = 0.0;
    double k_d = 0.0;
    double delta_los = 0.0;
};

// Throws std::invalid_argument outside the admissible ranges
// (alpha_d > 0, delta_los > 0, sigma0 >= 0, k_d >= 0).
void validate(const GuidanceParams& params);

// Cross-track/integral error pair x = (eps, s).
struct ErrorState {
    double eps = 0.0;
    double s = 0.0;
};

// Desired velocity (m/s) at position p given integral state s: a look-ahead
// component along the path plus a corrective component opposing the
// integral-augmented cross-track error.
[[nodiscard]] Vec2 ilos_field(const Vec2& p, double s, const PathSpec& path,
                              const GuidanceParams& params);

// |ilos_field| in closed form (no position needed beyond the error pair).
[[nodiscard]] double desired_speed(const ErrorState& x, const GuidanceParams& params);

// Leaky integrator driving s:  s_dot = -k_d s + delta * eps / ((eps+sigma0 s)^2 + delta^2).
[[nodiscard]] double integral_state_derivative(const ErrorState& x, const GuidanceParams& params);

// ============================================================================
// Error dynamics
// ============================================================================

// Matrices of the closed-loop error system x_dot = (A + G(x)) x + e1 * d_perp
// under exact velocity tracking, where d_perp is the cross-track component of
// the disturbance:
//   A = -alpha_d [[1, sigma0], [0, k_d/alpha_d]]     (linear part)
//   H = [[1, sigma0], [sigma0, sigma0^2]]            (x^T H x = (eps+sigma0 s)^2)
//   B = [[0, 0], [1, 0]]                             (structure of the nonlinearity)
struct ErrorSystem {
    Mat2 A;
    Mat2 H;
    Mat2 B;
};

[[nodiscard]] ErrorSystem error_system_matrices(const GuidanceParams& params);

// State-dependent gain G(x) = delta / (x^T H x + delta^2) * B.
[[nodiscard]] Mat2 error_gain_matrix(const ErrorState& x, const GuidanceParams& params);

// Right-hand side of the error system.
[[nodiscard]] ErrorState error_system_derivative(const ErrorState& x,
                                                 const GuidanceParams& params, double d_perp);

// ============================================================================
// Stability certificates
// ============================================================================

// Quadratic certificate V = x^T P x for the error system.  Gamma is the
// negated Lyapunov operator -(A^T P + P A).  ges_ok reports global exponential
// stability of the undisturbed system; iss_ok input-to-state stability, in
// which case trajectories converge to a ball of radius
// iss_radius_per_dstar * d_star.  simplified_lhs is the left-hand side of the
// scalar sufficient gain condition (satisfied when <= 1).
struct StabilityCertificate {
    Mat2 P;
    Mat2 Gamma;
    bool ges_ok = false;
    bool iss_ok = false;
    double iss_radius_per_dstar = 0.0;
    double simplified_lhs = 0.0;
};

// Closed-form P solving A^T P + P A = -I.  Requires k_d > 0 (the integral
// state would otherwise have no leak and no such P exists); throws
// std::domain_error when unavailable.
[[nodiscard]] Mat2 default_certificate_p(const GuidanceParams& params);

// Evaluate the certificate conditions for a given symmetric positive-definite
// P (throws std::invalid_argument otherwise).
[[nodiscard]] StabilityCertificate certify_stability(const GuidanceParams& params, const Mat2& p);

// Same with the default P; when no default P exists the certificate is
// returned with both verdicts false and an infinite radius.
[[nodiscard]] StabilityCertificate certify_stability(const GuidanceParams& params);

// Scalar sufficient condition on the gains:
//   lhs = (sigma0 * alpha_d * delta)^2 + 2 * alpha_d * delta * (1 + k_d/alpha_d),
// ok when k_d/alpha_d >= 0 and lhs <= 1.
struct GainCheck {
    double lhs = 0.0;
    bool ok = false;
};

[[nodiscard]] GainCheck check_simplified_gains(const GuidanceParams& params);

// Steady translation speed on the path (m/s) once eps = s = 0:
// e11 * alpha_d * delta_los.
[[nodiscard]] double steady_state_speed(const GuidanceParams& params, double e11);

}  // namespace helix::guidance
