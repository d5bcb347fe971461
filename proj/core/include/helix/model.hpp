#pragma once

#include <optional>
#include <vector>

#include <helix/linalg.hpp>

// Kinematic model of a magnetically actuated helical swimmer moving in the
// vertical x-z plane.  At low Reynolds number the translational speed along
// the helix axis is proportional to the rotation rate commanded about that
// axis; a single propulsion gain e11 (units: m) maps the angular-velocity
// command u (rad/s) to the velocity contribution e11*u (m/s).  Non-magnetic
// forces (weight, buoyancy, pulsatile drag) enter as a velocity-domain
// disturbance d_mu (m/s).

namespace helix::model {

// ============================================================================
// Parameter sets
// ============================================================================

// Geometry of the helical tail (and attached magnetic head).  Angles in rad,
// lengths in m.  theta_h is the helix pitch angle, strictly inside (0, pi/2);
// n_h the number of turns; r_h the helix radius; k_h_mag the magnitude of the
// head's drag coupling along the axis.  r_c and r_m describe the filament and
// head radii; they are carried for reporting and do not enter the resistance
// coefficients computed here.
struct HelixGeometry {
    double theta_h = 0.0;
    double n_h = 0.0;
    double r_h = 0.0;
    double k_h_mag = 0.0;
    double r_c = 0.0;
    double r_m = 0.0;
};

// Resistive-force-theory drag coefficients (N s / m^2) of the filament, plus
// the translational drag xi_vm (N s / m) of the head sphere.  Physical values
// satisfy xi_perp > xi_par > 0 and xi_vm >= 0.
struct DragCoefficients {
    double xi_par = 0.0;
    double xi_perp = 0.0;
    double xi_vm = 0.0;
};

// Resistance coefficients of the swimmer assembly.  a1, a2 (N s / m) resist
// translation along / across the helix axis; the b coefficients (N s / rad)
// couple rotation to force; e11 = -b11 / a1 (m) is the propulsion gain that
// survives in the planar velocity model.
struct DerivedParams {
    double a1 = 0.0;
    double a2 = 0.0;
    double b11 = 0.0;
    double b13 = 0.0;
    double b22 = 0.0;
    double b23 = 0.0;
    double b33 = 0.0;
    double e11 = 0.0;
};

// Throws std::invalid_argument when a parameter set is outside its physical
// domain (non-positive lengths/turn counts, pitch angle outside (0, pi/2),
// drag ordering violated, ...).
void validate(const HelixGeometry& geom);
void validate(const DragCoefficients& drag);

// Resistance coefficients from geometry and drag.  Validates both inputs.
[[nodiscard]] DerivedParams compute_derived_params(const HelixGeometry& geom,
                                                   const DragCoefficients& drag);

// Propulsion gain evaluated from a single closed-form expression in the raw
// parameters.  Equals compute_derived_params(...).e11 up to rounding; the two
// routes are kept separate so they can cross-check each other.
[[nodiscard]] double propulsion_gain_direct(const HelixGeometry& geom,
                                            const DragCoefficients& drag);

// ============================================================================
// Disturbance
// ============================================================================

// Piecewise-constant velocity-domain disturbance d_mu(t) (m/s).  A `constant`
// spec holds one value for all time; a `schedule` switches values at the given
// times (sorted strictly increasing; the first segment also covers t before
// its start time).  `d_star`, when set, is a declared uniform bound: every
// segment must satisfy |d| <= d_star.
struct DisturbanceSpec {
    struct Segment {
        double t_start = 0.0;
        Vec2 d;
    };

    std::vector<Segment> segments;
    std::optional<double> d_star;

    [[nodiscard]] static DisturbanceSpec constant(const Vec2& d);
    [[nodiscard]] static DisturbanceSpec schedule(std::vector<Segment> segments);

    // Disturbance value active at time t.
    [[nodiscard]] Vec2 at(double t) const;

    // Throws std::invalid_argument if the schedule is empty, unsorted, or a
    // segment exceeds the declared bound.
    void validate() const;
};

// ============================================================================
// Plant
// ============================================================================

// Planar kinematic state: position p (m) in the x-z plane at time t (s).
struct PlantState {
    Vec2 p;
    double t = 0.0;
};

// Velocity of the swimmer under angular-velocity command u (rad/s, resolved
// in the plane as u = |u| * n_hat):  p_dot = e11 * u + d_mu(t).
[[nodiscard]] Vec2 plant_derivative(const PlantState& state, const Vec2& u, double e11,
                                    const DisturbanceSpec& disturbance);

// ============================================================================
// Exact disturbance feed-forward
// ============================================================================

// Rotation-axis command that makes the swimmer translate exactly along a
// desired velocity v_des despite a constant applied force f_d:
//   - `psi` is the angle from v_des to the commanded axis n_hat (rad),
//   - `u_mag` the rotation rate about that axis (rad/s).
// Inputs are given in polar form: v_des_mag = |v_des| and the force by its
// magnitude f_d_mag plus `alpha`, the signed angle from v_des to the *reverse*
// force direction -f_d (the direction the swimmer must lean into).
struct FeedforwardCommand {
    double psi = 0.0;
    double u_mag = 0.0;
};

// Throws std::domain_error when e11 == 0 (no propulsion) or when both the
// desired speed and the force vanish together with a zero denominator (the
// axis direction is then undefined); std::invalid_argument for negative
// magnitudes.
[[nodiscard]] FeedforwardCommand feedforward_command(double v_des_mag, double f_d_mag,
                                                     double alpha,
                                                     const DerivedParams& params);

}  // namespace helix::model
