#include <helix/model.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace helix::model {

namespace {
constexpr double kPi = std::numbers::pi;
}

// ============================================================================
// Validation
// ============================================================================

void validate(const HelixGeometry& geom) {
    if (!(geom.theta_h > 0.0 && geom.theta_h < kPi / 2.0)) {
        throw std::invalid_argument("helix pitch angle theta_h must lie strictly in (0, pi/2)");
    }
    if (!(geom.n_h > 0.0)) {
        throw std::invalid_argument("helix turn count n_h must be positive");
    }
    if (!(geom.r_h > 0.0)) {
        throw std::invalid_argument("helix radius r_h must be positive");
    }
    if (!(geom.k_h_mag >= 0.0)) {
        throw std::invalid_argument("head coupling magnitude k_h_mag must be non-negative");
    }
    if (!(geom.r_c >= 0.0) || !(geom.r_m >= 0.0)) {
        throw std::invalid_argument("filament/head radii must be non-negative");
    }
}

void validate(const DragCoefficients& drag) {
    if (!(drag.xi_par > 0.0)) {
        throw std::invalid_argument("parallel drag xi_par must be positive");
    }
    if (!(drag.xi_perp > drag.xi_par)) {
        throw std::invalid_argument("perpendicular drag xi_perp must exceed xi_par");
    }
    if (!(drag.xi_vm >= 0.0)) {
        throw std::invalid_argument("head drag xi_vm must be non-negative");
    }
}

// ============================================================================
// Resistance coefficients
// ============================================================================

DerivedParams compute_derived_params(const HelixGeometry& geom, const DragCoefficients& drag) {
    validate(geom);
    validate(drag);

    const double st = std::sin(geom.theta_h);
    const double ct = std::cos(geom.theta_h);
    if (st == 0.0) {
        throw std::invalid_argument("degenerate helix: sin(theta_h) vanishes");
    }
    const double s2 = st * st;
    const double c2 = ct * ct;

    DerivedParams out;
    // Translational resistance of the filament along / across the helix axis,
    // plus the isotropic head drag.
    const double a_h1 = 2.0 * kPi * geom.n_h * geom.r_h * (drag.xi_par * c2 + drag.xi_perp * s2) / st;
    const double a_h2 =
        kPi * geom.n_h * geom.r_h * (drag.xi_perp + drag.xi_par * s2 + drag.xi_perp * c2) / st;
    out.a1 = a_h1 + drag.xi_vm;
    out.a2 = a_h2 + drag.xi_vm;

    // Rotation-to-force couplings.
    out.b11 = 2.0 * kPi * geom.n_h * geom.r_h * geom.r_h * (drag.xi_par - drag.xi_perp) * ct;
    out.b13 = -out.b11 / std::tan(geom.theta_h);
    out.b22 = -3.0 * out.b11 / 4.0;
    out.b33 = -out.b11 / 4.0;
    out.b23 = drag.xi_vm * geom.k_h_mag;

    out.e11 = -out.b11 / out.a1;
    return out;
}

double propulsion_gain_direct(const HelixGeometry& geom, const DragCoefficients& drag) {
    validate(geom);
    validate(drag);

    const double st = std::sin(geom.theta_h);
    const double ct = std::cos(geom.theta_h);
    const double s2 = st * st;
    const double c2 = ct * ct;
    const double nr = geom.n_h * geom.r_h;

    // Single-fraction form of -b11/a1; numerator and denominator are both
    // multiplied through by sin(theta_h) relative to the tabulated route.
    const double num = -2.0 * kPi * nr * geom.r_h * (drag.xi_par - drag.xi_perp) * ct * st;
    const double den = 2.0 * kPi * nr * (drag.xi_par * c2 + drag.xi_perp * s2) + drag.xi_vm * st;
    return num / den;
}

// ============================================================================
// Disturbance
// ============================================================================

DisturbanceSpec DisturbanceSpec::constant(const Vec2& d) {
    DisturbanceSpec spec;
    spec.segments.push_back({0.0, d});
    return spec;
}

DisturbanceSpec DisturbanceSpec::schedule(std::vector<Segment> segments) {
    DisturbanceSpec spec;
    spec.segments = std::move(segments);
    spec.validate();
    return spec;
}

Vec2 DisturbanceSpec::at(double t) const {
    if (segments.empty()) {
        return {};
    }
    // Last segment whose start time does not exceed t; times before the first
    // start fall back to the first segment.
    auto it = std::upper_bound(segments.begin(), segments.end(), t,
                               [](double value, const Segment& seg) { return value < seg.t_start; });
    if (it != segments.begin()) {
        --it;
    }
    return it->d;
}

void DisturbanceSpec::validate() const {
    if (segments.empty()) {
        throw std::invalid_argument("disturbance schedule must contain at least one segment");
    }
    for (std::size_t i = 1; i < segments.size(); ++i) {
        if (!(segments[i - 1].t_start < segments[i].t_start)) {
            throw std::invalid_argument("disturbance schedule times must be strictly increasing");
        }
    }
    if (d_star) {
        if (!(*d_star >= 0.0)) {
            throw std::invalid_argument("disturbance bound d_star must be non-negative");
        }
        for (const Segment& seg : segments) {
            if (norm(seg.d) > *d_star) {
                throw std::invalid_argument("disturbance segment exceeds declared bound d_star");
            }
        }
    }
}

// ============================================================================
// Plant
// ============================================================================

Vec2 plant_derivative(const PlantState& state, const Vec2& u, double e11,
                      const DisturbanceSpec& disturbance) {
    return e11 * u + disturbance.at(state.t);
}

// ============================================================================
// Feed-forward
// ============================================================================

namespace {

FeedforwardCommand feedforward_impl(double v, double f, double alpha,
                                    const DerivedParams& params) {
    // Axis tilt that cancels the cross component of the force, then the
    // rotation rate that realises the desired speed along v_des.
    const double num = f * std::sin(alpha) / params.a2;
    const double den = v + f * std::cos(alpha) / params.a2;
    if (num == 0.0 && den == 0.0) {
        throw std::domain_error("feed-forward axis undefined: desired velocity and force balance to zero");
    }
    FeedforwardCommand cmd;
    cmd.psi = std::atan2(num, den);
    cmd.u_mag =
        (v * std::cos(cmd.psi) + f * std::cos(alpha - cmd.psi) / params.a1) / params.e11;
    return cmd;
}

}  // namespace

FeedforwardCommand feedforward_command(double v_des_mag, double f_d_mag, double alpha,
                                       const DerivedParams& params) {
    if (params.e11 == 0.0) {
        throw std::domain_error("feed-forward requires a non-zero propulsion gain e11");
    }
    if (!(params.a1 > 0.0) || !(params.a2 > 0.0)) {
        throw std::invalid_argument("resistance coefficients a1, a2 must be positive");
    }
    if (v_des_mag < 0.0 || f_d_mag < 0.0) {
        throw std::invalid_argument("magnitudes must be non-negative");
    }
    return feedforward_impl(v_des_mag, f_d_mag, alpha, params);
}

}  // namespace helix::model
