#include <helix/guidance.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace helix::guidance {

namespace {
constexpr double kPi = std::numbers::pi;
}

// ============================================================================
// Path frame
// ============================================================================

Vec2 path_direction(const PathSpec& path) { return unit_vector(path.theta_r); }

Vec2 path_normal(const PathSpec& path) { return perp(path_direction(path)); }

ErrorCoords to_path_frame(const Vec2& p, const PathSpec& path) {
    const double c = std::cos(path.theta_r);
    const double s = std::sin(path.theta_r);
    return {.eps = -s * p.x + c * p.z, .z = c * p.x + s * p.z};
}

ErrorCoords to_path_frame_polar(const Vec2& p, const PathSpec& path) {
    const double r = norm(p);
    if (r == 0.0) {
        return {0.0, 0.0};
    }
    // Bearing of p relative to the path direction, wrapped to (-pi, pi].
    double dtheta = std::atan2(p.z, p.x) - path.theta_r;
    while (dtheta <= -kPi) dtheta += 2.0 * kPi;
    while (dtheta > kPi) dtheta -= 2.0 * kPi;
    return {.eps = r * std::sin(dtheta), .z = r * std::cos(dtheta)};
}

Vec2 from_path_frame(const ErrorCoords& coords, const PathSpec& path) {
    return coords.z * path_direction(path) + coords.eps * path_normal(path);
}

// ============================================================================
// ILOS guidance
// ============================================================================

void validate(const GuidanceParams& params) {
    if (!(params.alpha_d > 0.0)) {
        throw std::invalid_argument("guidance gain alpha_d must be positive");
    }
    if (!(params.delta_los > 0.0)) {
        throw std::invalid_argument("look-ahead distance delta_los must be positive");
    }
    if (!(params.sigma0 >= 0.0)) {
        throw std::invalid_argument("integral mixing gain sigma0 must be non-negative");
    }
    if (!(params.k_d >= 0.0)) {
        throw std::invalid_argument("integral leak k_d must be non-negative");
    }
}

Vec2 ilos_field(const Vec2& p, double s, const PathSpec& path, const GuidanceParams& params) {
    const ErrorCoords coords = to_path_frame(p, path);
    const double corrected = coords.eps + params.sigma0 * s;
    return params.alpha_d *
           (params.delta_los * path_direction(path) - corrected * path_normal(path));
}

double desired_speed(const ErrorState& x, const GuidanceParams& params) {
    const double corrected = x.eps + params.sigma0 * x.s;
    return params.alpha_d * std::hypot(params.delta_los, corrected);
}

double integral_state_derivative(const ErrorState& x, const GuidanceParams& params) {
    const double corrected = x.eps + params.sigma0 * x.s;
    return -params.k_d * x.s +
           params.delta_los * x.eps / (corrected * corrected + params.delta_los * params.delta_los);
}

// ============================================================================
// Error dynamics
// ============================================================================

ErrorSystem error_system_matrices(const GuidanceParams& params) {
    ErrorSystem sys;
    sys.A = {-params.alpha_d, -params.alpha_d * params.sigma0, 0.0, -params.k_d};
    sys.H = {1.0, params.sigma0, params.sigma0, params.sigma0 * params.sigma0};
    sys.B = {0.0, 0.0, 1.0, 0.0};
    return sys;
}

Mat2 error_gain_matrix(const ErrorState& x, const GuidanceParams& params) {
    const double corrected = x.eps + params.sigma0 * x.s;
    const double factor =
        params.delta_los / (corrected * corrected + params.delta_los * params.delta_los);
    return {0.0, 0.0, factor, 0.0};
}

ErrorState error_system_derivative(const ErrorState& x, const GuidanceParams& params,
                                   double d_perp) {
    const double corrected = x.eps + params.sigma0 * x.s;
    return {.eps = -params.alpha_d * corrected + d_perp,
            .s = integral_state_derivative(x, params)};
}

// ============================================================================
// Stability certificates
// ============================================================================

Mat2 default_certificate_p(const GuidanceParams& params) {
    validate(params);
    if (!(params.k_d > 0.0)) {
        throw std::domain_error(
            "no default certificate: the integral leak k_d must be positive for "
            "A^T P + P A = -I to admit a solution");
    }
    const double a = params.alpha_d;
    const double k = params.k_d;
    const double s0 = params.sigma0;
    const double p11 = 1.0 / (2.0 * a);
    const double p12 = -s0 / (2.0 * (a + k));
    const double p22 = (1.0 + a * s0 * s0 / (a + k)) / (2.0 * k);
    return {p11, p12, p12, p22};
}

StabilityCertificate certify_stability(const GuidanceParams& params, const Mat2& p) {
    validate(params);
    const double scale = std::abs(p.m00) + std::abs(p.m01) + std::abs(p.m10) + std::abs(p.m11);
    if (std::abs(p.m01 - p.m10) > 1e-12 * std::max(scale, 1.0)) {
        throw std::invalid_argument("certificate matrix P must be symmetric");
    }
    if (!sym_positive_definite(p)) {
        throw std::invalid_argument("certificate matrix P must be positive definite");
    }

    const ErrorSystem sys = error_system_matrices(params);
    StabilityCertificate cert;
    cert.P = p;
    cert.Gamma = -1.0 * (sys.A.transpose() * p + p * sys.A);

    const double gamma_min = sym_eigen_min(cert.Gamma);
    const bool gamma_pd = sym_positive_definite(cert.Gamma);
    const double p12 = p.m01;
    const double p22 = p.m11;
    // Largest eigenvalue of B^T P + P B in closed form.
    const double bp_max = p12 + std::sqrt(p12 * p12 + p22 * p22);
    const double delta = params.delta_los;

    cert.ges_ok = gamma_pd && gamma_min > bp_max / delta;
    cert.iss_ok = gamma_pd &&
                  gamma_min > p12 / delta +
                                  std::sqrt(p12 * p12 + p22 * p22) * (params.alpha_d + 1.0 / delta);
    cert.iss_radius_per_dstar = sym_eigen_max(p) / sym_eigen_min(p);
    cert.simplified_lhs = check_simplified_gains(params).lhs;
    return cert;
}

StabilityCertificate certify_stability(const GuidanceParams& params) {
    validate(params);
    if (!(params.k_d > 0.0)) {
        // No default P exists; report an inconclusive certificate instead of
        // searching for an alternative.
        StabilityCertificate cert;
        cert.iss_radius_per_dstar = std::numeric_limits<double>::infinity();
        cert.simplified_lhs = check_simplified_gains(params).lhs;
        return cert;
    }
    return certify_stability(params, default_certificate_p(params));
}

GainCheck check_simplified_gains(const GuidanceParams& params) {
    validate(params);
    const double ad = params.alpha_d * params.delta_los;
    GainCheck check;
    check.lhs = (params.sigma0 * ad) * (params.sigma0 * ad) +
                2.0 * ad * (1.0 + params.k_d / params.alpha_d);
    check.ok = params.k_d / params.alpha_d >= 0.0 && check.lhs <= 1.0;
    return check;
}

double steady_state_speed(const GuidanceParams& params, double e11) {
    return e11 * params.alpha_d * params.delta_los;
}

}  // namespace helix::guidance
