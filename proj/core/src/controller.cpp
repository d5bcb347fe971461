#include <helix/controller.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace helix::control {

// ============================================================================
// Parameters
// ============================================================================

ControllerParams ControllerParams::equal_weight(double omega_so, double omega0, double e11_hat,
                                                const Vec2& d_mu_hat) {
    ControllerParams params;
    params.omega_so = omega_so;
    params.omega0 = omega0;
    params.e11_hat = e11_hat;
    params.d_mu_hat = d_mu_hat;
    params.q1 = params.q2 = 1.0 / (omega0 * e11_hat * e11_hat);
    return params;
}

void validate(const ControllerParams& params) {
    if (!(params.omega_so > 0.0)) {
        throw std::invalid_argument("step-out rate omega_so must be positive");
    }
    if (!(params.q1 > 0.0) || !(params.q2 > 0.0)) {
        throw std::invalid_argument("objective weights q1, q2 must be positive");
    }
    if (!(params.omega0 > 0.0)) {
        throw std::invalid_argument("gain omega0 must be positive");
    }
    if (params.e11_hat == 0.0 || !std::isfinite(params.e11_hat)) {
        throw std::invalid_argument("propulsion gain estimate e11_hat must be non-zero");
    }
}

// ============================================================================
// Trust-region subproblem
// ============================================================================

namespace {

void validate(const TrsProblem& problem) {
    if (!(problem.a11 > 0.0) || !(problem.a22 > 0.0)) {
        throw std::invalid_argument("subproblem curvatures a11, a22 must be positive");
    }
    if (!(problem.omega_so > 0.0)) {
        throw std::invalid_argument("subproblem radius omega_so must be positive");
    }
}

// Secular function phi(lambda) = |u(lambda)|^2 - omega_so^2 with
// u(lambda) = -(A + lambda I)^{-1} g; strictly decreasing for lambda >= 0.
double secular(const TrsProblem& p, double lambda) {
    const double u1 = p.g.x / (p.a11 + lambda);
    const double u2 = p.g.z / (p.a22 + lambda);
    return u1 * u1 + u2 * u2 - p.omega_so * p.omega_so;
}

double secular_derivative(const TrsProblem& p, double lambda) {
    const double d1 = p.a11 + lambda;
    const double d2 = p.a22 + lambda;
    return -2.0 * p.g.x * p.g.x / (d1 * d1 * d1) - 2.0 * p.g.z * p.g.z / (d2 * d2 * d2);
}

Vec2 boundary_command(const TrsProblem& p, double lambda) {
    return {-p.g.x / (p.a11 + lambda), -p.g.z / (p.a22 + lambda)};
}

// A few Newton steps to bring the secular residual down to rounding level.
double polish(const TrsProblem& p, double lambda) {
    for (int i = 0; i < 8; ++i) {
        const double f = secular(p, lambda);
        const double df = secular_derivative(p, lambda);
        if (df == 0.0) {
            break;
        }
        const double next = std::max(0.0, lambda - f / df);
        if (next == lambda) {
            break;
        }
        lambda = next;
    }
    return lambda;
}

TrsSolution finish(const TrsProblem& p, const Vec2& u, double lambda, bool saturated) {
    TrsSolution sol;
    sol.u = u;
    sol.lambda = lambda;
    sol.saturated = saturated;
    sol.kkt_residual = verify_kkt(p, sol).max_residual;
    return sol;
}

}  // namespace

TrsProblem build_trs(const Vec2& v_des, const ControllerParams& params) {
    validate(params);
    TrsProblem problem;
    problem.a11 = params.e11_hat * params.e11_hat * params.q1;
    problem.a22 = params.e11_hat * params.e11_hat * params.q2;
    problem.g = {params.e11_hat * params.q1 * (params.d_mu_hat.x - v_des.x),
                 params.e11_hat * params.q2 * (params.d_mu_hat.z - v_des.z)};
    problem.omega_so = params.omega_so;
    return problem;
}

double trs_objective(const TrsProblem& problem, const Vec2& u) {
    return 0.5 * (problem.a11 * u.x * u.x + problem.a22 * u.z * u.z) + dot(problem.g, u);
}

TrsSolution solve_trs(const TrsProblem& problem) {
    validate(problem);

    const Vec2 u_free{-problem.g.x / problem.a11, -problem.g.z / problem.a22};
    if (norm(u_free) < problem.omega_so) {
        return finish(problem, u_free, 0.0, false);
    }

    // The root of the secular equation lies in [0, |g| / omega_so]:
    // phi(0) >= 0 because the free minimiser is outside the ball, and at the
    // upper end |u(lambda)| < |g| / lambda = omega_so since a11, a22 > 0.
    double lo = 0.0;
    double hi = norm(problem.g) / problem.omega_so;
    const double tol = 1e-14 * std::max(hi, 1e-300);
    bool converged = false;
    for (int i = 0; i < 200; ++i) {
        if (hi - lo <= tol) {
            converged = true;
            break;
        }
        const double mid = 0.5 * (lo + hi);
        if (secular(problem, mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (!converged && hi - lo > tol) {
        throw std::runtime_error("trust-region root search failed to converge");
    }
    const double lambda = polish(problem, 0.5 * (lo + hi));
    return finish(problem, boundary_command(problem, lambda), lambda, true);
}

TrsSolution solve_trs_quartic(const TrsProblem& problem) {
    validate(problem);

    const Vec2 u_free{-problem.g.x / problem.a11, -problem.g.z / problem.a22};
    if (norm(u_free) < problem.omega_so) {
        return finish(problem, u_free, 0.0, false);
    }

    // In the shifted variable m = lambda + a11 (and with w = a22 - a11,
    // r = omega_so) the secular equation becomes the quartic
    //   m^4 + 2 w m^3 + (w^2 - |g|^2/r^2) m^2 - (2 w g1^2/r^2) m - g1^2 w^2/r^2 = 0.
    const double w = problem.a22 - problem.a11;
    const double r2 = problem.omega_so * problem.omega_so;
    const double g1s = problem.g.x * problem.g.x;
    const double gs = norm_sq(problem.g);
    const double c3 = 2.0 * w;
    const double c2 = w * w - gs / r2;
    const double c1 = -2.0 * w * g1s / r2;
    const double c0 = -g1s * w * w / r2;

    Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
    companion(0, 3) = -c0;
    companion(1, 3) = -c1;
    companion(2, 3) = -c2;
    companion(3, 3) = -c3;
    companion(1, 0) = companion(2, 1) = companion(3, 2) = 1.0;

    const Eigen::EigenSolver<Eigen::Matrix4d> solver(companion);

    // The admissible root has lambda >= 0, i.e. m >= a11; select among the
    // (near-)real eigenvalues after a Newton polish of the secular residual.
    double best_lambda = std::numeric_limits<double>::quiet_NaN();
    double best_residual = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
        const std::complex<double> root = solver.eigenvalues()(i);
        if (std::abs(root.imag()) > 1e-6 * std::max(1.0, std::abs(root.real()))) {
            continue;
        }
        const double lambda_raw = root.real() - problem.a11;
        if (lambda_raw < -1e-6 * std::max(1.0, problem.a11)) {
            continue;
        }
        const double lambda = polish(problem, std::max(0.0, lambda_raw));
        const double residual = std::abs(secular(problem, lambda));
        if (residual < best_residual) {
            best_residual = residual;
            best_lambda = lambda;
        }
    }
    if (!std::isfinite(best_lambda)) {
        throw std::runtime_error("quartic solve produced no admissible dual variable");
    }
    return finish(problem, boundary_command(problem, best_lambda), best_lambda, true);
}

KktReport verify_kkt(const TrsProblem& problem, const TrsSolution& solution) {
    KktReport report;
    const double u_norm = norm(solution.u);
    report.norm_violation = std::max(0.0, u_norm - problem.omega_so);
    report.stationarity =
        norm({(problem.a11 + solution.lambda) * solution.u.x + problem.g.x,
              (problem.a22 + solution.lambda) * solution.u.z + problem.g.z});
    report.complementarity = std::abs(solution.lambda * (u_norm - problem.omega_so));
    report.dual_violation = std::max(0.0, -solution.lambda);
    report.max_residual = std::max({report.norm_violation, report.stationarity,
                                    report.complementarity, report.dual_violation});
    return report;
}

// ============================================================================
// Closed-form control law
// ============================================================================

ControlDecision control_law(const Vec2& p, double s, const guidance::PathSpec& path,
                            const guidance::GuidanceParams& guidance_params,
                            const ControllerParams& params) {
    validate(params);
    if (params.q1 != params.q2) {
        throw std::invalid_argument("closed-form control law requires equal weights q1 == q2");
    }
    const Vec2 v_des = guidance::ilos_field(p, s, path, guidance_params);
    const Vec2 g = build_trs(v_des, params).g;
    const double g_norm = norm(g);

    ControlDecision decision;
    // Ties go to the proportional branch; both expressions coincide there.
    if (g_norm * params.omega0 > params.omega_so) {
        decision.u = -(params.omega_so / g_norm) * g;
        decision.saturated = true;
    } else {
        decision.u = -params.omega0 * g;
        decision.saturated = false;
    }
    return decision;
}

}  // namespace helix::control
