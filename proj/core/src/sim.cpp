#include <helix/sim.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <stdexcept>
#include <thread>

namespace helix::sim {

namespace {

// Everything outside this radius is treated as an escaped run: the model is
// only meaningful near the path, and letting the state grow without bound
// would poison downstream statistics.
constexpr double kGuardRadius = 1.0;  // m

struct Derivative {
    Vec2 p_dot;
    double s_dot = 0.0;
};

Derivative state_derivative(const Vec2& p, double s, double t, const SimScenario& sc) {
    const control::ControlDecision decision =
        control::control_law(p, s, sc.path, sc.guidance, sc.controller);
    Derivative d;
    d.p_dot = sc.e11 * decision.u + sc.disturbance.at(t);
    if (sc.mode == GuidanceMode::ilos) {
        const guidance::ErrorCoords coords = guidance::to_path_frame(p, sc.path);
        d.s_dot = guidance::integral_state_derivative({coords.eps, s}, sc.guidance);
    }
    return d;
}

bool finite(const SimState& state) {
    return std::isfinite(state.p.x) && std::isfinite(state.p.z) && std::isfinite(state.s);
}

}  // namespace

// ============================================================================
// Scenario
// ============================================================================

void validate(const SimScenario& scenario) {
    guidance::validate(scenario.guidance);
    control::validate(scenario.controller);
    scenario.disturbance.validate();
    if (scenario.e11 == 0.0 || !std::isfinite(scenario.e11)) {
        throw std::invalid_argument("scenario propulsion gain e11 must be non-zero");
    }
    if (!(scenario.dt > 0.0)) {
        throw std::invalid_argument("scenario step size dt must be positive");
    }
    if (!(scenario.t_end >= scenario.dt)) {
        throw std::invalid_argument("scenario horizon t_end must be at least one step");
    }
    if (scenario.mode == GuidanceMode::conventional_los && scenario.guidance.sigma0 != 0.0) {
        throw std::invalid_argument("conventional_los requires sigma0 = 0");
    }
}

// ============================================================================
// Stepping
// ============================================================================

SimState step(const SimState& state, const SimScenario& sc) {
    const double dt = sc.dt;
    const double t = state.t;

    const Derivative k1 = state_derivative(state.p, state.s, t, sc);
    const Derivative k2 = state_derivative(state.p + 0.5 * dt * k1.p_dot,
                                           state.s + 0.5 * dt * k1.s_dot, t + 0.5 * dt, sc);
    const Derivative k3 = state_derivative(state.p + 0.5 * dt * k2.p_dot,
                                           state.s + 0.5 * dt * k2.s_dot, t + 0.5 * dt, sc);
    const Derivative k4 =
        state_derivative(state.p + dt * k3.p_dot, state.s + dt * k3.s_dot, t + dt, sc);

    SimState next;
    next.p = state.p + (dt / 6.0) * (k1.p_dot + 2.0 * k2.p_dot + 2.0 * k3.p_dot + k4.p_dot);
    next.s = state.s + (dt / 6.0) * (k1.s_dot + 2.0 * k2.s_dot + 2.0 * k3.s_dot + k4.s_dot);
    next.t = t + dt;
    return next;
}

TraceRecord make_record(const SimState& state, const SimScenario& sc) {
    const control::ControlDecision decision =
        control::control_law(state.p, state.s, sc.path, sc.guidance, sc.controller);
    const guidance::ErrorCoords coords = guidance::to_path_frame(state.p, sc.path);
    const Vec2 v_des = guidance::ilos_field(state.p, state.s, sc.path, sc.guidance);

    TraceRecord rec;
    rec.t = state.t;
    rec.p_x = state.p.x;
    rec.p_z = state.p.z;
    rec.eps = coords.eps;
    rec.z = coords.z;
    rec.s = state.s;
    rec.u_x = decision.u.x;
    rec.u_z = decision.u.z;
    rec.u_mag = norm(decision.u);
    rec.v_x = v_des.x;
    rec.v_z = v_des.z;
    rec.saturated = decision.saturated;
    return rec;
}

// ============================================================================
// Runs and metrics
// ============================================================================

namespace {

RunMetrics compute_metrics(const std::vector<TraceRecord>& trace, const SimScenario& sc,
                           bool diverged) {
    RunMetrics m;
    m.tail_start = std::max(0.0, sc.t_end - 10.0);
    m.tail_end = sc.t_end;

    double tail_eps_sum = 0.0;
    double tail_u_sum = 0.0;
    std::size_t tail_count = 0;
    for (const TraceRecord& rec : trace) {
        m.max_u_mag = std::max(m.max_u_mag, rec.u_mag);
        if (rec.t >= m.tail_start - 1e-9) {
            tail_eps_sum += std::abs(rec.eps);
            tail_u_sum += rec.u_mag;
            ++tail_count;
        }
    }
    if (tail_count > 0) {
        m.mean_abs_eps_tail = tail_eps_sum / static_cast<double>(tail_count);
        m.ss_rotation_speed = tail_u_sum / static_cast<double>(tail_count);
    } else {
        m.mean_abs_eps_tail = std::numeric_limits<double>::quiet_NaN();
        m.ss_rotation_speed = std::numeric_limits<double>::quiet_NaN();
    }

    const double initial_abs_eps = trace.empty() ? 0.0 : std::abs(trace.front().eps);
    m.converged = !diverged && tail_count > 0 &&
                  m.mean_abs_eps_tail <= std::max(sc.guidance.delta_los, 0.1 * initial_abs_eps);
    return m;
}

}  // namespace

RunResult run(const SimScenario& sc) {
    validate(sc);

    const auto n_steps = static_cast<std::size_t>(std::floor(sc.t_end / sc.dt + 1e-9));
    RunResult result;
    result.trace.reserve(n_steps + 1);

    SimState state{sc.p0, sc.s0, 0.0};
    for (std::size_t i = 0; i <= n_steps; ++i) {
        state.t = static_cast<double>(i) * sc.dt;
        if (!finite(state)) {
            result.diverged = true;
            result.diagnostic = fmt::format("non-finite state at t = {:.6g} s", state.t);
            break;
        }
        result.trace.push_back(make_record(state, sc));
        if (norm(state.p) > kGuardRadius) {
            result.diverged = true;
            result.diagnostic =
                fmt::format("position left the {:.0f} m guard radius at t = {:.6g} s",
                            kGuardRadius, state.t);
            break;
        }
        if (i < n_steps) {
            state = step(state, sc);
        }
    }

    result.metrics = compute_metrics(result.trace, sc, result.diverged);
    return result;
}

// ============================================================================
// Disturbance calibration
// ============================================================================

model::DisturbanceSpec calibrate_disturbance(double target_offset,
                                             const guidance::GuidanceParams& params,
                                             double e11, const guidance::PathSpec& path) {
    guidance::validate(params);
    if (e11 == 0.0 || !std::isfinite(e11)) {
        throw std::invalid_argument("calibration requires a non-zero propulsion gain e11");
    }
    // At the conventional-LOS equilibrium the cross-track closed loop
    // balances e11 * alpha_d * eps against the cross-path disturbance.
    const double d_perp = target_offset * e11 * params.alpha_d;
    return model::DisturbanceSpec::constant(d_perp * guidance::path_normal(path));
}

CalibrationResult refine_calibration(const SimScenario& scenario, double target_offset,
                                     double rel_tol, int max_runs) {
    if (target_offset == 0.0) {
        return {model::DisturbanceSpec::constant({}), 0.0, 0};
    }
    if (!(rel_tol > 0.0) || max_runs < 1) {
        throw std::invalid_argument("refine_calibration needs rel_tol > 0 and max_runs >= 1");
    }

    const double target = std::abs(target_offset);
    const double sign = target_offset > 0.0 ? 1.0 : -1.0;
    const Vec2 normal = guidance::path_normal(scenario.path);

    int runs = 0;
    auto measure = [&](double magnitude) {
        SimScenario trial = scenario;
        trial.disturbance = model::DisturbanceSpec::constant(sign * magnitude * normal);
        ++runs;
        const RunResult result = run(trial);
        if (result.diverged) {
            throw std::runtime_error("calibration run diverged: " + result.diagnostic);
        }
        return result.metrics.mean_abs_eps_tail;
    };

    // Start from the analytic magnitude and secant-iterate on the measured
    // tail offset; the response is close to linear so this settles fast.
    double m_prev = std::abs(target_offset * scenario.e11 * scenario.guidance.alpha_d);
    double f_prev = measure(m_prev) - target;

    double best_m = m_prev;
    double best_f = f_prev;
    if (std::abs(f_prev) > rel_tol * target && runs < max_runs) {
        double measured = f_prev + target;
        double m_cur = measured > 0.0 ? m_prev * target / measured : 2.0 * m_prev;
        while (true) {
            const double f_cur = measure(m_cur) - target;
            if (std::abs(f_cur) < std::abs(best_f)) {
                best_m = m_cur;
                best_f = f_cur;
            }
            if (std::abs(f_cur) <= rel_tol * target || runs >= max_runs) {
                break;
            }
            const double df = f_cur - f_prev;
            double m_next = df != 0.0 ? m_cur - f_cur * (m_cur - m_prev) / df : m_cur;
            if (!(m_next > 0.0) || !std::isfinite(m_next)) {
                m_next = 0.5 * m_cur;
            }
            m_prev = m_cur;
            f_prev = f_cur;
            m_cur = m_next;
        }
    }

    CalibrationResult out;
    out.disturbance = model::DisturbanceSpec::constant(sign * best_m * normal);
    out.measured_offset = sign * (best_f + target);
    out.runs_used = runs;
    return out;
}

// ============================================================================
// Sweeps
// ============================================================================

std::vector<SweepRow> sweep(const std::vector<SimScenario>& scenarios, unsigned max_threads) {
    std::vector<SweepRow> rows(scenarios.size());
    if (scenarios.empty()) {
        return rows;
    }

    const auto run_one = [&](std::size_t i) {
        SweepRow& row = rows[i];
        try {
            const RunResult result = run(scenarios[i]);
            row.metrics = result.metrics;
            row.diverged = result.diverged;
            row.status = result.diverged ? "diverged" : "ok";
        } catch (const std::exception& e) {
            row.diverged = true;
            row.status = std::string("error: ") + e.what();
        }
    };

    const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_threads = std::clamp<unsigned>(
        max_threads, 1u, std::min<unsigned>(hardware, static_cast<unsigned>(scenarios.size())));

    if (n_threads == 1) {
        for (std::size_t i = 0; i < scenarios.size(); ++i) {
            run_one(i);
        }
        return rows;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= scenarios.size()) {
                return;
            }
            run_one(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned i = 0; i < n_threads; ++i) {
        pool.emplace_back(worker);
    }
    for (std::thread& t : pool) {
        t.join();
    }
    return rows;
}

}  // namespace helix::sim
