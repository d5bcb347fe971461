#pragma once

#include <string>
#include <vector>

#include <helix/controller.hpp>
#include <helix/guidance.hpp>
#include <helix/linalg.hpp>
#include <helix/model.hpp>

// Closed-loop simulation of the swimmer under ILOS guidance and the saturated
// tracking controller, integrated with the classical fourth-order Runge-Kutta
// scheme at a fixed step.  Runs are deterministic: identical scenarios produce
// bit-identical traces.

namespace helix::sim {

// ============================================================================
// Scenario
// ============================================================================

// conventional_los freezes the integral state (s_dot = 0) and requires
// sigma0 = 0, reducing the guidance law to plain LOS.
enum class GuidanceMode { ilos, conventional_los };

struct SimScenario {
    double e11 = 0.0;
    guidance::PathSpec path;
    guidance::GuidanceParams guidance;
    control::ControllerParams controller;
    model::DisturbanceSpec disturbance = model::DisturbanceSpec::constant({});
    Vec2 p0;
    double s0 = 0.0;
    double t_end = 100.0;
    double dt = 1e-3;
    GuidanceMode mode = GuidanceMode::ilos;
};

// Throws std::invalid_argument when a sub-parameter set is invalid, dt or
// t_end are non-positive, t_end < dt, e11 == 0, or conventional_los is paired
// with sigma0 != 0.
void validate(const SimScenario& scenario);

// ============================================================================
// Stepping
// ============================================================================

struct SimState {
    Vec2 p;
    double s = 0.0;
    double t = 0.0;
};

// One Runge-Kutta step of size scenario.dt; the controller is re-evaluated at
// every stage.
[[nodiscard]] SimState step(const SimState& state, const SimScenario& scenario);

// Snapshot of a step boundary: position, path-frame errors, integral state,
// the command the controller issues at this state and the desired velocity it
// tracks.  `saturated` marks commands on the rate budget.
struct TraceRecord {
    double t = 0.0;
    double p_x = 0.0;
    double p_z = 0.0;
    double eps = 0.0;
    double z = 0.0;
    double s = 0.0;
    double u_x = 0.0;
    double u_z = 0.0;
    double u_mag = 0.0;
    double v_x = 0.0;
    double v_z = 0.0;
    bool saturated = false;
};

[[nodiscard]] TraceRecord make_record(const SimState& state, const SimScenario& scenario);

// ============================================================================
// Runs and metrics
// ============================================================================

// Summary statistics over the tail window [max(0, t_end - 10 s), t_end]:
// mean |eps|, mean command magnitude (the steady rotation rate), plus the
// whole-run command maximum.  `converged` is an informational flag: the run
// finished and the tail-mean cross-track error is below
// max(delta_los, 0.1 |eps(0)|).
struct RunMetrics {
    double mean_abs_eps_tail = 0.0;
    double ss_rotation_speed = 0.0;
    double max_u_mag = 0.0;
    double tail_start = 0.0;
    double tail_end = 0.0;
    bool converged = false;
};

struct RunResult {
    std::vector<TraceRecord> trace;
    RunMetrics metrics;
    bool diverged = false;
    std::string diagnostic;  // empty unless diverged
};

// Integrate the scenario from t = 0 to t_end, emitting one record per step
// boundary (floor(t_end/dt) + 1 records).  A non-finite state or a position
// leaving the 1 m guard radius stops the run early; the records up to and
// including the last valid state are kept and `diverged` is set.
[[nodiscard]] RunResult run(const SimScenario& scenario);

// ============================================================================
// Disturbance calibration
// ============================================================================

// Constant cross-path disturbance that places the conventional-LOS (sigma0=0)
// equilibrium at the requested signed cross-track offset:
// d = target_offset * e11 * alpha_d along the path normal.
[[nodiscard]] model::DisturbanceSpec calibrate_disturbance(double target_offset,
                                                           const guidance::GuidanceParams& params,
                                                           double e11,
                                                           const guidance::PathSpec& path);

struct CalibrationResult {
    model::DisturbanceSpec disturbance;
    double measured_offset = 0.0;  // signed tail-mean cross-track error achieved
    int runs_used = 0;
};

// Refine the analytic calibration by simulating the scenario and adjusting
// the disturbance magnitude (secant iteration) until the measured tail-mean
// |eps| matches |target_offset| within rel_tol, or max_runs simulations have
// been spent.  The scenario's own disturbance is ignored and replaced.
[[nodiscard]] CalibrationResult refine_calibration(const SimScenario& scenario,
                                                   double target_offset,
                                                   double rel_tol = 0.005, int max_runs = 8);

// ============================================================================
// Sweeps
// ============================================================================

struct SweepRow {
    RunMetrics metrics;
    bool diverged = false;
    std::string status;  // "ok", "diverged", or "error: ..."
};

// Run every scenario, at most max_threads at a time (clamped to [1, #scenarios]).
// Row order matches input order regardless of scheduling.
[[nodiscard]] std::vector<SweepRow> sweep(const std::vector<SimScenario>& scenarios,
                                          unsigned max_threads);

}  // namespace helix::sim
