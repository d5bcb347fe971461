// Command-line front end: simulate scenarios, compare guidance laws, certify
// gain choices, render traces and sweep parameters.
//
// Exit codes: 0 success, 2 configuration/usage errors, 3 runtime failures
// (diverged runs and the like).  All machine-readable outputs use SI base
// units; display conversions (mm, Hz) appear only in metrics.txt and plots.

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <helix/config.hpp>
#include <helix/guidance.hpp>
#include <helix/plot.hpp>
#include <helix/sim.hpp>
#include <helix/trace.hpp>
#include <helix/version.hpp>

namespace fs = std::filesystem;
using namespace helix;

namespace {

// Raised after outputs are written when a run left the valid region; mapped
// to exit code 3 so scripts can distinguish bad configs from bad dynamics.
struct DivergedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ============================================================================
// Shared helpers
// ============================================================================

unsigned thread_budget() {
    const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
    const char* env = std::getenv("HELIX_ILOS_THREADS");
    if (env == nullptr) {
        return hardware;
    }
    const std::string_view text{env};
    unsigned value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || value == 0) {
        throw io::ConfigError(
            fmt::format("HELIX_ILOS_THREADS must be a positive integer, got '{}'", text));
    }
    return value;
}

io::ResolvedScenario load_resolved(const std::string& config_path) {
    return io::resolve_scenario(io::load_scenario(config_path));
}

std::string yes_no(bool value) { return value ? "yes" : "no"; }

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Human-readable run summary; the one place (besides plots) with mm/Hz.
std::string format_metrics(const io::ResolvedScenario& resolved, const sim::RunResult& result) {
    const sim::RunMetrics& m = result.metrics;
    const sim::SimScenario& sc = resolved.scenario;
    std::string out;
    out += fmt::format("mean_abs_eps_tail = {:.6g} mm\n", m.mean_abs_eps_tail * 1e3);
    out += fmt::format("ss_rotation_speed = {:.6g} rad/s ({:.6g} Hz)\n", m.ss_rotation_speed,
                       m.ss_rotation_speed / kTwoPi);
    out += fmt::format("max_u_mag = {:.6g} rad/s ({:.6g} Hz)\n", m.max_u_mag,
                       m.max_u_mag / kTwoPi);
    out += fmt::format("omega_so = {:.6g} rad/s ({:.6g} Hz)\n", sc.controller.omega_so,
                       sc.controller.omega_so / kTwoPi);
    out += fmt::format("steady_speed_nominal = {:.6g} um/s\n",
                       guidance::steady_state_speed(sc.guidance, sc.e11) * 1e6);
    out += fmt::format("tail_window = [{:.6g}, {:.6g}] s\n", m.tail_start, m.tail_end);
    out += fmt::format("converged = {}\n", yes_no(m.converged));
    out += fmt::format("diverged = {}\n", yes_no(result.diverged));
    if (result.diverged) {
        out += fmt::format("diagnostic = {}\n", result.diagnostic);
    }
    return out;
}

// ============================================================================
// simulate
// ============================================================================

void run_simulate(const std::string& config_path, const std::string& out_dir) {
    const io::ResolvedScenario resolved = load_resolved(config_path);
    const sim::RunResult result = sim::run(resolved.scenario);

    fs::create_directories(out_dir);
    const fs::path out{out_dir};
    io::write_file_atomic(out / "trace.csv", io::trace_to_csv(result.trace));
    io::write_file_atomic(out / "manifest.txt", io::build_manifest(resolved, result));
    io::write_file_atomic(out / "metrics.txt", format_metrics(resolved, result));

    fmt::print("wrote {}\n", (out / "trace.csv").string());
    fmt::print("wrote {}\n", (out / "manifest.txt").string());
    fmt::print("wrote {}\n", (out / "metrics.txt").string());
    if (result.diverged) {
        throw DivergedError(fmt::format("run diverged: {}", result.diagnostic));
    }
}

// ============================================================================
// compare
// ============================================================================

void run_compare(const std::string& config_a, const std::string& config_b,
                 const std::string& out_dir) {
    const io::ResolvedScenario a = load_resolved(config_a);
    const io::ResolvedScenario b = load_resolved(config_b);

    const std::vector<sim::SimScenario> scenarios{a.scenario, b.scenario};
    const std::vector<sim::SweepRow> rows = sim::sweep(scenarios, std::min(thread_budget(), 2u));

    const auto mode_name = [](const io::ResolvedScenario& r) {
        return r.echo.mode.value_or("ilos");
    };

    std::string csv =
        "label,mode,alpha_d,mean_abs_eps_tail_m,ss_rotation_speed_rad_s,max_u_mag_rad_s,"
        "converged,status\n";
    const io::ResolvedScenario* resolved[] = {&a, &b};
    const char* labels[] = {"a", "b"};
    for (std::size_t i = 0; i < 2; ++i) {
        const sim::SweepRow& row = rows[i];
        std::string status = row.status;
        std::replace(status.begin(), status.end(), ',', ';');
        csv += fmt::format("{},{},{},{},{},{},{},{}\n", labels[i], mode_name(*resolved[i]),
                           io::format_double(resolved[i]->scenario.guidance.alpha_d),
                           io::format_double(row.metrics.mean_abs_eps_tail),
                           io::format_double(row.metrics.ss_rotation_speed),
                           io::format_double(row.metrics.max_u_mag),
                           row.metrics.converged ? 1 : 0, status);
    }

    fs::create_directories(out_dir);
    const fs::path out{out_dir};
    io::write_file_atomic(out / "compare.csv", csv);

    fmt::print("run a: {}\n", config_a);
    fmt::print("run b: {}\n", config_b);
    fmt::print("{:<5} {:<18} {:>10} {:>16} {:>14}  {}\n", "run", "mode", "alpha_d",
               "tail|eps| [m]", "|u|ss [rad/s]", "status");
    for (std::size_t i = 0; i < 2; ++i) {
        fmt::print("{:<5} {:<18} {:>10.6g} {:>16.6g} {:>14.6g}  {}\n", labels[i],
                   mode_name(*resolved[i]), resolved[i]->scenario.guidance.alpha_d,
                   rows[i].metrics.mean_abs_eps_tail, rows[i].metrics.ss_rotation_speed,
                   rows[i].status);
    }
    if (rows[0].status == "ok" && rows[1].status == "ok" &&
        rows[1].metrics.mean_abs_eps_tail > 0.0) {
        fmt::print("tail error ratio (a/b) = {:.6g}\n",
                   rows[0].metrics.mean_abs_eps_tail / rows[1].metrics.mean_abs_eps_tail);
    }
    fmt::print("wrote {}\n", (out / "compare.csv").string());

    for (const sim::SweepRow& row : rows) {
        if (row.status != "ok") {
            throw DivergedError(fmt::format("compare run failed: {}", row.status));
        }
    }
}

// ============================================================================
// certify
// ============================================================================

void run_certify(const std::string& config_path) {
    const io::ResolvedScenario resolved = load_resolved(config_path);
    const guidance::GuidanceParams& g = resolved.scenario.guidance;
    const guidance::GainCheck gains = guidance::check_simplified_gains(g);
    const guidance::StabilityCertificate cert = guidance::certify_stability(g);

    fmt::print("alpha_d = {}\n", io::format_double(g.alpha_d));
    fmt::print("sigma0 = {}\n", io::format_double(g.sigma0));
    fmt::print("k_d = {}\n", io::format_double(g.k_d));
    fmt::print("delta_los = {}\n", io::format_double(g.delta_los));
    fmt::print("simplified_lhs = {}\n", io::format_double(gains.lhs));
    fmt::print("gains_ok = {}\n", gains.ok ? 1 : 0);
    fmt::print("ges_ok = {}\n", cert.ges_ok ? 1 : 0);
    fmt::print("iss_ok = {}\n", cert.iss_ok ? 1 : 0);
    fmt::print("iss_radius_per_dstar = {}\n", io::format_double(cert.iss_radius_per_dstar));
    fmt::print("p11 = {}\n", io::format_double(cert.P.m00));
    fmt::print("p12 = {}\n", io::format_double(cert.P.m01));
    fmt::print("p22 = {}\n", io::format_double(cert.P.m11));
    fmt::print("gamma11 = {}\n", io::format_double(cert.Gamma.m00));
    fmt::print("gamma12 = {}\n", io::format_double(cert.Gamma.m01));
    fmt::print("gamma22 = {}\n", io::format_double(cert.Gamma.m11));
    fmt::print("steady_speed_m_s = {}\n",
               io::format_double(guidance::steady_state_speed(g, resolved.scenario.e11)));
}

// ============================================================================
// plot
// ============================================================================

void run_plot(const std::string& trace_path, const std::string& out_path,
              const std::optional<double>& omega_so) {
    const std::vector<sim::TraceRecord> trace = io::trace_from_csv(io::read_file(trace_path));
    if (trace.empty()) {
        throw io::ConfigError("trace contains no records");
    }
    plot::PlotOptions options;
    options.omega_so = omega_so;
    if (const fs::path parent = fs::path(out_path).parent_path(); !parent.empty()) {
        fs::create_directories(parent);
    }
    io::write_file_atomic(out_path, plot::render_svg(trace, options));
    fmt::print("wrote {}\n", out_path);
}

// ============================================================================
// sweep
// ============================================================================

struct SweepAxis {
    std::string key;
    std::vector<double> values;
    std::vector<std::string> literals;  // as typed, for the CSV
};

SweepAxis parse_axis(const std::string& spec) {
    const std::size_t eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= spec.size()) {
        throw io::ConfigError(fmt::format("--param expects KEY=V1,V2,..., got '{}'", spec));
    }
    SweepAxis axis;
    axis.key = spec.substr(0, eq);
    {
        // Reject unknown or non-numeric keys up front.
        io::ScenarioConfig probe;
        if (!io::set_scenario_value(probe, axis.key, 0.0)) {
            throw io::ConfigError(fmt::format("unknown numeric config key '{}'", axis.key));
        }
    }
    std::size_t start = eq + 1;
    while (start <= spec.size()) {
        std::size_t comma = spec.find(',', start);
        if (comma == std::string::npos) {
            comma = spec.size();
        }
        const std::string item = spec.substr(start, comma - start);
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
        if (ec != std::errc() || ptr != item.data() + item.size()) {
            throw io::ConfigError(fmt::format("invalid number '{}' for key '{}'", item, axis.key));
        }
        axis.values.push_back(value);
        axis.literals.push_back(item);
        start = comma + 1;
    }
    return axis;
}

void run_sweep(const std::string& config_path, const std::vector<std::string>& param_specs,
               const std::string& out_dir) {
    const io::ScenarioConfig base = io::load_scenario(config_path);

    std::vector<SweepAxis> axes;
    axes.reserve(param_specs.size());
    for (const std::string& spec : param_specs) {
        axes.push_back(parse_axis(spec));
    }

    std::size_t combos = 1;
    for (const SweepAxis& axis : axes) {
        combos *= axis.values.size();
    }
    if (combos == 0 || combos > 100000) {
        throw io::ConfigError(fmt::format("sweep needs between 1 and 100000 combinations, got {}",
                                          combos));
    }

    // Row-major enumeration: the last --param axis varies fastest.
    struct Combo {
        std::vector<std::size_t> index;
        std::optional<io::ResolvedScenario> resolved;
        std::string status;  // set for resolution failures
    };
    std::vector<Combo> grid(combos);
    std::vector<sim::SimScenario> runnable;
    std::vector<std::size_t> runnable_index;
    for (std::size_t flat = 0; flat < combos; ++flat) {
        Combo& combo = grid[flat];
        combo.index.resize(axes.size());
        std::size_t rest = flat;
        for (std::size_t ax = axes.size(); ax-- > 0;) {
            combo.index[ax] = rest % axes[ax].values.size();
            rest /= axes[ax].values.size();
        }
        io::ScenarioConfig c = base;
        for (std::size_t ax = 0; ax < axes.size(); ++ax) {
            std::ignore = io::set_scenario_value(c, axes[ax].key, axes[ax].values[combo.index[ax]]);
        }
        try {
            combo.resolved = io::resolve_scenario(c);
            runnable.push_back(combo.resolved->scenario);
            runnable_index.push_back(flat);
        } catch (const io::ConfigError& e) {
            combo.status = fmt::format("error: {}", e.what());
        }
    }

    const std::vector<sim::SweepRow> results = sim::sweep(runnable, thread_budget());

    std::string csv;
    for (const SweepAxis& axis : axes) {
        csv += axis.key;
        csv += ',';
    }
    csv +=
        "mean_abs_eps_tail_m,ss_rotation_speed_rad_s,max_u_mag_rad_s,converged,"
        "simplified_lhs,gains_ok,status\n";

    std::size_t next_result = 0;
    std::size_t n_ok = 0;
    std::size_t n_diverged = 0;
    std::size_t n_error = 0;
    for (std::size_t flat = 0; flat < combos; ++flat) {
        const Combo& combo = grid[flat];
        for (std::size_t ax = 0; ax < axes.size(); ++ax) {
            csv += axes[ax].literals[combo.index[ax]];
            csv += ',';
        }
        if (combo.resolved) {
            const sim::SweepRow& row = results[next_result++];
            const guidance::GainCheck gains =
                guidance::check_simplified_gains(combo.resolved->scenario.guidance);
            std::string status = row.status;
            std::replace(status.begin(), status.end(), ',', ';');
            csv += fmt::format("{},{},{},{},{},{},{}\n",
                               io::format_double(row.metrics.mean_abs_eps_tail),
                               io::format_double(row.metrics.ss_rotation_speed),
                               io::format_double(row.metrics.max_u_mag),
                               row.metrics.converged ? 1 : 0, io::format_double(gains.lhs),
                               gains.ok ? 1 : 0, status);
            if (row.status == "ok") {
                ++n_ok;
            } else if (row.status == "diverged") {
                ++n_diverged;
            } else {
                ++n_error;
            }
        } else {
            std::string status = combo.status;
            std::replace(status.begin(), status.end(), ',', ';');
            csv += fmt::format("nan,nan,nan,0,nan,0,{}\n", status);
            ++n_error;
        }
    }

    fs::create_directories(out_dir);
    const fs::path out{out_dir};
    io::write_file_atomic(out / "sweep.csv", csv);
    fmt::print("swept {} combinations: {} ok, {} diverged, {} errors\n", combos, n_ok, n_diverged,
               n_error);
    fmt::print("wrote {}\n", (out / "sweep.csv").string());
}

}  // namespace

// ============================================================================
// Entry point
// ============================================================================

int main(int argc, char** argv) {
    CLI::App app{"Straight-line path following for magnetic helical microswimmers"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);

    std::string config_path;
    std::string config_b_path;
    std::string out_dir;
    std::string trace_path;
    std::string out_path;
    std::optional<double> omega_so;
    std::vector<std::string> param_specs;

    CLI::App* simulate = app.add_subcommand("simulate", "Run a scenario and write its outputs");
    simulate->add_option("--config", config_path, "Scenario config file")
        ->required()
        ->check(CLI::ExistingFile);
    simulate->add_option("--out", out_dir, "Output directory")->required();
    simulate->callback([&] { run_simulate(config_path, out_dir); });

    CLI::App* compare = app.add_subcommand("compare", "Run two scenarios side by side");
    compare->add_option("--config-a", config_path, "First scenario config")
        ->required()
        ->check(CLI::ExistingFile);
    compare->add_option("--config-b", config_b_path, "Second scenario config")
        ->required()
        ->check(CLI::ExistingFile);
    compare->add_option("--out", out_dir, "Output directory")->required();
    compare->callback([&] { run_compare(config_path, config_b_path, out_dir); });

    CLI::App* certify = app.add_subcommand("certify", "Report gain and stability certificates");
    certify->add_option("--config", config_path, "Scenario config file")
        ->required()
        ->check(CLI::ExistingFile);
    certify->callback([&] { run_certify(config_path); });

    CLI::App* plot_cmd = app.add_subcommand("plot", "Render a trace CSV as SVG");
    plot_cmd->add_option("--trace", trace_path, "Trace CSV file")
        ->required()
        ->check(CLI::ExistingFile);
    plot_cmd->add_option("--out", out_path, "Output SVG file")->required();
    plot_cmd->add_option("--omega-so", omega_so, "Rate budget line [rad/s]");
    plot_cmd->callback([&] { run_plot(trace_path, out_path, omega_so); });

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a Cartesian parameter sweep");
    sweep_cmd->add_option("--config", config_path, "Base scenario config")
        ->required()
        ->check(CLI::ExistingFile);
    sweep_cmd
        ->add_option("--param", param_specs,
                     "Axis as KEY=V1,V2,... (repeatable; last axis varies fastest)")
        ->required();
    sweep_cmd->add_option("--out", out_dir, "Output directory")->required();
    sweep_cmd->callback([&] { run_sweep(config_path, param_specs, out_dir); });

    try {
        app.parse(argc, argv);
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints the message or help text
        return code == 0 ? 0 : 2;
    } catch (const io::ConfigError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return 2;
    } catch (const DivergedError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 3;
    }
}
