#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <helix/sim.hpp>

// Scenario files: flat INI-style `key = value` text grouped into sections,
// `#` comments, SI base units throughout (exceptions: *_deg keys in degrees;
// omega_so carries an explicit unit key).  Parsing is strict — unknown keys,
// duplicate keys, malformed numbers and out-of-place keys are all errors that
// name the offending key and line.

namespace helix::io {

// ============================================================================
// Errors
// ============================================================================

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, int line = 0, std::string key = {});

    // 1-based line in the input, 0 when the error is not tied to a line.
    [[nodiscard]] int line() const noexcept { return line_; }
    [[nodiscard]] const std::string& key() const noexcept { return key_; }

private:
    int line_ = 0;
    std::string key_;
};

// ============================================================================
// Scenario files
// ============================================================================

// One optional field per config key; unset fields take their documented
// defaults when the config is resolved into a runnable scenario.
struct ScenarioConfig {
    // [swimmer] — either e11 directly, or the full geometry/drag set.
    std::optional<double> e11;
    std::optional<double> theta_h_deg;
    std::optional<double> n_h;
    std::optional<double> r_h;
    std::optional<double> xi_par;
    std::optional<double> xi_perp;
    std::optional<double> xi_vm;
    std::optional<double> k_h_mag;
    // [path]
    std::optional<double> theta_r_deg;
    // [guidance]
    std::optional<double> alpha_d;
    std::optional<double> sigma0;
    std::optional<double> k_d;
    std::optional<double> delta_los;
    // [controller]
    std::optional<double> omega_so;
    std::optional<std::string> omega_so_unit;  // "rad_s" or "hz"
    std::optional<double> omega0;
    std::optional<double> e11_hat;
    std::optional<double> d_mu_hat_x;
    std::optional<double> d_mu_hat_z;
    // [disturbance] — explicit value or calibration target, not both.
    std::optional<double> d_mu_x;
    std::optional<double> d_mu_z;
    std::optional<double> calibrate_offset;
    // [sim]
    std::optional<double> p0_x;
    std::optional<double> p0_z;
    std::optional<double> s0;
    std::optional<double> t_end;
    std::optional<double> dt;
    std::optional<std::string> mode;  // "ilos" or "conventional_los"

    bool operator==(const ScenarioConfig&) const = default;
};

// Parse scenario text.  [provenance] and [metrics] sections are skipped
// wholesale, which makes run manifests directly re-parseable.
[[nodiscard]] ScenarioConfig parse_scenario(std::string_view text);
[[nodiscard]] ScenarioConfig load_scenario(const std::filesystem::path& file);

// Inverse of parse_scenario for the set fields; doubles are written in their
// shortest round-trip form so parse(serialize(c)) == c exactly.
[[nodiscard]] std::string serialize_scenario(const ScenarioConfig& config);

// Shortest decimal representation that parses back to the identical double.
[[nodiscard]] std::string format_double(double value);

// Set a numeric config key by name (key names are unique across sections).
// Returns false when the key is unknown or not numeric.
[[nodiscard]] bool set_scenario_value(ScenarioConfig& config, std::string_view key, double value);

// ============================================================================
// Resolution
// ============================================================================

// A runnable scenario plus the fully-resolved config that reproduces it:
// defaults materialised, omega_so converted to rad/s, the disturbance made
// explicit (calibration applied).  Re-resolving `echo` yields the same
// scenario, which is what makes manifests replayable.
struct ResolvedScenario {
    sim::SimScenario scenario;
    ScenarioConfig echo;
    std::string omega_so_input;  // value and unit as given, e.g. "2.8 hz"
    bool calibrated = false;     // disturbance derived from calibrate_offset
};

[[nodiscard]] ResolvedScenario resolve_scenario(const ScenarioConfig& config);

// ============================================================================
// Manifests
// ============================================================================

// Resolved config echo followed by [provenance] and [metrics] sections.
// The result parses as a scenario config again (the extra sections are
// skipped) and replays to the same trace byte for byte.
[[nodiscard]] std::string build_manifest(const ResolvedScenario& resolved,
                                         const sim::RunResult& result);

// ============================================================================
// Files
// ============================================================================

// Write via a sibling temp file and rename, so readers never observe a
// half-written file.
void write_file_atomic(const std::filesystem::path& file, std::string_view contents);

[[nodiscard]] std::string read_file(const std::filesystem::path& file);

}  // namespace helix::io
