#include <helix/config.hpp>

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <numbers>
#include <span>
#include <system_error>

#include <helix/version.hpp>

namespace helix::io {

// ============================================================================
// Errors
// ============================================================================

namespace {

std::string make_config_message(const std::string& message, int line, const std::string& key) {
    std::string out;
    if (line > 0) {
        out += fmt::format("line {}: ", line);
    }
    if (!key.empty()) {
        out += fmt::format("key '{}': ", key);
    }
    out += message;
    return out;
}

}  // namespace

ConfigError::ConfigError(const std::string& message, int line, std::string key)
    : std::runtime_error(make_config_message(message, line, key)), line_(line), key_(std::move(key)) {}

// ============================================================================
// Key tables
// ============================================================================

namespace {

constexpr std::string_view kUnitValues[] = {"rad_s", "hz"};
constexpr std::string_view kModeValues[] = {"ilos", "conventional_los"};

// One entry per config key, in file order; exactly one of the two member
// pointers is set.  String keys carry their admissible values.
struct KeySpec {
    std::string_view name;
    std::optional<double> ScenarioConfig::* dfield;
    std::optional<std::string> ScenarioConfig::* sfield;
    std::span<const std::string_view> allowed;
};

constexpr KeySpec dkey(std::string_view name, std::optional<double> ScenarioConfig::* field) {
    return {name, field, nullptr, {}};
}
constexpr KeySpec skey(std::string_view name, std::optional<std::string> ScenarioConfig::* field,
                       std::span<const std::string_view> allowed) {
    return {name, nullptr, field, allowed};
}

constexpr KeySpec kSwimmerKeys[] = {
    dkey("e11", &ScenarioConfig::e11),
    dkey("theta_h_deg", &ScenarioConfig::theta_h_deg),
    dkey("n_h", &ScenarioConfig::n_h),
    dkey("r_h", &ScenarioConfig::r_h),
    dkey("xi_par", &ScenarioConfig::xi_par),
    dkey("xi_perp", &ScenarioConfig::xi_perp),
    dkey("xi_vm", &ScenarioConfig::xi_vm),
    dkey("k_h_mag", &ScenarioConfig::k_h_mag),
};

constexpr KeySpec kPathKeys[] = {
    dkey("theta_r_deg", &ScenarioConfig::theta_r_deg),
};

constexpr KeySpec kGuidanceKeys[] = {
    dkey("alpha_d", &ScenarioConfig::alpha_d),
    dkey("sigma0", &ScenarioConfig::sigma0),
    dkey("k_d", &ScenarioConfig::k_d),
    dkey("delta_los", &ScenarioConfig::delta_los),
};

constexpr KeySpec kControllerKeys[] = {
    dkey("omega_so", &ScenarioConfig::omega_so),
    skey("omega_so_unit", &ScenarioConfig::omega_so_unit, kUnitValues),
    dkey("omega0", &ScenarioConfig::omega0),
    dkey("e11_hat", &ScenarioConfig::e11_hat),
    dkey("d_mu_hat_x", &ScenarioConfig::d_mu_hat_x),
    dkey("d_mu_hat_z", &ScenarioConfig::d_mu_hat_z),
};

constexpr KeySpec kDisturbanceKeys[] = {
    dkey("d_mu_x", &ScenarioConfig::d_mu_x),
    dkey("d_mu_z", &ScenarioConfig::d_mu_z),
    dkey("calibrate_offset", &ScenarioConfig::calibrate_offset),
};

constexpr KeySpec kSimKeys[] = {
    dkey("p0_x", &ScenarioConfig::p0_x),
    dkey("p0_z", &ScenarioConfig::p0_z),
    dkey("s0", &ScenarioConfig::s0),
    dkey("t_end", &ScenarioConfig::t_end),
    dkey("dt", &ScenarioConfig::dt),
    skey("mode", &ScenarioConfig::mode, kModeValues),
};

struct SectionSpec {
    std::string_view name;
    std::span<const KeySpec> keys;
};

constexpr SectionSpec kSections[] = {
    {"swimmer", kSwimmerKeys},   {"path", kPathKeys},           {"guidance", kGuidanceKeys},
    {"controller", kControllerKeys}, {"disturbance", kDisturbanceKeys}, {"sim", kSimKeys},
};

// Sections a manifest appends after the config proper; skipped when parsing.
constexpr std::string_view kSkippedSections[] = {"provenance", "metrics"};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_double_value(std::string_view value, int line, const std::string& key) {
    double out = 0.0;
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError(fmt::format("invalid number '{}'", value), line, key);
    }
    if (!std::isfinite(out)) {
        throw ConfigError("value must be finite", line, key);
    }
    return out;
}

void assign_key(ScenarioConfig& config, const SectionSpec& section, const std::string& key,
                std::string_view value, int line) {
    for (const KeySpec& spec : section.keys) {
        if (spec.name != key) {
            continue;
        }
        if (spec.dfield != nullptr) {
            auto& slot = config.*(spec.dfield);
            if (slot) {
                throw ConfigError("duplicate key", line, key);
            }
            slot = parse_double_value(value, line, key);
        } else {
            auto& slot = config.*(spec.sfield);
            if (slot) {
                throw ConfigError("duplicate key", line, key);
            }
            bool ok = false;
            for (std::string_view candidate : spec.allowed) {
                ok = ok || candidate == value;
            }
            if (!ok) {
                std::string expected;
                for (std::string_view candidate : spec.allowed) {
                    if (!expected.empty()) {
                        expected += ", ";
                    }
                    expected += candidate;
                }
                throw ConfigError(
                    fmt::format("invalid value '{}' (expected one of: {})", value, expected), line,
                    key);
            }
            slot = std::string(value);
        }
        return;
    }
    throw ConfigError(fmt::format("unknown key in section [{}]", section.name), line, key);
}

}  // namespace

// ============================================================================
// Parsing
// ============================================================================

ScenarioConfig parse_scenario(std::string_view text) {
    ScenarioConfig config;
    const SectionSpec* section = nullptr;
    bool skipping = false;
    int line_no = 0;

    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t nl = text.find('\n', start);
        const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
        std::string_view line = text.substr(start, end - start);
        ++line_no;

        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);

        if (!line.empty()) {
            if (line.front() == '[') {
                if (line.back() != ']') {
                    throw ConfigError("malformed section header", line_no);
                }
                const std::string_view name = trim(line.substr(1, line.size() - 2));
                skipping = false;
                section = nullptr;
                for (std::string_view skipped : kSkippedSections) {
                    skipping = skipping || name == skipped;
                }
                if (!skipping) {
                    for (const SectionSpec& candidate : kSections) {
                        if (candidate.name == name) {
                            section = &candidate;
                        }
                    }
                    if (section == nullptr) {
                        throw ConfigError(fmt::format("unknown section '[{}]'", name), line_no);
                    }
                }
            } else if (!skipping) {
                const std::size_t eq = line.find('=');
                if (eq == std::string_view::npos) {
                    throw ConfigError("expected 'key = value'", line_no);
                }
                const std::string key{trim(line.substr(0, eq))};
                const std::string_view value = trim(line.substr(eq + 1));
                if (key.empty()) {
                    throw ConfigError("empty key", line_no);
                }
                if (value.empty()) {
                    throw ConfigError("empty value", line_no, key);
                }
                if (section == nullptr) {
                    throw ConfigError("key appears before any section header", line_no, key);
                }
                assign_key(config, *section, key, value, line_no);
            }
        }

        if (nl == std::string_view::npos) {
            break;
        }
        start = nl + 1;
    }
    return config;
}

ScenarioConfig load_scenario(const std::filesystem::path& file) {
    return parse_scenario(read_file(file));
}

// ============================================================================
// Serialisation
// ============================================================================

std::string format_double(double value) {
    std::array<char, 32> buffer{};
    const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    return {buffer.data(), ptr};
}

bool set_scenario_value(ScenarioConfig& config, std::string_view key, double value) {
    for (const SectionSpec& section : kSections) {
        for (const KeySpec& spec : section.keys) {
            if (spec.name == key && spec.dfield != nullptr) {
                config.*(spec.dfield) = value;
                return true;
            }
        }
    }
    return false;
}

std::string serialize_scenario(const ScenarioConfig& config) {
    std::string out;
    for (const SectionSpec& section : kSections) {
        std::string body;
        for (const KeySpec& spec : section.keys) {
            if (spec.dfield != nullptr) {
                if (const auto& slot = config.*(spec.dfield)) {
                    body += fmt::format("{} = {}\n", spec.name, format_double(*slot));
                }
            } else if (const auto& slot = config.*(spec.sfield)) {
                body += fmt::format("{} = {}\n", spec.name, *slot);
            }
        }
        if (!body.empty()) {
            if (!out.empty()) {
                out += '\n';
            }
            out += fmt::format("[{}]\n", section.name);
            out += body;
        }
    }
    return out;
}

// ============================================================================
// Resolution
// ============================================================================

namespace {

double require(const std::optional<double>& field, std::string_view key) {
    if (!field) {
        throw ConfigError("missing required key", 0, std::string(key));
    }
    return *field;
}

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

double wrap_angle(double angle) {
    while (angle <= -std::numbers::pi) {
        angle += 2.0 * std::numbers::pi;
    }
    while (angle > std::numbers::pi) {
        angle -= 2.0 * std::numbers::pi;
    }
    return angle;
}

}  // namespace

ResolvedScenario resolve_scenario(const ScenarioConfig& c) {
    ResolvedScenario out;
    sim::SimScenario& sc = out.scenario;
    ScenarioConfig& echo = out.echo;

    // --- swimmer: direct gain or geometry route --------------------------------
    const bool has_geometry = c.theta_h_deg || c.n_h || c.r_h || c.xi_par || c.xi_perp ||
                              c.xi_vm || c.k_h_mag;
    if (c.e11 && has_geometry) {
        throw ConfigError("specify either e11 or the geometry/drag set, not both", 0, "e11");
    }
    if (c.e11) {
        sc.e11 = *c.e11;
        echo.e11 = c.e11;
    } else if (has_geometry) {
        model::HelixGeometry geom;
        geom.theta_h = deg_to_rad(require(c.theta_h_deg, "theta_h_deg"));
        geom.n_h = require(c.n_h, "n_h");
        geom.r_h = require(c.r_h, "r_h");
        geom.k_h_mag = require(c.k_h_mag, "k_h_mag");
        model::DragCoefficients drag;
        drag.xi_par = require(c.xi_par, "xi_par");
        drag.xi_perp = require(c.xi_perp, "xi_perp");
        drag.xi_vm = require(c.xi_vm, "xi_vm");
        try {
            sc.e11 = model::compute_derived_params(geom, drag).e11;
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what(), 0, "swimmer");
        }
        echo.theta_h_deg = c.theta_h_deg;
        echo.n_h = c.n_h;
        echo.r_h = c.r_h;
        echo.xi_par = c.xi_par;
        echo.xi_perp = c.xi_perp;
        echo.xi_vm = c.xi_vm;
        echo.k_h_mag = c.k_h_mag;
    } else {
        throw ConfigError("missing required key (or the geometry/drag set)", 0, "e11");
    }

    // --- path ------------------------------------------------------------------
    const double theta_r_deg = c.theta_r_deg.value_or(0.0);
    sc.path.theta_r = wrap_angle(deg_to_rad(theta_r_deg));
    echo.theta_r_deg = theta_r_deg;

    // --- mode first: conventional LOS forces sigma0 = 0 ------------------------
    const std::string mode = c.mode.value_or("ilos");
    if (mode == "ilos") {
        sc.mode = sim::GuidanceMode::ilos;
    } else if (mode == "conventional_los") {
        sc.mode = sim::GuidanceMode::conventional_los;
    } else {
        throw ConfigError(fmt::format("invalid value '{}'", mode), 0, "mode");
    }
    echo.mode = mode;

    // --- guidance --------------------------------------------------------------
    sc.guidance.alpha_d = require(c.alpha_d, "alpha_d");
    sc.guidance.delta_los = require(c.delta_los, "delta_los");
    sc.guidance.sigma0 = c.sigma0.value_or(0.0);
    sc.guidance.k_d = c.k_d.value_or(0.0);
    if (sc.mode == sim::GuidanceMode::conventional_los) {
        sc.guidance.sigma0 = 0.0;
    }
    try {
        guidance::validate(sc.guidance);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what(), 0, "guidance");
    }
    echo.alpha_d = sc.guidance.alpha_d;
    echo.sigma0 = sc.guidance.sigma0;
    echo.k_d = sc.guidance.k_d;
    echo.delta_los = sc.guidance.delta_los;

    // --- controller ------------------------------------------------------------
    const double omega_so_value = require(c.omega_so, "omega_so");
    if (!c.omega_so_unit) {
        throw ConfigError("missing required key", 0, "omega_so_unit");
    }
    double omega_so_rad = omega_so_value;
    if (*c.omega_so_unit == "hz") {
        omega_so_rad = omega_so_value * 2.0 * std::numbers::pi;
    } else if (*c.omega_so_unit != "rad_s") {
        throw ConfigError(fmt::format("invalid value '{}'", *c.omega_so_unit), 0, "omega_so_unit");
    }
    out.omega_so_input = format_double(omega_so_value) + " " + *c.omega_so_unit;
    sc.controller = control::ControllerParams::equal_weight(
        omega_so_rad, c.omega0.value_or(1.0), c.e11_hat.value_or(1.0),
        {c.d_mu_hat_x.value_or(0.0), c.d_mu_hat_z.value_or(0.0)});
    try {
        control::validate(sc.controller);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what(), 0, "controller");
    }
    echo.omega_so = omega_so_rad;
    echo.omega_so_unit = "rad_s";
    echo.omega0 = sc.controller.omega0;
    echo.e11_hat = sc.controller.e11_hat;
    echo.d_mu_hat_x = sc.controller.d_mu_hat.x;
    echo.d_mu_hat_z = sc.controller.d_mu_hat.z;

    // --- sim -------------------------------------------------------------------
    sc.p0 = {c.p0_x.value_or(0.0), c.p0_z.value_or(0.0)};
    sc.s0 = c.s0.value_or(0.0);
    sc.t_end = c.t_end.value_or(100.0);
    sc.dt = c.dt.value_or(1e-3);
    echo.p0_x = sc.p0.x;
    echo.p0_z = sc.p0.z;
    echo.s0 = sc.s0;
    echo.t_end = sc.t_end;
    echo.dt = sc.dt;

    // --- disturbance -----------------------------------------------------------
    if ((c.d_mu_x || c.d_mu_z) && c.calibrate_offset) {
        throw ConfigError("specify either d_mu or calibrate_offset, not both", 0,
                          "calibrate_offset");
    }
    Vec2 d;
    if (c.calibrate_offset) {
        try {
            sc.disturbance =
                sim::calibrate_disturbance(*c.calibrate_offset, sc.guidance, sc.e11, sc.path);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what(), 0, "calibrate_offset");
        }
        d = sc.disturbance.at(0.0);
        out.calibrated = true;
    } else {
        d = {c.d_mu_x.value_or(0.0), c.d_mu_z.value_or(0.0)};
        sc.disturbance = model::DisturbanceSpec::constant(d);
    }
    echo.d_mu_x = d.x;
    echo.d_mu_z = d.z;

    // --- whole-scenario validation ---------------------------------------------
    try {
        sim::validate(sc);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what(), 0, "scenario");
    }
    return out;
}

// ============================================================================
// Manifests
// ============================================================================

std::string build_manifest(const ResolvedScenario& resolved, const sim::RunResult& result) {
    std::string out = serialize_scenario(resolved.echo);
    out += "\n[provenance]\n";
    out += fmt::format("version = {}\n", version);
    out += fmt::format("omega_so_input = {}\n", resolved.omega_so_input);
    out += fmt::format("calibration = {}\n", resolved.calibrated ? "analytic" : "none");

    const sim::RunMetrics& m = result.metrics;
    out += "\n[metrics]\n";
    out += fmt::format("mean_abs_eps_tail_m = {}\n", format_double(m.mean_abs_eps_tail));
    out += fmt::format("ss_rotation_speed_rad_s = {}\n", format_double(m.ss_rotation_speed));
    out += fmt::format("max_u_mag_rad_s = {}\n", format_double(m.max_u_mag));
    out += fmt::format("tail_start_s = {}\n", format_double(m.tail_start));
    out += fmt::format("tail_end_s = {}\n", format_double(m.tail_end));
    out += fmt::format("converged = {}\n", m.converged ? 1 : 0);
    out += fmt::format("diverged = {}\n", result.diverged ? 1 : 0);
    if (result.diverged) {
        out += fmt::format("diagnostic = {}\n", result.diagnostic);
    }
    return out;
}

// ============================================================================
// Files
// ============================================================================

void write_file_atomic(const std::filesystem::path& file, std::string_view contents) {
    std::filesystem::path tmp = file;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) {
            throw std::runtime_error("cannot open for writing: " + tmp.string());
        }
        os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        os.flush();
        if (!os) {
            throw std::runtime_error("write failed: " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, file);
}

std::string read_file(const std::filesystem::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) {
        throw std::runtime_error("cannot open file: " + file.string());
    }
    std::string out;
    is.seekg(0, std::ios::end);
    const std::streampos size = is.tellg();
    if (size > 0) {
        out.resize(static_cast<std::size_t>(size));
        is.seekg(0, std::ios::beg);
        is.read(out.data(), size);
    }
    if (is.bad()) {
        throw std::runtime_error("read failed: " + file.string());
    }
    return out;
}

}  // namespace helix::io
