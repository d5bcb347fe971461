#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <helix/plot.hpp>
#include <helix/sim.hpp>

using namespace helix;
using helix::plot::PlotOptions;
using helix::plot::render_svg;

namespace {

// Synthetic trace along a tilted path with a decaying cross-track error.
std::vector<sim::TraceRecord> synthetic_trace(std::size_t n, bool saturate) {
    std::vector<sim::TraceRecord> trace(n);
    const double theta = 0.4;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = 0.01 * static_cast<double>(i);
        const double z = 1e-3 * t;
        const double eps = 5e-3 * std::exp(-0.2 * t);
        sim::TraceRecord& r = trace[i];
        r.t = t;
        r.p_x = z * std::cos(theta) - eps * std::sin(theta);
        r.p_z = z * std::sin(theta) + eps * std::cos(theta);
        r.eps = eps;
        r.z = z;
        r.s = 0.1 * t;
        r.u_mag = saturate && i < n / 2 ? 17.59 : 0.45;
        r.u_x = r.u_mag;
        r.u_z = 0.0;
        r.v_x = r.u_x;
        r.v_z = r.u_z;
        r.saturated = saturate && i < n / 2;
    }
    return trace;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size())) {
        ++count;
    }
    return count;
}

// Largest number of coordinate pairs in any polyline of the document.
std::size_t max_polyline_points(const std::string& svg) {
    std::size_t max_points = 0;
    std::size_t pos = 0;
    while ((pos = svg.find("points=\"", pos)) != std::string::npos) {
        pos += 8;
        const std::size_t end = svg.find('"', pos);
        REQUIRE(end != std::string::npos);
        const std::string body = svg.substr(pos, end - pos);
        max_points = std::max(max_points, count_occurrences(body, " ") + 1);
        pos = end;
    }
    return max_points;
}

}  // namespace

TEST_CASE("rendering is deterministic and produces a complete document") {
    const auto trace = synthetic_trace(500, false);
    const std::string svg = render_svg(trace);
    CHECK(render_svg(trace) == svg);  // byte-identical on repeat

    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("trajectory") != std::string::npos);
    CHECK(svg.find("cross-track error") != std::string::npos);
    CHECK(svg.find("command magnitude") != std::string::npos);
    CHECK(svg.find("integral state") != std::string::npos);
    CHECK(svg.find("p_x [mm]") != std::string::npos);
    CHECK(svg.find("eps [mm]") != std::string::npos);
    CHECK(svg.find("|u| [rad/s]") != std::string::npos);
    // Four data polylines plus the path overlay line.
    CHECK(count_occurrences(svg, "<polyline") == 4);
    CHECK(svg.find("#888888") != std::string::npos);  // reference path overlay
}

TEST_CASE("the rate budget line appears when given or inferable") {
    const auto quiet = synthetic_trace(200, false);
    const auto saturated = synthetic_trace(200, true);

    // Explicit budget: line and label present.
    const std::string with_option = render_svg(quiet, PlotOptions{17.59});
    CHECK(with_option.find("#d62728") != std::string::npos);
    CHECK(with_option.find("omega_so") != std::string::npos);

    // No budget and never saturated: no line to draw.
    const std::string without = render_svg(quiet);
    CHECK(without.find("#d62728") == std::string::npos);
    CHECK(without.find("omega_so") == std::string::npos);

    // Unset but the trace saturates: inferred from the saturated records.
    const std::string inferred = render_svg(saturated);
    CHECK(inferred.find("#d62728") != std::string::npos);
    CHECK(inferred.find("omega_so") != std::string::npos);
}

TEST_CASE("long traces are decimated to a bounded point count") {
    const std::string svg = render_svg(synthetic_trace(50000, false));
    const std::size_t max_points = max_polyline_points(svg);
    CHECK(max_points <= 2001);  // stride grid plus the forced final sample
    CHECK(max_points > 500);    // decimation keeps the shape, not just endpoints
}

TEST_CASE("short traces keep every sample") {
    const std::string svg = render_svg(synthetic_trace(120, false));
    CHECK(max_polyline_points(svg) == 120);
}

TEST_CASE("empty traces are rejected") {
    CHECK_THROWS_AS(std::ignore = render_svg({}), std::invalid_argument);
}

TEST_CASE("a single-record trace renders without degenerate coordinates") {
    const auto trace = synthetic_trace(1, false);
    const std::string svg = render_svg(trace);
    CHECK(svg.rfind("<svg", 0) == 0);
    // Degenerate bounds are widened, so no NaN coordinates can appear.
    CHECK(svg.find("nan") == std::string::npos);
    CHECK(svg.find("inf") == std::string::npos);
}
