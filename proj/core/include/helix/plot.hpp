#pragma once

#include <optional>
#include <string>
#include <vector>

#include <helix/sim.hpp>

// Self-contained SVG rendering of a simulation trace: trajectory with the
// reference path overlaid, cross-track error, command magnitude against the
// rate budget, and the integral state.  Output bytes are deterministic for a
// given input.

namespace helix::plot {

struct PlotOptions {
    // Rate budget drawn as a horizontal line in the command panel.  When
    // unset it is inferred as the largest command magnitude over saturated
    // records (omitted when the trace never saturates).
    std::optional<double> omega_so;
};

// Throws std::invalid_argument when the trace is empty.
[[nodiscard]] std::string render_svg(const std::vector<sim::TraceRecord>& trace,
                                     const PlotOptions& options = {});

}  // namespace helix::plot
