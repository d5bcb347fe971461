#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <helix/sim.hpp>

// CSV serialisation of simulation traces.  One row per step boundary, doubles
// in shortest round-trip form, `saturated` as 0/1.  The header is part of the
// file contract and never changes.

namespace helix::io {

inline constexpr std::string_view trace_csv_header =
    "t,p_x,p_z,eps,z,s,u_x,u_z,u_mag,v_x,v_z,saturated";

[[nodiscard]] std::string trace_to_csv(const std::vector<sim::TraceRecord>& trace);

// Strict inverse: rejects a wrong header, a wrong column count, or malformed
// numbers (throws ConfigError naming the line).
[[nodiscard]] std::vector<sim::TraceRecord> trace_from_csv(std::string_view text);

}  // namespace helix::io
