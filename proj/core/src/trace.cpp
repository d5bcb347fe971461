#include <helix/trace.hpp>

#include <array>
#include <charconv>
#include <fmt/format.h>

#include <helix/config.hpp>

namespace helix::io {

std::string trace_to_csv(const std::vector<sim::TraceRecord>& trace) {
    std::string out{trace_csv_header};
    out += '\n';
    for (const sim::TraceRecord& r : trace) {
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", format_double(r.t),
                           format_double(r.p_x), format_double(r.p_z), format_double(r.eps),
                           format_double(r.z), format_double(r.s), format_double(r.u_x),
                           format_double(r.u_z), format_double(r.u_mag), format_double(r.v_x),
                           format_double(r.v_z), r.saturated ? 1 : 0);
    }
    return out;
}

namespace {

constexpr int kColumns = 12;

double parse_field(std::string_view field, int line, int column) {
    double out = 0.0;
    const char* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError(fmt::format("invalid number '{}' in column {}", field, column), line);
    }
    return out;
}

}  // namespace

std::vector<sim::TraceRecord> trace_from_csv(std::string_view text) {
    std::vector<sim::TraceRecord> trace;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t nl = text.find('\n', start);
        const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
        const std::string_view line = text.substr(start, end - start);
        ++line_no;

        if (line_no == 1) {
            if (line != trace_csv_header) {
                throw ConfigError("unrecognised trace header", 1);
            }
        } else if (!line.empty()) {
            std::array<double, kColumns> fields{};
            std::size_t field_start = 0;
            for (int column = 0; column < kColumns; ++column) {
                const std::size_t comma = line.find(',', field_start);
                const bool last = column == kColumns - 1;
                if (last != (comma == std::string_view::npos)) {
                    throw ConfigError(
                        fmt::format("expected {} comma-separated columns", kColumns), line_no);
                }
                const std::size_t field_end = last ? line.size() : comma;
                fields[static_cast<std::size_t>(column)] =
                    parse_field(line.substr(field_start, field_end - field_start), line_no,
                                column + 1);
                field_start = field_end + 1;
            }
            sim::TraceRecord r;
            r.t = fields[0];
            r.p_x = fields[1];
            r.p_z = fields[2];
            r.eps = fields[3];
            r.z = fields[4];
            r.s = fields[5];
            r.u_x = fields[6];
            r.u_z = fields[7];
            r.u_mag = fields[8];
            r.v_x = fields[9];
            r.v_z = fields[10];
            if (fields[11] != 0.0 && fields[11] != 1.0) {
                throw ConfigError("saturated flag must be 0 or 1", line_no);
            }
            r.saturated = fields[11] == 1.0;
            trace.push_back(r);
        }

        if (nl == std::string_view::npos) {
            break;
        }
        start = nl + 1;
    }
    return trace;
}

}  // namespace helix::io
