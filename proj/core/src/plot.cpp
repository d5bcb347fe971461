#include <helix/plot.hpp>

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <stdexcept>

namespace helix::plot {

namespace {

// Canvas geometry: four panels stacked vertically.
constexpr double kWidth = 860.0;
constexpr double kPanelHeight = 245.0;
constexpr double kMarginLeft = 78.0;
constexpr double kMarginRight = 24.0;
constexpr double kMarginTop = 30.0;
constexpr double kMarginBottom = 40.0;
constexpr std::size_t kMaxPoints = 2000;

struct Bounds {
    double min = 0.0;
    double max = 1.0;

    void include(double v) {
        min = std::min(min, v);
        max = std::max(max, v);
    }
};

Bounds bounds_of(const std::vector<double>& values) {
    Bounds b{values.front(), values.front()};
    for (double v : values) {
        b.include(v);
    }
    return b;
}

// Pad so the data never sits on the frame, and widen degenerate ranges.
Bounds padded(Bounds b) {
    double span = b.max - b.min;
    if (span <= 0.0) {
        span = std::max(1.0, std::abs(b.max));
        b.min -= 0.5 * span;
        b.max += 0.5 * span;
        span = b.max - b.min;
    }
    return {b.min - 0.05 * span, b.max + 0.05 * span};
}

std::string fmt_coord(double v) { return fmt::format("{:.2f}", v); }
std::string fmt_label(double v) { return fmt::format("{:.4g}", v); }

struct Panel {
    double top = 0.0;  // canvas y of the panel block
    Bounds x;
    Bounds y;

    [[nodiscard]] double sx(double v) const {
        return kMarginLeft + (v - x.min) / (x.max - x.min) * (kWidth - kMarginLeft - kMarginRight);
    }
    [[nodiscard]] double sy(double v) const {
        const double h = kPanelHeight - kMarginTop - kMarginBottom;
        return top + kMarginTop + h - (v - y.min) / (y.max - y.min) * h;
    }
    [[nodiscard]] double left() const { return kMarginLeft; }
    [[nodiscard]] double right() const { return kWidth - kMarginRight; }
    [[nodiscard]] double frame_top() const { return top + kMarginTop; }
    [[nodiscard]] double frame_bottom() const { return top + kPanelHeight - kMarginBottom; }
};

void emit_frame(std::string& out, const Panel& panel, std::string_view title,
                std::string_view x_label, std::string_view y_label) {
    out += fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n",
        fmt_coord(panel.left()), fmt_coord(panel.frame_top()),
        fmt_coord(panel.right() - panel.left()),
        fmt_coord(panel.frame_bottom() - panel.frame_top()));
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"13\">{}</text>\n",
                       fmt_coord(panel.left()), fmt_coord(panel.frame_top() - 8.0), title);
    // Extreme tick labels on both axes.
    out += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"start\">{}</text>\n",
        fmt_coord(panel.left()), fmt_coord(panel.frame_bottom() + 14.0), fmt_label(panel.x.min));
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
                       fmt_coord(panel.right()), fmt_coord(panel.frame_bottom() + 14.0),
                       fmt_label(panel.x.max));
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
                       fmt_coord(panel.left() - 6.0), fmt_coord(panel.frame_bottom()),
                       fmt_label(panel.y.min));
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
                       fmt_coord(panel.left() - 6.0), fmt_coord(panel.frame_top() + 10.0),
                       fmt_label(panel.y.max));
    out += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
        fmt_coord(0.5 * (panel.left() + panel.right())), fmt_coord(panel.frame_bottom() + 28.0),
        x_label);
    out += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"start\">{}</text>\n",
        fmt_coord(8.0), fmt_coord(panel.frame_top() + 10.0), y_label);
}

void emit_polyline(std::string& out, const Panel& panel, const std::vector<double>& xs,
                   const std::vector<double>& ys, std::string_view color) {
    std::string points;
    const std::size_t n = xs.size();
    const std::size_t stride = n > kMaxPoints ? (n + kMaxPoints - 1) / kMaxPoints : 1;
    for (std::size_t i = 0; i < n; i += stride) {
        points += fmt::format("{},{} ", fmt_coord(panel.sx(xs[i])), fmt_coord(panel.sy(ys[i])));
    }
    if (stride > 1 && (n - 1) % stride != 0) {
        points += fmt::format("{},{} ", fmt_coord(panel.sx(xs[n - 1])),
                              fmt_coord(panel.sy(ys[n - 1])));
    }
    if (!points.empty()) {
        points.pop_back();
    }
    out += fmt::format(
        "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\" points=\"{}\"/>\n", color,
        points);
}

void emit_hline(std::string& out, const Panel& panel, double y, std::string_view color,
                std::string_view dash, std::string_view label) {
    if (y < panel.y.min || y > panel.y.max) {
        return;
    }
    out += fmt::format(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"1\" "
        "stroke-dasharray=\"{}\"/>\n",
        fmt_coord(panel.left()), fmt_coord(panel.sy(y)), fmt_coord(panel.right()),
        fmt_coord(panel.sy(y)), color, dash);
    if (!label.empty()) {
        out += fmt::format(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\" fill=\"{}\">{}</text>\n",
            fmt_coord(panel.right() - 4.0), fmt_coord(panel.sy(y) - 4.0), color, label);
    }
}

// Segment of the infinite line t * (cos a, sin a) clipped to the panel bounds.
void emit_origin_line(std::string& out, const Panel& panel, double angle, std::string_view color) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    double t_lo = -std::numeric_limits<double>::infinity();
    double t_hi = std::numeric_limits<double>::infinity();
    const auto clip = [&](double dir, double lo, double hi) {
        if (dir == 0.0) {
            return lo <= 0.0 && 0.0 <= hi;
        }
        double a = lo / dir;
        double b = hi / dir;
        if (a > b) {
            std::swap(a, b);
        }
        t_lo = std::max(t_lo, a);
        t_hi = std::min(t_hi, b);
        return true;
    };
    if (!clip(c, panel.x.min, panel.x.max) || !clip(s, panel.y.min, panel.y.max) || t_lo >= t_hi) {
        return;
    }
    out += fmt::format(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"1\" "
        "stroke-dasharray=\"6,4\"/>\n",
        fmt_coord(panel.sx(t_lo * c)), fmt_coord(panel.sy(t_lo * s)), fmt_coord(panel.sx(t_hi * c)),
        fmt_coord(panel.sy(t_hi * s)), color);
}

// Path angle recovered from the record with the largest position magnitude:
// p = z * e_theta + eps * e_theta_perp resolves theta uniquely.
double infer_path_angle(const std::vector<sim::TraceRecord>& trace) {
    const sim::TraceRecord* best = nullptr;
    double best_r = 0.0;
    for (const sim::TraceRecord& rec : trace) {
        const double r = rec.z * rec.z + rec.eps * rec.eps;
        if (r > best_r) {
            best_r = r;
            best = &rec;
        }
    }
    if (best == nullptr || best_r == 0.0) {
        return 0.0;
    }
    return std::atan2(best->p_z * best->z - best->p_x * best->eps,
                      best->p_x * best->z + best->p_z * best->eps);
}

}  // namespace

std::string render_svg(const std::vector<sim::TraceRecord>& trace, const PlotOptions& options) {
    if (trace.empty()) {
        throw std::invalid_argument("cannot plot an empty trace");
    }

    const std::size_t n = trace.size();
    std::vector<double> t(n), px_mm(n), pz_mm(n), eps_mm(n), u_mag(n), s(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = trace[i].t;
        px_mm[i] = trace[i].p_x * 1e3;
        pz_mm[i] = trace[i].p_z * 1e3;
        eps_mm[i] = trace[i].eps * 1e3;
        u_mag[i] = trace[i].u_mag;
        s[i] = trace[i].s;
    }

    std::optional<double> omega_so = options.omega_so;
    if (!omega_so) {
        double max_saturated = 0.0;
        bool any = false;
        for (const sim::TraceRecord& rec : trace) {
            if (rec.saturated) {
                any = true;
                max_saturated = std::max(max_saturated, rec.u_mag);
            }
        }
        if (any) {
            omega_so = max_saturated;
        }
    }

    const double height = 4.0 * kPanelHeight;
    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
        "viewBox=\"0 0 {} {}\" font-family=\"monospace\">\n",
        kWidth, height, kWidth, height);
    out += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n", kWidth, height);

    // Panel 1: trajectory with the reference path overlaid.
    {
        Panel panel{.top = 0.0, .x = padded(bounds_of(px_mm)), .y = padded(bounds_of(pz_mm))};
        // Keep the origin in view so the path overlay is meaningful.
        panel.x.include(0.0);
        panel.y.include(0.0);
        emit_frame(out, panel, "trajectory", "p_x [mm]", "p_z [mm]");
        emit_origin_line(out, panel, infer_path_angle(trace), "#888888");
        emit_polyline(out, panel, px_mm, pz_mm, "#1f77b4");
    }
    // Panel 2: cross-track error.
    {
        Panel panel{.top = kPanelHeight, .x = padded(bounds_of(t)), .y = padded(bounds_of(eps_mm))};
        emit_frame(out, panel, "cross-track error", "t [s]", "eps [mm]");
        emit_hline(out, panel, 0.0, "#bbbbbb", "2,3", "");
        emit_polyline(out, panel, t, eps_mm, "#1f77b4");
    }
    // Panel 3: command magnitude against the rate budget.
    {
        Bounds yb = bounds_of(u_mag);
        if (omega_so) {
            yb.include(*omega_so);
        }
        yb.include(0.0);
        Panel panel{.top = 2.0 * kPanelHeight, .x = padded(bounds_of(t)), .y = padded(yb)};
        emit_frame(out, panel, "command magnitude", "t [s]", "|u| [rad/s]");
        if (omega_so) {
            emit_hline(out, panel, *omega_so, "#d62728", "6,4", "omega_so");
        }
        emit_polyline(out, panel, t, u_mag, "#1f77b4");
    }
    // Panel 4: integral state.
    {
        Panel panel{.top = 3.0 * kPanelHeight, .x = padded(bounds_of(t)), .y = padded(bounds_of(s))};
        emit_frame(out, panel, "integral state", "t [s]", "s [m]");
        emit_polyline(out, panel, t, s, "#1f77b4");
    }

    out += "</svg>\n";
    return out;
}

}  // namespace helix::plot
