#include "gaitguide/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace gaitguide {

namespace {

struct Box2 {
    double min_x = 1e18, min_y = 1e18, max_x = -1e18, max_y = -1e18;

    void extend(double x, double y) {
        min_x = std::min(min_x, x);
        min_y = std::min(min_y, y);
        max_x = std::max(max_x, x);
        max_y = std::max(max_y, y);
    }
    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
};

std::string f3(double v) {
    std::ostringstream ss;
    ss.precision(3);
    ss << std::fixed << v;
    return ss.str();
}

/// World -> SVG pixel mapping with the y axis flipped.
struct SvgMap {
    Box2 box;
    double scale = 1.0;
    double pad = 20.0;

    double x(double wx) const { return pad + (wx - box.min_x) * scale; }
    double y(double wy) const { return pad + (box.max_y - wy) * scale; }
    double width() const { return box.width() * scale + 2 * pad; }
    double height() const { return box.height() * scale + 2 * pad; }
};

void write_or_throw(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoFailure("artifacts: cannot open " + path);
    f << content;
    if (!f) throw IoFailure("artifacts: write failed for " + path);
}

std::string trajectory_svg(const RunResult& result, const WorldModel& world) {
    const Trace& trace = result.trace;
    SvgMap m;
    for (const Segment& s : world.segments) {
        m.box.extend(s.a.x(), s.a.y());
        m.box.extend(s.b.x(), s.b.y());
    }
    for (const TraceRow& r : trace.rows) {
        m.box.extend(r.true_x, r.true_y);
        m.box.extend(r.est_x, r.est_y);
    }
    if (trace.meta.has_goal) m.box.extend(trace.meta.goal_x, trace.meta.goal_y);
    m.box.extend(m.box.min_x - 0.5, m.box.min_y - 0.5);
    m.box.extend(m.box.max_x + 0.5, m.box.max_y + 0.5);
    m.scale = 760.0 / std::max(m.box.width(), m.box.height());

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << f3(m.width())
        << "\" height=\"" << f3(m.height()) << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (const Segment& s : world.segments) {
        svg << "<line x1=\"" << f3(m.x(s.a.x())) << "\" y1=\"" << f3(m.y(s.a.y())) << "\" x2=\""
            << f3(m.x(s.b.x())) << "\" y2=\"" << f3(m.y(s.b.y()))
            << "\" stroke=\"#222\" stroke-width=\"2\"/>\n";
    }

    if (result.planned_path.waypoints.size() >= 2) {
        svg << "<polyline fill=\"none\" stroke=\"#999\" stroke-width=\"1\" "
               "stroke-dasharray=\"2,3\" points=\"";
        for (const Vec2& w : result.planned_path.waypoints) {
            svg << f3(m.x(w.x())) << ',' << f3(m.y(w.y())) << ' ';
        }
        svg << "\"/>\n";
    }

    auto polyline = [&](auto get_x, auto get_y, const char* style) {
        svg << "<polyline fill=\"none\" " << style << " points=\"";
        const std::size_t stride = std::max<std::size_t>(1, trace.rows.size() / 2000);
        for (std::size_t i = 0; i < trace.rows.size(); i += stride) {
            svg << f3(m.x(get_x(trace.rows[i]))) << ',' << f3(m.y(get_y(trace.rows[i]))) << ' ';
        }
        const TraceRow& last = trace.rows.back();
        svg << f3(m.x(get_x(last))) << ',' << f3(m.y(get_y(last)));
        svg << "\"/>\n";
    };
    polyline([](const TraceRow& r) { return r.est_x; }, [](const TraceRow& r) { return r.est_y; },
             "stroke=\"#e69f00\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"");
    polyline([](const TraceRow& r) { return r.true_x; },
             [](const TraceRow& r) { return r.true_y; },
             "stroke=\"#0072b2\" stroke-width=\"2\"");

    std::uint64_t steps_seen = trace.rows.front().step_count;
    AudioCue prev_audio = AudioCue::None;
    for (const TraceRow& r : trace.rows) {
        if (r.step_count > steps_seen) {
            steps_seen = r.step_count;
            svg << "<circle cx=\"" << f3(m.x(r.true_x)) << "\" cy=\"" << f3(m.y(r.true_y))
                << "\" r=\"2.5\" fill=\"#0072b2\" fill-opacity=\"0.5\"/>\n";
        }
        if (r.audio != AudioCue::None && prev_audio == AudioCue::None) {
            svg << "<circle cx=\"" << f3(m.x(r.true_x)) << "\" cy=\"" << f3(m.y(r.true_y))
                << "\" r=\"5\" fill=\"none\" stroke=\"#d55e00\" stroke-width=\"2\"/>\n";
        }
        prev_audio = r.audio;
    }

    svg << "<circle cx=\"" << f3(m.x(trace.meta.start_x)) << "\" cy=\""
        << f3(m.y(trace.meta.start_y)) << "\" r=\"5\" fill=\"#009e73\"/>\n";
    if (trace.meta.has_goal) {
        svg << "<circle cx=\"" << f3(m.x(trace.meta.goal_x)) << "\" cy=\""
            << f3(m.y(trace.meta.goal_y)) << "\" r=\"5\" fill=\"none\" stroke=\"#009e73\" "
               "stroke-width=\"2\"/>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string rope_svg(const RunResult& result) {
    const Trace& trace = result.trace;
    const double width = 900.0, rope_h = 260.0, head_h = 160.0, pad = 40.0;
    const double t0 = trace.rows.front().t, t1 = trace.rows.back().t;

    double lo = 1e18, hi = -1e18;
    for (const TraceRow& r : trace.rows) {
        lo = std::min({lo, r.L_left, r.L_right});
        hi = std::max({hi, r.L_left, r.L_right});
    }
    if (hi - lo < 1e-6) hi = lo + 1e-6;

    auto px = [&](double t) { return pad + (t - t0) / std::max(1e-9, t1 - t0) * (width - 2 * pad); };
    auto py_rope = [&](double v) { return pad + (hi - v) / (hi - lo) * (rope_h - 2 * pad); };
    auto py_head = [&](double deg) {
        return rope_h + pad + (200.0 - deg) / 400.0 * (head_h - pad);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
        << "\" height=\"" << rope_h + head_h + pad << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    const std::size_t stride = std::max<std::size_t>(1, trace.rows.size() / 4000);
    auto channel = [&](auto get, const char* color, auto to_y) {
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < trace.rows.size(); i += stride) {
            svg << f3(px(trace.rows[i].t)) << ',' << f3(to_y(get(trace.rows[i]))) << ' ';
        }
        svg << f3(px(trace.rows.back().t)) << ',' << f3(to_y(get(trace.rows.back()))) << "\"/>\n";
    };
    channel([](const TraceRow& r) { return r.L_left; }, "#0072b2", py_rope);
    channel([](const TraceRow& r) { return r.L_right; }, "#d55e00", py_rope);

    std::uint64_t steps_seen = trace.rows.front().step_count;
    for (const TraceRow& r : trace.rows) {
        if (r.step_count > steps_seen) {
            steps_seen = r.step_count;
            svg << "<line x1=\"" << f3(px(r.t)) << "\" y1=\"" << f3(rope_h - pad) << "\" x2=\""
                << f3(px(r.t)) << "\" y2=\"" << f3(rope_h - pad + 6)
                << "\" stroke=\"#444\" stroke-width=\"1\"/>\n";
        }
    }

    channel([](const TraceRow& r) { return rad2deg(r.true_heading); }, "#009e73", py_head);
    svg << "<text x=\"" << pad << "\" y=\"16\" font-size=\"12\">rope length [m] (left blue, "
           "right orange)</text>\n";
    svg << "<text x=\"" << pad << "\" y=\"" << rope_h + 14
        << "\" font-size=\"12\">heading [deg]</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace

void emit_artifacts(const RunResult& result, const WorldModel& world,
                    const std::string& out_dir) {
    if (result.trace.rows.empty()) {
        throw IoFailure("artifacts: refusing to emit an empty trace");
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoFailure("artifacts: cannot create " + out_dir + ": " + ec.message());

    {
        std::ostringstream csv;
        write_trace_csv(result.trace, csv);
        write_or_throw(out_dir + "/trace.csv", csv.str());
    }
    write_or_throw(out_dir + "/trajectory.svg", trajectory_svg(result, world));
    write_or_throw(out_dir + "/rope.svg", rope_svg(result));
    if (result.grid) {
        write_pgm(*result.grid, out_dir + "/map.pgm");
    }
}

}  // namespace gaitguide
