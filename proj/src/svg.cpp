#include "fairsched/svg.hpp"

#include "fairsched/text.hpp"
#include "fairsched/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <sstream>

namespace fairsched {

namespace {

constexpr double kWidth = 820;
constexpr double kHeight = 480;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 90;

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

const char* cluster_colour(Cluster c) {
    switch (c) {
        case Cluster::Purple: return "#7b3294";
        case Cluster::Blue: return "#2c7bb6";
        case Cluster::Orange: return "#f28e2b";
        case Cluster::Green: return "#1a9641";
        case Cluster::Yellow: return "#e6c200";
        case Cluster::Brown: return "#8c510a";
    }
    return "#000000";
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

// "--" cannot appear inside an XML comment.
std::string comment_safe(std::string s) {
    for (std::size_t p; (p = s.find("--")) != std::string::npos;) s.replace(p, 2, "- -");
    return s;
}

class Svg {
public:
    Svg(double w, double h) : w_(w), h_(h) {}

    void embed(const Table& t) {
        std::ostringstream os;
        write_csv_row(os, t.header);
        for (const auto& r : t.rows) write_csv_row(os, r);
        data_ = comment_safe(os.str());
    }
    void raw(const std::string& s) { body_ << s << '\n'; }
    void line(double x1, double y1, double x2, double y2, const std::string& stroke, double width = 1,
              const std::string& dash = "") {
        body_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\""
              << num(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << "\"";
        if (!dash.empty()) body_ << " stroke-dasharray=\"" << dash << "\"";
        body_ << "/>\n";
    }
    void rect(double x, double y, double w, double h, const std::string& fill, double opacity = 1.0) {
        if (h < 0) {
            y += h;
            h = -h;
        }
        body_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w) << "\" height=\""
              << num(h) << "\" fill=\"" << fill << "\"";
        if (opacity < 1.0) body_ << " fill-opacity=\"" << num(opacity) << "\"";
        body_ << "/>\n";
    }
    void circle(double x, double y, double r, const std::string& fill, double opacity = 1.0) {
        body_ << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"" << num(r) << "\" fill=\"" << fill
              << "\"";
        if (opacity < 1.0) body_ << " fill-opacity=\"" << num(opacity) << "\"";
        body_ << "/>\n";
    }
    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                  const std::string& dash, const std::string& cls = "") {
        body_ << "<polyline";
        if (!cls.empty()) body_ << " class=\"" << cls << "\"";
        body_ << " fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\"";
        if (!dash.empty()) body_ << " stroke-dasharray=\"" << dash << "\"";
        body_ << " points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) body_ << (i ? " " : "") << num(pts[i].first) << ',' << num(pts[i].second);
        body_ << "\"/>\n";
    }
    void text(double x, double y, const std::string& s, const std::string& anchor = "middle", double size = 11,
              double rotate = 0) {
        body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"" << num(size)
              << "\" text-anchor=\"" << anchor << "\"";
        if (rotate != 0) body_ << " transform=\"rotate(" << num(rotate) << ' ' << num(x) << ' ' << num(y) << ")\"";
        body_ << ">" << xml_escape(s) << "</text>\n";
    }
    std::string str() const {
        std::ostringstream os;
        os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w_) << "\" height=\"" << num(h_)
           << "\" viewBox=\"0 0 " << num(w_) << ' ' << num(h_) << "\" font-family=\"sans-serif\">\n";
        if (!data_.empty()) os << "<!-- data\n" << data_ << "-->\n";
        os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" << body_.str() << "</svg>\n";
        return os.str();
    }

private:
    double w_, h_;
    std::string data_;
    std::ostringstream body_;
};

struct Range {
    double lo = 0, hi = 1;
    void include(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (hi - lo < 1e-12) {
            lo -= 1;
            hi += 1;
        }
        const double m = 0.08 * (hi - lo);
        lo -= m;
        hi += m;
    }
};

double cell_number(const std::vector<std::string>& row, std::size_t col) {
    if (col >= row.size()) return std::nan("");
    auto v = parse_double(row[col]);
    return v ? *v : std::nan("");
}

void axes(Svg& svg, const Range& yr, const std::string& ylabel, double y_of_zero_lo, double y_of_zero_hi) {
    const double x0 = kLeft, x1 = kWidth - kRight;
    const double ybottom = kHeight - kBottom, ytop = kTop;
    svg.line(x0, ytop, x0, ybottom, "#333");
    for (int k = 0; k <= 4; ++k) {
        const double v = yr.lo + (yr.hi - yr.lo) * k / 4.0;
        const double py = ybottom - (v - yr.lo) / (yr.hi - yr.lo) * (ybottom - ytop);
        svg.line(x0 - 4, py, x0, py, "#333");
        svg.text(x0 - 6, py + 4, num(v), "end", 10);
    }
    if (y_of_zero_lo <= 0 && y_of_zero_hi >= 0) {
        const double pz = ybottom - (0 - yr.lo) / (yr.hi - yr.lo) * (ybottom - ytop);
        svg.line(x0, pz, x1, pz, "#333");
    }
    svg.text(18, (ytop + ybottom) / 2, ylabel, "middle", 12, -90);
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw DataError("input is missing column '" + name + "'");
}

bool Table::has_column(const std::string& name) const {
    return std::find(header.begin(), header.end(), name) != header.end();
}

Table read_table(std::istream& in) {
    Table t;
    CsvReader reader(in);
    std::vector<std::string> fields;
    while (reader.next(fields)) {
        if (fields.size() == 1 && trim(fields[0]).empty()) continue;
        if (!fields.empty() && !fields[0].empty() && fields[0][0] == '#') continue;
        if (t.header.empty())
            t.header = fields;
        else
            t.rows.push_back(fields);
    }
    return t;
}

PlotKind parse_plot_kind(const std::string& s) {
    if (s == "group-bars") return PlotKind::GroupBars;
    if (s == "tradeoff") return PlotKind::Tradeoff;
    if (s == "paired-heatmap") return PlotKind::PairedHeatmap;
    if (s == "scatter-coords") return PlotKind::ScatterCoords;
    throw UsageError("unknown plot kind '" + s + "'");
}

std::string render_group_bars(const Table& report, const std::string& grouping) {
    const auto c_policy = report.column("policy"), c_grouping = report.column("grouping"),
               c_group = report.column("group"), c_mode = report.column("mode"), c_delta = report.column("delta"),
               c_se = report.column("fold_se");
    std::vector<std::string> policies, groups;
    std::map<std::tuple<std::string, std::string, std::string>, std::pair<double, double>> value;
    for (const auto& r : report.rows) {
        if (r.size() <= std::max({c_policy, c_grouping, c_group, c_mode, c_delta, c_se})) continue;
        if (r[c_grouping] != grouping) continue;
        if (std::find(policies.begin(), policies.end(), r[c_policy]) == policies.end()) policies.push_back(r[c_policy]);
        if (std::find(groups.begin(), groups.end(), r[c_group]) == groups.end()) groups.push_back(r[c_group]);
        value[{r[c_policy], r[c_group], r[c_mode]}] = {cell_number(r, c_delta), cell_number(r, c_se)};
    }
    if (groups.empty()) throw DataError("no report rows for grouping '" + grouping + "'");

    Range yr{0, 0};
    for (const auto& [k, v] : value) {
        yr.include(v.first + v.second);
        yr.include(v.first - v.second);
    }
    yr.pad();
    Svg svg(kWidth, kHeight);
    svg.embed(report);
    svg.text(kWidth / 2, 22, "Difference from schedule mean by " + grouping + " (days)", "middle", 14);
    axes(svg, yr, "days relative to schedule mean", yr.lo, yr.hi);

    const double x0 = kLeft, x1 = kWidth - kRight, ybottom = kHeight - kBottom, ytop = kTop;
    auto py = [&](double v) { return ybottom - (v - yr.lo) / (yr.hi - yr.lo) * (ybottom - ytop); };
    const double group_w = (x1 - x0) / static_cast<double>(groups.size());
    const double bar_w = group_w * 0.8 / static_cast<double>(policies.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const double gx = x0 + g * group_w + group_w * 0.1;
        for (std::size_t p = 0; p < policies.size(); ++p) {
            const char* colour = kPalette[p % 10];
            const double bx = gx + p * bar_w;
            if (auto it = value.find({policies[p], groups[g], "DP"}); it != value.end() && std::isfinite(it->second.first))
                svg.rect(bx, py(0), bar_w, py(it->second.first) - py(0), colour, 0.35);
            if (auto it = value.find({policies[p], groups[g], "EOpp"}); it != value.end() && std::isfinite(it->second.first)) {
                const double cx = bx + bar_w / 2;
                svg.rect(bx + bar_w * 0.25, py(0), bar_w * 0.5, py(it->second.first) - py(0), colour);
                const double lo = it->second.first - it->second.second, hi = it->second.first + it->second.second;
                svg.line(cx, py(lo), cx, py(hi), "#000");
                svg.line(cx - 3, py(lo), cx + 3, py(lo), "#000");
                svg.line(cx - 3, py(hi), cx + 3, py(hi), "#000");
            }
        }
        svg.text(gx + group_w * 0.4, ybottom + 16, groups[g], "middle", 10);
    }
    for (std::size_t p = 0; p < policies.size(); ++p) {
        const double lx = kLeft + 10 + p * 150.0;
        svg.rect(lx, kHeight - 30, 12, 12, kPalette[p % 10]);
        svg.text(lx + 16, kHeight - 20, policies[p], "start", 11);
    }
    return svg.str();
}

std::string render_tradeoff(const Table& tradeoff) {
    const auto c_policy = tradeoff.column("policy"), c_knob = tradeoff.column("knob"), c_x = tradeoff.column("x"),
               c_xse = tradeoff.column("x_se"), c_y = tradeoff.column("y"), c_yse = tradeoff.column("y_se"),
               c_front = tradeoff.column("frontier");
    struct P {
        std::string policy, knob;
        double x, xse, y, yse;
        bool frontier;
    };
    std::vector<P> pts;
    for (const auto& r : tradeoff.rows) {
        if (r.size() <= std::max({c_policy, c_knob, c_x, c_xse, c_y, c_yse, c_front})) continue;
        P p{r[c_policy], r[c_knob], cell_number(r, c_x), cell_number(r, c_xse), cell_number(r, c_y),
            cell_number(r, c_yse), r[c_front] == "1"};
        if (std::isfinite(p.x) && std::isfinite(p.y)) pts.push_back(p);
    }
    if (pts.empty()) throw DataError("trade-off input has no finite points");

    Range xr{pts[0].x, pts[0].x}, yr{pts[0].y, pts[0].y};
    for (const auto& p : pts) {
        xr.include(p.x - p.xse);
        xr.include(p.x + p.xse);
        yr.include(p.y - p.yse);
        yr.include(p.y + p.yse);
    }
    xr.pad();
    yr.pad();
    Svg svg(kWidth, kHeight);
    svg.embed(tradeoff);
    svg.text(kWidth / 2, 22, "Efficiency vs unfairness", "middle", 14);
    axes(svg, yr, "mean time to detect (days)", 1, 0);
    const double x0 = kLeft, x1 = kWidth - kRight, ybottom = kHeight - kBottom, ytop = kTop;
    svg.line(x0, ybottom, x1, ybottom, "#333");
    for (int k = 0; k <= 4; ++k) {
        const double v = xr.lo + (xr.hi - xr.lo) * k / 4.0;
        const double px = x0 + (v - xr.lo) / (xr.hi - xr.lo) * (x1 - x0);
        svg.line(px, ybottom, px, ybottom + 4, "#333");
        svg.text(px, ybottom + 16, num(v), "middle", 10);
    }
    svg.text((x0 + x1) / 2, ybottom + 34, "unfairness d (days)", "middle", 12);
    auto px = [&](double v) { return x0 + (v - xr.lo) / (xr.hi - xr.lo) * (x1 - x0); };
    auto py = [&](double v) { return ybottom - (v - yr.lo) / (yr.hi - yr.lo) * (ybottom - ytop); };

    std::vector<std::string> policies;
    for (const auto& p : pts)
        if (std::find(policies.begin(), policies.end(), p.policy) == policies.end()) policies.push_back(p.policy);

    // Sweep curves: policies with more than one knob value.
    for (std::size_t k = 0; k < policies.size(); ++k) {
        std::vector<std::pair<double, double>> curve;
        for (const auto& p : pts)
            if (p.policy == policies[k]) curve.emplace_back(px(p.x), py(p.y));
        if (curve.size() > 1) svg.polyline(curve, kPalette[k % 10], "3,3", "sweep");
    }
    std::vector<P> front;
    for (const auto& p : pts)
        if (p.frontier) front.push_back(p);
    std::sort(front.begin(), front.end(), [](const P& a, const P& b) { return a.x != b.x ? a.x < b.x : a.y > b.y; });
    if (!front.empty()) {
        std::vector<std::pair<double, double>> line;
        for (const auto& p : front) line.emplace_back(px(p.x), py(p.y));
        svg.polyline(line, "#1f3fbf", "6,4", "frontier");
    }
    for (const auto& p : pts) {
        const std::size_t k = static_cast<std::size_t>(std::find(policies.begin(), policies.end(), p.policy) - policies.begin());
        const char* colour = kPalette[k % 10];
        svg.line(px(p.x - p.xse), py(p.y), px(p.x + p.xse), py(p.y), colour);
        svg.line(px(p.x), py(p.y - p.yse), px(p.x), py(p.y + p.yse), colour);
        svg.circle(px(p.x), py(p.y), 4, colour);
        svg.text(px(p.x) + 6, py(p.y) - 6, p.knob.empty() ? p.policy : p.policy + " " + p.knob, "start", 9);
    }
    return svg.str();
}

std::string render_paired_heatmap(const Table& paired) {
    const auto c_earlier = paired.column("earlier"), c_later = paired.column("later"), c_value = paired.column("value"),
               c_count = paired.column("count");
    if (paired.rows.empty()) throw DataError("paired matrix input is empty");
    const double cell = 56, left = 110, top = 60;
    Svg svg(left + cell * kClusterCount + 40, top + cell * kClusterCount + 60);
    svg.embed(paired);
    svg.text(left + cell * 3, 24, "Later minus earlier finding rate (row = earlier cluster)", "middle", 13);
    for (Cluster c : kAllClusters) {
        const auto i = index_of(c);
        svg.text(left - 8, top + cell * i + cell / 2 + 4, std::string(cluster_name(c)), "end", 11);
        svg.text(left + cell * i + cell / 2, top - 8, std::string(cluster_name(c)), "middle", 11);
    }
    for (const auto& r : paired.rows) {
        if (r.size() <= std::max({c_earlier, c_later, c_value, c_count})) continue;
        const auto i = index_of(parse_cluster(r[c_earlier]));
        const auto j = index_of(parse_cluster(r[c_later]));
        const double v = cell_number(r, c_value);
        std::string fill = "#dddddd";
        if (std::isfinite(v)) {
            // Diverging brown (-1) .. white (0) .. green (+1).
            const double t = std::clamp(v, -1.0, 1.0);
            const int rr = t >= 0 ? static_cast<int>(255 - t * (255 - 26)) : 255 - static_cast<int>(-t * (255 - 140));
            const int gg = t >= 0 ? static_cast<int>(255 - t * (255 - 150)) : 255 - static_cast<int>(-t * (255 - 81));
            const int bb = t >= 0 ? static_cast<int>(255 - t * (255 - 65)) : 255 - static_cast<int>(-t * (255 - 10));
            char buf[8];
            std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rr, gg, bb);
            fill = buf;
        }
        svg.rect(left + cell * j, top + cell * i, cell - 1, cell - 1, fill);
        svg.text(left + cell * j + cell / 2, top + cell * i + cell / 2 + 4, std::isfinite(v) ? num(v) : "n/a",
                 "middle", 10);
    }
    return svg.str();
}

std::string render_scatter_coords(const Table& dataset) {
    const auto c_lat = dataset.column("latitude"), c_lon = dataset.column("longitude"),
               c_cluster = dataset.column("cluster");
    struct P {
        double lat, lon;
        Cluster c;
    };
    std::vector<P> pts;
    for (const auto& r : dataset.rows) {
        if (r.size() <= std::max({c_lat, c_lon, c_cluster})) continue;
        const double lat = cell_number(r, c_lat), lon = cell_number(r, c_lon);
        if (!std::isfinite(lat) || !std::isfinite(lon)) continue;
        pts.push_back({lat, lon, parse_cluster(r[c_cluster])});
    }
    if (pts.empty()) throw DataError("no rows with coordinates");
    Range xr{pts[0].lon, pts[0].lon}, yr{pts[0].lat, pts[0].lat};
    for (const auto& p : pts) {
        xr.include(p.lon);
        yr.include(p.lat);
    }
    xr.pad();
    yr.pad();
    const double w = 600, h = 700;
    Svg svg(w, h);
    svg.text(w / 2, 22, "Inspections by sanitarian cluster", "middle", 14);
    for (const auto& p : pts)
        svg.circle(30 + (p.lon - xr.lo) / (xr.hi - xr.lo) * (w - 60), h - 60 - (p.lat - yr.lo) / (yr.hi - yr.lo) * (h - 100),
                   1.5, cluster_colour(p.c), 0.6);
    for (Cluster c : kAllClusters) {
        const double lx = 30 + index_of(c) * 90.0;
        svg.circle(lx, h - 25, 5, cluster_colour(c));
        svg.text(lx + 8, h - 21, std::string(cluster_name(c)), "start", 11);
    }
    return svg.str();
}

std::string render_plot(PlotKind kind, const Table& table, const std::string& grouping) {
    if (table.rows.empty()) throw DataError("plot input has no data rows");
    switch (kind) {
        case PlotKind::GroupBars: return render_group_bars(table, grouping);
        case PlotKind::Tradeoff: return render_tradeoff(table);
        case PlotKind::PairedHeatmap: return render_paired_heatmap(table);
        case PlotKind::ScatterCoords: return render_scatter_coords(table);
    }
    throw UsageError("unknown plot kind");
}

}  // namespace fairsched
