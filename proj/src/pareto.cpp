#include "fairsched/pareto.hpp"

#include <algorithm>
#include <cmath>

namespace fairsched {

namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool same(const Point2& a, const Point2& b) { return a.x == b.x && a.y == b.y; }

bool on_segment(const Point2& p, const Point2& a, const Point2& b) {
    const double scale = std::max({std::abs(a.x), std::abs(a.y), std::abs(b.x), std::abs(b.y), 1.0});
    if (std::abs(cross(a, b, p)) > 1e-12 * scale * scale) return false;
    return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) && p.y >= std::min(a.y, b.y) &&
           p.y <= std::max(a.y, b.y);
}

}  // namespace

std::vector<std::size_t> pareto_frontier(const std::vector<Point2>& points) {
    if (points.empty()) return {};
    std::vector<Point2> sorted = points;
    std::sort(sorted.begin(), sorted.end(),
              [](const Point2& a, const Point2& b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
    sorted.erase(std::unique(sorted.begin(), sorted.end(), same), sorted.end());

    // Lowest point, leftmost among ties: the frontier ends there.
    const auto lowest = std::min_element(sorted.begin(), sorted.end(), [](const Point2& a, const Point2& b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    });
    sorted.erase(lowest + 1, sorted.end());

    // Lower hull of the remaining prefix, strict turns only.
    std::vector<Point2> hull;
    for (const auto& p : sorted) {
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0) hull.pop_back();
        hull.push_back(p);
    }

    std::vector<std::size_t> frontier;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        bool keep = hull.size() == 1 && same(p, hull.front());
        for (std::size_t k = 0; !keep && k + 1 < hull.size(); ++k) keep = on_segment(p, hull[k], hull[k + 1]);
        if (keep) frontier.push_back(i);
    }
    return frontier;
}

}  // namespace fairsched
