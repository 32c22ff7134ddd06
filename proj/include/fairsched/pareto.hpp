#pragma once

#include <cstddef>
#include <vector>

namespace fairsched {

struct Point2 {
    double x = 0.0;  // unfairness d
    double y = 0.0;  // mean detection time
};

/// Indices (ascending) of the points not dominated by any convex combination
/// of the other points, where lower is better on both axes. Equal points do
/// not dominate each other; points on a frontier edge are kept.
std::vector<std::size_t> pareto_frontier(const std::vector<Point2>& points);

}  // namespace fairsched
