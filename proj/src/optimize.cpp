#include "fairsched/optimize.hpp"

#include <cmath>
#include <algorithm>
#include <deque>
#include <limits>

namespace fairsched {

MinimizeResult minimize(const Objective& objective, Vector x0, const MinimizeOptions& options) {
    constexpr double kArmijo = 1e-4;
    constexpr int kMaxHalvings = 60;

    MinimizeResult result;
    Vector x = std::move(x0);
    Vector g(x.size());
    double f = objective(x, g);
    result.trace.push_back(f);

    std::deque<Vector> s_hist, y_hist;
    std::deque<double> rho_hist;
    Vector x_new(x.size()), g_new(x.size());

    int iter = 0;
    result.status = MinimizeStatus::MaxIterations;
    for (; iter < options.max_iterations; ++iter) {
        if (!std::isfinite(f)) break;
        if (g.norm() <= options.gradient_tolerance) {
            result.status = MinimizeStatus::Converged;
            break;
        }

        // Two-loop recursion for the quasi-Newton direction.
        Vector q = g;
        std::vector<double> alpha(s_hist.size());
        for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
            alpha[i] = rho_hist[i] * s_hist[i].dot(q);
            q -= alpha[i] * y_hist[i];
        }
        if (!s_hist.empty()) {
            const double gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
            q *= gamma;
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            const double beta = rho_hist[i] * y_hist[i].dot(q);
            q += s_hist[i] * (alpha[i] - beta);
        }
        Vector dir = -q;
        double slope = g.dot(dir);
        if (!(slope < 0.0)) {
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            dir = -g;
            slope = -g.squaredNorm();
        }

        double step = s_hist.empty() ? options.initial_step / std::max(1.0, g.norm()) : 1.0;
        bool accepted = false;
        double f_new = f;
        for (int h = 0; h < kMaxHalvings; ++h) {
            x_new = x + step * dir;
            f_new = objective(x_new, g_new);
            if (std::isfinite(f_new) && f_new <= f + kArmijo * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (s_hist.empty()) {
                result.status = MinimizeStatus::LineSearchStalled;
                break;
            }
            // Retry once from steepest descent before giving up.
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            continue;
        }

        Vector s = x_new - x;
        Vector yv = g_new - g;
        const double sy = s.dot(yv);
        if (sy > 1e-12 * s.norm() * yv.norm()) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(yv));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > options.history) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        const bool stalled = f - f_new <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f));
        x.swap(x_new);
        g.swap(g_new);
        f = f_new;
        result.trace.push_back(f);
        // No representable decrease left: stationary to working precision.
        if (stalled) {
            ++iter;
            result.status = MinimizeStatus::Converged;
            break;
        }
    }

    result.x = std::move(x);
    result.value = f;
    result.gradient_norm = g.norm();
    result.iterations = iter;
    return result;
}

}  // namespace fairsched
