#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace fairsched {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Returns f(x) and writes the gradient into `grad`.
using Objective = std::function<double(const Vector& x, Vector& grad)>;

struct MinimizeOptions {
    int max_iterations = 2000;
    double gradient_tolerance = 1e-6;
    double initial_step = 1.0;
    int history = 10;
};

enum class MinimizeStatus { Converged, MaxIterations, LineSearchStalled };

struct MinimizeResult {
    Vector x;
    double value = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    MinimizeStatus status = MinimizeStatus::MaxIterations;
    // Objective value at every accepted iterate, starting with x0.
    std::vector<double> trace;
};

/// Limited-memory BFGS with Armijo backtracking. Every accepted step lowers
/// the objective, so the trace is non-increasing.
MinimizeResult minimize(const Objective& objective, Vector x0, const MinimizeOptions& options = {});

}  // namespace fairsched
