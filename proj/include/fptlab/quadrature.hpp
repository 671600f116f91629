#pragma once

#include <functional>

namespace fptlab {

/// Adaptive Simpson on [a, b] with absolute tolerance; recursion depth is
/// capped at `max_depth`, beyond which the local estimate is accepted.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-8, int max_depth = 50);

}  // namespace fptlab
