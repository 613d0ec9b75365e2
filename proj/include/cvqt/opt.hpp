#pragma once

#include <functional>
#include <utility>

namespace cvqt {

/// Golden-section maximization of a unimodal function on [lo, hi].
/// Returns (argmax, max).  Tolerance is on the argument.
std::pair<double, double> golden_max(const std::function<double(double)>& f,
                                     double lo, double hi, double x_tol = 1e-10);

/// Monotone scalar root find: solves f(x) = target by bisection on [lo, hi].
double bisect_root(const std::function<double(double)>& f, double target,
                   double lo, double hi, double x_tol = 1e-12);

}  // namespace cvqt
