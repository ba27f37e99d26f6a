#pragma once

#include <vector>

namespace msr {

struct LineFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

// ordinary least squares y = slope x + intercept
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
// the same on (log x, log y); ConfigError on non-positive input or fewer than 3 points
LineFit fit_log_slope(const std::vector<double>& xs, const std::vector<double>& ys);

// 1 - SS_res / SS_tot
double r_squared(const std::vector<double>& y, const std::vector<double>& model);

// err ~ a eta^{1/2} + b |log eta|^{-c}; linear in (a, b) for each c on a grid over (0, c_max]
struct LogStabilityFit {
    double a = 0.0, b = 0.0, c = 0.0, r2 = 0.0;
};
LogStabilityFit fit_log_stability(const std::vector<double>& eta, const std::vector<double>& err,
                                  double c_max = 10.0, int steps = 2000);

// true when y[i+1] <= y[i] (1 + rel_tol) for all i, after sorting by decreasing x
bool non_increasing_as_x_decreases(const std::vector<double>& x, const std::vector<double>& y, double rel_tol = 0.0);

} // namespace msr
