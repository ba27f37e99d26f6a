#include "msr/fit.hpp"
#include "msr/grid.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>

namespace msr {

double r_squared(const std::vector<double>& y, const std::vector<double>& model) {
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_res += (y[i] - model[i]) * (y[i] - model[i]);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
    return 1.0 - ss_res / ss_tot;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("fit_line: need matching inputs of length >= 2");
    const double n = double(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw ConfigError("fit_line: x values are all equal");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    std::vector<double> m(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) m[i] = f.slope * x[i] + f.intercept;
    f.r2 = r_squared(y, m);
    return f;
}

LineFit fit_log_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 3) throw ConfigError("fit_log_slope: need >= 3 matching points");
    std::vector<double> lx(xs.size()), ly(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw ConfigError("fit_log_slope: inputs must be positive");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    return fit_line(lx, ly);
}

LogStabilityFit fit_log_stability(const std::vector<double>& eta, const std::vector<double>& err, double c_max,
                                  int steps) {
    if (eta.size() != err.size() || eta.size() < 3) throw ConfigError("fit_log_stability: need >= 3 points");
    for (double e : eta)
        if (!(e > 0.0) || e >= 1.0) throw ConfigError("fit_log_stability: eta must lie in (0, 1)");
    const std::size_t n = eta.size();
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) y(i) = err[i];
    LogStabilityFit best;
    best.r2 = -std::numeric_limits<double>::infinity();
    for (int s = 1; s <= steps; ++s) {
        const double c = c_max * s / steps;
        Eigen::MatrixXd X(n, 2);
        for (std::size_t i = 0; i < n; ++i) {
            X(i, 0) = std::sqrt(eta[i]);
            X(i, 1) = std::pow(std::abs(std::log(eta[i])), -c);
        }
        Eigen::Vector2d ab = X.colPivHouseholderQr().solve(y);
        Eigen::VectorXd m = X * ab;
        std::vector<double> mv(m.data(), m.data() + n);
        double r2 = r_squared(err, mv);
        if (r2 > best.r2) best = {ab(0), ab(1), c, r2};
    }
    return best;
}

bool non_increasing_as_x_decreases(const std::vector<double>& x, const std::vector<double>& y, double rel_tol) {
    std::vector<std::size_t> o(x.size());
    std::iota(o.begin(), o.end(), 0);
    std::sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) { return x[a] > x[b]; });
    for (std::size_t i = 1; i < o.size(); ++i)
        if (y[o[i]] > y[o[i - 1]] * (1.0 + rel_tol)) return false;
    return true;
}

} // namespace msr
