#include "rdfront/fit.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rdfront/errors.hpp"

namespace rdfront {

LinearFit least_squares(const std::vector<std::vector<double>>& columns, const std::vector<double>& rhs) {
    const auto m = static_cast<Eigen::Index>(rhs.size());
    const auto k = static_cast<Eigen::Index>(columns.size());
    if (k == 0 || m < k) throw ConfigError("least_squares: need at least as many rows as unknowns");
    Eigen::MatrixXd a(m, k);
    Eigen::VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        b(i) = rhs[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < k; ++j) a(i, j) = columns[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    }
    // Column scaling keeps the QR well conditioned when columns differ by decades.
    Eigen::VectorXd s(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        s(j) = a.col(j).norm();
        if (s(j) == 0) s(j) = 1;
        a.col(j) /= s(j);
    }
    Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
    LinearFit out;
    out.coef.resize(static_cast<std::size_t>(k));
    for (Eigen::Index j = 0; j < k; ++j) out.coef[static_cast<std::size_t>(j)] = c(j) / s(j);
    out.rms_residual = std::sqrt((a * c - b).squaredNorm() / static_cast<double>(m));
    return out;
}

LinearFit fit_powers(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& powers) {
    std::vector<std::vector<double>> cols(powers.size(), std::vector<double>(x.size()));
    for (std::size_t j = 0; j < powers.size(); ++j)
        for (std::size_t i = 0; i < x.size(); ++i) cols[j][i] = std::pow(x[i], powers[j]);
    return least_squares(cols, y);
}

SlopeFit loglog_slope(const std::vector<double>& x, const std::vector<double>& y, int min_points) {
    if (x.size() != y.size()) throw ConfigError("loglog_slope: size mismatch");
    const int n = static_cast<int>(x.size());
    if (n < min_points || n < 2)
        throw ConfigError("loglog_slope: need at least " + std::to_string(std::max(min_points, 2)) + " points, got " +
                          std::to_string(n));
    double sx = 0, sy = 0;
    std::vector<double> lx(x.size()), ly(y.size());
    for (int i = 0; i < n; ++i) {
        lx[i] = std::log(x[i]);
        ly[i] = std::log(std::abs(y[i]));
        sx += lx[i];
        sy += ly[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    SlopeFit f;
    f.points = n;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (n > 2) {
        double ss = 0;
        for (int i = 0; i < n; ++i) {
            const double r = ly[i] - (f.intercept + f.slope * lx[i]);
            ss += r * r;
        }
        f.stderr_slope = std::sqrt(ss / (n - 2) / sxx);
    }
    return f;
}

PowerLawFit fit_free_power(const std::vector<double>& x, const std::vector<double>& y,
                           const std::vector<double>& fixed, double lo, double hi) {
    if (!(lo < hi)) throw ConfigError("fit_free_power: empty exponent interval");
    auto solve = [&](double s) {
        std::vector<double> powers{s};
        powers.insert(powers.end(), fixed.begin(), fixed.end());
        return fit_powers(x, y, powers);
    };
    const double r = 0.5 * (std::sqrt(5.0) - 1);
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = solve(c).rms_residual, fd = solve(d).rms_residual;
    while (b - a > 1e-10 * std::max(1.0, std::abs(a))) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = solve(c).rms_residual;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = solve(d).rms_residual;
        }
    }
    PowerLawFit out;
    out.power = 0.5 * (a + b);
    const auto lin = solve(out.power);
    out.coef = lin.coef;
    out.rms_residual = lin.rms_residual;
    return out;
}

}  // namespace rdfront
