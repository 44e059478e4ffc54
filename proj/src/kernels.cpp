#include "rdfront/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "rdfront/errors.hpp"

namespace rdfront::kernels {

namespace {

double ipow(double b, int e) {
    double r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

double block_sum(const double* a, std::size_t lo, std::size_t hi) {
    double s = 0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i];
    return s;
}

// Pairwise combination of the block totals, in place.
double combine(std::vector<double>& s) {
    if (s.empty()) return 0;
    for (std::size_t width = 1; width < s.size(); width *= 2)
        for (std::size_t i = 0; i + width < s.size(); i += 2 * width) s[i] += s[i + width];
    return s[0];
}

std::size_t blocks(std::size_t n) { return (n + kSumBlock - 1) / kSumBlock; }

double reaction_at(const Grid1D& g, const double* v, double inv2sqrt, int n, std::size_t j) {
    const double u = std::erf(g.x(j) * inv2sqrt);
    return ipow(v[j] * v[j] - u * u, n);
}

double slope_at(const Grid1D& g, const double* v, double inv2sqrt, int n, std::size_t j) {
    const double u = std::erf(g.x(j) * inv2sqrt);
    return std::abs(2 * n * v[j] * ipow(v[j] * v[j] - u * u, n - 1));
}

double cn_at(const double* v, const double* R, double mu, double dt, std::size_t j) {
    return v[j] + mu * ((v[j + 1] + v[j - 1]) - 2 * v[j]) - dt * R[j];
}

// |a - b| with trapezoid weights, half at both ends.
double weighted_abs(const double* a, const double* b, std::size_t n, std::size_t j) {
    const double w = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
    return w * std::abs(a[j] - b[j]);
}

}  // namespace

namespace serial {

double tree_sum(const double* a, std::size_t n) {
    std::vector<double> s(blocks(n));
    for (std::size_t k = 0; k < s.size(); ++k) s[k] = block_sum(a, k * kSumBlock, std::min(n, (k + 1) * kSumBlock));
    return combine(s);
}

void reaction(const Grid1D& g, const double* v, double t, int n, double* out) {
    const double inv = 1 / (2 * std::sqrt(t));
    for (std::size_t j = 0; j < g.size; ++j) out[j] = reaction_at(g, v, inv, n, j);
}

void cn_rhs(const Grid1D& g, const double* v, const double* R, double dt, double* r) {
    const double mu = 0.5 * dt / (g.dx * g.dx);
    for (std::size_t j = 1; j + 1 < g.size; ++j) r[j] = cn_at(v, R, mu, dt, j);
}

double max_reaction_slope(const Grid1D& g, const double* v, double t, int n) {
    const double inv = 1 / (2 * std::sqrt(t));
    double m = 0;
    for (std::size_t j = 0; j < g.size; ++j) m = std::max(m, slope_at(g, v, inv, n, j));
    return m;
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
    double m = 0;
    for (std::size_t j = 0; j < n; ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

double l1_diff(const Grid1D& g, const double* a, const double* b) {
    std::vector<double> w(g.size);
    for (std::size_t j = 0; j < g.size; ++j) w[j] = weighted_abs(a, b, g.size, j);
    return g.dx * tree_sum(w.data(), w.size());
}

double evenness_error(const double* v, std::size_t n) {
    double m = 0;
    for (std::size_t j = 0; j < n / 2; ++j) m = std::max(m, std::abs(v[j] - v[n - 1 - j]));
    return m;
}

}  // namespace serial

namespace parallel {

double tree_sum(const double* a, std::size_t n) {
    std::vector<double> s(blocks(n));
    const auto nb = static_cast<std::ptrdiff_t>(s.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < nb; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        s[ku] = block_sum(a, ku * kSumBlock, std::min(n, (ku + 1) * kSumBlock));
    }
    return combine(s);
}

void reaction(const Grid1D& g, const double* v, double t, int n, double* out) {
    const double inv = 1 / (2 * std::sqrt(t));
    const auto m = static_cast<std::ptrdiff_t>(g.size);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < m; ++j) out[j] = reaction_at(g, v, inv, n, static_cast<std::size_t>(j));
}

void cn_rhs(const Grid1D& g, const double* v, const double* R, double dt, double* r) {
    const double mu = 0.5 * dt / (g.dx * g.dx);
    const auto m = static_cast<std::ptrdiff_t>(g.size) - 1;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 1; j < m; ++j) r[j] = cn_at(v, R, mu, dt, static_cast<std::size_t>(j));
}

double max_reaction_slope(const Grid1D& g, const double* v, double t, int n) {
    const double inv = 1 / (2 * std::sqrt(t));
    double m = 0;
    const auto nn = static_cast<std::ptrdiff_t>(g.size);
#pragma omp parallel for schedule(static) reduction(max : m)
    for (std::ptrdiff_t j = 0; j < nn; ++j) m = std::max(m, slope_at(g, v, inv, n, static_cast<std::size_t>(j)));
    return m;
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
    double m = 0;
    const auto nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) reduction(max : m)
    for (std::ptrdiff_t j = 0; j < nn; ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

double l1_diff(const Grid1D& g, const double* a, const double* b) {
    std::vector<double> w(g.size);
    const auto m = static_cast<std::ptrdiff_t>(g.size);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < m; ++j)
        w[static_cast<std::size_t>(j)] = weighted_abs(a, b, g.size, static_cast<std::size_t>(j));
    return g.dx * tree_sum(w.data(), w.size());
}

double evenness_error(const double* v, std::size_t n) {
    double m = 0;
    const auto half = static_cast<std::ptrdiff_t>(n / 2);
#pragma omp parallel for schedule(static) reduction(max : m)
    for (std::ptrdiff_t j = 0; j < half; ++j)
        m = std::max(m, std::abs(v[j] - v[n - 1 - static_cast<std::size_t>(j)]));
    return m;
}

}  // namespace parallel

ConstantTridiagonal::ConstantTridiagonal(std::size_t size, double diag, double off)
    : diag_(diag), off_(off), inv_pivot_(size), upper_(size) {
    double prev_upper = 0;
    for (std::size_t j = 0; j < size; ++j) {
        const double pivot = diag + off * prev_upper;
        if (!(std::abs(pivot) > 0) || !std::isfinite(pivot)) throw NumericError("tridiagonal: zero pivot");
        inv_pivot_[j] = 1 / pivot;
        upper_[j] = -off * inv_pivot_[j];
        prev_upper = upper_[j];
    }
}

void ConstantTridiagonal::solve(double* r) const {
    const std::size_t n = inv_pivot_.size();
    if (n == 0) return;
    r[0] *= inv_pivot_[0];
    for (std::size_t j = 1; j < n; ++j) r[j] = (r[j] + off_ * r[j - 1]) * inv_pivot_[j];
    for (std::size_t j = n - 1; j-- > 0;) r[j] -= upper_[j] * r[j + 1];
}

}  // namespace rdfront::kernels
