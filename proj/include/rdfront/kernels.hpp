#pragma once

#include <cstddef>
#include <vector>

namespace rdfront::kernels {

/// Block length of the fixed summation tree. Sums are formed per block and
/// the block totals are combined pairwise, so the rounding is the same for
/// any thread count.
inline constexpr std::size_t kSumBlock = 512;

/// Uniform grid symmetric about node `center`: x_j = (j - center) dx, so
/// mirrored nodes have exactly opposite coordinates.
struct Grid1D {
    double dx = 0;
    std::size_t size = 0;
    std::size_t center = 0;
    double x(std::size_t j) const { return (static_cast<double>(j) - static_cast<double>(center)) * dx; }
};

namespace serial {

double tree_sum(const double* a, std::size_t n);

/// out_j = (v_j^2 - u_j^2)^n with u_j = -erf(x_j / (2 sqrt(t))).
void reaction(const Grid1D& g, const double* v, double t, int n, double* out);

/// Explicit half of the Crank-Nicolson step on the interior nodes:
/// r_j = v_j + (dt/2) (v_{j+1} - 2 v_j + v_{j-1}) / dx^2 - dt R_j, j = 1 .. size-2.
/// r_0 and r_{size-1} are left untouched.
void cn_rhs(const Grid1D& g, const double* v, const double* R, double dt, double* r);

/// max_j |d/dv (v^2 - u^2)^n| = max_j |2 n v_j (v_j^2 - u_j^2)^(n-1)|.
double max_reaction_slope(const Grid1D& g, const double* v, double t, int n);

double max_abs_diff(const double* a, const double* b, std::size_t n);

/// Trapezoid rule for the integral of |a - b|.
double l1_diff(const Grid1D& g, const double* a, const double* b);

/// max_j |v_j - v_{size-1-j}|.
double evenness_error(const double* v, std::size_t n);

}  // namespace serial

namespace parallel {

double tree_sum(const double* a, std::size_t n);
void reaction(const Grid1D& g, const double* v, double t, int n, double* out);
void cn_rhs(const Grid1D& g, const double* v, const double* R, double dt, double* r);
double max_reaction_slope(const Grid1D& g, const double* v, double t, int n);
double max_abs_diff(const double* a, const double* b, std::size_t n);
double l1_diff(const Grid1D& g, const double* a, const double* b);
double evenness_error(const double* v, std::size_t n);

}  // namespace parallel

/// Tridiagonal system with constant coefficients, -c x_{j-1} + d x_j - c x_{j+1} = r_j,
/// factorised once (Thomas algorithm). Throws NumericError on a zero pivot.
class ConstantTridiagonal {
public:
    ConstantTridiagonal() = default;
    ConstantTridiagonal(std::size_t size, double diag, double off);
    /// Solves in place.
    void solve(double* r) const;
    std::size_t size() const { return inv_pivot_.size(); }
    double diag() const { return diag_; }
    double off() const { return off_; }

private:
    double diag_ = 0, off_ = 0;
    std::vector<double> inv_pivot_, upper_;
};

}  // namespace rdfront::kernels
