#pragma once

#include <map>
#include <mutex>
#include <vector>

#include "rdfront/params.hpp"
#include "rdfront/profile.hpp"
#include "rdfront/shooting.hpp"

namespace rdfront {

/// erf(y/2) and its derivatives (order 0..2).
double mu1(double y, int order = 0);

/// m'' for m = mu2 * x^delta:
/// m'' = -(x/2 - 2 delta/x) m' - (delta(delta+1)/x^2 - n eps/2) m + x^-2 (2 mu1(x) m / x)^n
SecondOrderRhs m_ode(const ModelParams& p);

/// Locus of m'' = 0 at m' = 0 in the (xi, rho) plane. Defined on (0, xi0].
double c2_curve(double xi, const ModelParams& p);

/// omega1(xi) = (2 mu1(xi)/xi)^n / xi^2 and omega2(xi) = n eps/2 - delta(delta+1)/xi^2.
double omega1(double xi, const ModelParams& p);
double omega2(double xi, const ModelParams& p);

/// omega1'(xi) c2(xi)^(n-1) + omega2'(xi); negative where c2 rises.
double xi_m_condition(double xi, const ModelParams& p);

/// Maximiser of c2 on (0, xi0). Throws ConfigError without a sign change.
double find_xi_m(const ModelParams& p);

struct Mu2Options {
    double ode_tol = 1e-11;
    double x_min = 1e-3;  ///< left end of the leftward integrations
    double y_max = 10;    ///< right end of the rightward integration
    double bisect_tol = 0;  ///< 0: bisect to floating-point resolution
};

/// Inner shot at fixed xi: leftward from (xi, rho, 0). set_one: m reaches
/// lambda; set_two: m reaches the c2 curve.
ShootingOutcome classify_inner_shot(double xi, double rho, const ModelParams& p, const Mu2Options& opt,
                                    bool record = false);

/// Outer shot: rightward from (xi, rho, 0). set_one: m reaches 0; set_two:
/// m' reaches 0 with m > 0.
ShootingOutcome classify_outer_shot(double xi, double rho, const ModelParams& p, const Mu2Options& opt,
                                    double horizon, bool record = false);

/// Memoised xi -> c0(xi). Safe to fill from several threads; each entry is
/// written once.
class C0Cache {
public:
    C0Cache(const ModelParams& p, Mu2Options opt) : p_(p), opt_(opt) {}
    double operator()(double xi);
    std::size_t size() const;

private:
    ModelParams p_;
    Mu2Options opt_;
    mutable std::mutex mu_;
    std::map<double, double> memo_;
};

/// c0(xi): the value of m(xi) for which the leftward solution stays between
/// lambda and the c2 curve down to x_min.
double inner_shoot_c0(double xi, const ModelParams& p, const Mu2Options& opt = {});

/// c0 sampled at count points spread over (lo, hi), in parallel.
std::vector<double> sample_c0(C0Cache& cache, const std::vector<double>& xi);

struct Mu2Solution {
    ModelParams params;
    double xi_star = 0;
    double rho_star = 0;   ///< c0(xi_star)
    double xi_m = 0;
    double xi_lo = 0, xi_hi = 0;  ///< final outer bracket
    double lambda0_fit = 0;
    double lambda1 = 0, lambda2 = 0, lambda3 = 0;  ///< Taylor coefficients of m at 0 (x^4, x^6, x^8)
    double gauss_amplitude = 0;  ///< C: least-squares fit on the last decade
    double x_left = 0;            ///< left end of the tabulated grid (>= x_min)
    double y_cut = 0;             ///< right end of the tabulated grid
    double taylor_switch = 0.1;   ///< below this, mu4 uses the Taylor series
    Profile m;

    /// mu2 = m / y^delta
    double mu2(double y, int order = 0) const;
    /// mu3 = (m - lambda) / y^delta
    double mu3(double y, int order = 0) const;
    /// mu4 = (m - lambda - lambda0 y^2) / y^delta, regular at 0.
    double mu4(double y, int order = 0) const;
};

Mu2Solution outer_shoot(const ModelParams& p, const Mu2Options& opt = {});

}  // namespace rdfront
