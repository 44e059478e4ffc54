#pragma once

#include <functional>

namespace rdfront {

using Integrand = std::function<double(double)>;

struct QuadOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0;
    int max_intervals = 4000;
};

struct QuadResult {
    double value = 0;
    double error = 0;
    int intervals = 0;
};

/// One 15-point Kronrod rule with the embedded 7-point Gauss error estimate.
QuadResult gauss_kronrod15(const Integrand& f, double a, double b);

/// Adaptive Gauss-Kronrod on [a, b]. Throws QuadratureError when the
/// subdivision budget runs out before the tolerance is met.
QuadResult quad(const Integrand& f, double a, double b, const QuadOptions& opt = {});

/// How the integrand decays at infinity, used to bound what is cut off.
struct DecayModel {
    enum Kind { power, gaussian } kind = power;
    double exponent = 2;  ///< f ~ x^-exponent for power decay (must exceed 1)
};

/// Integral over [a, inf): integrates [a, b] with b doubling from b0 until
/// the analytic remainder estimate is below tolerance, then adds it.
QuadResult quad_to_infinity(const Integrand& f, double a, double b0, DecayModel decay, const QuadOptions& opt = {});

/// Remainder estimate int_b^inf f for an integrand with value fb at b.
double tail_remainder(double fb, double b, DecayModel decay);

}  // namespace rdfront
