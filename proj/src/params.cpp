#include "rdfront/params.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rdfront/errors.hpp"

namespace rdfront {

Rational ModelParams::xi0_squared() const {
    return delta * (delta + Rational(1)) / (Rational(n) * epsilon / Rational(2));
}

ModelParams reactive_params(int n) {
    if (n < 2) throw DomainError("reaction order n = " + std::to_string(n) + " is below 2");

    ModelParams p;
    p.n = n;
    p.gamma = Rational(1, 2 * n + 1);
    p.epsilon = Rational(1, n - 1);
    p.alpha = Rational(1, 2) - p.gamma;
    p.delta = Rational(n + 2, n - 1);

    const Rational dd1 = p.delta * (p.delta + Rational(1));  // delta(delta+1)
    const double dd1_v = dd1.value();
    const double nd = static_cast<double>(n);

    p.kappa = std::numbers::inv_sqrtpi;
    p.kappa3 = -p.kappa / 12.0;

    // lambda = (delta(delta+1) / (2 kappa)^n)^(1/(n-1)); the power (2 kappa)^n is
    // formed by repeated multiplication, the root by pow.
    double two_kappa_n = 1.0;
    for (int i = 0; i < n; ++i) two_kappa_n *= 2.0 * p.kappa;
    p.lambda = std::pow(dd1_v / two_kappa_n, 1.0 / (nd - 1.0));

    // The discriminant 1 + 4 n delta(delta+1) is rational, so it is exact
    // before the square root.
    const double root = std::sqrt((Rational(1) + Rational(4 * n) * dd1).value());
    p.p_plus = 0.5 * (1.0 + root);
    p.p_minus = 0.5 * (1.0 - root);
    const double sqrt_branch = 0.5 * (root - 1.0);
    p.delta_prime = n <= 5 ? sqrt_branch : (Rational(2) * p.delta + Rational(1)).value();
    p.p_sing = p.p_plus + p.d();

    p.xi0 = std::sqrt(p.xi0_squared().value());

    // lambda0 = (lambda / 2 kappa) * (-2 n kappa3 dd1 - kappa (delta - 2 eps))
    //           / ((n-1) dd1 + 2 (2 delta - 1))
    const double numer = -2.0 * nd * p.kappa3 * dd1_v - p.kappa * (p.delta - Rational(2) * p.epsilon).value();
    const double denom = (Rational(n - 1) * dd1 + Rational(2) * (Rational(2) * p.delta - Rational(1))).value();
    p.lambda0 = 0.5 * (p.lambda / p.kappa) * numer / denom;
    return p;
}

ModelParams derive_params(int n) {
    if (n < 4) {
        throw DomainError("reaction order n = " + std::to_string(n) +
                          " is not supported: the two-scale asymptotics require n >= 4 "
                          "(n = 2, 3 are excluded)");
    }
    return reactive_params(n);
}

}  // namespace rdfront
