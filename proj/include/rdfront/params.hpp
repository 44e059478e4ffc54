#pragma once

#include "rdfront/rational.hpp"

namespace rdfront {

/// Every exponent and closed-form constant of the two-scale expansion, as a
/// function of the reaction order n.
///
/// The exponents that are exact rationals are kept as `Rational` so that
/// tests can compare them for equality; the transcendental constants are
/// binary64.
struct ModelParams {
    int n = 0;

    Rational gamma;    ///< 1/(2n+1): reactive amplitude exponent
    Rational epsilon;  ///< 1/(n-1): diffusive amplitude exponent
    Rational alpha;    ///< 1/2 - gamma: reactive length-scale exponent
    Rational delta;    ///< (n+2)/(n-1): decay exponent of the reactive profile

    double delta_prime = 0;  ///< second-order decay exponent of the reactive profile
    double kappa = 0;        ///< 1/sqrt(pi), slope of erf(y/2) at 0
    double kappa3 = 0;       ///< -kappa/12, cubic coefficient of erf(y/2)
    double lambda = 0;       ///< amplitude of the z^-delta tail
    double lambda0 = 0;      ///< quadratic coefficient of m = mu2 * y^delta at 0
    double xi0 = 0;          ///< zero of the c2 curve
    double p_plus = 0;       ///< growing critical exponent
    double p_minus = 0;      ///< decaying critical exponent
    double p_sing = 0;       ///< p_plus + delta, exponent of the singular branch of m at 0

    double g() const { return gamma.value(); }
    double eps() const { return epsilon.value(); }
    double a() const { return alpha.value(); }
    double d() const { return delta.value(); }

    /// xi0^2 as an exact rational: delta(delta+1) / (n epsilon / 2).
    Rational xi0_squared() const;
};

/// Constants for the reaction order n >= 4 (the range the full expansion
/// exists for). Throws DomainError otherwise.
ModelParams derive_params(int n);

/// Same formulas without the n >= 4 restriction; valid for n >= 2. Used by
/// the reactive-scale solver in standalone mode.
ModelParams reactive_params(int n);

}  // namespace rdfront
