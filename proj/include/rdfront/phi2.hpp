#pragma once

#include "rdfront/eta.hpp"
#include "rdfront/params.hpp"
#include "rdfront/profile.hpp"

namespace rdfront {

/// Coefficient of the linearised reaction term: q = n T^(n-1) (2 kappa z + 2 eta)
/// with T = 2 kappa z eta + eta^2.
double h_potential(const ModelParams& p, const EtaSolution& eta, double z);

/// Inhomogeneity: f = -gamma eta - alpha z eta' + n T^(n-1) 2 kappa3 z^3 eta.
double h_forcing(const ModelParams& p, const EtaSolution& eta, double z);

/// h'' = q h + f  (with_forcing = false gives the homogeneous equation).
SecondOrderRhs h_ode(const ModelParams& p, const EtaSolution& eta, bool with_forcing = true);

struct HomogeneousPair {
    Profile h1;       ///< h1(0) = 1, h1'(0) = 0
    Profile h2;       ///< h1(z) * int_0^z h1^-2
    Profile h2_ode;   ///< same solution integrated directly from h2(0) = 0, h2'(0) = 1
    Profile decay;    ///< int_z^inf h1^-2, accumulated from the right
    double d = 0;     ///< int_0^inf h1^-2
    double d1 = 0;    ///< h1 ~ d1 z^p_plus
    double d2 = 0;    ///< (1/d1)^2 / (2 p_plus - 1)
    double z_max = 0;
};

HomogeneousPair solve_h1_h2(const ModelParams& p, const EtaSolution& eta, double z_max, double tol = 1e-11);

/// Wronskian h1 h2' - h1' h2 of the two directly integrated solutions at z.
double wronskian(const HomogeneousPair& pair, double z);

/// Right end of the range where the Wronskian is resolved in double
/// precision: |h1 h2'| stays below 1e-6 / tol there.
double wronskian_range(const HomogeneousPair& pair, double tol = 1e-11);

/// h_p = c1 h1 + c2 h2 with c1 = -int_0^z h2 f, c2 = int_0^z h1 f, on the
/// nodes of h1.
Profile particular_solution(const HomogeneousPair& pair, const ModelParams& p, const EtaSolution& eta,
                            double tol = 1e-13);

struct HInfinity {
    double value = 0;
    double correction = 0;    ///< coefficient of z^(2 - delta - p_plus)
    double residual = 0;      ///< rms residual of the extrapolation fit
};

/// lim h_p / h1 from the last 10% of the grid, with the correction
/// z^(2 - delta - p_plus) fitted alongside.
HInfinity extract_h_infinity(const Profile& hp, const HomogeneousPair& pair, const ModelParams& p);

struct Phi2Options {
    double ode_tol = 1e-11;
    double z_max = 0;        ///< 0: the reactive profile's z_max
    double objective_factor = 3;  ///< shooting objective is imposed at objective_factor * z_max
};

struct Phi2Solution {
    ModelParams params;
    double h0 = 0;
    double h2 = 0;             ///< h''(0) / 2
    double h_inf = 0;          ///< from the variation-of-parameters path
    double h_inf_residual = 0;
    double lambda_prime = 0;   ///< coefficient of z^(2 - delta') in the tail
    double tail_exponent = 0;  ///< fitted exponent of h - lambda0 z^(2-delta), next term included
    double tail_slope = 0;     ///< plain log-log slope of |h - lambda0 z^(2-delta)|
    double tail_slope_err = 0;
    double tail_next = 0;      ///< coefficient of z^(1 - 2 delta) in the tail fit (0 if not used)
    double path_agreement = 0; ///< sup |h_shoot - h_vop| / sup |h_shoot| on [0, z_max/4]
    double linear_coeff = 0;   ///< linear term of a Taylor fit at 0
    double z_max = 0;
    double d = 0, d1 = 0, d2 = 0;
    Profile h;

    double eval(double z, int order = 0) const { return h.eval(z, order); }
    /// phi2 = -lambda0 z^(2-delta) + h
    double phi2(double z, int order = 0) const;
};

Phi2Solution solve_h(const ModelParams& p, const EtaSolution& eta, const Phi2Options& opt = {});

}  // namespace rdfront
