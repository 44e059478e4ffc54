#pragma once

#include <utility>

#include "rdfront/params.hpp"
#include "rdfront/profile.hpp"
#include "rdfront/shooting.hpp"

namespace rdfront {

/// Right-hand side of the reactive-scale equation eta'' = (2 kappa z eta + eta^2)^n.
SecondOrderRhs eta_ode(const ModelParams& p);

/// Default right end of the tabulated reactive profile: max(30, 10 lambda^(1/delta)).
double default_eta_zmax(const ModelParams& p);

/// Exponent of the term after z^-delta' in the tail of eta: 2 delta + 1 for
/// n <= 5, |p_minus| beyond.
double next_eta_tail_exponent(const ModelParams& p);

struct EtaOptions {
    /// Bracket width at which bisection on eta(0) stops; 0 bisects to
    /// floating-point resolution.
    double bisect_tol = 0;
    double ode_tol = 1e-13;
    double z_max = 0;  ///< 0 selects default_eta_zmax
};

/// One trial shot from eta(0) = rho, eta'(0) = -kappa. set_one: eta reaches
/// zero; set_two: eta' reaches zero (or blow-up); undecided otherwise.
ShootingOutcome classify_eta_shot(double rho, const ModelParams& p, double horizon, double ode_tol);

/// Taylor coefficients at 0: eta = eta0 - kappa z + eta2 z^2 - eta4 z^4 + ...
std::pair<double, double> eta_taylor(const ModelParams& p, double eta0);

struct EtaSolution {
    ModelParams params;
    double eta0 = 0;
    double eta2 = 0, eta4 = 0;
    double lambda_inf = 0;      ///< least-squares coefficient of z^-delta' on [z_max/2, z_max]
    double lambda_inf_rms = 0;  ///< fit residual
    double z_max = 0;
    double bracket_lo = 0, bracket_hi = 0;
    int shots = 0;
    Profile profile;

    double eval(double z, int order = 0) const { return profile.eval(z, order); }
};

EtaSolution solve_eta(const ModelParams& p, const EtaOptions& opt = {});

}  // namespace rdfront
