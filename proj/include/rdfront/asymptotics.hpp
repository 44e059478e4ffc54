#pragma once

#include <string>
#include <vector>

#include "rdfront/eta.hpp"
#include "rdfront/mu2.hpp"
#include "rdfront/params.hpp"
#include "rdfront/phi2.hpp"

namespace rdfront {

/// The three solved profiles for one n. Immutable once assembled.
struct AsymptoticBundle {
    ModelParams params;
    EtaSolution eta;
    Mu2Solution mu2;
    Phi2Solution phi2;
};

AsymptoticBundle assemble_bundle(int n);

/// Throws ConfigError if the profiles disagree on n or an invariant fails.
void check_bundle(const AsymptoticBundle& b);

/// mu1(y) - kappa y and mu1(y) - kappa y - kappa3 y^3, without cancellation near 0.
double mu1_minus_linear(double y);
double mu1_minus_cubic(double y);

/// Terms of v_inf in the singularity-free grouping
///   mu1(y) + t^-gamma eta(z) + t^-eps mu4(y) + t^-3gamma h(z),
/// y = |x|/sqrt(t), z = |x|/t^alpha. This is the same function as
/// mu1 + t^-gamma eta + t^-eps (mu2 - lambda y^-delta) + t^-3gamma phi2 with the
/// lambda0 z^(2-delta) pieces moved from phi2 to mu3 (they coincide on both scales).
struct VTerms {
    double mu1 = 0, reactive = 0, diffusive = 0, second = 0;
    double total() const { return mu1 + reactive + diffusive + second; }
};

VTerms v_terms(double x, double t, const AsymptoticBundle& b);
double v_infinity(double x, double t, const AsymptoticBundle& b);

/// phi = v_inf - mu1(y) and its x and t derivatives (x > 0).
struct PhiJet {
    double phi = 0, phi_t = 0, phi_xx = 0;
};
PhiJet phi_jet(double x, double t, const AsymptoticBundle& b);

/// Limit of t^(2 n gamma) F(t^alpha z, t): (1/2)(2 kappa |z| eta + eta^2)^n.
double front_reactive(double z, const AsymptoticBundle& b);

/// |front_reactive(z) - eta''(z)/2| with eta'' from differencing the tabulated slope.
double front_reactive_identity_gap(double z, const AsymptoticBundle& b);

/// Limit of t^(n eps) F(sqrt(t) y, t): (1/2)(2 mu1 mu2)^n(|y|). y = 0 is rejected.
double front_diffusive(double y, const AsymptoticBundle& b);

struct FrontReport {
    std::string scale;  ///< "reactive" or "diffusive"
    std::vector<double> points, values;
    double amplitude = 0;  ///< fitted small-y / large-z power-law amplitude
    double exponent = 0;   ///< fitted exponent of that power law
    double expected_amplitude = 0;  ///< (1/2)(2 lambda kappa)^n
    double expected_exponent = 0;   ///< -(delta + 2)
};

FrontReport front_report(const std::string& scale, const AsymptoticBundle& b);

/// |t^(eps - gamma) eta(t^gamma y) - lambda y^-delta|: the reactive profile seen
/// on the diffusive scale against its matching term.
double matching_gap(double y, double t, const AsymptoticBundle& b);

/// I = -phi_t + phi_xx - (2 mu1 phi + phi^2)^n at x > 0 (x < 0 by evenness).
double eval_I(double x, double t, const AsymptoticBundle& b);

struct NormResult {
    double value = 0;
    double error = 0;
    double x_cut = 0;
};

/// N(t) = int |I(sqrt(t) x, t)| dx over the whole line.
NormResult inhomo_norm(double t, const AsymptoticBundle& b, double rel_tol = 1e-8);

struct PotentialScan {
    double min_value = 0;
    double argmin = 0;
    double min_two_u_phi = 0;  ///< min of 2 mu1 + phi over the scan
    std::size_t points = 0;
};

/// V = 2n (2 mu1 phi + phi^2)^(n-1) (mu1 + phi) on a log grid spanning both scales.
PotentialScan potential_scan(double t, const AsymptoticBundle& b, std::size_t points = 4000);

}  // namespace rdfront
