#include "rdfront/eta.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rdfront/errors.hpp"
#include "rdfront/fit.hpp"

namespace rdfront {

namespace {

double ipow(double b, int e) {
    double r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

}  // namespace

SecondOrderRhs eta_ode(const ModelParams& p) {
    const int n = p.n;
    const double two_kappa = 2 * p.kappa;
    return [n, two_kappa](double z, double eta, double) {
        const double t = two_kappa * z * eta + eta * eta;
        return ipow(t, n);
    };
}

double next_eta_tail_exponent(const ModelParams& p) {
    return p.n <= 5 ? (Rational(2) * p.delta + Rational(1)).value() : -p.p_minus;
}

double default_eta_zmax(const ModelParams& p) { return std::max(30.0, 10 * std::pow(p.lambda, 1 / p.d())); }

ShootingOutcome classify_eta_shot(double rho, const ModelParams& p, double horizon, double ode_tol) {
    if (!(rho > 0)) throw DomainError("classify_eta_shot: rho must be positive");
    IntegrateOptions o;
    o.rtol = ode_tol;
    o.atol = 1e-16;
    o.record = false;
    const std::vector<Event> events{
        {"eta_zero", [](double, double y, double) { return y; }, -1},
        {"slope_zero", [](double, double, double yp) { return yp; }, +1},
    };
    ShootingOutcome out;
    out.trajectory = integrate(eta_ode(p), 0, rho, -p.kappa, horizon, events, o);
    const auto& tr = out.trajectory;
    out.event_x = tr.x_end;
    switch (tr.reason) {
        case Termination::event: out.tag = tr.event_index == 0 ? ShotClass::set_one : ShotClass::set_two; break;
        case Termination::blow_up: out.tag = ShotClass::set_two; break;
        case Termination::step_underflow:
            out.tag = tr.yp_end > 0 && tr.y_end > 0 ? ShotClass::set_two : ShotClass::undecided;
            break;
        case Termination::reached_end: out.tag = ShotClass::undecided; break;
    }
    return out;
}

std::pair<double, double> eta_taylor(const ModelParams& p, double eta0) {
    const int n = p.n;
    const double eta2 = 0.5 * ipow(eta0, 2 * n);
    const double eta4 = (n / 12.0) * ipow(eta0, 2 * n - 2) * (p.kappa * p.kappa - ipow(eta0, 2 * n + 1));
    return {eta2, eta4};
}

EtaSolution solve_eta(const ModelParams& p, const EtaOptions& opt) {
    EtaSolution sol;
    sol.params = p;
    sol.z_max = opt.z_max > 0 ? opt.z_max : default_eta_zmax(p);

    int shots = 0;
    // Undecided shots get a longer horizon before bisection gives up on them.
    auto classify = [&](double rho) {
        for (double h = 4 * sol.z_max; h <= 64 * sol.z_max; h *= 2) {
            ++shots;
            const auto c = classify_eta_shot(rho, p, h, opt.ode_tol).tag;
            if (c != ShotClass::undecided) return c;
        }
        return ShotClass::undecided;
    };

    double lo = 1e-3, hi = 2 * std::pow(p.kappa, 1.0 / (2 * p.n + 1));
    BisectionResult br;
    try {
        br = bisect_shoot(std::function<ShotClass(double)>(classify), lo, hi, opt.bisect_tol);
    } catch (const BracketInvalid&) {
        sol.z_max *= 2;
        lo *= 1e-2;
        hi *= 2;
        br = bisect_shoot(std::function<ShotClass(double)>(classify), lo, hi, opt.bisect_tol);
    }
    if (br.tag_lo != ShotClass::set_one) {
        throw NumericError("solve_eta: small seed did not cross zero");
    }
    sol.shots = shots;
    sol.bracket_lo = br.lo;
    sol.bracket_hi = br.hi;
    sol.eta0 = br.root;
    std::tie(sol.eta2, sol.eta4) = eta_taylor(p, sol.eta0);

    IntegrateOptions o;
    o.rtol = opt.ode_tol;
    o.atol = 1e-16;
    const auto ode = eta_ode(p);
    // For large n the growing mode can outrun floating-point resolution of
    // eta(0) before z_max; the tabulated range is then shortened.
    Trajectory tr = integrate(ode, 0, sol.eta0, -p.kappa, sol.z_max, {}, o);
    while (tr.reason != Termination::reached_end || !(tr.y_end > 0)) {
        const double reach = tr.reason == Termination::reached_end ? sol.z_max : tr.x_end;
        if (reach < 5) {
            std::ostringstream os;
            os << "solve_eta: final profile stopped at z = " << tr.x_end << " (" << to_string(tr.reason) << ")";
            throw NumericError(os.str());
        }
        sol.z_max = 0.7 * reach;
        tr = integrate(ode, 0, sol.eta0, -p.kappa, sol.z_max, {}, o);
    }

    // Coefficient of z^-delta' on the last half of the grid. The next term of
    // the expansion is fitted alongside it when its exponent is distinct
    // enough to be separable; a one-term fit is biased by it.
    const double d = p.d(), dp = p.delta_prime;
    const double q3 = next_eta_tail_exponent(p);
    const bool two_term = std::abs(q3 - dp) > 0.25;
    std::vector<double> c_main, c_next, rhs;
    for (std::size_t i = 0; i < tr.x.size(); ++i) {
        const double z = tr.x[i];
        if (z < 0.5 * sol.z_max) continue;
        c_main.push_back(std::pow(z, -dp));
        c_next.push_back(std::pow(z, -q3));
        rhs.push_back(tr.y[i] - p.lambda * std::pow(z, -d));
    }
    const auto fit = two_term ? least_squares({c_main, c_next}, rhs) : least_squares({c_main}, rhs);
    sol.lambda_inf = fit.coef[0];
    sol.lambda_inf_rms = fit.rms_residual;

    // The correction exponent is matched to value and slope at the seam, so the
    // tail joins C^1; it stays close to delta' (and absorbs the next term).
    PowerTail tail = pin_power_tail(tr.x.back(), tr.y.back(), tr.yp.back(), p.lambda, d, dp);
    if (!(tail.q2 > d + 0.5 && tail.q2 < 2 * dp)) tail = pin_power_tail_value(tr.x.back(), tr.y.back(), p.lambda, d, dp);
    sol.profile = Profile::from_trajectory(tr, NoLeft{}, tail, ode);
    return sol;
}

}  // namespace rdfront
