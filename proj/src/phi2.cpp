#include "rdfront/phi2.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "rdfront/errors.hpp"
#include "rdfront/fit.hpp"
#include "rdfront/quadrature.hpp"

namespace rdfront {

namespace {

double ipow(double b, int e) {
    double r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

double reaction_base(const ModelParams& p, double z, double eta) { return 2 * p.kappa * z * eta + eta * eta; }

Trajectory integrate_or_throw(const SecondOrderRhs& rhs, double y0, double yp0, double z_end, double tol,
                              bool record, const char* what) {
    IntegrateOptions o;
    o.rtol = tol;
    o.atol = 1e-300;
    o.record = record;
    o.densify = record;
    Trajectory tr = integrate(rhs, 0, y0, yp0, z_end, {}, o);
    if (tr.reason != Termination::reached_end) {
        std::ostringstream m;
        m << what << ": integration stopped at z = " << tr.x_end << " before " << z_end;
        throw NumericError(m.str());
    }
    return tr;
}

// Integral of g over each grid interval, adaptive per interval.
std::vector<double> interval_integrals(const std::vector<double>& x, const Integrand& g) {
    QuadOptions q;
    q.rel_tol = 1e-13;
    q.abs_tol = 1e-300;
    std::vector<double> out(x.size() - 1);
    for (std::size_t k = 0; k + 1 < x.size(); ++k) out[k] = quad(g, x[k], x[k + 1], q).value;
    return out;
}

}  // namespace

double h_potential(const ModelParams& p, const EtaSolution& eta, double z) {
    const double e = eta.eval(z, 0);
    return p.n * ipow(reaction_base(p, z, e), p.n - 1) * (2 * p.kappa * z + 2 * e);
}

double h_forcing(const ModelParams& p, const EtaSolution& eta, double z) {
    const double e = eta.eval(z, 0);
    const double ep = eta.eval(z, 1);
    const double t = ipow(reaction_base(p, z, e), p.n - 1);
    return -p.g() * e - p.a() * z * ep + p.n * t * 2 * p.kappa3 * z * z * z * e;
}

SecondOrderRhs h_ode(const ModelParams& p, const EtaSolution& eta, bool with_forcing) {
    auto e = std::make_shared<const EtaSolution>(eta);
    return [p, e, with_forcing](double z, double h, double) {
        double v = h_potential(p, *e, z) * h;
        if (with_forcing) v += h_forcing(p, *e, z);
        return v;
    };
}

HomogeneousPair solve_h1_h2(const ModelParams& p, const EtaSolution& eta, double z_max, double tol) {
    HomogeneousPair pair;
    const auto rhs = h_ode(p, eta, false);
    Trajectory t1;
    for (;;) {
        IntegrateOptions o;
        o.rtol = tol;
        o.atol = 1e-300;
        t1 = integrate(rhs, 0, 1, 0, z_max, {}, o);
        if (t1.reason == Termination::reached_end) break;
        const double shorter = 0.7 * t1.x_end;
        if (!(shorter > 5)) throw NumericError("solve_h1_h2: h1 cannot be integrated past z = 5");
        z_max = shorter;
    }
    pair.z_max = z_max;
    t1 = normalized(t1);
    const auto& x = t1.x;
    const std::size_t nn = x.size();
    const double pp = p.p_plus;

    // h1 z^-p+ = d1 + a z^-s on the last half of the grid
    const double s = std::min(p.delta_prime - p.d(), p.d() + 1);
    std::vector<double> zs, ys;
    for (std::size_t i = 0; i < nn; ++i)
        if (x[i] >= 0.5 * z_max) {
            zs.push_back(x[i]);
            ys.push_back(t1.y[i] * std::pow(x[i], -pp));
        }
    pair.d1 = fit_powers(zs, ys, {0, -s}).coef[0];
    pair.d2 = 1 / (pair.d1 * pair.d1 * (2 * pp - 1));

    const auto tail1 = pin_power_tail(x.back(), t1.y.back(), t1.yp.back(), 0, 0, -pp);
    pair.h1 = Profile(x, t1.y, t1.yp, t1.ypp, NoLeft{}, tail1, rhs);

    const Profile& h1 = pair.h1;
    const auto pieces = interval_integrals(x, [&](double z) {
        const double v = h1.eval(z);
        return 1 / (v * v);
    });
    // Accumulate int_z^inf h1^-2 from the right so that it keeps full relative
    // precision where it is small.
    std::vector<double> decay(nn), decay_p(nn), decay_pp(nn);
    decay[nn - 1] = pair.d2 * std::pow(x.back(), 1 - 2 * pp);
    for (std::size_t k = nn - 1; k-- > 0;) decay[k] = decay[k + 1] + pieces[k];
    for (std::size_t i = 0; i < nn; ++i) {
        const double v = t1.y[i];
        decay_p[i] = -1 / (v * v);
        decay_pp[i] = 2 * t1.yp[i] / (v * v * v);
    }
    pair.d = decay[0];
    const PowerTail decay_tail{pair.d2, 2 * pp - 1, 0, 0};
    pair.decay = Profile(x, decay, decay_p, decay_pp, NoLeft{}, decay_tail, nullptr);

    std::vector<double> f2(nn), fp2(nn), fpp2(nn);
    double running = 0;
    for (std::size_t i = 0; i < nn; ++i) {
        if (i > 0) running += pieces[i - 1];
        f2[i] = t1.y[i] * running;
        fp2[i] = t1.yp[i] * running + 1 / t1.y[i];
        fpp2[i] = t1.ypp[i] * running;
    }
    const auto tail2 = pin_power_tail(x.back(), f2.back(), fp2.back(), 0, 0, -pp);
    pair.h2 = Profile(x, f2, fp2, fpp2, NoLeft{}, tail2, rhs);

    Trajectory t2 = normalized(integrate_or_throw(rhs, 0, 1, z_max, tol, true, "solve_h1_h2 (h2)"));
    const auto tail2o = pin_power_tail(t2.x.back(), t2.y.back(), t2.yp.back(), 0, 0, -pp);
    pair.h2_ode = Profile::from_trajectory(t2, NoLeft{}, tail2o, rhs);
    return pair;
}

double wronskian(const HomogeneousPair& pair, double z) {
    return pair.h1.eval(z, 0) * pair.h2_ode.eval(z, 1) - pair.h1.eval(z, 1) * pair.h2_ode.eval(z, 0);
}

double wronskian_range(const HomogeneousPair& pair, double tol) {
    const double limit = 1e-6 / tol;
    const auto& x = pair.h1.x();
    double z = x.front();
    for (double xi : x) {
        if (std::abs(pair.h1.eval(xi) * pair.h2_ode.eval(xi, 1)) > limit) break;
        z = xi;
    }
    return z;
}

Profile particular_solution(const HomogeneousPair& pair, const ModelParams& p, const EtaSolution& eta,
                            double tol) {
    const auto& x = pair.h1.x();
    const std::size_t nn = x.size();
    (void)tol;
    // c1 = -int h2 f and c2 = int h1 f. With h2 = h1 (d - T), T = int_z^inf h1^-2,
    // c1 h1 + c2 h2 = h1 (A - T B) where A = int h1 f T and B = int h1 f: the
    // two growing terms cancel analytically instead of in floating point.
    const auto fa = interval_integrals(x, [&](double z) {
        return pair.h1.eval(z) * h_forcing(p, eta, z) * pair.decay.eval(z);
    });
    const auto fb = interval_integrals(x, [&](double z) { return pair.h1.eval(z) * h_forcing(p, eta, z); });
    const auto rhs = h_ode(p, eta, true);
    std::vector<double> f(nn), fp(nn), fpp(nn);
    double a = 0, b = 0;
    for (std::size_t i = 0; i < nn; ++i) {
        if (i > 0) {
            a += fa[i - 1];
            b += fb[i - 1];
        }
        const double h1 = pair.h1.f()[i], h1p = pair.h1.fp()[i];
        const double t = pair.decay.f()[i];
        const double ratio = a - t * b;
        f[i] = h1 * ratio;
        fp[i] = h1p * ratio + b / h1;
        fpp[i] = rhs(x[i], f[i], fp[i]);
    }
    const auto tail = pin_power_tail(x.back(), f.back(), fp.back(), 0, 0, -p.p_plus);
    return Profile(x, f, fp, fpp, NoLeft{}, tail, rhs);
}

HInfinity extract_h_infinity(const Profile& hp, const HomogeneousPair& pair, const ModelParams& p) {
    const auto& x = hp.x();
    const double z0 = x.front() + 0.9 * (x.back() - x.front());
    std::vector<double> zs, rs;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] >= z0) {
            zs.push_back(x[i]);
            rs.push_back(hp.f()[i] / pair.h1.eval(x[i]));
        }
    if (zs.size() < 3) throw NumericError("extract_h_infinity: fewer than three nodes in the last 10% of the grid");
    const double corr = 2 - p.d() - p.p_plus;
    const auto fit = fit_powers(zs, rs, {0, corr});
    HInfinity out;
    out.value = fit.coef[0];
    out.correction = fit.coef[1];
    out.residual = fit.rms_residual;
    return out;
}

double Phi2Solution::phi2(double z, int order) const {
    const double e = 2 - params.d();
    const double l0 = params.lambda0;
    double lead = 0;
    if (order == 0) lead = l0 * std::pow(z, e);
    else if (e != 0 && order == 1) lead = l0 * e * std::pow(z, e - 1);
    else if (e != 0) lead = l0 * e * (e - 1) * std::pow(z, e - 2);
    return -lead + h.eval(z, order);
}

Phi2Solution solve_h(const ModelParams& p, const EtaSolution& eta, const Phi2Options& opt) {
    Phi2Solution sol;
    sol.params = p;
    const double z_req = opt.z_max > 0 ? opt.z_max : eta.z_max;

    const HomogeneousPair pair = solve_h1_h2(p, eta, z_req, opt.ode_tol);
    const double z_max = pair.z_max;
    sol.z_max = z_max;
    sol.d = pair.d;
    sol.d1 = pair.d1;
    sol.d2 = pair.d2;

    const Profile hp = particular_solution(pair, p, eta);
    const HInfinity hinf = extract_h_infinity(hp, pair, p);
    sol.h_inf = hinf.value;
    sol.h_inf_residual = hinf.residual;

    // Production path: shoot on h(0). The objective sits beyond z_max so that
    // the growing mode it leaves behind is negligible on the tabulated range.
    const auto rhs = h_ode(p, eta, true);
    const double z_obj = opt.objective_factor * z_max;
    const double scale_obj = std::pow(z_obj, p.d() - 2);
    auto classify = [&](double h0) {
        IntegrateOptions o;
        o.rtol = opt.ode_tol;
        o.atol = 1e-300;
        o.record = false;
        const Trajectory tr = integrate(rhs, 0, h0, 0, z_obj, {}, o);
        if (tr.reason == Termination::reached_end || tr.reason == Termination::blow_up)
            return tr.y_end * scale_obj < p.lambda0 ? ShotClass::set_one : ShotClass::set_two;
        return ShotClass::undecided;
    };
    double lo = -1, hi = 1;
    while (classify(lo) != ShotClass::set_one) {
        lo *= 4;
        if (lo < -1e8) throw BracketInvalid("solve_h: no lower bracket for h(0)");
    }
    while (classify(hi) != ShotClass::set_two) {
        hi *= 4;
        if (hi > 1e8) throw BracketInvalid("solve_h: no upper bracket for h(0)");
    }
    const auto bis = bisect_shoot(std::function<ShotClass(double)>(classify), lo, hi, 0);
    sol.h0 = bis.root;

    Trajectory tr = normalized(integrate_or_throw(rhs, sol.h0, 0, z_max, opt.ode_tol, true, "solve_h"));
    sol.h2 = 0.5 * (h_potential(p, eta, 0) * sol.h0 + h_forcing(p, eta, 0));
    const double q1 = p.d() - 2;
    const auto tail = pin_power_tail(tr.x.back(), tr.y.back(), tr.yp.back(), p.lambda0, q1, p.delta_prime - 2);
    sol.h = Profile::from_trajectory(tr, TaylorLeft{{sol.h0, 0, sol.h2, 0, 0}}, tail, rhs);

    // Taylor fit near 0 for the linear term.
    {
        std::vector<double> zs, ys;
        const double w = 0.2;
        for (int i = 0; i <= 40; ++i) {
            const double z = w * i / 40;
            zs.push_back(z);
            ys.push_back(sol.h.eval(z));
        }
        sol.linear_coeff = fit_powers(zs, ys, {0, 1, 2, 3, 4, 5}).coef[1];
    }

    // Tail: residual against the leading term.
    {
        std::vector<double> zs, gs;
        const auto& x = sol.h.x();
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] >= 0.5 * z_max) {
                zs.push_back(x[i]);
                gs.push_back(sol.h.f()[i] - p.lambda0 * std::pow(x[i], 2 - p.d()));
            }
        const auto sl = loglog_slope(zs, gs, 3);
        sol.tail_slope = sl.slope;
        sol.tail_slope_err = sl.stderr_slope;
        // The forcing carries a z^(1 - 2 delta) term from eta^2; for n = 4 its
        // exponent is close enough to 2 - delta' to bias a one-term fit.
        const double lead = 2 - p.delta_prime;
        const double next = 1 - 2 * p.d();
        std::vector<double> fixed;
        if (std::abs(next - lead) > 0.25) fixed.push_back(next);
        // decaying homogeneous mode
        if (std::abs(p.p_minus - lead) > 0.25 && std::abs(p.p_minus - next) > 0.25) fixed.push_back(p.p_minus);
        const auto fit = fit_free_power(zs, gs, fixed, lead - 1, lead + 1);
        sol.tail_exponent = fit.power;
        sol.tail_next = fixed.empty() ? 0 : fit.coef[1];
        fixed.insert(fixed.begin(), lead);
        sol.lambda_prime = fit_powers(zs, gs, fixed).coef[0];
    }

    // Validation path: h_p - h_inf h1 on [0, z_max/4].
    {
        double num = 0, den = 0;
        for (double z : sol.h.x()) {
            if (z > 0.25 * z_max) break;
            const double hv = hp.eval(z) - sol.h_inf * pair.h1.eval(z);
            num = std::max(num, std::abs(sol.h.eval(z) - hv));
            den = std::max(den, std::abs(sol.h.eval(z)));
        }
        sol.path_agreement = den > 0 ? num / den : num;
        if (!(sol.path_agreement < 1e-3)) {
            std::ostringstream m;
            m << "solve_h: shooting and variation of parameters disagree, sup-norm " << sol.path_agreement;
            throw NumericError(m.str());
        }
    }
    return sol;
}

}  // namespace rdfront
