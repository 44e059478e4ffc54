#include "rdfront/mu2.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
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

double mu1(double y, int order) {
    constexpr double kappa = std::numbers::inv_sqrtpi;
    switch (order) {
        case 0: return std::erf(0.5 * y);
        case 1: return kappa * std::exp(-0.25 * y * y);
        default: return -0.5 * y * kappa * std::exp(-0.25 * y * y);
    }
}

SecondOrderRhs m_ode(const ModelParams& p) {
    const int n = p.n;
    const double d = p.d();
    const double dd1 = (p.delta * (p.delta + Rational(1))).value();
    const double neps2 = (Rational(n) * p.epsilon / Rational(2)).value();
    return [=](double x, double m, double mp) {
        const double s = 2 * mu1(x) * m / x;
        return -(0.5 * x - 2 * d / x) * mp - (dd1 / (x * x) - neps2) * m + ipow(s, n) / (x * x);
    };
}

double omega1(double xi, const ModelParams& p) { return ipow(2 * mu1(xi) / xi, p.n) / (xi * xi); }

double omega2(double xi, const ModelParams& p) {
    const double dd1 = (p.delta * (p.delta + Rational(1))).value();
    return (Rational(p.n) * p.epsilon / Rational(2)).value() - dd1 / (xi * xi);
}

double c2_curve(double xi, const ModelParams& p) {
    if (!(xi > 0) || xi > p.xi0) {
        std::ostringstream os;
        os << "c2_curve: xi = " << xi << " outside (0, " << p.xi0 << "]";
        throw DomainError(os.str());
    }
    const double neps2 = (Rational(p.n) * p.epsilon / Rational(2)).value();
    const double base = neps2 * (p.xi0_squared().value() - xi * xi) / ipow(2 * mu1(xi) / xi, p.n);
    return std::pow(base, p.eps());
}

double xi_m_condition(double xi, const ModelParams& p) {
    const double h = 1e-6 * xi;
    const double w1p = (omega1(xi + h, p) - omega1(xi - h, p)) / (2 * h);
    const double dd1 = (p.delta * (p.delta + Rational(1))).value();
    const double w2p = 2 * dd1 / (xi * xi * xi);
    return w1p * ipow(c2_curve(xi, p), p.n - 1) + w2p;
}

double find_xi_m(const ModelParams& p) {
    double lo = 1e-2 * p.xi0, hi = p.xi0 * (1 - 1e-9);
    double flo = xi_m_condition(lo, p), fhi = xi_m_condition(hi, p);
    if (!(flo < 0 && fhi > 0)) throw ConfigError("find_xi_m: no sign change of the maximum condition on (0, xi0)");
    while (hi - lo > 1e-14 * p.xi0) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (xi_m_condition(mid, p) < 0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

ShootingOutcome classify_inner_shot(double xi, double rho, const ModelParams& p, const Mu2Options& opt,
                                    bool record) {
    IntegrateOptions o;
    o.rtol = opt.ode_tol;
    // m stays between lambda and c2 here, so an absolute floor on the
    // O(lambda) scale is right; it also absorbs rounding in m'' near m' = 0.
    o.atol = 1e-14 * p.lambda;
    o.record = record;
    const double lam = p.lambda;
    const std::vector<Event> events{
        {"hits_lambda", [lam](double, double m, double) { return m - lam; }, -1},
        {"hits_c2", [&p](double x, double m, double) { return m - c2_curve(x, p); }, +1},
    };
    ShootingOutcome out;
    out.trajectory = integrate(m_ode(p), xi, rho, 0.0, opt.x_min, events, o);
    const auto& tr = out.trajectory;
    out.event_x = tr.x_end;
    if (tr.reason == Termination::event) out.tag = tr.event_index == 0 ? ShotClass::set_one : ShotClass::set_two;
    else out.tag = ShotClass::undecided;
    return out;
}

ShootingOutcome classify_outer_shot(double xi, double rho, const ModelParams& p, const Mu2Options& opt,
                                    double horizon, bool record) {
    IntegrateOptions o;
    o.rtol = opt.ode_tol;
    o.atol = 1e-300;
    o.record = record;
    const std::vector<Event> events{
        {"hits_zero", [](double, double m, double) { return m; }, -1},
        {"turns_up", [](double, double m, double mp) { return m > 0 ? mp : -1.0; }, +1},
    };
    ShootingOutcome out;
    out.trajectory = integrate(m_ode(p), xi, rho, 0.0, horizon, events, o);
    const auto& tr = out.trajectory;
    out.event_x = tr.x_end;
    if (tr.reason == Termination::event) out.tag = tr.event_index == 0 ? ShotClass::set_one : ShotClass::set_two;
    else if (tr.reason == Termination::blow_up) out.tag = ShotClass::set_two;
    else out.tag = ShotClass::undecided;
    return out;
}

double inner_shoot_c0(double xi, const ModelParams& p, const Mu2Options& opt) {
    const double c2 = c2_curve(xi, p);
    const double gap = c2 - p.lambda;
    if (!(gap > 0)) throw DomainError("inner_shoot_c0: c2(xi) is not above lambda");
    auto cls = [&](double rho) { return classify_inner_shot(xi, rho, p, opt).tag; };
    const auto br = bisect_shoot(std::function<ShotClass(double)>(cls), p.lambda + 1e-9 * gap, c2 - 1e-9 * gap,
                                 opt.bisect_tol);
    // The set_one side: the leftward solution crosses lambda there.
    return br.tag_lo == ShotClass::set_one ? br.lo : br.hi;
}

double C0Cache::operator()(double xi) {
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = memo_.find(xi);
        if (it != memo_.end()) return it->second;
    }
    const double v = inner_shoot_c0(xi, p_, opt_);
    std::lock_guard<std::mutex> lk(mu_);
    return memo_.emplace(xi, v).first->second;
}

std::size_t C0Cache::size() const {
    std::lock_guard<std::mutex> lk(mu_);
    return memo_.size();
}

std::vector<double> sample_c0(C0Cache& cache, const std::vector<double>& xi) {
    std::vector<double> out(xi.size());
    const long n = static_cast<long>(xi.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = cache(xi[static_cast<std::size_t>(i)]);
    return out;
}

namespace {

// (m - poly) / y^delta and derivatives, with poly = c0 + c2 y^2.
double quotient(const Profile& m, double y, int order, double d, double c0, double c2) {
    const double f = m.eval(y, 0) - c0 - c2 * y * y;
    const double yd = std::pow(y, -d);
    if (order == 0) return f * yd;
    const double fp = m.eval(y, 1) - 2 * c2 * y;
    if (order == 1) return fp * yd - d * f * yd / y;
    const double fpp = m.eval(y, 2) - 2 * c2;
    return fpp * yd - 2 * d * fp * yd / y + d * (d + 1) * f * yd / (y * y);
}

}  // namespace

double Mu2Solution::mu2(double y, int order) const { return quotient(m, y, order, params.d(), 0, 0); }

double Mu2Solution::mu3(double y, int order) const { return quotient(m, y, order, params.d(), params.lambda, 0); }

double Mu2Solution::mu4(double y, int order) const {
    if (y >= taylor_switch) return quotient(m, y, order, params.d(), params.lambda, params.lambda0);
    // lambda1 y^(4-d) + lambda2 y^(6-d) + lambda3 y^(8-d)
    const double d = params.d();
    double s = 0;
    const double c[3] = {lambda1, lambda2, lambda3};
    for (int k = 0; k < 3; ++k) {
        const double q = 4 + 2 * k - d;
        switch (order) {
            case 0: s += c[k] * std::pow(y, q); break;
            case 1: s += c[k] * q * std::pow(y, q - 1); break;
            default: s += c[k] * q * (q - 1) * std::pow(y, q - 2); break;
        }
    }
    return s;
}

Mu2Solution outer_shoot(const ModelParams& p, const Mu2Options& opt) {
    Mu2Solution sol;
    sol.params = p;
    sol.xi_m = find_xi_m(p);
    C0Cache cache(p, opt);

    auto cls = [&](double xi) {
        const double rho = cache(xi);
        for (double h = 40; h <= 640; h *= 2) {
            const auto c = classify_outer_shot(xi, rho, p, opt, h).tag;
            if (c != ShotClass::undecided) return c;
        }
        return ShotClass::undecided;
    };
    const auto br = bisect_shoot(std::function<ShotClass(double)>(cls), 0.05 * sol.xi_m, sol.xi_m * (1 - 1e-6),
                                 opt.bisect_tol);
    sol.xi_lo = br.lo;
    sol.xi_hi = br.hi;
    sol.xi_star = br.tag_lo == ShotClass::set_one ? br.lo : br.hi;
    sol.rho_star = cache(sol.xi_star);
    const auto ode = m_ode(p);

    IntegrateOptions o;
    o.rtol = opt.ode_tol;
    o.atol = 1e-14 * p.lambda;
    Trajectory left = normalized(integrate(ode, sol.xi_star, sol.rho_star, 0.0, opt.x_min, {}, o));
    {
        // The leftward solution from the neighbouring value of c0 (the other
        // side of the inner bracket) separates from this one as the x^-p_minus
        // type mode grows towards 0. Keep only the part where they agree.
        const double rho_other = std::max(std::nextafter(sol.rho_star, 2 * sol.rho_star), sol.rho_star + opt.bisect_tol);
        const Trajectory o2 = integrate(ode, sol.xi_star, rho_other, 0.0, opt.x_min, {}, o);
        const Profile other = Profile::from_trajectory(o2, NoLeft{}, PowerTail{}, {});
        std::size_t first = 0;
        for (std::size_t i = left.x.size(); i-- > 0;) {
            const double x = left.x[i];
            if (x < other.x_first() || std::abs(other(x) - left.y[i]) > 1e-12 * p.lambda) {
                first = i + 1;
                break;
            }
        }
        const double cut = std::max(opt.x_min, 1.5 * left.x[std::min(first, left.x.size() - 1)]);
        std::size_t start = first;
        while (start < left.x.size() && left.x[start] < cut) ++start;
        if (start > 0) {
            left.x.erase(left.x.begin(), left.x.begin() + static_cast<long>(start));
            left.y.erase(left.y.begin(), left.y.begin() + static_cast<long>(start));
            left.yp.erase(left.yp.begin(), left.yp.begin() + static_cast<long>(start));
            left.ypp.erase(left.ypp.begin(), left.ypp.begin() + static_cast<long>(start));
        }
        sol.x_left = left.x.front();
    }

    // Right part: the shots from both bracket ends agree until the growing
    // mode becomes visible; the grid stops before that point.
    o.atol = 1e-300;
    const Trajectory right = integrate(ode, sol.xi_star, sol.rho_star, 0.0, opt.y_max, {}, o);
    const double other_xi = sol.xi_star == br.lo ? br.hi : br.lo;
    const Trajectory other = integrate(ode, other_xi, cache(other_xi), 0.0, opt.y_max, {}, o);
    const Profile other_prof = Profile::from_trajectory(other, NoLeft{}, PowerTail{}, {});
    Trajectory r = normalized(right);
    std::size_t keep = r.x.size();
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        const double x = r.x[i];
        if (x <= std::max(sol.xi_star, other_xi)) continue;
        const bool separated = std::abs(other_prof(x) - r.y[i]) > 1e-6 * std::abs(r.y[i]);
        if (separated || !(r.y[i] > 1e-14 * p.lambda) || !(r.yp[i] < 0)) {
            keep = i;
            break;
        }
    }
    if (keep < r.x.size()) {
        // back off a little from the first visibly contaminated node
        const double cut = r.x[keep] - 0.5;
        while (keep > 1 && r.x[keep - 1] > cut) --keep;
        r.x.resize(keep);
        r.y.resize(keep);
        r.yp.resize(keep);
        r.ypp.resize(keep);
    }
    sol.y_cut = r.x.back();
    if (sol.y_cut < 5) {
        std::ostringstream os;
        os << "outer_shoot: decaying profile only resolved up to y = " << sol.y_cut;
        throw NumericError(os.str());
    }

    // Gaussian amplitude: m e^{y^2/4} y^{-5 eps} = C + C' y^-2 on the last decade.
    const double r_exp = -5 * p.eps();
    {
        std::vector<double> ys, vs;
        const double floor_val = 10 * r.y.back();
        for (std::size_t i = 0; i < r.x.size(); ++i) {
            if (r.y[i] > floor_val) continue;
            ys.push_back(r.x[i]);
            vs.push_back(r.y[i] * std::exp(0.25 * r.x[i] * r.x[i]) * std::pow(r.x[i], r_exp));
        }
        if (ys.size() >= 4) sol.gauss_amplitude = fit_powers(ys, vs, {0.0, -2.0}).coef[0];
    }
    const GaussianTail tail = pin_gaussian_tail(r.x.back(), r.y.back(), r.yp.back(), r_exp);

    // Stitch the two halves and fit the Taylor coefficients at 0.
    const Trajectory whole = join(left, r);
    const Profile grid_only = Profile::from_trajectory(whole, NoLeft{}, tail, ode);
    {
        std::vector<double> xs, v0, v1;
        const double a0 = std::max(0.02, sol.x_left);
        for (int i = 0; i <= 60; ++i) {
            const double x = a0 + (0.25 - a0) * i / 60.0;
            xs.push_back(x);
            v0.push_back((grid_only(x) - p.lambda) / (x * x));
        }
        sol.lambda0_fit = fit_powers(xs, v0, {0.0, 2.0, 4.0}).coef[0];
        xs.clear();
        const double a1 = std::max(0.05, sol.x_left);
        for (int i = 0; i <= 80; ++i) {
            const double x = a1 + (0.4 - a1) * i / 80.0;
            xs.push_back(x);
            v1.push_back((grid_only(x) - p.lambda - p.lambda0 * x * x) / (x * x * x * x));
        }
        const auto f = fit_powers(xs, v1, {0.0, 2.0, 4.0});
        sol.lambda1 = f.coef[0];
        sol.lambda2 = f.coef[1];
        sol.lambda3 = f.coef[2];
    }
    sol.taylor_switch = std::max(0.1, 2 * sol.x_left);
    TaylorLeft tl;
    tl.c = {p.lambda, 0.0, p.lambda0, 0.0, sol.lambda1};
    sol.m = Profile::from_trajectory(whole, tl, tail, ode);
    return sol;
}

}  // namespace rdfront
