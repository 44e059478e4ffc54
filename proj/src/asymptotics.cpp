#include "rdfront/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

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

// Scale factors for one time.
struct Scales {
    double sqrt_t, y_per_x, z_per_x;
    double tg, te, t3g;  // t^-gamma, t^-eps, t^-3gamma
};

Scales scales(double t, const ModelParams& p) {
    if (!(t >= 1)) throw DomainError("asymptotics: t must be >= 1");
    Scales s;
    s.sqrt_t = std::sqrt(t);
    s.y_per_x = 1 / s.sqrt_t;
    s.z_per_x = std::pow(t, -p.a());
    s.tg = std::pow(t, -p.g());
    s.te = std::pow(t, -p.eps());
    s.t3g = std::pow(t, -3 * p.g());
    return s;
}

// erf(y/2) - kappa y - [kappa3 y^3] by its Maclaurin series, terms from k0 on.
double mu1_series(double y, int k0) {
    const double x = 0.5 * y;
    const double x2 = x * x;
    double term = 2 / std::sqrt(std::numbers::pi) * x;  // k = 0
    for (int k = 1; k <= k0; ++k) term *= -x2 / k;
    double sum = 0;
    for (int k = k0; k < 60; ++k) {
        const double add = term / (2 * k + 1);
        sum += add;
        if (std::abs(add) <= 1e-17 * std::abs(sum)) break;
        term *= -x2 / (k + 1);
    }
    return sum;
}

}  // namespace

AsymptoticBundle assemble_bundle(int n) {
    AsymptoticBundle b;
    b.params = derive_params(n);
    b.eta = solve_eta(b.params);
    b.mu2 = outer_shoot(b.params);
    b.phi2 = solve_h(b.params, b.eta);
    check_bundle(b);
    return b;
}

void check_bundle(const AsymptoticBundle& b) {
    const int n = b.params.n;
    if (b.eta.params.n != n || b.mu2.params.n != n || b.phi2.params.n != n)
        throw ConfigError("bundle: profiles solved for different n");
    if (b.eta.profile.empty() || b.mu2.m.empty() || b.phi2.h.empty()) throw ConfigError("bundle: missing profile");
    if (mu1(0) != 0 || std::abs(mu1(40) - 1) > 1e-15) throw ConfigError("bundle: mu1 end values");
    if (!(b.eta.eta0 > 0)) throw ConfigError("bundle: eta(0) must be positive");
}

double mu1_minus_linear(double y) { return y < 1 ? mu1_series(y, 1) : mu1(y) - std::numbers::inv_sqrtpi * y; }

double mu1_minus_cubic(double y) {
    const double kappa = std::numbers::inv_sqrtpi;
    return y < 2 ? mu1_series(y, 2) : mu1(y) - kappa * y + kappa / 12 * y * y * y;
}

VTerms v_terms(double x, double t, const AsymptoticBundle& b) {
    const auto& p = b.params;
    const Scales s = scales(t, p);
    const double ax = std::abs(x);
    const double y = ax * s.y_per_x, z = ax * s.z_per_x;
    VTerms v;
    v.mu1 = mu1(y);
    v.reactive = s.tg * b.eta.eval(z);
    v.diffusive = s.te * b.mu2.mu4(y);
    v.second = s.t3g * b.phi2.eval(z);
    return v;
}

double v_infinity(double x, double t, const AsymptoticBundle& b) { return v_terms(x, t, b).total(); }

PhiJet phi_jet(double x, double t, const AsymptoticBundle& b) {
    if (!(x > 0)) throw DomainError("phi_jet: x must be positive");
    const auto& p = b.params;
    const Scales s = scales(t, p);
    const double y = x * s.y_per_x, z = x * s.z_per_x;
    const double g = p.g(), e = p.eps(), a = p.a();
    const double eta0 = b.eta.eval(z, 0), eta1 = b.eta.eval(z, 1), eta2 = b.eta.eval(z, 2);
    const double m0 = b.mu2.mu4(y, 0), m1 = b.mu2.mu4(y, 1), m2 = b.mu2.mu4(y, 2);
    const double h0 = b.phi2.eval(z, 0), h1 = b.phi2.eval(z, 1), h2 = b.phi2.eval(z, 2);
    const double zz = s.z_per_x * s.z_per_x;  // t^-2alpha
    PhiJet j;
    j.phi = s.tg * eta0 + s.te * m0 + s.t3g * h0;
    j.phi_t = -(s.tg * (g * eta0 + a * z * eta1) + s.te * (e * m0 + 0.5 * y * m1) + s.t3g * (3 * g * h0 + a * z * h1)) / t;
    j.phi_xx = s.tg * zz * eta2 + s.te * m2 / t + s.t3g * zz * h2;
    return j;
}

double front_reactive(double z, const AsymptoticBundle& b) {
    const double az = std::abs(z);
    const double e = b.eta.eval(az);
    return 0.5 * ipow(2 * b.params.kappa * az * e + e * e, b.params.n);
}

double front_reactive_identity_gap(double z, const AsymptoticBundle& b) {
    const double az = std::abs(z);
    const double h = 1e-5 * std::max(1.0, az);
    const double lo = std::max(0.0, az - h);
    const double d2 = (b.eta.eval(az + h, 1) - b.eta.eval(lo, 1)) / (az + h - lo);
    return std::abs(front_reactive(z, b) - 0.5 * d2);
}

double front_diffusive(double y, const AsymptoticBundle& b) {
    const double ay = std::abs(y);
    if (!(ay > 0)) throw DomainError("front_diffusive: y = 0 is excluded");
    return 0.5 * ipow(2 * mu1(ay) * b.mu2.mu2(ay), b.params.n);
}

FrontReport front_report(const std::string& scale, const AsymptoticBundle& b) {
    const auto& p = b.params;
    FrontReport r;
    r.scale = scale;
    r.expected_amplitude = 0.5 * ipow(2 * p.lambda * p.kappa, p.n);
    r.expected_exponent = -(p.d() + 2);
    std::vector<double> fx, fy;
    if (scale == "reactive") {
        for (int i = 0; i <= 200; ++i) {
            const double z = 0.25 * i;
            r.points.push_back(z);
            r.values.push_back(front_reactive(z, b));
            if (z >= 20) {
                fx.push_back(z);
                fy.push_back(r.values.back());
            }
        }
    } else if (scale == "diffusive") {
        for (int i = 0; i <= 200; ++i) {
            const double y = 0.01 * std::pow(1000.0, i / 200.0);
            r.points.push_back(y);
            r.values.push_back(front_diffusive(y, b));
            if (y <= 0.05) {
                fx.push_back(y);
                fy.push_back(r.values.back());
            }
        }
    } else {
        throw ConfigError("front_report: scale must be reactive or diffusive");
    }
    const auto sl = loglog_slope(fx, fy, 3);
    r.exponent = sl.slope;
    r.amplitude = std::exp(sl.intercept);
    return r;
}

double matching_gap(double y, double t, const AsymptoticBundle& b) {
    const auto& p = b.params;
    if (!(y > 0) || !(t >= 1)) throw DomainError("matching_gap: need y > 0 and t >= 1");
    return std::abs(std::pow(t, p.eps() - p.g()) * b.eta.eval(std::pow(t, p.g()) * y) - p.lambda * std::pow(y, -p.d()));
}

double eval_I(double x, double t, const AsymptoticBundle& b) {
    const double ax = std::abs(x);
    if (!(ax > 0)) throw DomainError("eval_I: x = 0 is excluded");
    const PhiJet j = phi_jet(ax, t, b);
    const double u = mu1(ax / std::sqrt(t));
    return -j.phi_t + j.phi_xx - ipow(2 * u * j.phi + j.phi * j.phi, b.params.n);
}

NormResult inhomo_norm(double t, const AsymptoticBundle& b, double rel_tol) {
    const auto& p = b.params;
    const double st = std::sqrt(t);
    const double xr = std::pow(t, -p.g());  // reactive length in units of sqrt(t)
    auto g = [&](double x) { return std::abs(eval_I(st * x, t, b)); };

    double peak = 0;
    for (int i = 0; i <= 400; ++i) peak = std::max(peak, g(1e-3 * xr * std::pow(1e6, i / 400.0)));
    if (!(peak > 0)) throw NumericError("inhomo_norm: integrand vanishes on the scan");
    // Far out the integrand is a pure power law (the z^(2 - delta') tail of the
    // second reactive correction), so it never drops to 1e-16 of the peak; past
    // x = 1024 the rest is added in closed form from the local exponent.
    double x_cut = 8;
    double remainder = 0;
    for (;; x_cut *= 2) {
        const double g1 = g(x_cut);
        if (g1 < 1e-16 * peak) break;
        if (x_cut >= 1024) {
            const double s = -std::log(g(2 * x_cut) / g1) / std::log(2.0);
            if (!(s > 1.2)) throw NumericError("inhomo_norm: integrand does not decay fast enough");
            remainder = g1 * x_cut / (s - 1);
            break;
        }
    }

    std::vector<double> br{0};
    for (double f : {1e-3, 1e-2, 0.1, 0.3, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) br.push_back(f * xr);
    for (double v : {0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 64.0, 128.0, 256.0,
                     512.0, 1024.0})
        br.push_back(v);
    br.push_back(x_cut);
    std::sort(br.begin(), br.end());
    br.erase(std::remove_if(br.begin(), br.end(), [&](double v) { return v > x_cut; }), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());

    const int pieces = static_cast<int>(br.size()) - 1;
    std::vector<QuadResult> part(static_cast<std::size_t>(pieces));
    QuadOptions q;
    q.rel_tol = rel_tol;
    q.abs_tol = 1e-15 * peak * xr;
    q.max_intervals = 20000;
    std::vector<std::string> failures(static_cast<std::size_t>(pieces));
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < pieces; ++k) {
        try {
            part[static_cast<std::size_t>(k)] = quad(g, br[static_cast<std::size_t>(k)], br[static_cast<std::size_t>(k) + 1], q);
        } catch (const std::exception& e) {
            failures[static_cast<std::size_t>(k)] = e.what();
        }
    }
    for (const auto& f : failures)
        if (!f.empty()) throw QuadratureError("inhomo_norm: " + f);
    NormResult out;
    for (const auto& r : part) {  // fixed order
        out.value += r.value;
        out.error += r.error;
    }
    out.value = 2 * (out.value + remainder);
    out.error = 2 * (out.error + 0.1 * remainder);
    out.x_cut = x_cut;
    return out;
}

PotentialScan potential_scan(double t, const AsymptoticBundle& b, std::size_t points) {
    const auto& p = b.params;
    const double lo = 1e-3 * std::pow(t, p.a());
    const double hi = 100 * std::sqrt(t);
    PotentialScan s;
    s.min_value = std::numeric_limits<double>::infinity();
    s.min_two_u_phi = std::numeric_limits<double>::infinity();
    auto visit = [&](double x) {
        const VTerms v = v_terms(x, t, b);
        const double u = v.mu1;
        const double phi = v.reactive + v.diffusive + v.second;
        const double val = 2 * p.n * ipow(2 * u * phi + phi * phi, p.n - 1) * (u + phi);
        if (val < s.min_value) {
            s.min_value = val;
            s.argmin = x;
        }
        s.min_two_u_phi = std::min(s.min_two_u_phi, 2 * u + phi);
        ++s.points;
    };
    visit(0);
    for (std::size_t i = 0; i < points; ++i)
        visit(lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(points - 1)));
    return s;
}

}  // namespace rdfront
