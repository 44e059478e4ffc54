#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "rdfront/errors.hpp"
#include "rdfront/eta.hpp"
#include "rdfront/fit.hpp"
#include "rdfront/mu2.hpp"
#include "rdfront/phi2.hpp"

using namespace rdfront;

namespace {

const ModelParams& p4() {
    static const ModelParams p = derive_params(4);
    return p;
}

const EtaSolution& eta4() {
    static const EtaSolution s = solve_eta(p4());
    return s;
}

const Mu2Solution& mu4sol() {
    static const Mu2Solution s = outer_shoot(p4());
    return s;
}

const Phi2Solution& h4() {
    static const Phi2Solution s = solve_h(p4(), eta4());
    return s;
}

const HomogeneousPair& pair4() {
    static const HomogeneousPair s = solve_h1_h2(p4(), eta4(), eta4().z_max);
    return s;
}

double ipow(double b, int e) {
    double r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

}  // namespace

TEST_CASE("eta shots: small rho falls through zero, large rho turns up") {
    const auto& p = p4();
    CHECK(classify_eta_shot(1e-3, p, 120, 1e-10).tag == ShotClass::set_one);
    const double big = 2 * std::pow(p.kappa, 1.0 / (2 * p.n + 1));
    CHECK(classify_eta_shot(big * 1.01, p, 120, 1e-10).tag == ShotClass::set_two);
}

TEST_CASE("eta: final bracket classifies to opposite sides") {
    const auto& s = eta4();
    auto decided = [&](double rho) {
        for (double h = 4 * s.z_max; h <= 64 * s.z_max; h *= 2) {
            const auto c = classify_eta_shot(rho, p4(), h, EtaOptions{}.ode_tol).tag;
            if (c != ShotClass::undecided) return c;
        }
        return ShotClass::undecided;
    };
    CHECK(decided(s.bracket_lo) == ShotClass::set_one);
    CHECK(decided(s.bracket_hi) == ShotClass::set_two);
}

TEST_CASE("eta(0) agrees with the high-precision shooting fixture") {
    std::ifstream in(std::string(FIXTURE_DIR) + "/eta_fixtures.json");
    REQUIRE(in.good());
    const auto fx = nlohmann::json::parse(in);
    for (int n : {4, 5, 6}) {
        CAPTURE(n);
        const auto& e = fx.at(std::to_string(n));
        const double lo = std::stod(e.at("eta0_lo").get<std::string>());
        const double hi = std::stod(e.at("eta0_hi").get<std::string>());
        const EtaSolution s = n == 4 ? eta4() : solve_eta(derive_params(n));
        CHECK(std::abs(s.eta0 - 0.5 * (lo + hi)) < 1e-12 * s.eta0);
    }
}

TEST_CASE("eta tail matches lambda z^-delta within 1% at z_max") {
    const auto& s = eta4();
    const auto& p = p4();
    CHECK(s.z_max == doctest::Approx(30));
    const double rel = std::abs(s.eval(s.z_max) * std::pow(s.z_max, p.d()) - p.lambda) / p.lambda;
    CHECK(rel < 1e-2);
}

TEST_CASE("eta is positive and decreasing at every node") {
    const auto& s = eta4();
    for (std::size_t i = 0; i < s.profile.x().size(); ++i) {
        CHECK(s.profile.f()[i] > 0);
        CHECK(s.profile.fp()[i] < 0);
    }
}

TEST_CASE("eta Taylor coefficients") {
    const auto& p = p4();
    const auto [a, b] = eta_taylor(p, 0);
    CHECK(a == 0);
    CHECK(b == 0);
    const auto& s = eta4();
    CHECK(s.eta2 == doctest::Approx(0.5 * ipow(s.eta0, 8)).epsilon(1e-15));
    CHECK((s.eta4 > 0) == (p.kappa * p.kappa > ipow(s.eta0, 9)));
    std::vector<double> z, y;
    for (int i = 0; i <= 40; ++i) {
        z.push_back(0.2 * i / 40);
        y.push_back(s.eval(z.back()));
    }
    const auto fit = fit_powers(z, y, {0, 1, 2, 3, 4, 5});
    CHECK(std::abs(fit.coef[2] - s.eta2) < 1e-4 * s.eta2);
}

TEST_CASE("eta residual and tail slope") {
    const auto& s = eta4();
    const auto rhs = eta_ode(p4());
    for (double z : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) {
        CAPTURE(z);
        const double lhs = s.eval(z, 2);
        const double r = rhs(z, s.eval(z), s.eval(z, 1));
        CHECK(std::abs(lhs - r) < 1e-6 * std::max(1.0, std::abs(r)));
    }
    std::vector<double> zs, ys;
    for (std::size_t i = 0; i < s.profile.x().size(); ++i)
        if (s.profile.x()[i] >= 0.5 * s.z_max) {
            zs.push_back(s.profile.x()[i]);
            ys.push_back(s.profile.f()[i]);
        }
    CHECK(std::abs(loglog_slope(zs, ys).slope + p4().d()) < 0.02);
}

TEST_CASE("eta: a larger starting value stays above a smaller one") {
    const auto& s = eta4();
    IntegrateOptions o;
    o.rtol = 1e-10;
    o.atol = 1e-16;
    const auto rhs = eta_ode(p4());
    const auto hi = integrate(rhs, 0, s.eta0 * (1 + 1e-10), -p4().kappa, 20, {}, o);
    const auto lo = integrate(rhs, 0, s.eta0 * (1 - 1e-10), -p4().kappa, 20, {}, o);
    const Profile upper = Profile::from_trajectory(hi, NoLeft{}, PowerTail{}, rhs);
    for (std::size_t i = 1; i < lo.x.size(); ++i) {
        if (lo.y[i] <= 0 || lo.x[i] > hi.x_end) break;
        CHECK(upper.eval(lo.x[i]) > lo.y[i]);
    }
}

TEST_CASE("c2 curve: zero at xi0, lambda at the origin, maximum above lambda") {
    const auto& p = p4();
    CHECK(c2_curve(p.xi0, p) == doctest::Approx(0).epsilon(1e-12));
    CHECK(c2_curve(1e-6, p) == doctest::Approx(p.lambda).epsilon(1e-6));
    const double xm = find_xi_m(p);
    CHECK(xm > 0);
    CHECK(xm < p.xi0);
    CHECK(c2_curve(xm, p) > p.lambda);
    const double h = 1e-4;
    CHECK(std::abs(c2_curve(xm + h, p) - c2_curve(xm - h, p)) / (2 * h) < 1e-5);
    CHECK(xi_m_condition(0.9 * xm, p) * xi_m_condition(1.1 * xm, p) < 0);
    CHECK_THROWS_AS(c2_curve(1.01 * p.xi0, p), DomainError);
}

TEST_CASE("inner shots near the two edges of the lens") {
    const auto& p = p4();
    const Mu2Options opt;
    const double xi = 1.5;
    const double gap = c2_curve(xi, p) - p.lambda;
    CHECK(classify_inner_shot(xi, p.lambda + 1e-6 * gap, p, opt).tag == ShotClass::set_one);
    CHECK(classify_inner_shot(xi, c2_curve(xi, p) - 1e-6 * gap, p, opt).tag == ShotClass::set_two);
}

TEST_CASE("c0 lies strictly inside the lens and varies continuously") {
    const auto& p = p4();
    const auto& s = mu4sol();
    C0Cache cache(p, Mu2Options{});
    std::vector<double> xs;
    for (int i = 0; i < 20; ++i) xs.push_back(0.3 + (s.xi_m - 0.35) * i / 19.0);
    const auto c0 = sample_c0(cache, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        CAPTURE(xs[i]);
        CHECK(c0[i] > p.lambda);
        CHECK(c0[i] < c2_curve(xs[i], p));
    }
    for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
        const double jump = std::abs(c0[i + 1] - c0[i]);
        const double secant = std::abs(c0[i] - c0[i - 1]);
        CHECK(jump <= 10 * secant + 1e-12);
    }
}

TEST_CASE("mu2: curvature at the origin, tail constant, decay") {
    const auto& p = p4();
    const auto& s = mu4sol();
    CHECK(std::abs(s.lambda0_fit - p.lambda0) < 1e-2 * p.lambda0);
    CHECK(std::abs(s.m.eval(1e-3) - p.lambda) < 1e-3 * p.lambda);
    double lo = 1e300, hi = -1e300;
    for (double y = 6; y <= 8; y += 0.1) {
        const double v = s.mu2(y) * std::exp(0.25 * y * y) * std::pow(y, 1 - 2 * p.eps());
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(lo > 0);
    CHECK((hi - lo) / hi < 0.05);
    CHECK(s.mu2(12) * std::pow(12.0, 2 * p.eps()) < 1e-10);
    const auto seams = s.m.seam_mismatch();
    CHECK(seams[0] < 1e-6);
    CHECK(seams[1] < 1e-4);
}

TEST_CASE("mu2 residual at mid-range") {
    const auto& s = mu4sol();
    const auto rhs = m_ode(p4());
    for (double y : {1.0, 2.0, 3.0, 4.0}) {
        CAPTURE(y);
        const double r = rhs(y, s.m.eval(y), s.m.eval(y, 1));
        // second derivative from the interpolant of the slope, not the ODE
        const double d = 1e-4;
        const double fd = (s.m.eval(y + d, 1) - s.m.eval(y - d, 1)) / (2 * d);
        CHECK(std::abs(fd - r) < 1e-6 * std::max(1.0, std::abs(r)));
    }
}

TEST_CASE("h1, h2: initial data, growth, Wronskian") {
    const auto& pr = pair4();
    CHECK(pr.h1.eval(0) == 1);
    CHECK(pr.h1.eval(0, 1) == 0);
    for (std::size_t i = 1; i < pr.h1.x().size(); ++i) {
        CHECK(pr.h1.f()[i] > 1);
        CHECK(pr.h1.f()[i] > pr.h1.f()[i - 1]);
    }
    CHECK(pr.h2.eval(1e-3) == doctest::Approx(1e-3).epsilon(1e-5));
    const double zw = wronskian_range(pr);
    CHECK(zw > 2);
    std::mt19937_64 rng(7);
    const auto& x = pr.h1.x();
    std::vector<double> pool;
    for (double v : x)
        if (v <= zw) pool.push_back(v);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (int k = 0; k < 20; ++k) {
        const double z = pool[pick(rng)];
        CAPTURE(z);
        CHECK(std::abs(wronskian(pr, z) - 1) < 1e-6);
    }
    for (double v : x) CHECK(std::abs(pr.h2_ode.eval(v) - pr.h2.eval(v)) <= 1e-9 * std::abs(pr.h2.eval(v)) + 1e-15);
}

TEST_CASE("h2 / h1 approaches d with the predicted correction") {
    const auto& pr = pair4();
    const auto& p = p4();
    double prev = 1e300;
    for (double z : {8.0, 12.0, 16.0, 20.0}) {
        CAPTURE(z);
        const double ratio = pr.h2.eval(z) / pr.h1.eval(z);
        const double rest = pr.d - ratio;
        const double predicted = pr.d2 * std::pow(z, 1 - 2 * p.p_plus);
        const double rel = std::abs(rest - predicted) / rest;
        CHECK(rel < prev);
        prev = rel;
    }
    CHECK(prev < 0.1);
}

TEST_CASE("particular solution: O(z^2) at the origin, forcing value, residual") {
    const auto& p = p4();
    const auto& e = eta4();
    const Profile hp = particular_solution(pair4(), p, e);
    CHECK(hp.eval(0) == 0);
    CHECK(hp.eval(0, 1) == 0);
    CHECK(h_forcing(p, e, 0) == doctest::Approx(-p.g() * e.eta0).epsilon(1e-14));
    const auto rhs = h_ode(p, e, true);
    for (double z : {1.0, 2.0, 4.0, 8.0}) {
        CAPTURE(z);
        const double d = 1e-4;
        const double fd = (hp.eval(z + d, 1) - hp.eval(z - d, 1)) / (2 * d);
        const double r = rhs(z, hp.eval(z), hp.eval(z, 1));
        CHECK(std::abs(fd - r) < 1e-6 * std::max(1.0, std::abs(r)));
    }
}

TEST_CASE("h_inf extraction on synthetic input") {
    const auto& p = p4();
    const auto& pr = pair4();
    auto synth = [&](double c) {
        const auto& x = pr.h1.x();
        std::vector<double> f, fp, fpp;
        const double e = 2 - p.d();
        for (double z : x) {
            f.push_back(c * pr.h1.eval(z) + p.lambda0 * std::pow(z, e));
            fp.push_back(c * pr.h1.eval(z, 1) + (e != 0 ? p.lambda0 * e * std::pow(z, e - 1) : 0));
            fpp.push_back(0);
        }
        return Profile(x, f, fp, fpp, NoLeft{}, PowerTail{}, nullptr);
    };
    CHECK(extract_h_infinity(synth(3), pr, p).value == doctest::Approx(3).epsilon(1e-10));
    CHECK(std::abs(extract_h_infinity(synth(0), pr, p).value) < 1e-10);
    const Profile hp = particular_solution(pr, p, eta4());
    const auto hi = extract_h_infinity(hp, pr, p);
    CHECK(std::isfinite(hi.value));
    CHECK(hi.residual < 1e-4 * std::abs(hi.value));
}

TEST_CASE("h: shooting matches variation of parameters, tail, Taylor") {
    const auto& p = p4();
    const auto& s = h4();
    CHECK(s.eval(0, 1) == 0);
    CHECK(s.path_agreement < 1e-3);
    CHECK(std::abs(s.linear_coeff) < 1e-4 * std::abs(s.h2));
    CHECK(std::abs(s.eval(s.z_max) * std::pow(s.z_max, p.d() - 2) - p.lambda0) < 1e-2 * p.lambda0);
    CHECK(std::abs(s.tail_exponent + (p.delta_prime - 2)) < 0.05);
    CHECK(s.h_inf == doctest::Approx(-s.h0).epsilon(1e-6));
    CHECK(std::abs(s.phi2(4 * s.z_max)) < std::abs(s.phi2(s.z_max)));
    double bound = 0;
    for (double z = 0; z <= 200; z += 0.5) bound = std::max(bound, std::abs(s.phi2(z)));
    CHECK(bound < 1);
}
