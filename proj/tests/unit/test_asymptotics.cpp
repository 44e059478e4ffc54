#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "rdfront/asymptotics.hpp"
#include "rdfront/errors.hpp"
#include "rdfront/fit.hpp"

using namespace rdfront;

namespace {

const AsymptoticBundle& b4() {
    static const AsymptoticBundle b = assemble_bundle(4);
    return b;
}

const AsymptoticBundle& b5() {
    static const AsymptoticBundle b = assemble_bundle(5);
    return b;
}

}  // namespace

TEST_CASE("mu1 helpers match the direct formulas away from 0") {
    const double k = 1 / std::sqrt(M_PI);
    CHECK(mu1(2.0) == doctest::Approx(std::erf(1.0)).epsilon(1e-15));
    for (double y : {0.5, 0.99, 1.01, 1.5, 1.99, 2.01, 3.0}) {
        CAPTURE(y);
        CHECK(mu1_minus_linear(y) == doctest::Approx(mu1(y) - k * y).epsilon(1e-12));
        CHECK(mu1_minus_cubic(y) == doctest::Approx(mu1(y) - k * y + k / 12 * y * y * y).epsilon(1e-10));
    }
    // leading term of the remainder after the cubic is kappa y^5 / 160
    const double y = 1e-2;
    CHECK(mu1_minus_cubic(y) == doctest::Approx(k * std::pow(y, 5) / 160).epsilon(1e-4));
}

TEST_CASE("mu1(y)/y decreases strictly") {
    double prev = mu1(1e-4) / 1e-4;
    for (int i = 1; i <= 4000; ++i) {
        const double y = 1e-4 + 0.005 * i;
        const double r = mu1(y) / y;
        REQUIRE(r < prev);
        prev = r;
    }
}

TEST_CASE("v_inf is even, finite at 0 and tends to 1 far out") {
    const auto& b = b4();
    const double t = 1e4;
    const VTerms at0 = v_terms(0, t, b);
    CHECK(std::isfinite(at0.total()));
    CHECK(at0.mu1 == 0);
    for (double x : {0.1, 3.0, 50.0, 400.0}) CHECK(v_infinity(x, t, b) == v_infinity(-x, t, b));
    // far out only the power-law remainders of the reactive profiles are left
    const double far1 = std::abs(v_infinity(40 * std::sqrt(t), t, b) - 1);
    const double far2 = std::abs(v_infinity(400 * std::sqrt(t), t, b) - 1);
    CHECK(far1 < 1e-5);
    CHECK(far2 < 0.1 * far1);
    CHECK_THROWS_AS(v_infinity(1, 0.5, b), DomainError);
}

TEST_CASE("v_inf has no jumps at the evaluation seams") {
    const auto& b = b4();
    std::vector<double> z_seams{b.eta.profile.x_first(), b.eta.profile.x_last(), b.phi2.h.x_first(),
                                b.phi2.h.x_last()};
    std::vector<double> y_seams{b.mu2.taylor_switch, b.mu2.x_left, b.mu2.y_cut};
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> logt(2, 5);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        const double t = std::pow(10.0, logt(rng));
        const bool on_z = i % 2 == 0;
        const auto& seams = on_z ? z_seams : y_seams;
        const double s = seams[static_cast<std::size_t>(i / 2) % seams.size()];
        if (!(s > 0)) continue;
        const double x = on_z ? s * std::pow(t, b.params.a()) : s * std::sqrt(t);
        worst = std::max(worst, std::abs(v_infinity(x * (1 + 1e-13), t, b) - v_infinity(x * (1 - 1e-13), t, b)));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("reactive front: value at 0, tail form and the ODE identity") {
    const auto& b = b4();
    CHECK(front_reactive(0, b) == doctest::Approx(b.eta.eta2).epsilon(1e-10));
    CHECK(front_reactive(-3, b) == front_reactive(3, b));
    const double amp = 0.5 * std::pow(2 * b.params.lambda * b.params.kappa, 4);
    CHECK(amp == doctest::Approx(4.64).epsilon(2e-3));
    CHECK(front_reactive(20, b) * std::pow(20, 4) == doctest::Approx(amp).epsilon(0.05));
    for (int i = 0; i < 20; ++i) {
        const double z = 0.1 + 1.5 * i;
        CAPTURE(z);
        CHECK(front_reactive_identity_gap(z, b) < 1e-6 * std::max(1e-3, front_reactive(z, b)));
    }
}

TEST_CASE("diffusive front: small-y form, y = 0 rejected") {
    const auto& b = b4();
    CHECK_THROWS_AS(front_diffusive(0, b), DomainError);
    const double amp = 0.5 * std::pow(2 * b.params.lambda * b.params.kappa, 4);
    const double y = 1e-3;
    CHECK(front_diffusive(y, b) * std::pow(y, 4) == doctest::Approx(amp).epsilon(1e-2));
    CHECK(front_diffusive(-0.5, b) == front_diffusive(0.5, b));
}

TEST_CASE("both fronts share the matching power law") {
    const auto& b = b4();
    const auto r = front_report("reactive", b);
    const auto d = front_report("diffusive", b);
    CHECK(r.exponent == doctest::Approx(r.expected_exponent).epsilon(0.05));
    CHECK(d.exponent == doctest::Approx(d.expected_exponent).epsilon(0.01));
    CHECK(d.amplitude == doctest::Approx(d.expected_amplitude).epsilon(0.05));
    CHECK_THROWS_AS(front_report("outer", b), ConfigError);
}

TEST_CASE("matching gap shrinks monotonically in t at y = 1") {
    const auto& b = b4();
    double prev = matching_gap(1, 1e2, b);
    for (double t : {1e3, 1e4, 1e5, 1e6}) {
        const double g = matching_gap(1, t, b);
        CHECK(g < prev);
        prev = g;
    }
    // last decade: decay like t^(gamma (delta - delta'))
    const double rate = std::log10(matching_gap(1, 1e6, b) / matching_gap(1, 1e5, b));
    CHECK(rate == doctest::Approx(b.params.g() * (b.params.d() - b.params.delta_prime)).epsilon(0.2));
}

TEST_CASE("inhomogeneous term is finite and continuous on (0, 20 sqrt(t))") {
    const auto& b = b4();
    const double t = 1e3, st = std::sqrt(t);
    double prev = eval_I(1e-3, t, b);
    for (int i = 1; i <= 2000; ++i) {
        const double x = 1e-3 + 20 * st * i / 2000.0;
        const double v = eval_I(x, t, b);
        REQUIRE(std::isfinite(v));
        prev = v;
    }
    CHECK(std::isfinite(prev));
    CHECK(eval_I(-7, t, b) == eval_I(7, t, b));
    CHECK_THROWS_AS(eval_I(0, t, b), DomainError);
}

TEST_CASE("inhomogeneous norm decays with the predicted slope for n = 4") {
    const auto& b = b4();
    std::vector<double> ts{1e2, 1e3, 1e4, 1e5}, ns;
    for (double t : ts) {
        const auto r = inhomo_norm(t, b);
        CHECK(r.value > 0);
        ns.push_back(r.value);
    }
    const auto s = loglog_slope(ts, ns);
    CHECK(s.slope == doctest::Approx(-13.0 / 9).epsilon(0.1 / (13.0 / 9)));
}

TEST_CASE("potential scan: odd n stays nonnegative, 2u + phi positive") {
    for (double t : {1e2, 1e3}) {
        const auto s5 = potential_scan(t, b5());
        CHECK(s5.min_value >= 0);
        CHECK(s5.min_two_u_phi >= 0);
        const auto s4 = potential_scan(t, b4());
        CHECK(s4.min_two_u_phi >= 0);
        CHECK(std::abs(s4.min_value) < 1e-5);
    }
}
