#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rdfront/errors.hpp"
#include "rdfront/fit.hpp"
#include "rdfront/ode.hpp"
#include "rdfront/profile.hpp"
#include "rdfront/quadrature.hpp"
#include "rdfront/shooting.hpp"

using namespace rdfront;

TEST_CASE("linear solution is reproduced exactly") {
    auto tr = integrate([](double, double, double) { return 0.0; }, 0, 1, -1, 2);
    CHECK(tr.reason == Termination::reached_end);
    CHECK(tr.x_end == 2.0);
    CHECK(tr.y_end == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("exponential growth reaches e at x = 1") {
    IntegrateOptions o;
    o.rtol = 1e-12;
    auto tr = integrate([](double, double y, double) { return y; }, 0, 1, 1, 1, {}, o);
    CHECK(std::abs(tr.y_end - std::numbers::e) < 1e-11);
}

TEST_CASE("error falls with tolerance at roughly fifth order") {
    double prev = 0;
    for (double tol : {1e-6, 1e-8, 1e-10}) {
        IntegrateOptions o;
        o.rtol = tol;
        o.atol = tol;
        o.record = false;
        auto tr = integrate([](double, double y, double) { return y; }, 0, 1, 1, 5, {}, o);
        const double err = std::abs(tr.y_end - std::exp(5.0));
        if (prev > 0) CHECK(err < prev);
        CHECK(err < 50 * tol * std::exp(5.0));
        prev = err;
    }
}

TEST_CASE("integration runs leftward as well") {
    auto tr = integrate([](double, double y, double) { return y; }, 1, std::exp(1.0), std::exp(1.0), 0);
    CHECK(std::abs(tr.y_end - 1) < 1e-9);
    CHECK(tr.x.front() > tr.x.back());
}

TEST_CASE("event location on straight-line crossings") {
    for (double root : {0.3, 1.0, 1.77}) {
        CAPTURE(root);
        IntegrateOptions o;
        o.rtol = 1e-10;
        std::vector<Event> ev{{"zero", [](double, double y, double) { return y; }, -1}};
        auto tr = integrate([](double, double, double) { return 0.0; }, 0, root, -1, 5, ev, o);
        CHECK(tr.reason == Termination::event);
        CHECK(tr.event_index == 0);
        CHECK(std::abs(tr.x_end - root) <= 1e-10);
    }
}

TEST_CASE("overflow guard reports blow-up") {
    // y'' = 2 y^3 has y = 1/(1-x), singular at x = 1
    auto tr = integrate([](double, double y, double) { return 2 * y * y * y; }, 0, 1, 1, 2);
    CHECK((tr.reason == Termination::blow_up || tr.reason == Termination::step_underflow));
    CHECK(tr.x_end < 1.0);
}

TEST_CASE("densified nodes interpolate to the tolerance") {
    IntegrateOptions o;
    o.rtol = 1e-10;
    o.atol = 1e-12;
    SecondOrderRhs rhs = [](double, double y, double) { return -y; };
    auto tr = integrate(rhs, 0, 0, 1, 10, {}, o);
    auto prof = Profile::from_trajectory(tr, NoLeft{}, PowerTail{}, rhs);
    double worst = 0, worst1 = 0;
    for (int i = 0; i < 997; ++i) {
        const double x = 10.0 * (i + 0.5) / 997;
        worst = std::max(worst, std::abs(prof(x) - std::sin(x)));
        worst1 = std::max(worst1, std::abs(prof.eval(x, 1) - std::cos(x)));
        CHECK(prof.eval(x, 2) == doctest::Approx(-prof(x)));
    }
    CHECK(worst < 1e-8);
    CHECK(worst1 < 1e-8);
}

TEST_CASE("bisection on a sign classifier") {
    auto cls = [](double r) { return r < 2 ? ShotClass::set_one : ShotClass::set_two; };
    auto res = bisect_shoot(std::function<ShotClass(double)>(cls), 0, 5, 1e-12);
    CHECK(std::abs(res.root - 2) < 1e-12);
    CHECK(res.hi - res.lo <= 1e-12);
    CHECK(res.history.size() > 30);
    CHECK_THROWS_AS(bisect_shoot(std::function<ShotClass(double)>(cls), 0, 1, 1e-12), BracketInvalid);
}

TEST_CASE("Gauss-Kronrod quadrature") {
    CHECK(quad([](double x) { return x * x; }, 0, 1).value == doctest::Approx(1.0 / 3).epsilon(1e-14));
    auto g = quad_to_infinity([](double x) { return std::exp(-x * x / 4); }, 0, 4,
                              {DecayModel::gaussian, 0}, {1e-12, 0, 4000});
    CHECK(std::abs(g.value - std::sqrt(std::numbers::pi)) < 1e-11);
    auto p = quad_to_infinity([](double x) { return 1.0 / ((1 + x) * (1 + x) * (1 + x)); }, 0, 4,
                              {DecayModel::power, 3}, {1e-10, 0, 4000});
    CHECK(p.value == doctest::Approx(0.5).epsilon(1e-8));
    CHECK_THROWS_AS(quad([](double x) { return 1 / std::sqrt(std::abs(x - 0.3)) * std::sin(1 / (x - 0.3)); }, 0, 1,
                         {1e-14, 0, 20}),
                    QuadratureError);
}

TEST_CASE("profile tails join the grid continuously") {
    SecondOrderRhs rhs = [](double x, double, double) { return 6.0 / std::pow(x, 4) + 2.0 / std::pow(x, 3); };
    // f = 1/x^2 + 1/x on [1, 5]
    auto tr = integrate(rhs, 1, 2, -3, 5);
    const double xe = tr.x.back();
    auto tail = pin_power_tail(xe, tr.y.back(), tr.yp.back(), 1.0, 1.0, 2.0);
    CHECK(tail.q2 == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(tail.c2 == doctest::Approx(1.0).epsilon(1e-6));
    auto prof = Profile::from_trajectory(tr, NoLeft{}, tail, rhs);
    auto seam = prof.seam_mismatch();
    CHECK(seam[0] < 1e-14);
    CHECK(seam[1] < 1e-12);
    CHECK(prof(50.0) == doctest::Approx(1 / 2500.0 + 1 / 50.0).epsilon(1e-6));
    CHECK_THROWS_AS(prof(-1.0), DomainError);
    CHECK_THROWS_AS(prof(0.5), DomainError);
}

TEST_CASE("gaussian tail pinning recovers its own parameters") {
    GaussianTail g{2.5, 1.3, 0.7};
    const double x = 6;
    auto back = pin_gaussian_tail(x, eval_tail(g, x, 0), eval_tail(g, x, 1), 1.3);
    CHECK(back.amplitude == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(back.c1 == doctest::Approx(0.7).epsilon(1e-10));
}

TEST_CASE("constant profile") {
    std::vector<double> x{0, 1, 2}, f{1.5, 1.5, 1.5}, z{0, 0, 0};
    Profile p(x, f, z, z, NoLeft{}, PowerTail{1.5, 0, 0, 0}, {});
    for (double s : {0.0, 0.3, 1.7, 2.0, 40.0}) CHECK(p(s) == 1.5);
}

TEST_CASE("log-log slope fits") {
    std::vector<double> t, y, y2;
    for (double s : {1e2, 1e3, 1e4, 1e5}) {
        t.push_back(s);
        y.push_back(std::pow(s, -2));
        y2.push_back(3 * std::pow(s, -13.0 / 9));
    }
    CHECK(std::abs(loglog_slope(t, y, 4).slope + 2) < 1e-12);
    CHECK(std::abs(loglog_slope(t, y2, 4).slope + 13.0 / 9) < 1e-12);
    t.pop_back();
    y.pop_back();
    CHECK_THROWS_AS(loglog_slope(t, y, 4), ConfigError);
}
