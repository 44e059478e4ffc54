#include <doctest.h>

#include <cmath>
#include <fstream>
#include <json.hpp>

#include "rdfront/errors.hpp"
#include "rdfront/params.hpp"

using namespace rdfront;

namespace {

nlohmann::json fixtures() {
    std::ifstream in(FIXTURE_DIR "/params_fixtures.json");
    REQUIRE(in.good());
    return nlohmann::json::parse(in);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("exact rational exponents for n = 4") {
    const auto p = derive_params(4);
    CHECK(p.gamma == Rational(1, 9));
    CHECK(p.epsilon == Rational(1, 3));
    CHECK(p.alpha == Rational(7, 18));
    CHECK(p.delta == Rational(2));
    CHECK(p.xi0_squared() == Rational(9));
    CHECK(p.xi0 == 3.0);
}

TEST_CASE("n = 6 switches the second decay exponent to 2 delta + 1") {
    const auto p = derive_params(6);
    CHECK(p.delta == Rational(8, 5));
    CHECK(p.delta_prime == doctest::Approx(21.0 / 5).epsilon(1e-15));
}

TEST_CASE("orders below 4 are rejected") {
    CHECK_THROWS_AS(derive_params(3), DomainError);
    CHECK_THROWS_AS(derive_params(2), DomainError);
    CHECK_NOTHROW(reactive_params(2));
}

TEST_CASE("constants match the 50-digit oracle for n = 4..20") {
    const auto fx = fixtures();
    for (int n = 4; n <= 20; ++n) {
        CAPTURE(n);
        const auto p = derive_params(n);
        const auto& e = fx.at(std::to_string(n));
        auto ref = [&](const char* k) { return std::stod(e.at(k).get<std::string>()); };
        CHECK(rel(p.lambda, ref("lambda")) < 1e-13);
        CHECK(rel(p.delta_prime, ref("delta_prime")) < 1e-13);
        CHECK(rel(p.p_plus, ref("p_plus")) < 1e-13);
        CHECK(rel(p.p_minus, ref("p_minus")) < 1e-13);
        CHECK(rel(p.xi0, ref("xi0")) < 1e-13);
        CHECK(rel(p.lambda0, ref("lambda0")) < 1e-13);
    }
}

TEST_CASE("parameter invariants hold for n = 4..20") {
    for (int n = 4; n <= 20; ++n) {
        CAPTURE(n);
        const auto p = derive_params(n);
        CHECK(Rational(0) < p.gamma);
        CHECK(p.gamma < p.epsilon);
        CHECK(Rational(4) * p.gamma < Rational(1, 2));
        CHECK(p.alpha + p.gamma == Rational(1, 2));
        CHECK(Rational(1) < p.delta);
        CHECK(p.delta <= Rational(2));
        CHECK(p.delta_prime > 3);
        CHECK(p.delta_prime <= (Rational(2) * p.delta + Rational(1)).value() + 1e-14);
        CHECK(p.lambda > 0);
        CHECK(p.lambda0 > 0);
        CHECK(p.p_plus > 0);
        CHECK(p.p_minus < 0);
        CHECK(p.p_plus + p.p_minus == doctest::Approx(1.0).epsilon(1e-14));
        const double dd1 = (p.delta * (p.delta + Rational(1))).value();
        CHECK(p.p_plus * p.p_minus == doctest::Approx(-n * dd1).epsilon(1e-13));
        CHECK(p.p_sing > 7);
        CHECK(-p.p_minus > p.delta_prime - 2);
        if (n >= 6) {
            const double sqrt_branch = 0.5 * (std::sqrt(4 * n * dd1 + 1) - 1);
            CHECK(sqrt_branch >= (Rational(2) * p.delta + Rational(1)).value());
        }
    }
}

TEST_CASE("lambda0 is lambda / 18 for n = 4") {
    const auto p = derive_params(4);
    CHECK(rel(p.lambda0, p.lambda / 18) < 1e-14);
}
