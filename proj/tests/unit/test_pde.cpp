#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "rdfront/errors.hpp"
#include "rdfront/kernels.hpp"
#include "rdfront/pde.hpp"

using namespace rdfront;

namespace {

const AsymptoticBundle& bundle() {
    static const AsymptoticBundle b = assemble_bundle(4);
    return b;
}

SimConfig short_run() {
    SimConfig c;
    c.tau = 100;
    c.t_end = 150;
    c.checkpoints = 6;
    return c;
}

std::vector<double> random_field(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1, 1);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

}  // namespace

TEST_CASE("config parser reads every key and rejects junk") {
    const auto c = parse_sim_config(
        "# run\nn = 5\ntau=50\nt_end = 2e3\nL=500\ndx=0.2\nsafety=0.5\nperturb_amp=1e-3\nperturb_width=4\ncheckpoints=10\n");
    CHECK(c.n == 5);
    CHECK(c.tau == 50);
    CHECK(c.t_end == 2000);
    CHECK(c.L == 500);
    CHECK(c.dx == 0.2);
    CHECK(c.safety == 0.5);
    CHECK(c.perturb_amp == 1e-3);
    CHECK(c.perturb_width == 4);
    CHECK(c.checkpoints == 10);
    CHECK_THROWS_AS(parse_sim_config("nn=4"), ConfigError);
    CHECK_THROWS_AS(parse_sim_config("n=4\nn=5"), ConfigError);
    CHECK_THROWS_AS(parse_sim_config("tau=1e2x"), ConfigError);
    CHECK_THROWS_AS(parse_sim_config("n=4.5"), ConfigError);
    CHECK_THROWS_AS(parse_sim_config("tau"), ConfigError);
}

TEST_CASE("config invariants") {
    const auto& p = bundle().params;
    const auto r = resolve_config(SimConfig{}, p);
    CHECK(r.L == doctest::Approx(1000));
    CHECK(r.dx == doctest::Approx(std::pow(100.0, 7.0 / 18) / 20));
    SimConfig c;
    c.L = 900;
    CHECK_THROWS_AS(resolve_config(c, p), ConfigError);
    c = SimConfig{};
    c.dx = 1;
    CHECK_THROWS_AS(resolve_config(c, p), ConfigError);
    c = SimConfig{};
    c.t_end = 50;
    CHECK_THROWS_AS(resolve_config(c, p), ConfigError);
    c = SimConfig{};
    c.n = 5;
    CHECK_THROWS_AS(resolve_config(c, p), ConfigError);
}

TEST_CASE("initial state: exact v_inf, bump amplitude, evenness") {
    const auto& b = bundle();
    SimConfig c = short_run();
    const auto s = init_state(c, b);
    CHECK(s.t == 100);
    CHECK(s.grid.x(0) == -s.grid.x(s.grid.size - 1));
    double worst = 0;
    for (std::size_t j = 0; j < s.grid.size; j += 7) worst = std::max(worst, std::abs(s.v[j] - v_infinity(s.grid.x(j), 100, b)));
    CHECK(worst == 0);
    CHECK(kernels::serial::evenness_error(s.v.data(), s.v.size()) == 0);

    c.perturb_amp = 1e-3;
    const auto p = init_state(c, b);
    double sup = 0;
    for (std::size_t j = 0; j < p.grid.size; ++j) sup = std::max(sup, std::abs(p.v[j] - s.v[j]));
    CHECK(sup == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(kernels::serial::evenness_error(p.v.data(), p.v.size()) == 0);

    c.custom_perturbation = {{-1, 0}, {0, 2e-3}, {1, 0}};
    CHECK(perturbation(c, 0.5) == doctest::Approx(1e-3));
    CHECK(perturbation(c, 3) == 0);
}

TEST_CASE("reaction vanishes where v = |u|") {
    kernels::Grid1D g{0.1, 201, 100};
    const double t = 4;
    std::vector<double> v(g.size), R(g.size);
    for (std::size_t j = 0; j < g.size; ++j) v[j] = std::abs(std::erf(g.x(j) / (2 * std::sqrt(t))));
    kernels::serial::reaction(g, v.data(), t, 4, R.data());
    for (double r : R) CHECK(r == 0);
}

TEST_CASE("serial and parallel kernels agree bit for bit") {
    kernels::Grid1D g{0.05, 4001, 2000};
    const auto v = random_field(g.size, 1);
    const auto w = random_field(g.size, 2);
    CHECK(kernels::serial::tree_sum(v.data(), v.size()) == kernels::parallel::tree_sum(v.data(), v.size()));
    CHECK(kernels::serial::max_abs_diff(v.data(), w.data(), v.size()) ==
          kernels::parallel::max_abs_diff(v.data(), w.data(), v.size()));
    CHECK(kernels::serial::l1_diff(g, v.data(), w.data()) == kernels::parallel::l1_diff(g, v.data(), w.data()));
    CHECK(kernels::serial::evenness_error(v.data(), v.size()) == kernels::parallel::evenness_error(v.data(), v.size()));
    CHECK(kernels::serial::max_reaction_slope(g, v.data(), 9, 4) == kernels::parallel::max_reaction_slope(g, v.data(), 9, 4));
    std::vector<double> a(g.size), c(g.size), ra(g.size), rc(g.size);
    kernels::serial::reaction(g, v.data(), 9, 4, a.data());
    kernels::parallel::reaction(g, v.data(), 9, 4, c.data());
    CHECK(a == c);
    kernels::serial::cn_rhs(g, v.data(), a.data(), 0.01, ra.data());
    kernels::parallel::cn_rhs(g, v.data(), a.data(), 0.01, rc.data());
    CHECK(ra == rc);
}

TEST_CASE("tree sum is accurate and Thomas solve inverts the operator") {
    std::vector<double> ones(100000, 0.1);
    CHECK(kernels::serial::tree_sum(ones.data(), ones.size()) == doctest::Approx(10000).epsilon(1e-13));
    CHECK(kernels::serial::tree_sum(ones.data(), 0) == 0);

    const std::size_t n = 50;
    const double d = 2.3, o = 0.6;
    kernels::ConstantTridiagonal T(n, d, o);
    const auto x = random_field(n, 3);
    std::vector<double> r(n);
    for (std::size_t j = 0; j < n; ++j) r[j] = d * x[j] - o * ((j > 0 ? x[j - 1] : 0) + (j + 1 < n ? x[j + 1] : 0));
    T.solve(r.data());
    for (std::size_t j = 0; j < n; ++j) CHECK(r[j] == doctest::Approx(x[j]).epsilon(1e-13));
    CHECK_THROWS_AS(kernels::ConstantTridiagonal(3, 0, 0), NumericError);
}

TEST_CASE("heat-only mode converges at second order") {
    const auto h = heat_convergence(0.2, 3);
    REQUIRE(h.order.size() == 2);
    for (double o : h.order) CHECK(o == doctest::Approx(2).epsilon(0.1));
    CHECK(h.err.back() < 1e-5);
}

TEST_CASE("one step keeps an even state even") {
    const auto& b = bundle();
    SimConfig c = short_run();
    c.perturb_amp = 1e-3;
    auto s = init_state(c, b);
    StepWorkspace ws;
    const double edge = v_infinity(s.grid.x(s.grid.size - 1), s.t + 0.01, b);
    step(s, 0.01, 4, true, {edge, edge}, ws);
    CHECK(kernels::serial::evenness_error(s.v.data(), s.v.size()) < 1e-12);
    CHECK(s.t == doctest::Approx(100.01));
    CHECK_THROWS_AS(step(s, 0, 4, true, {edge, edge}, ws), ConfigError);
}

TEST_CASE("non-finite values abort the step and leave the state alone") {
    PdeState s;
    s.grid = {0.1, 11, 5};
    s.v.assign(11, 1.0);
    s.v[5] = std::nan("");
    const auto before = s.v;
    StepWorkspace ws;
    CHECK_THROWS_AS(step(s, 0.001, 4, true, {1, 1}, ws), NumericError);
    CHECK(s.t == 0);
    CHECK(std::isnan(s.v[5]));
    CHECK(s.v[4] == before[4]);
}

TEST_CASE("short run: report fields and thread-independent results") {
    const auto& b = bundle();
    SimConfig c = short_run();
    const auto r = run(c, b);
    REQUIRE(r.checkpoints.size() == 6);
    CHECK_FALSE(r.aborted);
    CHECK(r.checkpoints.back().t == 150);
    double prev = c.tau;
    for (const auto& cp : r.checkpoints) {
        CHECK(cp.t > prev);
        prev = cp.t;
        CHECK(cp.sup_err >= 0);
        CHECK(cp.l1_err >= 0);
        CHECK(cp.evenness < 1e-10);
        CHECK(cp.front_peak >= cp.front_at_0);
        CHECK(cp.min_a > -1e-3);
    }
    CHECK(r.min_two_u_phi_tau > 0);

    c.use_parallel = false;
    const auto s = run(c, b);
    for (std::size_t i = 0; i < r.checkpoints.size(); ++i) {
        CHECK(s.checkpoints[i].sup_err == r.checkpoints[i].sup_err);
        CHECK(s.checkpoints[i].l1_err == r.checkpoints[i].l1_err);
    }
}

TEST_CASE("fit_decay on synthetic power laws") {
    std::vector<double> t, y2, y3;
    for (int k = 0; k <= 20; ++k) {
        const double tk = 100 * std::pow(100.0, k / 20.0);
        t.push_back(tk);
        y2.push_back(1 / (tk * tk));
        y3.push_back(3 * std::pow(tk, -13.0 / 9));
    }
    const auto f2 = fit_decay(t, y2);
    CHECK(f2.slope == doctest::Approx(-2).epsilon(1e-12));
    CHECK(f2.points == 11);
    CHECK(fit_decay(t, y3).slope == doctest::Approx(-13.0 / 9).epsilon(1e-12));
    CHECK_THROWS_AS(fit_decay(t, y2, 0.1), ConfigError);
}
