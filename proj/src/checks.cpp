#include "rdfront/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rdfront/errors.hpp"
#include "rdfront/fit.hpp"
#include "rdfront/mu2.hpp"
#include "rdfront/phi2.hpp"

namespace rdfront {

namespace {

Metric below(const std::string& name, double value, double limit) {
    char b[32];
    std::snprintf(b, sizeof b, "< %g", limit);
    return {name, value, b, value < limit};
}

Metric at_least(const std::string& name, double value, double limit) {
    char b[32];
    std::snprintf(b, sizeof b, ">= %g", limit);
    return {name, value, b, value >= limit};
}

Metric within(const std::string& name, double value, double target, double tol) {
    char b[48];
    std::snprintf(b, sizeof b, "%.6g +- %g", target, tol);
    return {name, value, b, std::abs(value - target) <= tol};
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double fixture_value(const nlohmann::json& fx, int n, const char* key) {
    return std::stod(fx.at(std::to_string(n)).at(key).get<std::string>());
}

double eta_residual(const EtaSolution& s, const std::vector<double>& at) {
    const auto rhs = eta_ode(s.params);
    double worst = 0;
    for (double z : at) {
        const double r = rhs(z, s.eval(z), s.eval(z, 1));
        // second derivative by differencing the interpolated slope
        const double h = 1e-4;
        const double fd = (s.eval(z + h, 1) - s.eval(z - h, 1)) / (2 * h);
        worst = std::max(worst, std::abs(fd - r) / std::max(1.0, std::abs(r)));
    }
    return worst;
}

}  // namespace

bool CriterionResult::pass() const {
    return !metrics.empty() && std::all_of(metrics.begin(), metrics.end(), [](const Metric& m) { return m.pass; });
}

std::string CriterionResult::line() const {
    std::string s = std::string(pass() ? "PASS" : "FAIL") + " " + std::to_string(id) + " " + title + ":";
    for (std::size_t i = 0; i < metrics.size(); ++i) {
        char b[64];
        std::snprintf(b, sizeof b, "%.6g", metrics[i].value);
        s += (i ? ", " : " ") + metrics[i].name + "=" + b + " (" + metrics[i].bound + (metrics[i].pass ? "" : ", failed") + ")";
    }
    return s;
}

Metric runtime_metric(double seconds, double limit) {
    if (std::isnan(seconds)) return {"runtime_s", seconds, "not timed, cached", true};
    return below("runtime_s", seconds, limit);
}

CriterionResult check_constants(const ModelParams& p, const nlohmann::json& fx) {
    CriterionResult r;
    r.id = 1;
    r.title = "closed-form constants (n=" + std::to_string(p.n) + ")";
    if (p.n == 4) {
        const bool exact = p.gamma == Rational(1, 9) && p.epsilon == Rational(1, 3) && p.alpha == Rational(7, 18) &&
                           p.delta == Rational(2);
        r.metrics.push_back({"exact_exponents", exact ? 1.0 : 0.0, "gamma=1/9 eps=1/3 alpha=7/18 delta=2", exact});
    }
    double worst = 0;
    for (const char* key : {"lambda", "delta_prime", "p_plus", "p_minus", "xi0", "lambda0"}) {
        const double ref = fixture_value(fx, p.n, key);
        const std::string k = key;
        const double got = k == "lambda"        ? p.lambda
                           : k == "delta_prime" ? p.delta_prime
                           : k == "p_plus"      ? p.p_plus
                           : k == "p_minus"     ? p.p_minus
                           : k == "xi0"         ? p.xi0
                                                : p.lambda0;
        worst = std::max(worst, rel(got, ref));
    }
    r.metrics.push_back(below("max_rel_err_vs_fixture", worst, 1e-12));
    r.metrics.push_back(below("lambda0_vs_lambda_over_18", rel(p.lambda0, p.lambda / 18), 1e-12));
    return r;
}

CriterionResult check_eta(const EtaSolution& s, double seconds) {
    const auto& p = s.params;
    CriterionResult r;
    r.id = 2;
    r.title = "reactive profile (n=" + std::to_string(p.n) + ")";
    r.seconds = seconds;
    int bad = 0;
    for (std::size_t i = 0; i < s.profile.x().size(); ++i)
        if (!(s.profile.f()[i] > 0) || !(s.profile.fp()[i] < 0)) ++bad;
    r.metrics.push_back({"sign_violations", static_cast<double>(bad), "== 0", bad == 0});
    r.metrics.push_back(below("tail_rel_err_z30", rel(s.eval(30) * std::pow(30.0, p.d()), p.lambda), 1e-2));
    std::vector<double> z, y;
    for (int i = 0; i <= 40; ++i) {
        z.push_back(0.2 * i / 40);
        y.push_back(s.eval(z.back()));
    }
    const double fitted = fit_powers(z, y, {0, 1, 2, 3, 4, 5}).coef[2];
    r.metrics.push_back(below("eta2_fit_rel_err", rel(fitted, 0.5 * std::pow(s.eta0, 2 * p.n)), 1e-4));
    r.metrics.push_back(below("ode_residual", eta_residual(s, {0.5, 1, 2, 5, 10, 20}), 1e-6));
    r.metrics.push_back(runtime_metric(seconds, 5));
    return r;
}

CriterionResult check_mu2(const Mu2Solution& s, double seconds) {
    const auto& p = s.params;
    CriterionResult r;
    r.id = 3;
    r.title = "diffusive correction (n=" + std::to_string(p.n) + ")";
    r.seconds = seconds;
    r.metrics.push_back(below("m_1e-3_minus_lambda_over_lambda", std::abs(s.m.eval(1e-3) - p.lambda) / p.lambda, 1e-3));
    r.metrics.push_back(below("lambda0_fit_rel_err", rel(s.lambda0_fit, p.lambda0), 1e-2));
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i <= 20; ++i) {
        const double yy = 6 + 0.1 * i;
        const double v = s.mu2(yy) * std::exp(0.25 * yy * yy) * std::pow(yy, 1 - 2 * p.eps());
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    r.metrics.push_back(below("gauss_const_spread_y6_8", lo > 0 ? (hi - lo) / hi : 1.0, 0.05));
    C0Cache cache(p, Mu2Options{});
    std::vector<double> xs;
    for (int i = 0; i < 20; ++i) xs.push_back(0.3 + (s.xi_m - 0.35) * i / 19.0);
    const auto c0 = sample_c0(cache, xs);
    int bad = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (!(c0[i] > p.lambda && c0[i] < c2_curve(xs[i], p))) ++bad;
    r.metrics.push_back({"c0_outside_lens", static_cast<double>(bad), "== 0 of 20", bad == 0});
    r.metrics.push_back(runtime_metric(seconds, 60));
    return r;
}

CriterionResult check_phi2(const Phi2Solution& s, const EtaSolution& eta, double seconds) {
    const auto& p = s.params;
    CriterionResult r;
    r.id = 4;
    r.title = "second reactive correction (n=" + std::to_string(p.n) + ")";
    r.seconds = seconds;
    r.metrics.push_back({"h_slope_at_0", s.eval(0, 1), "== 0", s.eval(0, 1) == 0});
    r.metrics.push_back(below("shoot_vs_vop", s.path_agreement, 1e-3));
    const HomogeneousPair pair = solve_h1_h2(p, eta, s.z_max);
    const double zw = wronskian_range(pair);
    double w = 0;
    for (double z : pair.h1.x())
        if (z <= zw) w = std::max(w, std::abs(wronskian(pair, z) - 1));
    r.metrics.push_back(below("wronskian_minus_1", w, 1e-6));
    r.metrics.push_back(below("tail_lambda0_rel_err", rel(s.eval(s.z_max) * std::pow(s.z_max, p.d() - 2), p.lambda0), 1e-2));
    r.metrics.push_back(within("tail_exponent", s.tail_exponent, -(p.delta_prime - 2), 0.05));
    r.metrics.push_back(runtime_metric(seconds, 30));
    return r;
}

InhomoSeries inhomo_series(const AsymptoticBundle& b, const std::vector<double>& ts, double rel_tol) {
    InhomoSeries s;
    s.n = b.params.n;
    s.t = ts;
    s.target = -(1 + 4 * b.params.g());
    std::vector<double> v;
    for (double t : ts) {
        s.norms.push_back(inhomo_norm(t, b, rel_tol));
        v.push_back(s.norms.back().value);
    }
    s.slope = loglog_slope(ts, v);
    return s;
}

Metric inhomo_slope_metric(const InhomoSeries& s) {
    return within("slope_n" + std::to_string(s.n), s.slope.slope, s.target, 0.1);
}

CriterionResult check_inhomo(const std::vector<InhomoSeries>& series, double seconds) {
    CriterionResult r;
    r.id = 5;
    r.title = "inhomogeneous-term decay";
    r.seconds = seconds;
    for (const auto& s : series) {
        r.metrics.push_back(inhomo_slope_metric(s));
    }
    r.metrics.push_back(runtime_metric(seconds, 300));
    return r;
}

PotentialSeries potential_series(const AsymptoticBundle& b, const std::vector<double>& ts) {
    PotentialSeries s;
    s.n = b.params.n;
    s.t = ts;
    for (double t : ts) s.scans.push_back(potential_scan(t, b));
    return s;
}

std::vector<Metric> potential_metrics(const PotentialSeries& s) {
    std::vector<Metric> out;
    if (s.scans.empty()) return out;
    const std::string tag = "_n" + std::to_string(s.n);
    const auto p = derive_params(s.n);
    if (s.n % 2 == 1) {
        double mn = 1e300;
        for (const auto& sc : s.scans) mn = std::min(mn, sc.min_value);
        out.push_back(at_least("min_V" + tag, mn, 0));
    } else {
        const double level = std::abs(s.scans.front().min_value);
        const double rate = p.g() * (s.n - 1) * (p.delta_prime + 1);
        // worst ratio of min V to its allowed floor; must stay >= -1
        double worst = 0;
        for (std::size_t i = 0; i < s.scans.size(); ++i) {
            const double floor_i = 10 * level * std::pow(s.t[i] / s.t.front(), -rate);
            if (floor_i > 0) worst = std::min(worst, s.scans[i].min_value / floor_i);
            else if (s.scans[i].min_value < 0) worst = -1e300;
        }
        out.push_back(at_least("min_V_over_envelope" + tag, worst, -1));
    }
    return out;
}

CriterionResult check_potential(const std::vector<PotentialSeries>& series, double seconds) {
    CriterionResult r;
    r.id = 6;
    r.title = "potential sign";
    r.seconds = seconds;
    for (const auto& s : series)
        for (auto& m : potential_metrics(s)) r.metrics.push_back(std::move(m));
    r.metrics.push_back(runtime_metric(seconds, 60));
    return r;
}

std::vector<Metric> pde_metrics(const ConvergenceReport& r, const AsymptoticBundle& b, const std::string& label) {
    std::vector<Metric> out;
    const auto& p = b.params;
    if (r.aborted || r.checkpoints.empty()) {
        out.push_back({"aborted_" + label, 1, "run completes", false});
        return out;
    }
    char bound[48];
    const double limit = -4 * p.g() + 0.15;
    std::snprintf(bound, sizeof bound, "<= %.6g", limit);
    out.push_back({"sup_slope_" + label, r.sup_slope.slope, bound, r.sup_slope.slope <= limit});
    const auto& last = r.checkpoints.back();
    const double ratio = last.front_at_0 * std::pow(last.t, 2 * p.n * p.g()) / b.eta.eta2;
    out.push_back(within("F0_scaled_over_eta2_" + label, ratio, 1, 0.02));
    out.push_back(below("evenness_" + label, r.max_evenness, 1e-10));
    return out;
}

Metric heat_order_metric(const HeatConvergence& h) {
    double worst = 0;
    for (double o : h.order) worst = std::max(worst, std::abs(o - 2));
    return {"heat_order_dev", worst, "|order - 2| < 0.2", !h.order.empty() && worst < 0.2};
}

CriterionResult check_pde(const ConvergenceReport& plain, const ConvergenceReport& perturbed, const HeatConvergence& heat,
                          const AsymptoticBundle& b, double seconds) {
    CriterionResult r;
    r.id = 7;
    r.title = "PDE convergence (n=" + std::to_string(b.params.n) + ")";
    r.seconds = seconds;
    for (auto& m : pde_metrics(plain, b, "plain")) r.metrics.push_back(std::move(m));
    for (auto& m : pde_metrics(perturbed, b, "perturbed")) r.metrics.push_back(std::move(m));
    r.metrics.push_back(heat_order_metric(heat));
    r.metrics.push_back(runtime_metric(seconds, 900));
    return r;
}

CriterionResult check_matching(const AsymptoticBundle& b, double seconds) {
    CriterionResult r;
    r.id = 8;
    r.title = "two-scale matching (n=" + std::to_string(b.params.n) + ")";
    r.seconds = seconds;
    double prev = matching_gap(1, 100, b);
    const double first = prev;
    int rises = 0;
    for (int k = 1; k <= 12; ++k) {
        const double g = matching_gap(1, std::pow(10.0, 2 + k / 4.0), b);
        if (!(g < prev)) ++rises;
        prev = g;
    }
    r.metrics.push_back({"non_decreasing_steps", static_cast<double>(rises), "== 0 over t=1e2..1e5", rises == 0});
    r.metrics.push_back(below("gap_ratio_1e5_over_1e2", prev / first, 1));
    r.metrics.push_back(runtime_metric(seconds, 1));
    return r;
}

}  // namespace rdfront
