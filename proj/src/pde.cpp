#include "rdfront/pde.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "rdfront/errors.hpp"

namespace rdfront {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& text) {
    double v = 0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v))
        throw ConfigError("config: bad number for " + key + ": '" + text + "'");
    return v;
}

int parse_int(const std::string& key, const std::string& text) {
    const double v = parse_number(key, text);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("config: " + key + " must be an integer");
    return static_cast<int>(v);
}

double heat_kernel(double x, double t) { return std::exp(-x * x / (4 * t)) / std::sqrt(4 * std::numbers::pi * t); }

kernels::Grid1D make_grid(double L, double dx) {
    kernels::Grid1D g;
    g.dx = dx;
    g.center = static_cast<std::size_t>(std::ceil(L / dx - 1e-9));
    g.size = 2 * g.center + 1;
    return g;
}

void prepare(StepWorkspace& ws, std::size_t size, double dt, double dx) {
    if (ws.R.size() != size) {
        ws.R.assign(size, 0);
        ws.r.assign(size, 0);
        ws.dt = 0;
    }
    if (ws.dt != dt || ws.lhs.size() + 2 != size) {
        const double mu = 0.5 * dt / (dx * dx);
        ws.lhs = kernels::ConstantTridiagonal(size - 2, 1 + 2 * mu, mu);
        ws.dt = dt;
    }
}

// Evaluate v_inf on the grid, mirroring so the result is exactly even.
std::vector<double> v_inf_on_grid(const kernels::Grid1D& g, double t, const AsymptoticBundle& b) {
    std::vector<double> out(g.size);
    for (std::size_t j = g.center; j < g.size; ++j) {
        out[j] = v_infinity(g.x(j), t, b);
        out[2 * g.center - j] = out[j];
    }
    return out;
}

Checkpoint measure(const PdeState& s, const std::vector<double>& vi, int n, bool par) {
    const auto& g = s.grid;
    Checkpoint c;
    c.t = s.t;
    c.sup_err = par ? kernels::parallel::max_abs_diff(s.v.data(), vi.data(), g.size)
                    : kernels::serial::max_abs_diff(s.v.data(), vi.data(), g.size);
    c.l1_err = par ? kernels::parallel::l1_diff(g, s.v.data(), vi.data()) : kernels::serial::l1_diff(g, s.v.data(), vi.data());
    c.evenness = par ? kernels::parallel::evenness_error(s.v.data(), g.size) : kernels::serial::evenness_error(s.v.data(), g.size);
    c.boundary_dev = std::max(std::abs(s.v.front() - 1), std::abs(s.v.back() - 1));

    std::vector<double> F(g.size);
    if (par)
        kernels::parallel::reaction(g, s.v.data(), s.t, n, F.data());
    else
        kernels::serial::reaction(g, s.v.data(), s.t, n, F.data());
    for (double& f : F) f *= 0.5;
    c.front_at_0 = F[g.center];
    c.front_peak = -1;
    for (std::size_t j = g.center; j < g.size; ++j)
        if (F[j] > c.front_peak) {
            c.front_peak = F[j];
            c.front_peak_x = g.x(j);
        }
    c.front_half_width = g.x(g.size - 1);
    for (std::size_t j = g.center + 1; j < g.size; ++j)
        if (F[j] < 0.5 * c.front_peak && g.x(j) > c.front_peak_x) {
            const double w = (F[j - 1] - 0.5 * c.front_peak) / (F[j - 1] - F[j]);
            c.front_half_width = g.x(j - 1) + w * g.dx;
            break;
        }

    c.min_a = c.min_b = std::numeric_limits<double>::infinity();
    const double inv = 1 / (2 * std::sqrt(s.t));
    for (std::size_t j = 0; j < g.size; ++j) {
        const double u = -std::erf(g.x(j) * inv);
        c.min_a = std::min(c.min_a, 0.5 * (s.v[j] + u));
        c.min_b = std::min(c.min_b, 0.5 * (s.v[j] - u));
    }
    return c;
}

}  // namespace

SimConfig parse_sim_config(const std::string& text) {
    SimConfig c;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!seen.insert(key).second) throw ConfigError("config: duplicate key " + key);
        if (key == "n")
            c.n = parse_int(key, val);
        else if (key == "tau")
            c.tau = parse_number(key, val);
        else if (key == "t_end")
            c.t_end = parse_number(key, val);
        else if (key == "L")
            c.L = parse_number(key, val);
        else if (key == "dx")
            c.dx = parse_number(key, val);
        else if (key == "safety")
            c.safety = parse_number(key, val);
        else if (key == "perturb_amp")
            c.perturb_amp = parse_number(key, val);
        else if (key == "perturb_width")
            c.perturb_width = parse_number(key, val);
        else if (key == "checkpoints")
            c.checkpoints = parse_int(key, val);
        else
            throw ConfigError("config: unknown key " + key);
    }
    return c;
}

SimConfig load_sim_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_sim_config(ss.str());
}

SimConfig resolve_config(SimConfig c, const ModelParams& p) {
    if (c.n != p.n) throw ConfigError("config: n does not match the profiles");
    if (!(c.tau >= 1)) throw ConfigError("config: tau must be >= 1");
    if (!(c.t_end > c.tau)) throw ConfigError("config: t_end must exceed tau");
    const double L_min = 10 * std::sqrt(c.t_end);
    const double dx_max = std::pow(c.tau, p.a()) / 20;
    if (c.L == 0) c.L = L_min;
    if (c.dx == 0) c.dx = dx_max;
    if (!(c.L >= L_min * (1 - 1e-12))) throw ConfigError("config: L must be >= 10 sqrt(t_end)");
    if (!(c.dx > 0) || !(c.dx <= dx_max * (1 + 1e-12))) throw ConfigError("config: dx must be in (0, tau^alpha / 20]");
    if (!(c.safety > 0) || !(c.safety <= 1)) throw ConfigError("config: safety must be in (0, 1]");
    if (!(c.perturb_width > 0)) throw ConfigError("config: perturb_width must be positive");
    if (c.checkpoints < 4) throw ConfigError("config: need at least 4 checkpoints");
    return c;
}

double perturbation(const SimConfig& c, double x) {
    const auto& tab = c.custom_perturbation;
    if (!tab.empty()) {
        if (x < tab.front().first || x > tab.back().first) return 0;
        auto it = std::lower_bound(tab.begin(), tab.end(), x, [](const auto& e, double v) { return e.first < v; });
        if (it == tab.begin()) return it->second;
        const auto& [x1, y1] = *it;
        const auto& [x0, y0] = *(it - 1);
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
    }
    if (c.perturb_amp == 0) return 0;
    const double s = x / c.perturb_width;
    return c.perturb_amp * std::exp(-s * s);
}

PdeState init_state(const SimConfig& config, const AsymptoticBundle& b) {
    const SimConfig c = resolve_config(config, b.params);
    PdeState s;
    s.grid = make_grid(c.L, c.dx);
    s.t = c.tau;
    s.v = v_inf_on_grid(s.grid, c.tau, b);
    for (std::size_t j = 1; j + 1 < s.grid.size; ++j) s.v[j] += perturbation(c, s.grid.x(j));
    return s;
}

void step(PdeState& s, double dt, int n, bool reaction, std::pair<double, double> left_right_new, StepWorkspace& ws,
          bool use_parallel) {
    if (!(dt > 0)) throw ConfigError("step: dt must be positive");
    const auto& g = s.grid;
    if (g.size < 3) throw ConfigError("step: grid too small");
    prepare(ws, g.size, dt, g.dx);
    const double mu = 0.5 * dt / (g.dx * g.dx);
    if (reaction) {
        if (use_parallel)
            kernels::parallel::reaction(g, s.v.data(), s.t + 0.5 * dt, n, ws.R.data());
        else
            kernels::serial::reaction(g, s.v.data(), s.t + 0.5 * dt, n, ws.R.data());
    } else {
        std::fill(ws.R.begin(), ws.R.end(), 0.0);
    }
    if (use_parallel)
        kernels::parallel::cn_rhs(g, s.v.data(), ws.R.data(), dt, ws.r.data());
    else
        kernels::serial::cn_rhs(g, s.v.data(), ws.R.data(), dt, ws.r.data());
    const std::size_t last = g.size - 1;
    ws.r[1] += mu * left_right_new.first;
    ws.r[last - 1] += mu * left_right_new.second;
    ws.lhs.solve(ws.r.data() + 1);
    for (std::size_t j = 1; j < last; ++j)
        if (!std::isfinite(ws.r[j])) throw NumericError("step: non-finite value at t = " + std::to_string(s.t));
    std::copy(ws.r.begin() + 1, ws.r.begin() + static_cast<std::ptrdiff_t>(last), s.v.begin() + 1);
    s.v.front() = left_right_new.first;
    s.v.back() = left_right_new.second;
    s.t += dt;
}

ConvergenceReport run(const SimConfig& config, const AsymptoticBundle& b, const FieldSink& sink) {
    ConvergenceReport rep;
    rep.config = resolve_config(config, b.params);
    const SimConfig& c = rep.config;
    const bool par = c.use_parallel;
    if (c.reaction) rep.min_two_u_phi_tau = potential_scan(c.tau, b, 2000).min_two_u_phi;

    PdeState s = init_state(c, b);
    StepWorkspace ws;
    const double dt_diff = s.grid.dx * s.grid.dx / 2;
    double react_slope = 0;
    for (int k = 1; k <= c.checkpoints; ++k) {
        const double tc = k == c.checkpoints ? c.t_end : c.tau * std::pow(c.t_end / c.tau, static_cast<double>(k) / c.checkpoints);
        try {
            while (s.t < tc) {
                // The reaction's stiffness changes slowly; refresh its bound every 100 steps.
                if (c.reaction && rep.steps % 100 == 0)
                    react_slope = par ? kernels::parallel::max_reaction_slope(s.grid, s.v.data(), s.t, c.n)
                                      : kernels::serial::max_reaction_slope(s.grid, s.v.data(), s.t, c.n);
                double dt = c.safety * (react_slope > 0 ? std::min(dt_diff, 1 / react_slope) : dt_diff);
                const bool lands = s.t + dt >= tc - 1e-12 * tc;
                if (lands) dt = tc - s.t;
                const double edge = c.reaction ? v_infinity(s.grid.x(s.grid.size - 1), s.t + dt, b) : s.v.back();
                step(s, dt, c.n, c.reaction, {edge, edge}, ws, par);
                ++rep.steps;
                if (lands) s.t = tc;
            }
        } catch (const NumericError& e) {
            rep.aborted = true;
            rep.abort_message = e.what();
            break;
        }
        const auto vi = v_inf_on_grid(s.grid, s.t, b);
        rep.checkpoints.push_back(measure(s, vi, c.n, par));
        if (sink) sink(s, vi);
    }
    for (const auto& cp : rep.checkpoints) {
        rep.max_evenness = std::max(rep.max_evenness, cp.evenness);
        rep.max_boundary_dev = std::max(rep.max_boundary_dev, cp.boundary_dev);
    }
    if (!rep.aborted) {
        rep.sup_slope = fit_decay(rep);
        std::vector<double> t, f;
        for (const auto& cp : rep.checkpoints) {
            t.push_back(cp.t);
            f.push_back(cp.front_at_0);
        }
        rep.front_slope = fit_decay(t, f);
    }
    return rep;
}

SlopeFit fit_decay(const std::vector<double>& t, const std::vector<double>& y, double decades) {
    if (t.size() != y.size() || t.empty()) throw ConfigError("fit_decay: need matching non-empty series");
    const double t_hi = *std::max_element(t.begin(), t.end());
    const double t_lo = t_hi * std::pow(10.0, -decades) * (1 - 1e-12);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] >= t_lo) {
            xs.push_back(t[i]);
            ys.push_back(y[i]);
        }
    return loglog_slope(xs, ys, 4);
}

SlopeFit fit_decay(const ConvergenceReport& r, double decades) {
    std::vector<double> t, y;
    for (const auto& cp : r.checkpoints) {
        t.push_back(cp.t);
        y.push_back(cp.sup_err);
    }
    return fit_decay(t, y, decades);
}

HeatConvergence heat_convergence(double dx0, int levels, double t0, double t1, double L, double safety) {
    if (!(dx0 > 0) || levels < 2 || !(t1 > t0) || !(t0 > 0)) throw ConfigError("heat_convergence: bad arguments");
    HeatConvergence out;
    double dx = dx0;
    for (int lev = 0; lev < levels; ++lev, dx /= 2) {
        PdeState s;
        s.grid = make_grid(L, dx);
        s.t = t0;
        s.v.resize(s.grid.size);
        for (std::size_t j = 0; j < s.grid.size; ++j) s.v[j] = heat_kernel(s.grid.x(j), t0);
        const auto steps = static_cast<long>(std::ceil((t1 - t0) / (safety * dx * dx / 2)));
        const double dt = (t1 - t0) / static_cast<double>(steps);
        StepWorkspace ws;
        const double edge_x = s.grid.x(s.grid.size - 1);
        for (long k = 0; k < steps; ++k) {
            const double tn = t0 + static_cast<double>(k + 1) * dt;
            const double edge = heat_kernel(edge_x, tn);
            step(s, dt, 1, false, {edge, edge}, ws, false);
            s.t = tn;
        }
        double err = 0;
        for (std::size_t j = 0; j < s.grid.size; ++j) err = std::max(err, std::abs(s.v[j] - heat_kernel(s.grid.x(j), t1)));
        out.dx.push_back(dx);
        out.err.push_back(err);
        if (lev > 0) out.order.push_back(std::log2(out.err[out.err.size() - 2] / err));
    }
    return out;
}

}  // namespace rdfront
