#include "rdfront/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "rdfront/errors.hpp"

namespace rdfront {

namespace fs = std::filesystem;
using nlohmann::json;

EtaOptions SolverSettings::eta_options() const {
    EtaOptions o;
    if (tol > 0) o.ode_tol = tol;
    return o;
}

Mu2Options SolverSettings::mu2_options() const {
    Mu2Options o;
    if (tol > 0) o.ode_tol = tol;
    return o;
}

Phi2Options SolverSettings::phi2_options() const {
    Phi2Options o;
    if (tol > 0) o.ode_tol = tol;
    return o;
}

json SolverSettings::to_json() const {
    return {{"eta_ode_tol", format_double(eta_options().ode_tol)},
            {"mu2_ode_tol", format_double(mu2_options().ode_tol)},
            {"phi2_ode_tol", format_double(phi2_options().ode_tol)}};
}

EtaSolution run_eta(const ModelParams& p, const SolverSettings& s) { return solve_eta(p, s.eta_options()); }
Mu2Solution run_mu2(const ModelParams& p, const SolverSettings& s) { return outer_shoot(p, s.mu2_options()); }
Phi2Solution run_phi2(const ModelParams& p, const EtaSolution& eta, const SolverSettings& s) {
    return solve_h(p, eta, s.phi2_options());
}

std::vector<double> default_inhomo_times() { return {1e2, 1e3, 1e4, 1e5}; }
std::vector<double> default_potential_times() { return {1e2, 1e3, 1e4}; }

json sim_config_json(const SimConfig& c) {
    return {{"n", c.n},
            {"tau", format_double(c.tau)},
            {"t_end", format_double(c.t_end)},
            {"L", format_double(c.L)},
            {"dx", format_double(c.dx)},
            {"safety", format_double(c.safety)},
            {"perturb_amp", format_double(c.perturb_amp)},
            {"perturb_width", format_double(c.perturb_width)},
            {"checkpoints", c.checkpoints},
            {"custom_perturbation_points", c.custom_perturbation.size()},
            {"reaction", c.reaction}};
}

namespace {

const std::vector<std::string> kCheckpointColumns = {
    "t[nondim]",          "sup_err[nondim]", "l1_err[nondim]",       "front_peak_x[nondim]",
    "front_peak[nondim]", "front_at_0[nondim]", "front_half_width[nondim]", "evenness[nondim]",
    "boundary_dev[nondim]", "min_a[nondim]",  "min_b[nondim]"};

void finish_report(ConvergenceReport& r) {
    r.max_evenness = 0;
    r.max_boundary_dev = 0;
    for (const auto& cp : r.checkpoints) {
        r.max_evenness = std::max(r.max_evenness, cp.evenness);
        r.max_boundary_dev = std::max(r.max_boundary_dev, cp.boundary_dev);
    }
    r.sup_slope = fit_decay(r);
    std::vector<double> t, f;
    for (const auto& cp : r.checkpoints) {
        t.push_back(cp.t);
        f.push_back(cp.front_at_0);
    }
    r.front_slope = fit_decay(t, f);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

CsvBlock report_block(const ConvergenceReport& r) {
    CsvBlock b{"checkpoints", kCheckpointColumns, {}};
    for (const auto& c : r.checkpoints)
        b.rows.push_back({c.t, c.sup_err, c.l1_err, c.front_peak_x, c.front_peak, c.front_at_0, c.front_half_width,
                          c.evenness, c.boundary_dev, c.min_a, c.min_b});
    return b;
}

ConvergenceReport report_from_block(const CsvBlock& b, const SimConfig& config) {
    if (b.columns != kCheckpointColumns) throw ArchiveError("checkpoint block: unexpected columns");
    ConvergenceReport r;
    r.config = config;
    for (const auto& row : b.rows) {
        Checkpoint c;
        c.t = row[0];
        c.sup_err = row[1];
        c.l1_err = row[2];
        c.front_peak_x = row[3];
        c.front_peak = row[4];
        c.front_at_0 = row[5];
        c.front_half_width = row[6];
        c.evenness = row[7];
        c.boundary_dev = row[8];
        c.min_a = row[9];
        c.min_b = row[10];
        r.checkpoints.push_back(c);
    }
    finish_report(r);
    return r;
}

json report_json(const ConvergenceReport& r) {
    json j;
    j["schema"] = "rdfront.simulate";
    j["version"] = 1;
    j["config"] = sim_config_json(r.config);
    j["steps"] = r.steps;
    j["aborted"] = r.aborted;
    if (r.aborted) j["abort_message"] = r.abort_message;
    j["max_evenness"] = r.max_evenness;
    j["max_boundary_dev"] = r.max_boundary_dev;
    j["min_two_u_phi_tau"] = r.min_two_u_phi_tau;
    j["sup_slope"] = {{"slope", r.sup_slope.slope}, {"stderr", r.sup_slope.stderr_slope}, {"points", r.sup_slope.points}};
    j["front_slope"] = {{"slope", r.front_slope.slope},
                        {"stderr", r.front_slope.stderr_slope},
                        {"points", r.front_slope.points}};
    json cps = json::array();
    const CsvBlock b = report_block(r);
    for (const auto& row : b.rows) {
        json o;
        for (std::size_t k = 0; k < b.columns.size(); ++k) o[b.columns[k].substr(0, b.columns[k].find('['))] = row[k];
        cps.push_back(o);
    }
    j["checkpoints"] = cps;
    return j;
}

CsvBlock inhomo_block(const InhomoSeries& s) {
    CsvBlock b{"table", {"t[nondim]", "N[nondim]", "N_err[nondim]", "x_cut[nondim]"}, {}};
    for (std::size_t i = 0; i < s.t.size(); ++i) b.rows.push_back({s.t[i], s.norms[i].value, s.norms[i].error, s.norms[i].x_cut});
    return b;
}

InhomoSeries inhomo_from_block(const CsvBlock& b, int n) {
    if (b.columns.size() != 4) throw ArchiveError("inhomo block: unexpected columns");
    InhomoSeries s;
    s.n = n;
    s.target = -(1 + 4 * derive_params(n).g());
    std::vector<double> v;
    for (const auto& row : b.rows) {
        s.t.push_back(row[0]);
        s.norms.push_back({row[1], row[2], row[3]});
        v.push_back(row[1]);
    }
    s.slope = loglog_slope(s.t, v);
    return s;
}

CsvBlock heat_block(const HeatConvergence& h) {
    CsvBlock b{"table", {"dx[nondim]", "sup_err[nondim]"}, {}};
    for (std::size_t i = 0; i < h.dx.size(); ++i) b.rows.push_back({h.dx[i], h.err[i]});
    return b;
}

HeatConvergence heat_from_block(const CsvBlock& b) {
    HeatConvergence h;
    for (const auto& row : b.rows) {
        h.dx.push_back(row.at(0));
        h.err.push_back(row.at(1));
        if (h.err.size() > 1) h.order.push_back(std::log2(h.err[h.err.size() - 2] / h.err.back()));
    }
    return h;
}

CsvBlock v_inf_table(const AsymptoticBundle& b) {
    CsvBlock out{"table", {"t[nondim]", "x[nondim]", "v_inf[nondim]"}, {}};
    for (double t : {1e2, 1e3, 1e4})
        for (int i = 0; i <= 100; ++i) {
            const double x = 5 * std::sqrt(t) * i / 100.0;
            out.rows.push_back({t, x, v_infinity(x, t, b)});
        }
    return out;
}

bool PipelineResult::pass() const {
    for (const auto& c : checks)
        if (!c.pass()) return false;
    return true;
}

PipelineResult run_pipeline(const PipelineOptions& opt, std::ostream& log) {
    PipelineResult res;
    ModelParams p;
    try {
        p = derive_params(opt.n);
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("stage params: ") + e.what());
    }

    fs::create_directories(opt.workdir);
    res.archive_path = (fs::path(opt.workdir) / kArchiveFile).string();
    const fs::path conf_path = fs::path(opt.workdir) / kSimConfigFile;

    SimConfig sim;
    sim.n = opt.n;
    if (fs::exists(conf_path)) {
        sim = load_sim_config(conf_path.string());
        if (sim.n != opt.n)
            throw ConfigError(conf_path.string() + ": n = " + std::to_string(sim.n) + " but the pipeline runs n = " +
                              std::to_string(opt.n));
    }
    sim = resolve_config(sim, p);

    ProfileArchive old;
    if (fs::exists(res.archive_path)) {
        try {
            old = read_archive(res.archive_path, opt.n);
        } catch (const ArchiveError& e) {
            log << "archive unreadable, recomputing: " << e.what() << "\n";
            old = ProfileArchive{};
        }
    }

    ProfileArchive a;
    a.n = opt.n;
    a.config = {{"solver", opt.solver.to_json()}, {"sim", sim_config_json(sim)}};

    std::map<std::string, double> timing;
    auto stage = [&](const std::string& name, const json& inputs, const std::function<bool()>& have,
                     const std::function<void()>& load, const std::function<void()>& compute) {
        const std::string fp = inputs.dump();
        StageStatus st{name, false, 0};
        if (old.stages.count(name) && old.stages.at(name) == fp && have()) {
            load();
            st.cached = true;
            timing[name] = std::numeric_limits<double>::quiet_NaN();
        } else {
            const auto t0 = std::chrono::steady_clock::now();
            try {
                compute();
            } catch (const ConfigError& e) {
                throw ConfigError("stage " + name + ": " + e.what());
            } catch (const std::exception& e) {
                throw NumericError("stage " + name + ": " + e.what());
            }
            st.seconds = seconds_since(t0);
            timing[name] = st.seconds;
        }
        a.stages[name] = fp;
        if (!st.cached) write_archive(a, res.archive_path);
        log << "stage " << name << ": " << (st.cached ? std::string("cached") : "computed") << "\n";
        res.stages.push_back(st);
        return fp;
    };

    const std::string fp_params = stage(
        "params", {{"n", opt.n}, {"code", kCodeVersion}}, [] { return true; }, [] {}, [] {});
    const std::string fp_eta = stage(
        "eta", {{"up", fp_params}, {"solver", opt.solver.to_json()}}, [&] { return old.eta.has_value(); },
        [&] { a.eta = old.eta; }, [&] { a.eta = run_eta(p, opt.solver); });
    const std::string fp_mu2 = stage(
        "mu2", {{"up", fp_params}, {"solver", opt.solver.to_json()}}, [&] { return old.mu2.has_value(); },
        [&] { a.mu2 = old.mu2; }, [&] { a.mu2 = run_mu2(p, opt.solver); });
    const std::string fp_phi2 = stage(
        "phi2", {{"up", fp_eta}, {"solver", opt.solver.to_json()}}, [&] { return old.phi2.has_value(); },
        [&] { a.phi2 = old.phi2; }, [&] { a.phi2 = run_phi2(p, *a.eta, opt.solver); });

    AsymptoticBundle b;
    const std::string fp_asm = stage(
        "assemble", {{"up", {fp_eta, fp_mu2, fp_phi2}}}, [&] { return old.results.count("assemble") > 0; },
        [&] {
            b = bundle_from(a);
            a.results["assemble"] = old.results.at("assemble");
        },
        [&] {
            b = bundle_from(a);
            a.results["assemble"] = v_inf_table(b);
        });

    const auto times = default_inhomo_times();
    InhomoSeries inhomo;
    stage(
        "inhomo", {{"up", fp_asm}, {"t", times}, {"rel_tol", "1e-8"}}, [&] { return old.results.count("inhomo") > 0; },
        [&] {
            a.results["inhomo"] = old.results.at("inhomo");
            inhomo = inhomo_from_block(a.results["inhomo"], opt.n);
        },
        [&] {
            inhomo = inhomo_series(b, times);
            a.results["inhomo"] = inhomo_block(inhomo);
        });

    ConvergenceReport report;
    HeatConvergence heat;
    stage(
        "simulate", {{"up", fp_asm}, {"sim", sim_config_json(sim)}, {"heat", {{"dx0", "0.2"}, {"levels", 3}}}},
        [&] { return old.results.count("simulate") && old.results.count("heat"); },
        [&] {
            a.results["simulate"] = old.results.at("simulate");
            a.results["heat"] = old.results.at("heat");
            report = report_from_block(a.results["simulate"], sim);
            heat = heat_from_block(a.results["heat"]);
        },
        [&] {
            report = run(sim, b);
            if (report.aborted) throw NumericError(report.abort_message);
            heat = heat_convergence(0.2, 3);
            a.results["simulate"] = report_block(report);
            a.results["heat"] = heat_block(heat);
        });

    // checks
    if (!opt.fixture_path.empty()) {
        std::ifstream in(opt.fixture_path);
        if (!in) throw ConfigError("cannot open fixture " + opt.fixture_path);
        res.checks.push_back(check_constants(p, json::parse(in)));
    }
    res.checks.push_back(check_eta(b.eta, timing["eta"]));
    res.checks.push_back(check_mu2(b.mu2, timing["mu2"]));
    res.checks.push_back(check_phi2(b.phi2, b.eta, timing["phi2"]));
    res.checks.push_back(check_inhomo({inhomo}, timing["inhomo"]));
    {
        const auto t0 = std::chrono::steady_clock::now();
        const auto pot = potential_series(b, default_potential_times());
        res.checks.push_back(check_potential({pot}, seconds_since(t0)));
    }
    {
        CriterionResult c;
        c.id = 7;
        c.title = "PDE convergence (n=" + std::to_string(opt.n) + ")";
        c.seconds = timing["simulate"];
        c.metrics = pde_metrics(report, b, "run");
        c.metrics.push_back(heat_order_metric(heat));
        c.metrics.push_back(runtime_metric(c.seconds, 900));
        res.checks.push_back(c);
    }
    {
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult c = check_matching(b, 0);
        c.seconds = seconds_since(t0);
        c.metrics.back() = runtime_metric(c.seconds, 1);
        res.checks.push_back(c);
    }
    return res;
}

std::string summary_table(const PipelineResult& r) {
    std::ostringstream os;
    char line[256];
    std::snprintf(line, sizeof line, "%-3s %-36s %-14s %-34s %s\n", "id", "metric", "value", "bound", "status");
    os << line;
    for (const auto& c : r.checks)
        for (const auto& m : c.metrics) {
            std::snprintf(line, sizeof line, "%-3d %-36s %-14.6g %-34s %s\n", c.id, m.name.c_str(), m.value,
                          m.bound.c_str(), m.pass ? "ok" : "FAIL");
            os << line;
        }
    for (const auto& s : r.stages) {
        std::snprintf(line, sizeof line, "stage %-10s %s", s.name.c_str(), s.cached ? "cached" : "computed");
        os << line;
        if (!s.cached) {
            std::snprintf(line, sizeof line, " %.2f s", s.seconds);
            os << line;
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace rdfront
