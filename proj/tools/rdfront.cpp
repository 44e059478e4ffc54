// Command-line front end: one subcommand per stage, plus the full pipeline.
#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rdfront/errors.hpp"
#include "rdfront/pipeline.hpp"

using namespace rdfront;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Globals {
    int n = 4;
    std::string workdir = ".";
    double tol = 0;
    std::string format = "csv";
    int threads = 0;

    SolverSettings solver() const { return SolverSettings{tol}; }
};

json header(const std::string& what, int n) { return {{"schema", "rdfront." + what}, {"version", 1}, {"n", n}}; }

json block_json(const CsvBlock& b) {
    json rows = json::array();
    for (const auto& r : b.rows) rows.push_back(r);
    return {{"columns", b.columns}, {"rows", rows}};
}

void emit(const Globals& g, const std::string& what, const CsvBlock& table, json extra = json::object(),
          const std::string& out = "") {
    std::string text;
    if (g.format == "json") {
        json j = header(what, g.n);
        for (auto& [k, v] : extra.items()) j[k] = v;
        j["table"] = block_json(table);
        text = j.dump(1) + "\n";
    } else {
        text = to_csv(table);
    }
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out);
    if (!f) throw ConfigError("cannot write " + out);
    f << text;
}

CsvBlock profile_table(const Profile& p) {
    CsvBlock b{"nodes", {"x[nondim]", "f[nondim]", "fp[nondim]", "fpp[nondim]"}, {}};
    for (std::size_t i = 0; i < p.x().size(); ++i) b.rows.push_back({p.x()[i], p.f()[i], p.fp()[i], p.eval(p.x()[i], 2)});
    return b;
}

// Profiles from the workdir archive when it holds all three, else solved now and saved.
AsymptoticBundle get_bundle(const Globals& g) {
    const std::string path = (fs::path(g.workdir) / kArchiveFile).string();
    if (fs::exists(path)) {
        const ProfileArchive a = read_archive(path, g.n);
        if (a.eta && a.mu2 && a.phi2) return bundle_from(a);
    }
    const ModelParams p = derive_params(g.n);
    AsymptoticBundle b;
    b.params = p;
    b.eta = run_eta(p, g.solver());
    b.mu2 = run_mu2(p, g.solver());
    b.phi2 = run_phi2(p, b.eta, g.solver());
    check_bundle(b);
    fs::create_directories(g.workdir);
    if (!fs::exists(path)) save_archive(b, path);
    return b;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("bad number in list: '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

int cmd_params(const Globals& g) {
    const ModelParams p = derive_params(g.n);
    CsvBlock t{"table", {"name", "value[nondim]"}, {}};
    const std::vector<std::pair<std::string, double>> vals = {
        {"gamma", p.g()},       {"epsilon", p.eps()},   {"alpha", p.a()},     {"delta", p.d()},
        {"delta_prime", p.delta_prime}, {"kappa", p.kappa}, {"lambda", p.lambda}, {"lambda0", p.lambda0},
        {"xi0", p.xi0},         {"p_plus", p.p_plus},   {"p_minus", p.p_minus}};
    if (g.format == "json") {
        json j = header("params", g.n);
        for (const auto& [k, v] : vals) j[k] = v;
        auto exact = [](Rational r) { return (std::ostringstream{} << r).str(); };
        j["exact"] = {{"gamma", exact(p.gamma)}, {"epsilon", exact(p.epsilon)}, {"alpha", exact(p.alpha)}, {"delta", exact(p.delta)}};
        std::cout << j.dump(1) << "\n";
        return 0;
    }
    std::cout << "name,value[nondim]\n";
    for (const auto& [k, v] : vals) std::cout << k << "," << format_double(v) << "\n";
    return 0;
}

int cmd_profile(const Globals& g, const std::string& which, const std::string& out) {
    const ModelParams p = derive_params(g.n);
    if (which == "eta") {
        const auto s = run_eta(p, g.solver());
        emit(g, "profile.eta", profile_table(s.profile),
             {{"eta0", s.eta0}, {"eta2", s.eta2}, {"lambda_inf", s.lambda_inf}, {"z_max", s.z_max}, {"shots", s.shots}}, out);
    } else if (which == "mu2") {
        const auto s = run_mu2(p, g.solver());
        emit(g, "profile.mu2", profile_table(s.m),
             {{"xi_star", s.xi_star}, {"rho_star", s.rho_star}, {"xi_m", s.xi_m}, {"lambda0_fit", s.lambda0_fit},
              {"gauss_amplitude", s.gauss_amplitude}},
             out);
    } else if (which == "phi2") {
        const auto eta = run_eta(p, g.solver());
        const auto s = run_phi2(p, eta, g.solver());
        emit(g, "profile.phi2", profile_table(s.h),
             {{"h0", s.h0}, {"h2", s.h2}, {"h_inf", s.h_inf}, {"tail_exponent", s.tail_exponent},
              {"path_agreement", s.path_agreement}},
             out);
    } else {
        throw ConfigError("profile: expected eta, mu2 or phi2");
    }
    return 0;
}

int cmd_assemble(const Globals& g, const std::vector<double>& ts, const std::string& out) {
    const auto b = get_bundle(g);
    CsvBlock t{"table",
               {"t[nondim]", "x[nondim]", "v_inf[nondim]", "mu1[nondim]", "reactive[nondim]", "diffusive[nondim]",
                "second[nondim]"},
               {}};
    for (double tt : ts) {
        if (!(tt >= 1)) throw ConfigError("assemble: t must be >= 1");
        for (int i = 0; i <= 200; ++i) {
            const double x = 5 * std::sqrt(tt) * i / 200.0;
            const auto v = v_terms(x, tt, b);
            t.rows.push_back({tt, x, v.total(), v.mu1, v.reactive, v.diffusive, v.second});
        }
    }
    emit(g, "assemble", t, {}, out);
    return 0;
}

int cmd_front(const Globals& g, const std::string& scale) {
    const auto b = get_bundle(g);
    const auto r = front_report(scale, b);
    CsvBlock t{"table", {scale == "reactive" ? "z[nondim]" : "y[nondim]", "F_scaled[nondim]"}, {}};
    for (std::size_t i = 0; i < r.points.size(); ++i) t.rows.push_back({r.points[i], r.values[i]});
    emit(g, "front", t,
         {{"scale", scale}, {"amplitude", r.amplitude}, {"exponent", r.exponent},
          {"expected_amplitude", r.expected_amplitude}, {"expected_exponent", r.expected_exponent}});
    if (g.format == "csv")
        std::cerr << "power-law fit: amplitude " << r.amplitude << " (expected " << r.expected_amplitude << "), exponent "
                  << r.exponent << " (expected " << r.expected_exponent << ")\n";
    return 0;
}

int cmd_inhomo(const Globals& g, const std::vector<double>& ts, const std::string& out) {
    const auto b = get_bundle(g);
    const auto s = inhomo_series(b, ts);
    emit(g, "inhomo", inhomo_block(s), {{"slope", s.slope.slope}, {"target", s.target}}, out);
    if (g.format == "csv") std::cerr << "slope " << s.slope.slope << " (target " << s.target << ")\n";
    return 0;
}

int cmd_potential(const Globals& g, const std::vector<double>& ts) {
    const auto b = get_bundle(g);
    const auto s = potential_series(b, ts);
    CsvBlock t{"table", {"t[nondim]", "min_V[nondim]", "argmin_x[nondim]", "min_2u_plus_phi[nondim]"}, {}};
    for (std::size_t i = 0; i < ts.size(); ++i)
        t.rows.push_back({ts[i], s.scans[i].min_value, s.scans[i].argmin, s.scans[i].min_two_u_phi});
    emit(g, "potential", t);
    return 0;
}

int cmd_simulate(const Globals& g, const std::string& config, const std::string& out, const std::string& fields) {
    SimConfig c;
    c.n = g.n;
    if (!config.empty()) c = load_sim_config(config);
    if (c.n != g.n) throw ConfigError("config n = " + std::to_string(c.n) + " but --n " + std::to_string(g.n));
    const auto b = get_bundle(g);

    std::ofstream fout;
    FieldSink sink;
    if (!fields.empty()) {
        fout.open(fields);
        if (!fout) throw ConfigError("cannot write " + fields);
        fout << "t[nondim],x[nondim],v[nondim],v_inf[nondim],F[nondim]\n";
        sink = [&](const PdeState& s, const std::vector<double>& vi) {
            std::vector<double> F(s.grid.size);
            kernels::serial::reaction(s.grid, s.v.data(), s.t, g.n, F.data());
            for (std::size_t j = 0; j < s.grid.size; ++j)
                fout << format_double(s.t) << ',' << format_double(s.grid.x(j)) << ',' << format_double(s.v[j]) << ','
                     << format_double(vi[j]) << ',' << format_double(0.5 * F[j]) << '\n';
        };
    }
    const auto r = run(c, b, sink);
    const json j = report_json(r);
    if (out.empty()) {
        std::cout << j.dump(1) << "\n";
    } else {
        std::ofstream f(out);
        if (!f) throw ConfigError("cannot write " + out);
        f << j.dump(1) << "\n";
        std::cout << "sup slope " << r.sup_slope.slope << ", steps " << r.steps << "\n";
    }
    if (r.aborted) {
        std::cerr << "aborted: " << r.abort_message << "\n";
        return 3;
    }
    return 0;
}

int cmd_pipeline(const Globals& g, const std::string& fixture) {
    PipelineOptions o;
    o.n = g.n;
    o.workdir = g.workdir;
    o.solver = g.solver();
    o.fixture_path = fixture;
    const auto r = run_pipeline(o, std::cerr);
    if (g.format == "json") {
        json j = header("pipeline", g.n);
        json checks = json::array();
        for (const auto& c : r.checks) {
            json ms = json::array();
            for (const auto& m : c.metrics) ms.push_back({{"name", m.name}, {"value", m.value}, {"bound", m.bound}, {"pass", m.pass}});
            checks.push_back({{"id", c.id}, {"title", c.title}, {"pass", c.pass()}, {"metrics", ms}});
        }
        j["checks"] = checks;
        json st = json::array();
        for (const auto& s : r.stages) st.push_back({{"name", s.name}, {"status", s.cached ? "cached" : "computed"}});
        j["stages"] = st;
        j["pass"] = r.pass();
        std::cout << j.dump(1) << "\n";
    } else {
        std::cout << summary_table(r);
    }
    return r.pass() ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rdfront: numerical lab for the nA + nB -> C reaction-diffusion front"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--n", g.n, "reaction order")->capture_default_str();
    app.add_option("--workdir", g.workdir, "directory holding the profile archive")->capture_default_str();
    app.add_option("--tol", g.tol, "ODE tolerance for the profile solvers (0: solver defaults)");
    app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_option("--threads", g.threads, "OpenMP threads (0: runtime default)");

    auto* params = app.add_subcommand("params", "closed-form constants");

    std::string which, out;
    auto* profile = app.add_subcommand("profile", "solve one profile and print its nodes");
    profile->add_option("which", which, "eta, mu2 or phi2")->required()->check(CLI::IsMember({"eta", "mu2", "phi2"}));
    profile->add_option("--out", out, "output file");

    std::string t_list = "100,1000,10000";
    auto* assemble = app.add_subcommand("assemble", "tabulate v_inf and its terms");
    assemble->add_option("--t", t_list, "comma-separated times")->capture_default_str();
    assemble->add_option("--out", out, "output file");

    std::string scale = "reactive";
    auto* front = app.add_subcommand("front", "limit profile of the reaction rate");
    front->add_option("--scale", scale)->check(CLI::IsMember({"reactive", "diffusive"}))->capture_default_str();

    std::string inhomo_t = "100,1000,10000,100000";
    auto* inhomo = app.add_subcommand("inhomo", "L1 norm of the residual of v_inf");
    inhomo->add_option("--t-list", inhomo_t, "comma-separated times")->capture_default_str();
    inhomo->add_option("--out", out, "output file");

    std::string pot_t = "100,1000,10000";
    auto* potential = app.add_subcommand("potential", "minimum of the linearised potential");
    potential->add_option("--t", pot_t, "comma-separated times")->capture_default_str();

    std::string config, fields;
    auto* simulate = app.add_subcommand("simulate", "integrate the PDE and compare with v_inf");
    simulate->add_option("--config", config, "key=value config file");
    simulate->add_option("--out", out, "report JSON");
    simulate->add_option("--fields", fields, "CSV of t, x, v, v_inf, F at each checkpoint");

    std::string fixture;
    auto* pipeline = app.add_subcommand("pipeline", "all stages with caching and the metric summary");
    pipeline->add_option("--fixtures", fixture, "constants fixture JSON for the constants check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (g.threads < 0) throw ConfigError("--threads must be >= 0");
        if (g.tol < 0) throw ConfigError("--tol must be >= 0");
        if (g.threads > 0) omp_set_num_threads(g.threads);
        if (*params) return cmd_params(g);
        if (*profile) return cmd_profile(g, which, out);
        if (*assemble) return cmd_assemble(g, parse_list(t_list), out);
        if (*front) return cmd_front(g, scale);
        if (*inhomo) return cmd_inhomo(g, parse_list(inhomo_t), out);
        if (*potential) return cmd_potential(g, parse_list(pot_t));
        if (*simulate) return cmd_simulate(g, config, out, fields);
        if (*pipeline) return cmd_pipeline(g, fixture);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ArchiveError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
