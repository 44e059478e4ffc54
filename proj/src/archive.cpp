#include "rdfront/archive.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rdfront/errors.hpp"

namespace rdfront {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace {

double read_double(const std::string& s, const std::string& what) {
    double v = 0;
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec == std::errc::result_out_of_range && ptr == end) return std::strtod(s.c_str(), nullptr);  // subnormals
    if (ec != std::errc() || ptr != end) throw ArchiveError("archive: bad number '" + s + "' in " + what);
    return v;
}

// Scalars are stored as strings so that every double (including inf and nan)
// round-trips through the same formatter as the CSV blocks.
void put(json& j, const char* key, double v) { j[key] = format_double(v); }

double get(const json& j, const char* key, const std::string& section) {
    if (!j.contains(key) || !j.at(key).is_string()) throw ArchiveError("archive: " + section + " lacks '" + key + "'");
    return read_double(j.at(key).get<std::string>(), section + "." + key);
}

// ---- profiles -------------------------------------------------------------

void profile_blocks(const std::string& name, const Profile& p, std::map<std::string, CsvBlock>& out) {
    CsvBlock nodes{"nodes", {"x[nondim]", "f[nondim]", "fp[nondim]", "fpp[nondim]"}, {}};
    for (std::size_t i = 0; i < p.x().size(); ++i) nodes.rows.push_back({p.x()[i], p.f()[i], p.fp()[i], p.fpp()[i]});
    out[name + ".nodes"] = nodes;

    CsvBlock left;
    if (const auto* t = std::get_if<TaylorLeft>(&p.left())) {
        left = {"taylor", {"c0", "c1", "c2", "c3", "c4"}, {{t->c[0], t->c[1], t->c[2], t->c[3], t->c[4]}}};
    } else if (const auto* w = std::get_if<PowerLeft>(&p.left())) {
        left = {"power", {"coeff", "exponent"}, {{w->coeff, w->exponent}}};
    } else {
        left = {"none", {"none"}, {}};
    }
    out[name + ".left"] = left;

    CsvBlock tail;
    if (const auto* t = std::get_if<PowerTail>(&p.tail())) {
        tail = {"power", {"c1", "q1", "c2", "q2"}, {{t->c1, t->q1, t->c2, t->q2}}};
    } else {
        const auto& g = std::get<GaussianTail>(p.tail());
        tail = {"gaussian", {"amplitude", "r", "c1"}, {{g.amplitude, g.r, g.c1}}};
    }
    out[name + ".tail"] = tail;
}

const CsvBlock& need(const std::map<std::string, CsvBlock>& blocks, const std::string& name) {
    const auto it = blocks.find(name);
    if (it == blocks.end()) throw ArchiveError("archive: missing block '" + name + "'");
    return it->second;
}

const std::vector<double>& single_row(const CsvBlock& b, const std::string& name, std::size_t cols) {
    if (b.rows.size() != 1 || b.rows[0].size() != cols) throw ArchiveError("archive: block '" + name + "' malformed");
    return b.rows[0];
}

Profile profile_from(const std::string& name, const std::map<std::string, CsvBlock>& blocks, SecondOrderRhs ode) {
    const auto& nodes = need(blocks, name + ".nodes");
    const auto& lb = need(blocks, name + ".left");
    const auto& tb = need(blocks, name + ".tail");
    std::vector<double> x, f, fp, fpp;
    for (const auto& r : nodes.rows) {
        if (r.size() != 4) throw ArchiveError("archive: block '" + name + ".nodes' needs 4 columns");
        x.push_back(r[0]);
        f.push_back(r[1]);
        fp.push_back(r[2]);
        fpp.push_back(r[3]);
    }
    LeftDescriptor left = NoLeft{};
    if (lb.kind == "taylor") {
        const auto& r = single_row(lb, name + ".left", 5);
        left = TaylorLeft{{r[0], r[1], r[2], r[3], r[4]}};
    } else if (lb.kind == "power") {
        const auto& r = single_row(lb, name + ".left", 2);
        left = PowerLeft{r[0], r[1]};
    } else if (lb.kind != "none") {
        throw ArchiveError("archive: unknown left kind '" + lb.kind + "'");
    }
    TailDescriptor tail;
    if (tb.kind == "power") {
        const auto& r = single_row(tb, name + ".tail", 4);
        tail = PowerTail{r[0], r[1], r[2], r[3]};
    } else if (tb.kind == "gaussian") {
        const auto& r = single_row(tb, name + ".tail", 3);
        tail = GaussianTail{r[0], r[1], r[2]};
    } else {
        throw ArchiveError("archive: unknown tail kind '" + tb.kind + "'");
    }
    try {
        return Profile(std::move(x), std::move(f), std::move(fp), std::move(fpp), left, tail, std::move(ode));
    } catch (const std::exception& e) {
        throw ArchiveError("archive: block '" + name + ".nodes': " + e.what());
    }
}

// ---- scalar metadata ------------------------------------------------------

json params_json(const ModelParams& p) {
    json j;
    j["n"] = p.n;
    auto rat = [](Rational r) { return std::to_string(r.num()) + "/" + std::to_string(r.den()); };
    j["gamma"] = rat(p.gamma);
    j["epsilon"] = rat(p.epsilon);
    j["alpha"] = rat(p.alpha);
    j["delta"] = rat(p.delta);
    put(j, "delta_prime", p.delta_prime);
    put(j, "kappa", p.kappa);
    put(j, "kappa3", p.kappa3);
    put(j, "lambda", p.lambda);
    put(j, "lambda0", p.lambda0);
    put(j, "xi0", p.xi0);
    put(j, "p_plus", p.p_plus);
    put(j, "p_minus", p.p_minus);
    put(j, "p_sing", p.p_sing);
    return j;
}

json eta_json(const EtaSolution& s) {
    json j;
    put(j, "eta0", s.eta0);
    put(j, "eta2", s.eta2);
    put(j, "eta4", s.eta4);
    put(j, "lambda_inf", s.lambda_inf);
    put(j, "lambda_inf_rms", s.lambda_inf_rms);
    put(j, "z_max", s.z_max);
    put(j, "bracket_lo", s.bracket_lo);
    put(j, "bracket_hi", s.bracket_hi);
    j["shots"] = s.shots;
    return j;
}

void eta_from(const json& j, EtaSolution& s) {
    const std::string sec = "eta";
    s.eta0 = get(j, "eta0", sec);
    s.eta2 = get(j, "eta2", sec);
    s.eta4 = get(j, "eta4", sec);
    s.lambda_inf = get(j, "lambda_inf", sec);
    s.lambda_inf_rms = get(j, "lambda_inf_rms", sec);
    s.z_max = get(j, "z_max", sec);
    s.bracket_lo = get(j, "bracket_lo", sec);
    s.bracket_hi = get(j, "bracket_hi", sec);
    s.shots = j.value("shots", 0);
}

json mu2_json(const Mu2Solution& s) {
    json j;
    put(j, "xi_star", s.xi_star);
    put(j, "rho_star", s.rho_star);
    put(j, "xi_m", s.xi_m);
    put(j, "xi_lo", s.xi_lo);
    put(j, "xi_hi", s.xi_hi);
    put(j, "lambda0_fit", s.lambda0_fit);
    put(j, "lambda1", s.lambda1);
    put(j, "lambda2", s.lambda2);
    put(j, "lambda3", s.lambda3);
    put(j, "gauss_amplitude", s.gauss_amplitude);
    put(j, "x_left", s.x_left);
    put(j, "y_cut", s.y_cut);
    put(j, "taylor_switch", s.taylor_switch);
    return j;
}

void mu2_from(const json& j, Mu2Solution& s) {
    const std::string sec = "mu2";
    s.xi_star = get(j, "xi_star", sec);
    s.rho_star = get(j, "rho_star", sec);
    s.xi_m = get(j, "xi_m", sec);
    s.xi_lo = get(j, "xi_lo", sec);
    s.xi_hi = get(j, "xi_hi", sec);
    s.lambda0_fit = get(j, "lambda0_fit", sec);
    s.lambda1 = get(j, "lambda1", sec);
    s.lambda2 = get(j, "lambda2", sec);
    s.lambda3 = get(j, "lambda3", sec);
    s.gauss_amplitude = get(j, "gauss_amplitude", sec);
    s.x_left = get(j, "x_left", sec);
    s.y_cut = get(j, "y_cut", sec);
    s.taylor_switch = get(j, "taylor_switch", sec);
}

json phi2_json(const Phi2Solution& s) {
    json j;
    put(j, "h0", s.h0);
    put(j, "h2", s.h2);
    put(j, "h_inf", s.h_inf);
    put(j, "h_inf_residual", s.h_inf_residual);
    put(j, "lambda_prime", s.lambda_prime);
    put(j, "tail_exponent", s.tail_exponent);
    put(j, "tail_slope", s.tail_slope);
    put(j, "tail_slope_err", s.tail_slope_err);
    put(j, "tail_next", s.tail_next);
    put(j, "path_agreement", s.path_agreement);
    put(j, "linear_coeff", s.linear_coeff);
    put(j, "z_max", s.z_max);
    put(j, "d", s.d);
    put(j, "d1", s.d1);
    put(j, "d2", s.d2);
    return j;
}

void phi2_from(const json& j, Phi2Solution& s) {
    const std::string sec = "phi2";
    s.h0 = get(j, "h0", sec);
    s.h2 = get(j, "h2", sec);
    s.h_inf = get(j, "h_inf", sec);
    s.h_inf_residual = get(j, "h_inf_residual", sec);
    s.lambda_prime = get(j, "lambda_prime", sec);
    s.tail_exponent = get(j, "tail_exponent", sec);
    s.tail_slope = get(j, "tail_slope", sec);
    s.tail_slope_err = get(j, "tail_slope_err", sec);
    s.tail_next = get(j, "tail_next", sec);
    s.path_agreement = get(j, "path_agreement", sec);
    s.linear_coeff = get(j, "linear_coeff", sec);
    s.z_max = get(j, "z_max", sec);
    s.d = get(j, "d", sec);
    s.d1 = get(j, "d1", sec);
    s.d2 = get(j, "d2", sec);
}

void check_params(const json& j, const ModelParams& p) {
    if (j != params_json(p)) throw ArchiveError("archive: stored constants differ from the ones derived for n");
}

// ---- text parsing ---------------------------------------------------------

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;
    bool partial = false;  ///< last line had no newline
    bool done() const { return pos >= text.size(); }
    // Returns the next line without its newline; sets start to its offset.
    bool line(std::string& out, std::size_t& start) {
        if (done()) return false;
        start = pos;
        const auto nl = text.find('\n', pos);
        if (nl == std::string::npos) {
            out = text.substr(pos);
            pos = text.size();
            partial = true;
        } else {
            out = text.substr(pos, nl - pos);
            pos = nl + 1;
        }
        return true;
    }
};

[[noreturn]] void fail_at(std::size_t offset, const std::string& msg) {
    throw ArchiveError("archive: byte " + std::to_string(offset) + ": " + msg);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t a = 0;
    for (;;) {
        const auto b = s.find(sep, a);
        out.push_back(s.substr(a, b == std::string::npos ? std::string::npos : b - a));
        if (b == std::string::npos) break;
        a = b + 1;
    }
    return out;
}

}  // namespace

std::string to_csv(const CsvBlock& b) {
    std::string out;
    for (std::size_t i = 0; i < b.columns.size(); ++i) {
        if (i) out += ',';
        out += b.columns[i];
    }
    out += '\n';
    for (const auto& r : b.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out += ',';
            out += format_double(r[i]);
        }
        out += '\n';
    }
    return out;
}

std::string serialize_archive(const ProfileArchive& a) {
    json h;
    h["schema"] = "rdfront.archive";
    h["version"] = kArchiveVersion;
    h["code_version"] = kCodeVersion;
    h["n"] = a.n;
    h["config"] = a.config;
    h["stages"] = a.stages;
    std::map<std::string, CsvBlock> blocks = a.results;
    if (a.eta || a.mu2 || a.phi2) {
        const ModelParams& p = a.eta ? a.eta->params : a.mu2 ? a.mu2->params : a.phi2->params;
        h["params"] = params_json(p);
    }
    if (a.eta) {
        h["eta"] = eta_json(*a.eta);
        profile_blocks("eta", a.eta->profile, blocks);
    }
    if (a.mu2) {
        h["mu2"] = mu2_json(*a.mu2);
        profile_blocks("mu2", a.mu2->m, blocks);
    }
    if (a.phi2) {
        h["phi2"] = phi2_json(*a.phi2);
        profile_blocks("phi2", a.phi2->h, blocks);
    }
    std::string out = h.dump() + "\n";
    for (const auto& [name, b] : blocks) {
        out += "#block " + name + " kind=" + (b.kind.empty() ? "table" : b.kind) + " rows=" + std::to_string(b.rows.size()) + "\n";
        out += to_csv(b);
    }
    out += "#eof\n";
    return out;
}

ProfileArchive parse_archive(const std::string& text, int expected_n) {
    Cursor cur{text};
    std::string line;
    std::size_t at = 0;
    if (!cur.line(line, at)) throw ArchiveError("archive: empty file");
    json h;
    try {
        h = json::parse(line);
    } catch (const json::parse_error& e) {
        fail_at(e.byte, std::string("header is not valid JSON: ") + e.what());
    }
    if (!h.is_object() || h.value("schema", "") != "rdfront.archive") fail_at(0, "not an rdfront archive");
    if (h.value("version", -1) != kArchiveVersion)
        throw ArchiveError("archive: version " + std::to_string(h.value("version", -1)) + " not supported (expected " +
                           std::to_string(kArchiveVersion) + ")");
    ProfileArchive a;
    a.n = h.value("n", 0);
    if (expected_n != 0 && a.n != expected_n)
        throw ConfigError("archive holds n = " + std::to_string(a.n) + ", requested n = " + std::to_string(expected_n));
    a.config = h.value("config", json::object());
    a.stages = h.value("stages", std::map<std::string, std::string>{});

    std::map<std::string, CsvBlock> blocks;
    bool closed = false;
    while (cur.line(line, at)) {
        if (line == "#eof" && !cur.partial) {
            closed = true;
            break;
        }
        if (line.rfind("#block ", 0) != 0) fail_at(at, "expected a block line, found '" + line.substr(0, 40) + "'");
        const auto parts = split(line.substr(7), ' ');
        if (parts.size() != 3 || parts[1].rfind("kind=", 0) != 0 || parts[2].rfind("rows=", 0) != 0)
            fail_at(at, "malformed block line");
        const std::string name = parts[0];
        CsvBlock b;
        b.kind = parts[1].substr(5);
        const auto rows = static_cast<std::size_t>(read_double(parts[2].substr(5), "block " + name));
        if (!cur.line(line, at)) fail_at(text.size(), "truncated in block '" + name + "' (no header)");
        b.columns = split(line, ',');
        for (std::size_t r = 0; r < rows; ++r) {
            if (!cur.line(line, at) || line.rfind("#", 0) == 0)
                fail_at(cur.done() ? text.size() : at, "truncated in block '" + name + "' after " + std::to_string(r) + " rows");
            if (cur.partial) fail_at(at, "truncated in block '" + name + "' (incomplete row)");
            std::vector<double> row;
            for (const auto& cell : split(line, ',')) {
                try {
                    row.push_back(read_double(cell, "block " + name));
                } catch (const ArchiveError&) {
                    fail_at(at, "bad number '" + cell + "' in block '" + name + "'");
                }
            }
            if (row.size() != b.columns.size()) fail_at(at, "row width differs from header in block '" + name + "'");
            b.rows.push_back(std::move(row));
        }
        blocks[name] = std::move(b);
    }
    if (!closed) fail_at(text.size(), "truncated (no #eof marker)");
    if (cur.pos != text.size()) fail_at(cur.pos, "data after #eof");

    if (h.contains("eta") || h.contains("mu2") || h.contains("phi2")) {
        if (!h.contains("params")) throw ArchiveError("archive: profiles present but constants missing");
        ModelParams p;
        try {
            p = derive_params(a.n);
        } catch (const std::exception& e) {
            throw ArchiveError(std::string("archive: ") + e.what());
        }
        check_params(h.at("params"), p);
        if (h.contains("eta")) {
            EtaSolution s;
            s.params = p;
            eta_from(h.at("eta"), s);
            s.profile = profile_from("eta", blocks, eta_ode(p));
            a.eta = std::move(s);
        }
        if (h.contains("mu2")) {
            Mu2Solution s;
            s.params = p;
            mu2_from(h.at("mu2"), s);
            s.m = profile_from("mu2", blocks, m_ode(p));
            a.mu2 = std::move(s);
        }
        if (h.contains("phi2")) {
            if (!a.eta) throw ArchiveError("archive: phi2 needs the eta profile");
            Phi2Solution s;
            s.params = p;
            phi2_from(h.at("phi2"), s);
            s.h = profile_from("phi2", blocks, h_ode(p, *a.eta));
            a.phi2 = std::move(s);
        }
    }
    for (auto& [name, b] : blocks) {
        const auto dot = name.find('.');
        const std::string owner = name.substr(0, dot);
        if (owner == "eta" || owner == "mu2" || owner == "phi2") continue;
        a.results[name] = std::move(b);
    }
    return a;
}

void write_archive(const ProfileArchive& a, const std::string& path) {
    const std::string text = serialize_archive(a);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ArchiveError("archive: cannot write " + tmp);
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) throw ArchiveError("archive: write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw ArchiveError("archive: cannot move " + tmp + " to " + path + ": " + std::strerror(errno));
}

ProfileArchive read_archive(const std::string& path, int expected_n) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArchiveError("archive: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_archive(ss.str(), expected_n);
}

AsymptoticBundle bundle_from(const ProfileArchive& a) {
    if (!a.eta) throw ArchiveError("archive: missing the eta profile");
    if (!a.mu2) throw ArchiveError("archive: missing the mu2 profile");
    if (!a.phi2) throw ArchiveError("archive: missing the phi2 profile");
    AsymptoticBundle b;
    b.params = a.eta->params;
    b.eta = *a.eta;
    b.mu2 = *a.mu2;
    b.phi2 = *a.phi2;
    try {
        check_bundle(b);
    } catch (const ConfigError& e) {
        throw ArchiveError(std::string("archive: loaded bundle fails its checks: ") + e.what());
    }
    return b;
}

ProfileArchive archive_from(const AsymptoticBundle& b) {
    ProfileArchive a;
    a.n = b.params.n;
    a.eta = b.eta;
    a.mu2 = b.mu2;
    a.phi2 = b.phi2;
    return a;
}

void save_archive(const AsymptoticBundle& b, const std::string& path) { write_archive(archive_from(b), path); }

AsymptoticBundle load_archive(const std::string& path, int expected_n) { return bundle_from(read_archive(path, expected_n)); }

}  // namespace rdfront
