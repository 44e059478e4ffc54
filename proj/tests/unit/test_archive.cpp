#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <string>

#include "rdfront/archive.hpp"
#include "rdfront/errors.hpp"

using namespace rdfront;

namespace {

const AsymptoticBundle& bundle() {
    static const AsymptoticBundle b = assemble_bundle(4);
    return b;
}

const std::string& text() {
    static const std::string t = serialize_archive(archive_from(bundle()));
    return t;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

std::string error_of(const std::string& s, int n = 0) {
    try {
        parse_archive(s, n);
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("shortest round-trip formatting") {
    for (double v : {0.1, 1.0 / 3, 1e-300, -2.5e17, 0.0, std::numeric_limits<double>::denorm_min()}) {
        const std::string s = format_double(v);
        CHECK(same_bits(std::strtod(s.c_str(), nullptr), v));
    }
    CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("save then load gives bit-identical evaluations") {
    const auto& b = bundle();
    const AsymptoticBundle r = bundle_from(parse_archive(text(), 4));
    auto compare = [](const Profile& p, const Profile& q) {
        REQUIRE(p.x().size() == q.x().size());
        for (std::size_t i = 0; i < p.x().size(); i += 3)
            for (int order = 0; order <= 2; ++order) {
                CAPTURE(i);
                CAPTURE(order);
                CHECK(same_bits(p.eval(p.x()[i], order), q.eval(q.x()[i], order)));
            }
        const double beyond = 2 * p.x_last();
        CHECK(same_bits(p.eval(beyond), q.eval(beyond)));
    };
    compare(b.eta.profile, r.eta.profile);
    compare(b.mu2.m, r.mu2.m);
    compare(b.phi2.h, r.phi2.h);
    CHECK(same_bits(v_infinity(3.7, 1e4, b), v_infinity(3.7, 1e4, r)));
    CHECK(same_bits(b.mu2.mu4(0.05), r.mu2.mu4(0.05)));
    CHECK(serialize_archive(archive_from(r)) == text());
}

TEST_CASE("load rejects a different n") {
    CHECK_THROWS_AS(parse_archive(text(), 5), ConfigError);
    CHECK(error_of(text(), 5).find("n = 4") != std::string::npos);
}

TEST_CASE("a missing tail block is named in the error") {
    std::string t = text();
    const auto a = t.find("#block eta.tail");
    const auto b = t.find("#block", a + 1);
    t.erase(a, b - a);
    CHECK(error_of(t).find("eta.tail") != std::string::npos);
}

TEST_CASE("truncated and corrupted files") {
    const std::string cut = text().substr(0, text().size() / 2);
    const std::string e = error_of(cut);
    CHECK(e.find("byte") != std::string::npos);
    CHECK(e.find("truncated") != std::string::npos);

    CHECK(error_of(text().substr(0, 30)).find("byte") != std::string::npos);

    std::string v = text();
    v.replace(v.find("\"version\":1"), 11, "\"version\":9");
    CHECK(error_of(v).find("version 9") != std::string::npos);

    std::string c = text();
    const auto pos = c.find("\n", c.find("#block eta.nodes"));
    const auto row = c.find("\n", pos + 1) + 1;
    c.replace(row, 3, "abc");
    CHECK(error_of(c).find("bad number") != std::string::npos);
}

TEST_CASE("result blocks survive a round trip") {
    ProfileArchive a;
    a.n = 4;
    a.stages["inhomo"] = "abc";
    a.results["inhomo"] = CsvBlock{"table", {"t[nondim]", "N[nondim]"}, {{100, 0.5}, {1000, 0.02}}};
    const auto r = parse_archive(serialize_archive(a));
    CHECK(r.stages.at("inhomo") == "abc");
    CHECK(r.results.at("inhomo").rows.size() == 2);
    CHECK(r.results.at("inhomo").rows[1][1] == 0.02);
    CHECK_FALSE(r.eta.has_value());
    CHECK_THROWS_AS(bundle_from(r), ArchiveError);
}
