#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "rdfront/errors.hpp"
#include "rdfront/pipeline.hpp"

using namespace rdfront;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("rdfront_unit_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("pipeline caches every stage on the second run") {
    const fs::path dir = scratch("pipe");
    std::ofstream(dir / kSimConfigFile) << "t_end = 200\ncheckpoints = 8\n";
    PipelineOptions o;
    o.workdir = dir.string();
    std::ostringstream log;
    const auto first = run_pipeline(o, log);
    REQUIRE(first.stages.size() == 7);
    for (const auto& s : first.stages) CHECK_FALSE(s.cached);
    const auto second = run_pipeline(o, log);
    for (const auto& s : second.stages) CHECK(s.cached);
    REQUIRE(first.checks.size() == second.checks.size());
    for (std::size_t i = 0; i < first.checks.size(); ++i)
        for (std::size_t k = 0; k + 1 < first.checks[i].metrics.size(); ++k)
            CHECK(first.checks[i].metrics[k].value == second.checks[i].metrics[k].value);
    CHECK(log.str().find("stage simulate: cached") != std::string::npos);

    o.solver.tol = 1e-12;
    const auto third = run_pipeline(o, log);
    CHECK(third.stages[0].cached);
    CHECK_FALSE(third.stages[1].cached);
    fs::remove_all(dir);
}

TEST_CASE("pipeline rejects n = 3 at the parameter stage") {
    PipelineOptions o;
    o.n = 3;
    o.workdir = scratch("n3").string();
    std::ostringstream log;
    try {
        run_pipeline(o, log);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("stage params") != std::string::npos);
    }
    CHECK(log.str().empty());
}

TEST_CASE("a sim.conf for another n is a config error") {
    const fs::path dir = scratch("conf");
    std::ofstream(dir / kSimConfigFile) << "n = 5\n";
    PipelineOptions o;
    o.workdir = dir.string();
    std::ostringstream log;
    CHECK_THROWS_AS(run_pipeline(o, log), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("stage blocks round-trip") {
    HeatConvergence h{{0.2, 0.1, 0.05}, {4e-4, 1e-4, 2.5e-5}, {}};
    const auto back = heat_from_block(heat_block(h));
    REQUIRE(back.order.size() == 2);
    CHECK(back.order[0] == doctest::Approx(2));

    ConvergenceReport r;
    for (int k = 0; k < 6; ++k) {
        Checkpoint c;
        c.t = 100 * std::pow(10.0, k / 5.0);
        c.sup_err = 1e-3 * std::pow(c.t / 100, -0.5);
        c.front_at_0 = std::pow(c.t, -8.0 / 9);
        c.evenness = 1e-15 * k;
        r.checkpoints.push_back(c);
    }
    const auto b = report_from_block(report_block(r), SimConfig{});
    CHECK(b.checkpoints.size() == 6);
    CHECK(b.sup_slope.slope == doctest::Approx(-0.5));
    CHECK(b.front_slope.slope == doctest::Approx(-8.0 / 9));
    CHECK(b.max_evenness == 1e-15 * 5);
    CHECK(report_json(b).at("schema") == "rdfront.simulate");
}
