#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdfront/archive.hpp"
#include "rdfront/checks.hpp"
#include "rdfront/pde.hpp"

namespace rdfront {

inline constexpr const char* kArchiveFile = "profiles.rda";
inline constexpr const char* kSimConfigFile = "sim.conf";

/// Solver settings shared by the CLI and the pipeline. tol = 0 keeps each
/// solver's own ODE tolerance.
struct SolverSettings {
    double tol = 0;
    EtaOptions eta_options() const;
    Mu2Options mu2_options() const;
    Phi2Options phi2_options() const;
    nlohmann::json to_json() const;
};

EtaSolution run_eta(const ModelParams& p, const SolverSettings& s);
Mu2Solution run_mu2(const ModelParams& p, const SolverSettings& s);
Phi2Solution run_phi2(const ModelParams& p, const EtaSolution& eta, const SolverSettings& s);

/// Times at which the inhomogeneous norm is evaluated by default.
std::vector<double> default_inhomo_times();
/// Times of the potential scans: 1e2, 1e3, 1e4.
std::vector<double> default_potential_times();

nlohmann::json sim_config_json(const SimConfig& c);
/// One row per checkpoint; units in the column names.
CsvBlock report_block(const ConvergenceReport& r);
/// Rebuilds checkpoints and the derived fits (config taken from `config`).
ConvergenceReport report_from_block(const CsvBlock& b, const SimConfig& config);
nlohmann::json report_json(const ConvergenceReport& r);

CsvBlock inhomo_block(const InhomoSeries& s);
InhomoSeries inhomo_from_block(const CsvBlock& b, int n);

CsvBlock heat_block(const HeatConvergence& h);
HeatConvergence heat_from_block(const CsvBlock& b);

/// v_inf on [0, 5 sqrt(t)] at t = 1e2, 1e3, 1e4.
CsvBlock v_inf_table(const AsymptoticBundle& b);

struct PipelineOptions {
    int n = 4;
    std::string workdir = ".";
    SolverSettings solver;
    std::string fixture_path;  ///< constants fixture; empty skips the constants check
};

struct StageStatus {
    std::string name;
    bool cached = false;
    double seconds = 0;
};

struct PipelineResult {
    std::vector<StageStatus> stages;
    std::vector<CriterionResult> checks;
    std::string archive_path;
    bool pass() const;
};

/// params -> eta -> mu2 -> phi2 -> assemble -> inhomo -> simulate. A stage
/// whose fingerprint (its inputs plus upstream fingerprints) matches the
/// archive in the workdir is reused. The archive is rewritten after each
/// computed stage. Progress lines go to `log`.
PipelineResult run_pipeline(const PipelineOptions& opt, std::ostream& log);

/// Fixed-width table of every metric, one row per metric.
std::string summary_table(const PipelineResult& r);

}  // namespace rdfront
