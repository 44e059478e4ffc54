#pragma once

#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdfront/asymptotics.hpp"
#include "rdfront/pde.hpp"

namespace rdfront {

/// One measured quantity against its bound.
struct Metric {
    std::string name;
    double value = 0;
    std::string bound;  ///< human-readable, e.g. "< 1e-2"
    bool pass = false;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    std::vector<Metric> metrics;
    double seconds = std::numeric_limits<double>::quiet_NaN();  ///< NaN: not timed (cached input)

    bool pass() const;
    /// "PASS 2 <title>: name=value (bound), ..." on one line.
    std::string line() const;
};

/// Pass `seconds` = NaN when the input was not computed in this process.
Metric runtime_metric(double seconds, double limit);

CriterionResult check_constants(const ModelParams& p, const nlohmann::json& fixture);
CriterionResult check_eta(const EtaSolution& s, double seconds);
CriterionResult check_mu2(const Mu2Solution& s, double seconds);
CriterionResult check_phi2(const Phi2Solution& s, const EtaSolution& eta, double seconds);

struct InhomoSeries {
    int n = 0;
    std::vector<double> t;
    std::vector<NormResult> norms;
    SlopeFit slope;
    double target = 0;  ///< -(1 + 4 gamma)
};

InhomoSeries inhomo_series(const AsymptoticBundle& b, const std::vector<double>& ts, double rel_tol = 1e-8);
Metric inhomo_slope_metric(const InhomoSeries& s);
CriterionResult check_inhomo(const std::vector<InhomoSeries>& series, double seconds);

struct PotentialSeries {
    int n = 0;
    std::vector<double> t;
    std::vector<PotentialScan> scans;
};

PotentialSeries potential_series(const AsymptoticBundle& b, const std::vector<double>& ts);
/// Odd n: every minimum >= 0. Even n: min >= -10 |min at t0| (t/t0)^-(gamma (n-1)(delta'+1)).
std::vector<Metric> potential_metrics(const PotentialSeries& s);
CriterionResult check_potential(const std::vector<PotentialSeries>& series, double seconds);

/// Largest |order - 2| of the heat-only refinement study, bound 0.2.
Metric heat_order_metric(const HeatConvergence& h);
/// Sup-norm slope, F(0, t_end) t_end^(2 n gamma) / eta2 and evenness of one run.
std::vector<Metric> pde_metrics(const ConvergenceReport& r, const AsymptoticBundle& b, const std::string& label);
CriterionResult check_pde(const ConvergenceReport& plain, const ConvergenceReport& perturbed, const HeatConvergence& heat,
                          const AsymptoticBundle& b, double seconds);

/// matching_gap(1, t) strictly decreasing on t = 10^(2 + k/4), k = 0..12.
CriterionResult check_matching(const AsymptoticBundle& b, double seconds);

}  // namespace rdfront
