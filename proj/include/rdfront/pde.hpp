#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rdfront/asymptotics.hpp"
#include "rdfront/fit.hpp"
#include "rdfront/kernels.hpp"

namespace rdfront {

/// Simulation settings. A zero L or dx selects the smallest admissible value
/// (10 sqrt(t_end) and tau^alpha / 20).
struct SimConfig {
    int n = 4;
    double tau = 100;
    double t_end = 1e4;
    double L = 0;
    double dx = 0;
    double safety = 0.9;
    double perturb_amp = 0;
    double perturb_width = 5;
    int checkpoints = 25;  ///< log-spaced in (tau, t_end], t_end included

    /// Optional tabulated perturbation (x, psi), linear in between, zero
    /// outside. Replaces the bump when non-empty. Not read from config files.
    std::vector<std::pair<double, double>> custom_perturbation;
    bool reaction = true;  ///< false: heat equation only
    bool use_parallel = true;
};

/// Flat key=value text, '#' starts a comment. Unknown keys, duplicates and
/// malformed numbers throw ConfigError.
SimConfig parse_sim_config(const std::string& text);
SimConfig load_sim_config(const std::string& path);

/// Fills in L and dx defaults and checks the invariants (ConfigError).
SimConfig resolve_config(SimConfig c, const ModelParams& p);

struct PdeState {
    kernels::Grid1D grid;
    std::vector<double> v;
    double t = 0;
};

double perturbation(const SimConfig& c, double x);

/// v = v_inf(., tau) + perturbation; boundary nodes hold v_inf(+-L, tau).
PdeState init_state(const SimConfig& config, const AsymptoticBundle& b);

/// Scratch buffers and the factorised implicit operator for one dt.
struct StepWorkspace {
    std::vector<double> R, r;
    kernels::ConstantTridiagonal lhs;
    double dt = 0;
};

/// One IMEX step: Crank-Nicolson diffusion, explicit reaction with u at the
/// half step, Dirichlet values (at t + dt) at both ends. Throws NumericError on a
/// non-finite value (state left untouched).
void step(PdeState& s, double dt, int n, bool reaction, std::pair<double, double> left_right_new,
          StepWorkspace& ws, bool use_parallel = true);

struct Checkpoint {
    double t = 0;
    double sup_err = 0;    ///< sup |v - v_inf|
    double l1_err = 0;     ///< int |v - v_inf|
    double front_peak_x = 0;
    double front_peak = 0;  ///< max F
    double front_at_0 = 0;  ///< F(0, t)
    double front_half_width = 0;
    double evenness = 0;
    double boundary_dev = 0;  ///< max |v(+-L) - 1|
    double min_a = 0, min_b = 0;  ///< min of (v + u)/2 and (v - u)/2
};

struct ConvergenceReport {
    SimConfig config;
    std::vector<Checkpoint> checkpoints;
    SlopeFit sup_slope;    ///< last decade
    SlopeFit front_slope;  ///< log F(0, t) over the last decade
    double max_evenness = 0;
    double max_boundary_dev = 0;
    double min_two_u_phi_tau = 0;  ///< potential_scan at tau
    long steps = 0;
    bool aborted = false;
    std::string abort_message;
};

using FieldSink = std::function<void(const PdeState& s, const std::vector<double>& v_inf)>;

/// Runs from tau to t_end with dt = safety min(dx^2 / 2, 1 / max |dR/dv|),
/// shortened to land on checkpoints. sink (if set) receives the field at
/// every checkpoint. A step failure ends the run with aborted = true and the
/// checkpoints recorded so far.
ConvergenceReport run(const SimConfig& config, const AsymptoticBundle& b, const FieldSink& sink = {});

/// Least-squares slope of log y against log t over t in [t_hi / 10^decades, t_hi].
/// Throws ConfigError with fewer than 4 points in the window.
SlopeFit fit_decay(const std::vector<double>& t, const std::vector<double>& y, double decades = 1);
SlopeFit fit_decay(const ConvergenceReport& r, double decades = 1);

struct HeatConvergence {
    std::vector<double> dx, err;  ///< sup error against the heat kernel at t1
    std::vector<double> order;    ///< log2 of successive error ratios
};

/// Heat equation from the Gaussian kernel at t0 to t1 on [-L, L], dx halved
/// levels times with dt = safety dx^2 / 2.
HeatConvergence heat_convergence(double dx0, int levels, double t0 = 1, double t1 = 2, double L = 20,
                                 double safety = 0.9);

}  // namespace rdfront
