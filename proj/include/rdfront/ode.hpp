#pragma once

#include <functional>
#include <string>
#include <vector>

namespace rdfront {

/// Right-hand side of a scalar second-order ODE: returns y'' given (x, y, y').
using SecondOrderRhs = std::function<double(double x, double y, double yp)>;

/// Sign change of g(x, y, y') along a trajectory. direction = +1 fires only on
/// a rising crossing, -1 only on a falling one, 0 on either.
struct Event {
    std::string name;
    std::function<double(double x, double y, double yp)> g;
    int direction = 0;
};

enum class Termination { reached_end, event, step_underflow, blow_up };

const char* to_string(Termination t);

struct IntegrateOptions {
    double rtol = 1e-10;
    double atol = 1e-14;
    double h_init = 0;           ///< first step; 0 picks one automatically
    double h_max = 0;            ///< 0 means unbounded
    long max_steps = 5'000'000;
    double overflow = 1e150;     ///< |y| or |y'| above this ends the run as blow-up
    bool record = true;          ///< keep the node samples
    bool densify = true;         ///< add nodes until cubic Hermite meets the tolerance
};

/// Samples (x, y, y', y'') of one integration, x strictly monotone in the
/// direction of integration.
struct Trajectory {
    std::vector<double> x, y, yp, ypp;
    Termination reason = Termination::reached_end;
    int event_index = -1;  ///< index into the events list when reason == event
    double x_end = 0, y_end = 0, yp_end = 0;
    long steps = 0, rejected = 0, rhs_calls = 0;
};

/// Dormand-Prince 5(4) on the system (y, y'). Integrates from x0 towards x1
/// (either direction), stopping at x1 or at the first event crossing, which
/// is located to within rtol in x by bisecting the step length.
Trajectory integrate(const SecondOrderRhs& rhs, double x0, double y0, double yp0, double x1,
                     const std::vector<Event>& events = {}, const IntegrateOptions& opt = {});

}  // namespace rdfront
