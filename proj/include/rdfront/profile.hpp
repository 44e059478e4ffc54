#pragma once

#include <array>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "rdfront/ode.hpp"

namespace rdfront {

/// f(x) = sum_k c[k] x^k, used left of the first grid node.
struct TaylorLeft {
    std::array<double, 5> c{};
};

/// f(x) = coeff * x^exponent, used left of the first grid node.
struct PowerLeft {
    double coeff = 0;
    double exponent = 0;
};

/// Grid starts at x = 0, nothing to the left.
struct NoLeft {};

using LeftDescriptor = std::variant<NoLeft, TaylorLeft, PowerLeft>;

/// f(x) = c1 x^-q1 + c2 x^-q2 right of the last node.
struct PowerTail {
    double c1 = 0, q1 = 0;
    double c2 = 0, q2 = 0;
};

/// f(x) = C exp(-x^2/4) x^-r (1 + c1 x^-2) right of the last node.
struct GaussianTail {
    double amplitude = 0;
    double r = 0;
    double c1 = 0;
};

using TailDescriptor = std::variant<PowerTail, GaussianTail>;

double eval_tail(const TailDescriptor& t, double x, int order);
double eval_left(const LeftDescriptor& l, double x, int order);

/// Power tail with the leading term (c1, q1) given and the correction
/// (c2, q2) chosen so that value and slope match (f, fp) at x: the tail then
/// joins the grid C^1. Falls back to fixed q2 = q2_fallback if the fitted
/// exponent is not finite.
PowerTail pin_power_tail(double x, double f, double fp, double c1, double q1, double q2_fallback);

/// Power tail with both exponents given; c2 matches the value f at x.
PowerTail pin_power_tail_value(double x, double f, double c1, double q1, double q2);

/// Gaussian tail with exponent r given; amplitude and c1 match (f, fp) at x.
GaussianTail pin_gaussian_tail(double x, double f, double fp, double r);

/// Tabulated solution of a second-order ODE with its end descriptors.
/// Immutable once built.
class Profile {
public:
    Profile() = default;
    Profile(std::vector<double> x, std::vector<double> f, std::vector<double> fp, std::vector<double> fpp,
            LeftDescriptor left, TailDescriptor tail, SecondOrderRhs ode);

    /// Build from a rightward trajectory.
    static Profile from_trajectory(const Trajectory& tr, LeftDescriptor left, TailDescriptor tail,
                                   SecondOrderRhs ode);

    /// order 0, 1 or 2. x must be >= 0.
    double eval(double x, int order = 0) const;
    double operator()(double x) const { return eval(x, 0); }

    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& f() const { return f_; }
    const std::vector<double>& fp() const { return fp_; }
    const std::vector<double>& fpp() const { return fpp_; }
    const LeftDescriptor& left() const { return left_; }
    const TailDescriptor& tail() const { return tail_; }
    const SecondOrderRhs& ode() const { return ode_; }
    double x_first() const { return x_.front(); }
    double x_last() const { return x_.back(); }
    bool empty() const { return x_.empty(); }

    /// Largest relative jump in value and in slope across the two seams.
    std::array<double, 2> seam_mismatch() const;

private:
    std::vector<double> x_, f_, fp_, fpp_;
    LeftDescriptor left_;
    TailDescriptor tail_;
    SecondOrderRhs ode_;
};

/// Drop nodes that are not strictly increasing (e.g. an event step landing
/// on a previous node) and reverse a leftward trajectory.
Trajectory normalized(Trajectory tr);

/// Concatenate a leftward trajectory (reversed) and a rightward one that
/// share their starting point.
Trajectory join(const Trajectory& leftward, const Trajectory& rightward);

}  // namespace rdfront
