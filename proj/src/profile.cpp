#include "rdfront/profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rdfront/errors.hpp"

namespace rdfront {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double power_term(double c, double q, double x, int order) {
    // c x^-q and its derivatives
    switch (order) {
        case 0: return c * std::pow(x, -q);
        case 1: return -q * c * std::pow(x, -q - 1);
        default: return q * (q + 1) * c * std::pow(x, -q - 2);
    }
}

}  // namespace

double eval_tail(const TailDescriptor& t, double x, int order) {
    return std::visit(
        overloaded{
            [&](const PowerTail& p) {
                double v = power_term(p.c1, p.q1, x, order);
                if (p.c2 != 0) v += power_term(p.c2, p.q2, x, order);
                return v;
            },
            [&](const GaussianTail& g) {
                const double e = std::exp(-0.25 * x * x);
                const double e1 = -0.5 * x * e;
                const double e2 = (0.25 * x * x - 0.5) * e;
                const double r = g.r;
                const double p0 = std::pow(x, -r) + g.c1 * std::pow(x, -r - 2);
                const double p1 = -r * std::pow(x, -r - 1) - (r + 2) * g.c1 * std::pow(x, -r - 3);
                const double p2 = r * (r + 1) * std::pow(x, -r - 2) + (r + 2) * (r + 3) * g.c1 * std::pow(x, -r - 4);
                switch (order) {
                    case 0: return g.amplitude * e * p0;
                    case 1: return g.amplitude * (e1 * p0 + e * p1);
                    default: return g.amplitude * (e2 * p0 + 2 * e1 * p1 + e * p2);
                }
            },
        },
        t);
}

double eval_left(const LeftDescriptor& l, double x, int order) {
    return std::visit(overloaded{
                          [&](const NoLeft&) -> double {
                              throw DomainError("profile has no data left of its first node");
                          },
                          [&](const TaylorLeft& t) {
                              const auto& c = t.c;
                              switch (order) {
                                  case 0: return c[0] + x * (c[1] + x * (c[2] + x * (c[3] + x * c[4])));
                                  case 1: return c[1] + x * (2 * c[2] + x * (3 * c[3] + x * 4 * c[4]));
                                  default: return 2 * c[2] + x * (6 * c[3] + x * 12 * c[4]);
                              }
                          },
                          [&](const PowerLeft& p) { return power_term(p.coeff, -p.exponent, x, order); },
                      },
                      l);
}

PowerTail pin_power_tail(double x, double f, double fp, double c1, double q1, double q2_fallback) {
    PowerTail t;
    t.c1 = c1;
    t.q1 = q1;
    const double g = f - c1 * std::pow(x, -q1);
    const double gp = fp + q1 * c1 * std::pow(x, -q1 - 1);
    double q2 = -x * gp / g;
    if (!std::isfinite(q2) || g == 0) q2 = q2_fallback;
    t.q2 = q2;
    t.c2 = g * std::pow(x, q2);
    return t;
}

PowerTail pin_power_tail_value(double x, double f, double c1, double q1, double q2) {
    PowerTail t{c1, q1, 0, q2};
    t.c2 = (f - c1 * std::pow(x, -q1)) * std::pow(x, q2);
    return t;
}

GaussianTail pin_gaussian_tail(double x, double f, double fp, double r) {
    GaussianTail t;
    t.r = r;
    const double k = -0.5 * x - r / x - fp / f;
    const double w = 0.5 * k * x;
    const double s = w / (1 - w);
    t.c1 = s * x * x;
    t.amplitude = f / (std::exp(-0.25 * x * x) * std::pow(x, -r) * (1 + s));
    return t;
}

Profile::Profile(std::vector<double> x, std::vector<double> f, std::vector<double> fp, std::vector<double> fpp,
                 LeftDescriptor left, TailDescriptor tail, SecondOrderRhs ode)
    : x_(std::move(x)), f_(std::move(f)), fp_(std::move(fp)), fpp_(std::move(fpp)), left_(left), tail_(tail),
      ode_(std::move(ode)) {
    if (x_.empty() || f_.size() != x_.size() || fp_.size() != x_.size() || fpp_.size() != x_.size())
        throw std::invalid_argument("Profile: grid arrays empty or of unequal length");
    if (x_.front() < 0) throw DomainError("Profile: grid starts at negative x");
    for (std::size_t i = 1; i < x_.size(); ++i)
        if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("Profile: grid not strictly increasing");
}

Profile Profile::from_trajectory(const Trajectory& tr, LeftDescriptor left, TailDescriptor tail,
                                 SecondOrderRhs ode) {
    Trajectory t = normalized(tr);
    return Profile(std::move(t.x), std::move(t.y), std::move(t.yp), std::move(t.ypp), left, tail, std::move(ode));
}

double Profile::eval(double x, int order) const {
    if (x < 0 || std::isnan(x)) throw DomainError("profile evaluated at negative x");
    if (x < x_.front()) return eval_left(left_, x, order);
    if (x > x_.back()) {
        if (order == 2 && ode_) return ode_(x, eval_tail(tail_, x, 0), eval_tail(tail_, x, 1));
        return eval_tail(tail_, x, order);
    }
    if (x == x_.back()) {
        switch (order) {
            case 0: return f_.back();
            case 1: return fp_.back();
            default: return ode_ ? ode_(x, f_.back(), fp_.back()) : fpp_.back();
        }
    }
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = it == x_.end() ? x_.size() - 2 : static_cast<std::size_t>(it - x_.begin()) - 1;
    if (x_.size() == 1) {
        switch (order) {
            case 0: return f_[0];
            case 1: return fp_[0];
            default: return fpp_[0];
        }
    }
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    // Written as f0 + (f1 - f0) h01 + ... so that constants are reproduced exactly.
    auto herm = [&](const std::vector<double>& v, const std::vector<double>& d) {
        return v[i] + (v[i + 1] - v[i]) * h01 + h * (h10 * d[i] + h11 * d[i + 1]);
    };
    if (order == 0) return herm(f_, fp_);
    if (order == 1) return herm(fp_, fpp_);
    if (ode_) return ode_(x, herm(f_, fp_), herm(fp_, fpp_));
    // Derivative of the slope interpolant.
    const double d00 = 6 * t2 - 6 * t, d10 = 3 * t2 - 4 * t + 1, d01 = -6 * t2 + 6 * t, d11 = 3 * t2 - 2 * t;
    return (d00 * fp_[i] + d10 * h * fpp_[i] + d01 * fp_[i + 1] + d11 * h * fpp_[i + 1]) / h;
}

std::array<double, 2> Profile::seam_mismatch() const {
    auto rel = [](double a, double b) {
        const double s = std::max(std::abs(a), std::abs(b));
        return s == 0 ? 0.0 : std::abs(a - b) / s;
    };
    std::array<double, 2> out{0, 0};
    if (!std::holds_alternative<NoLeft>(left_)) {
        out[0] = std::max(out[0], rel(eval_left(left_, x_.front(), 0), f_.front()));
        out[1] = std::max(out[1], rel(eval_left(left_, x_.front(), 1), fp_.front()));
    }
    out[0] = std::max(out[0], rel(eval_tail(tail_, x_.back(), 0), f_.back()));
    out[1] = std::max(out[1], rel(eval_tail(tail_, x_.back(), 1), fp_.back()));
    return out;
}

Trajectory normalized(Trajectory tr) {
    const std::size_t n = tr.x.size();
    if (n >= 2 && tr.x.back() < tr.x.front()) {
        std::reverse(tr.x.begin(), tr.x.end());
        std::reverse(tr.y.begin(), tr.y.end());
        std::reverse(tr.yp.begin(), tr.yp.end());
        std::reverse(tr.ypp.begin(), tr.ypp.end());
    }
    std::size_t w = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (w > 0 && !(tr.x[i] > tr.x[w - 1])) continue;
        tr.x[w] = tr.x[i];
        tr.y[w] = tr.y[i];
        tr.yp[w] = tr.yp[i];
        tr.ypp[w] = tr.ypp[i];
        ++w;
    }
    tr.x.resize(w);
    tr.y.resize(w);
    tr.yp.resize(w);
    tr.ypp.resize(w);
    return tr;
}

Trajectory join(const Trajectory& leftward, const Trajectory& rightward) {
    Trajectory l = normalized(leftward);
    Trajectory r = normalized(rightward);
    Trajectory out = r;
    out.x.clear();
    out.y.clear();
    out.yp.clear();
    out.ypp.clear();
    const std::size_t nl = l.x.empty() ? 0 : l.x.size() - 1;  // shared start node appears once
    out.x.insert(out.x.end(), l.x.begin(), l.x.begin() + nl);
    out.y.insert(out.y.end(), l.y.begin(), l.y.begin() + nl);
    out.yp.insert(out.yp.end(), l.yp.begin(), l.yp.begin() + nl);
    out.ypp.insert(out.ypp.end(), l.ypp.begin(), l.ypp.begin() + nl);
    out.x.insert(out.x.end(), r.x.begin(), r.x.end());
    out.y.insert(out.y.end(), r.y.begin(), r.y.end());
    out.yp.insert(out.yp.end(), r.yp.begin(), r.yp.end());
    out.ypp.insert(out.ypp.end(), r.ypp.begin(), r.ypp.end());
    return out;
}

}  // namespace rdfront
