#include "rdfront/ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace rdfront {

const char* to_string(Termination t) {
    switch (t) {
        case Termination::reached_end: return "reached_end";
        case Termination::event: return "event";
        case Termination::step_underflow: return "step_underflow";
        case Termination::blow_up: return "blow_up";
    }
    return "unknown";
}

namespace {

using Vec = std::array<double, 2>;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension (Hairer & Wanner dopri5).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

struct Stepper {
    const SecondOrderRhs& rhs;
    long calls = 0;

    Vec f(double x, const Vec& y) {
        ++calls;
        return {y[1], rhs(x, y[0], y[1])};
    }

    struct Result {
        Vec y;
        Vec k7;
        Vec err;
        std::array<Vec, 7> k;
    };

    // One step of size h from (x, y) with k1 = f(x, y) already known.
    Result step(double x, const Vec& y, const Vec& k1, double h) {
        Result r;
        auto& k = r.k;
        k[0] = k1;
        auto comb = [&](std::initializer_list<std::pair<int, double>> terms) {
            Vec out = y;
            for (int i = 0; i < 2; ++i) {
                double s = 0;
                for (auto [j, a] : terms) s += a * k[j][i];
                out[i] += h * s;
            }
            return out;
        };
        k[1] = f(x + c2 * h, comb({{0, a21}}));
        k[2] = f(x + c3 * h, comb({{0, a31}, {1, a32}}));
        k[3] = f(x + c4 * h, comb({{0, a41}, {1, a42}, {2, a43}}));
        k[4] = f(x + c5 * h, comb({{0, a51}, {1, a52}, {2, a53}, {3, a54}}));
        k[5] = f(x + h, comb({{0, a61}, {1, a62}, {2, a63}, {3, a64}, {4, a65}}));
        r.y = comb({{0, a71}, {2, a73}, {3, a74}, {4, a75}, {5, a76}});
        k[6] = f(x + h, r.y);
        r.k7 = k[6];
        for (int i = 0; i < 2; ++i) {
            r.err[i] = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] + e6 * k[5][i] +
                            e7 * k[6][i]);
        }
        return r;
    }
};

bool finite(const Vec& v) { return std::isfinite(v[0]) && std::isfinite(v[1]); }

// Dense output coefficients for one accepted step.
struct Dense {
    std::array<Vec, 5> r;
    Dense(const Vec& y0, const Vec& y1, const std::array<Vec, 7>& k, double h) {
        for (int i = 0; i < 2; ++i) {
            const double ydiff = y1[i] - y0[i];
            const double bspl = h * k[0][i] - ydiff;
            r[0][i] = y0[i];
            r[1][i] = ydiff;
            r[2][i] = bspl;
            r[3][i] = ydiff - h * k[6][i] - bspl;
            r[4][i] = h * (d1 * k[0][i] + d3 * k[2][i] + d4 * k[3][i] + d5 * k[4][i] + d6 * k[5][i] +
                           d7 * k[6][i]);
        }
    }
    Vec at(double theta) const {
        const double t1 = 1.0 - theta;
        Vec out;
        for (int i = 0; i < 2; ++i) {
            out[i] = r[0][i] + theta * (r[1][i] + t1 * (r[2][i] + theta * (r[3][i] + t1 * r[4][i])));
        }
        return out;
    }
};

double hermite_mid(double f0, double d0, double f1, double d1, double h) {
    return 0.5 * (f0 + f1) + 0.125 * h * (d0 - d1);
}

bool crosses(double g0, double g1, int direction) {
    const bool rising = g0 < 0 && g1 >= 0;
    const bool falling = g0 > 0 && g1 <= 0;
    if (direction > 0) return rising;
    if (direction < 0) return falling;
    return rising || falling;
}

}  // namespace

Trajectory integrate(const SecondOrderRhs& rhs, double x0, double y0, double yp0, double x1,
                     const std::vector<Event>& events, const IntegrateOptions& opt) {
    Trajectory tr;
    Stepper st{rhs};
    const double dir = x1 >= x0 ? 1.0 : -1.0;
    const double span = std::abs(x1 - x0);

    double x = x0;
    Vec y{y0, yp0};
    Vec k1 = st.f(x, y);

    auto push = [&](double xs, const Vec& ys, double ypps) {
        if (!opt.record) return;
        tr.x.push_back(xs);
        tr.y.push_back(ys[0]);
        tr.yp.push_back(ys[1]);
        tr.ypp.push_back(ypps);
    };
    auto finish = [&](Termination why) {
        tr.reason = why;
        tr.x_end = x;
        tr.y_end = y[0];
        tr.yp_end = y[1];
        tr.rhs_calls = st.calls;
        return tr;
    };

    push(x, y, k1[1]);
    if (span == 0) return finish(Termination::reached_end);

    auto scale = [&](int i, const Vec& a, const Vec& b) {
        return opt.atol + opt.rtol * std::max(std::abs(a[i]), std::abs(b[i]));
    };

    std::vector<double> g_prev(events.size());
    for (std::size_t e = 0; e < events.size(); ++e) g_prev[e] = events[e].g(x, y[0], y[1]);

    // Starting step size (Hairer & Wanner, II.4).
    double h = opt.h_init;
    if (h <= 0) {
        double d0 = 0, d1n = 0;
        for (int i = 0; i < 2; ++i) {
            const double sc = opt.atol + opt.rtol * std::abs(y[i]);
            d0 = std::max(d0, std::abs(y[i]) / sc);
            d1n = std::max(d1n, std::abs(k1[i]) / sc);
        }
        double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
        h0 = std::min(h0, span);
        Vec ye{y[0] + dir * h0 * k1[0], y[1] + dir * h0 * k1[1]};
        Vec f1 = st.f(x + dir * h0, ye);
        double d2 = 0;
        for (int i = 0; i < 2; ++i) {
            const double sc = opt.atol + opt.rtol * std::abs(y[i]);
            d2 = std::max(d2, std::abs(f1[i] - k1[i]) / sc / h0);
        }
        if (!std::isfinite(d2)) d2 = 1e300;
        const double dm = std::max(d1n, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
        h = std::min(100 * h0, h1);
        // A vanishing component with a tiny atol drives the estimate to zero.
        h = std::max(h, 1e-8 * span);
    }
    if (opt.h_max > 0) h = std::min(h, opt.h_max);
    h = std::min(h, span);

    // Insert interior nodes where cubic Hermite would miss the tolerance.
    auto densify = [&](const Stepper::Result& r, double hs) {
        if (!opt.record || !opt.densify) return;
        Dense dn(y, r.y, r.k, hs);
        const Vec mid = dn.at(0.5);
        const double hy = hermite_mid(y[0], y[1], r.y[0], r.y[1], hs);
        const double hyp = hermite_mid(y[1], k1[1], r.y[1], r.k7[1], hs);
        const double ratio = std::max(std::abs(hy - mid[0]) / (opt.atol + opt.rtol * std::abs(mid[0])),
                                      std::abs(hyp - mid[1]) / (opt.atol + opt.rtol * std::abs(mid[1])));
        if (!(ratio > 1) || !std::isfinite(ratio)) return;
        const int k = std::min(64, static_cast<int>(std::ceil(std::pow(ratio, 0.25))) + 1);
        for (int j = 1; j < k; ++j) {
            const double th = static_cast<double>(j) / k;
            const Vec v = dn.at(th);
            const double xs = x + th * hs;
            ++st.calls;
            push(xs, v, rhs(xs, v[0], v[1]));
        }
    };

    bool last_rejected = false;
    while (true) {
        if (tr.steps >= opt.max_steps) return finish(Termination::step_underflow);
        const double remaining = std::abs(x1 - x);
        bool hits_end = false;
        if (h >= remaining) {
            h = remaining;
            hits_end = true;
        }
        if (h <= 16 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)))
            return finish(Termination::step_underflow);

        const double hs = dir * h;
        auto r = st.step(x, y, k1, hs);
        double err = 0;
        if (!finite(r.y) || !finite(r.k7)) {
            err = std::numeric_limits<double>::infinity();
        } else {
            for (int i = 0; i < 2; ++i) err = std::max(err, std::abs(r.err[i]) / scale(i, y, r.y));
        }

        if (!(err <= 1.0)) {
            ++tr.rejected;
            const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
            h *= std::min(1.0, fac);
            hits_end = false;
            last_rejected = true;
            continue;
        }
        ++tr.steps;

        // Event check on the accepted step.
        int fired = -1;
        double s_fire = h;
        for (std::size_t e = 0; e < events.size(); ++e) {
            const double g1 = events[e].g(x + hs, r.y[0], r.y[1]);
            if (!crosses(g_prev[e], g1, events[e].direction)) continue;
            // Bisect the step length; each trial is a fresh step from x.
            double lo = 0, hi = h;
            const double xtol = std::max(opt.rtol, 4 * std::numeric_limits<double>::epsilon() * std::abs(x));
            while (hi - lo > xtol) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                auto rm = st.step(x, y, k1, dir * mid);
                const double gm = events[e].g(x + dir * mid, rm.y[0], rm.y[1]);
                if (crosses(g_prev[e], gm, events[e].direction)) hi = mid;
                else lo = mid;
            }
            if (fired < 0 || hi < s_fire) {
                fired = static_cast<int>(e);
                s_fire = hi;
            }
        }
        if (fired >= 0) {
            auto rf = s_fire == h ? r : st.step(x, y, k1, dir * s_fire);
            densify(rf, dir * s_fire);
            x += dir * s_fire;
            y = rf.y;
            push(x, y, rf.k7[1]);
            tr.event_index = fired;
            return finish(Termination::event);
        }

        densify(r, hs);

        x = hits_end ? x1 : x + hs;
        y = r.y;
        k1 = r.k7;
        push(x, y, k1[1]);
        for (std::size_t e = 0; e < events.size(); ++e) g_prev[e] = events[e].g(x, y[0], y[1]);

        if (std::abs(y[0]) > opt.overflow || std::abs(y[1]) > opt.overflow) return finish(Termination::blow_up);
        if (hits_end) return finish(Termination::reached_end);

        double fac = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        fac = std::clamp(fac, 0.2, 5.0);
        if (last_rejected) fac = std::min(fac, 1.0);
        last_rejected = false;
        h *= fac;
        if (opt.h_max > 0) h = std::min(h, opt.h_max);
    }
}

}  // namespace rdfront
