#include "rdfront/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "rdfront/errors.hpp"

namespace rdfront {

namespace {

// QUADPACK qk15 abscissae and weights.
constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
    double a, b, value, error;
};

struct ByError {
    bool operator()(const Piece& p, const Piece& q) const {
        if (p.error != q.error) return p.error < q.error;
        return p.a > q.a;
    }
};

}  // namespace

QuadResult gauss_kronrod15(const Integrand& f, double a, double b) {
    constexpr double epmach = std::numeric_limits<double>::epsilon();
    constexpr double uflow = std::numeric_limits<double>::min();
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resg = fc * wg[3];
    double resk = fc * wgk[7];
    double resabs = std::abs(resk);
    double f1[7], f2[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * xgk[j];
        f1[j] = f(center - dx);
        f2[j] = f(center + dx);
        resk += wgk[j] * (f1[j] + f2[j]);
        resabs += wgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) resg += wg[j / 2] * (f1[j] + f2[j]);
    }
    const double mean = resk * 0.5;
    double resasc = wgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) resasc += wgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
    QuadResult r;
    r.value = resk * half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double err = std::abs((resk - resg) * half);
    if (resasc != 0 && err != 0) err = resasc * std::min(1.0, std::pow(200 * err / resasc, 1.5));
    if (resabs > uflow / (50 * epmach)) err = std::max(epmach * 50 * resabs, err);
    r.error = err;
    r.intervals = 1;
    return r;
}

QuadResult quad(const Integrand& f, double a, double b, const QuadOptions& opt) {
    if (a == b) return {};
    std::priority_queue<Piece, std::vector<Piece>, ByError> heap;
    auto first = gauss_kronrod15(f, a, b);
    heap.push({a, b, first.value, first.error});
    double total = first.value, err = first.error;
    int count = 1;
    while (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (count >= opt.max_intervals) {
            std::ostringstream os;
            os << "quad: no convergence on [" << a << ", " << b << "] after " << count
               << " intervals, error estimate " << err;
            throw QuadratureError(os.str());
        }
        Piece p = heap.top();
        heap.pop();
        const double m = 0.5 * (p.a + p.b);
        if (!(m > std::min(p.a, p.b) && m < std::max(p.a, p.b))) {
            throw QuadratureError("quad: interval collapsed to floating-point resolution");
        }
        auto l = gauss_kronrod15(f, p.a, m);
        auto r = gauss_kronrod15(f, m, p.b);
        heap.push({p.a, m, l.value, l.error});
        heap.push({m, p.b, r.value, r.error});
        total += l.value + r.value - p.value;
        err += l.error + r.error - p.error;
        ++count;
    }
    // Re-sum in a fixed order so the value does not depend on the update history.
    std::vector<Piece> pieces;
    pieces.reserve(heap.size());
    while (!heap.empty()) {
        pieces.push_back(heap.top());
        heap.pop();
    }
    std::sort(pieces.begin(), pieces.end(), [](const Piece& p, const Piece& q) { return p.a < q.a; });
    QuadResult res;
    for (const auto& p : pieces) {
        res.value += p.value;
        res.error += p.error;
    }
    res.intervals = count;
    return res;
}

double tail_remainder(double fb, double b, DecayModel decay) {
    if (decay.kind == DecayModel::gaussian) return fb * 2.0 / b;
    return fb * b / (decay.exponent - 1.0);
}

QuadResult quad_to_infinity(const Integrand& f, double a, double b0, DecayModel decay, const QuadOptions& opt) {
    double b = std::max(b0, a + 1.0);
    QuadResult acc = quad(f, a, b, opt);
    for (int k = 0; k < 60; ++k) {
        const double rem = tail_remainder(f(b), b, decay);
        if (std::abs(rem) <= std::max(opt.abs_tol, opt.rel_tol * std::abs(acc.value))) {
            acc.value += rem;
            acc.error += std::abs(rem);
            return acc;
        }
        auto next = quad(f, b, 2 * b, opt);
        acc.value += next.value;
        acc.error += next.error;
        acc.intervals += next.intervals;
        b *= 2;
    }
    throw QuadratureError("quad_to_infinity: tail did not fall below tolerance");
}

}  // namespace rdfront
