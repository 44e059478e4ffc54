#include "rdfront/shooting.hpp"

#include <sstream>

#include "rdfront/errors.hpp"

namespace rdfront {

const char* to_string(ShotClass c) {
    switch (c) {
        case ShotClass::set_one: return "I1";
        case ShotClass::set_two: return "I2";
        case ShotClass::undecided: return "undecided";
    }
    return "unknown";
}

BisectionResult bisect_shoot(const std::function<ShotClass(double)>& classify, double lo, double hi, double tol) {
    if (!(lo < hi)) throw BracketInvalid("bisect_shoot: empty bracket");
    BisectionResult res;
    const ShotClass clo = classify(lo);
    const ShotClass chi = classify(hi);
    res.history.push_back({lo, clo});
    res.history.push_back({hi, chi});
    if (clo == chi || clo == ShotClass::undecided || chi == ShotClass::undecided) {
        std::ostringstream os;
        os.precision(17);
        os << "bisect_shoot: bracket [" << lo << ", " << hi << "] classified " << to_string(clo) << " / "
           << to_string(chi);
        throw BracketInvalid(os.str());
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            res.floor_reached = true;
            break;
        }
        const ShotClass c = classify(mid);
        res.history.push_back({mid, c});
        if (c == ShotClass::undecided) {
            res.floor_reached = true;
            break;
        }
        if (c == clo) lo = mid;
        else hi = mid;
    }
    res.lo = lo;
    res.hi = hi;
    res.tag_lo = clo;
    res.tag_hi = chi;
    res.root = 0.5 * (lo + hi);
    return res;
}

BisectionResult bisect_shoot(const Classifier& classify, double lo, double hi, double tol) {
    return bisect_shoot(std::function<ShotClass(double)>([&](double p) { return classify(p).tag; }), lo, hi, tol);
}

}  // namespace rdfront
