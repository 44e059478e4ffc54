#pragma once

#include <functional>
#include <vector>

#include "rdfront/ode.hpp"

namespace rdfront {

/// Which of the two open sets a trial trajectory entered.
enum class ShotClass { set_one, set_two, undecided };

const char* to_string(ShotClass c);

struct ShootingOutcome {
    ShotClass tag = ShotClass::undecided;
    double event_x = 0;  ///< where the deciding event fired
    Trajectory trajectory;
};

struct BisectionStep {
    double param;
    ShotClass tag;
};

struct BisectionResult {
    double root = 0;          ///< midpoint of the final bracket
    double lo = 0, hi = 0;    ///< final bracket
    ShotClass tag_lo{}, tag_hi{};
    bool floor_reached = false;  ///< stopped on an undecided shot or at floating-point resolution
    std::vector<BisectionStep> history;
};

using Classifier = std::function<ShootingOutcome(double)>;

/// Bisect on the shooting parameter until the bracket is narrower than tol.
/// The two endpoints must classify differently and neither may be undecided;
/// otherwise BracketInvalid is thrown.
BisectionResult bisect_shoot(const Classifier& classify, double lo, double hi, double tol);

/// Same, for a classifier that only returns the tag.
BisectionResult bisect_shoot(const std::function<ShotClass(double)>& classify, double lo, double hi, double tol);

}  // namespace rdfront
