#pragma once

#include <cmath>

namespace delaygrad {

// Largest per-eigenvalue contraction factor alpha = eta * a for which the
// root geometry (and everything downstream of it) is certified.
inline double alpha_certified_limit(int tau) {
    return 1.0 / (20.0 * (tau + 1));
}

// Largest certified step size for a mu-smooth objective under delay tau.
inline double max_certified_step(double mu, int tau) {
    return 1.0 / (20.0 * mu * (tau + 1));
}

// First iteration index at which coefficient sequences are in the geometric
// decay regime: ceil((tau+1) * ln(2(tau+1))).
inline int geometric_regime_start(int tau) {
    return static_cast<int>(
        std::ceil((tau + 1) * std::log(2.0 * (tau + 1))));
}

}  // namespace delaygrad
