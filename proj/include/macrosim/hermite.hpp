#pragma once

#include <Eigen/Dense>

namespace macrosim {

/// Hermite functions h_0(x) .. h_{n_max-1}(x): the real position-space
/// wavefunctions of the Fock states, <s|n>_q = h_n(s), orthonormal on the
/// line.  Three-term recurrence, stable upward:
///   h_0 = pi^{-1/4} e^{-x^2/2},  h_1 = sqrt(2) x h_0,
///   h_n = x sqrt(2/n) h_{n-1} - sqrt((n-1)/n) h_{n-2}.
Eigen::VectorXd hermite_values(int n_max, double x);

}  // namespace macrosim
