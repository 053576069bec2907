#include "macrosim/hermite.hpp"

#include <cmath>

namespace macrosim {

Eigen::VectorXd hermite_values(int n_max, double x) {
    Eigen::VectorXd h(n_max);
    const double h0 = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
    h(0) = h0;
    if (n_max > 1) h(1) = std::sqrt(2.0) * x * h0;
    for (int n = 2; n < n_max; ++n)
        h(n) = x * std::sqrt(2.0 / n) * h(n - 1) - std::sqrt((n - 1.0) / n) * h(n - 2);
    return h;
}

}  // namespace macrosim
