#include "klmsim/common.hpp"

#include <stdexcept>

namespace klmsim {

double factorial(int n) {
    if (n < 0) {
        throw std::invalid_argument("factorial: negative argument");
    }
    double out = 1.0;
    for (int i = 2; i <= n; ++i) {
        out *= static_cast<double>(i);
    }
    return out;
}

double binomial(int n, int k) {
    if (k < 0 || k > n) {
        return 0.0;
    }
    // multiplicative form keeps intermediates small
    double out = 1.0;
    for (int i = 1; i <= k; ++i) {
        out *= static_cast<double>(n - k + i);
        out /= static_cast<double>(i);
    }
    return out;
}

}  // namespace klmsim
