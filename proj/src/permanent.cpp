#include "klmsim/permanent.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace klmsim {

Complex permanent_naive(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("permanent_naive: matrix must be square");
    }
    const int n = static_cast<int>(m.rows());
    if (n > 9) {
        throw std::invalid_argument("permanent_naive: dimension guard (n <= 9) exceeded");
    }
    if (n == 0) {
        return Complex(1.0, 0.0);
    }
    std::vector<int> cols(static_cast<std::size_t>(n));
    std::iota(cols.begin(), cols.end(), 0);
    Complex sum(0.0, 0.0);
    do {
        Complex term(1.0, 0.0);
        for (int i = 0; i < n; ++i) {
            term *= m(i, cols[static_cast<std::size_t>(i)]);
        }
        sum += term;
    } while (std::next_permutation(cols.begin(), cols.end()));
    return sum;
}

Complex permanent_ryser(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("permanent_ryser: matrix must be square");
    }
    const int n = static_cast<int>(m.rows());
    if (n > 24) {
        throw std::invalid_argument("permanent_ryser: dimension guard (n <= 24) exceeded");
    }
    if (n == 0) {
        return Complex(1.0, 0.0);
    }

    // Per(A) = sum over nonempty column subsets S of (-1)^(n-|S|) prod_i rowsum_i(S).
    // Successive Gray codes differ in one column, so each subset costs O(n).
    std::vector<Complex> row_sum(static_cast<std::size_t>(n), Complex(0.0, 0.0));
    Complex total(0.0, 0.0);
    std::uint64_t prev_gray = 0;
    int subset_size = 0;
    const std::uint64_t subsets = std::uint64_t{1} << n;
    for (std::uint64_t k = 1; k < subsets; ++k) {
        const std::uint64_t gray = k ^ (k >> 1);
        const std::uint64_t changed = gray ^ prev_gray;
        const int j = std::countr_zero(changed);
        if (gray & changed) {
            for (int i = 0; i < n; ++i) {
                row_sum[static_cast<std::size_t>(i)] += m(i, j);
            }
            ++subset_size;
        } else {
            for (int i = 0; i < n; ++i) {
                row_sum[static_cast<std::size_t>(i)] -= m(i, j);
            }
            --subset_size;
        }
        prev_gray = gray;

        Complex prod(1.0, 0.0);
        for (int i = 0; i < n; ++i) {
            prod *= row_sum[static_cast<std::size_t>(i)];
        }
        if ((n - subset_size) % 2 != 0) {
            total -= prod;
        } else {
            total += prod;
        }
    }
    return total;
}

}  // namespace klmsim
