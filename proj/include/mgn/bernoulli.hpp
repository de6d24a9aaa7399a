#pragma once

#include <mutex>
#include <stdexcept>
#include <vector>

#include "mgn/rational.hpp"

namespace mgn {

// Bernoulli numbers in the convention B_2 = 1/6, B_4 = -1/30, via the
// recurrence sum_{j=0}^{m} C(m+1, j) B_j = 0.  Only even indices are exposed;
// the table is grown on demand and kept for the lifetime of the process.
inline Rational bernoulli(int k) {
    if (k < 2 || k % 2 != 0)
        throw std::invalid_argument("bernoulli: index must be even and >= 2");

    static std::vector<Rational> table;  // table[m] = B_m, m >= 0
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);

    if (table.empty()) {
        table.emplace_back(1);               // B_0
        table.emplace_back(Rational(-1, 2)); // B_1
    }
    while (static_cast<int>(table.size()) <= k) {
        const int m = static_cast<int>(table.size());
        Rational acc{0};
        for (int j = 0; j < m; ++j)
            acc += Rational(binomial(m + 1, j)) * table[j];
        table.push_back(-acc / Rational(m + 1));
    }
    return table[k];
}

}  // namespace mgn
