#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace dqca {

// Exact integers for path counts and exact rationals for the algebraic
// cross-checks. Expression templates are disabled so these behave as plain
// value types inside generic code.
using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                             boost::multiprecision::et_off>;
using BigRat = boost::multiprecision::number<
    boost::multiprecision::rational_adaptor<boost::multiprecision::cpp_int_backend<>>,
    boost::multiprecision::et_off>;

// Wide binary float used when summing the combinatorial series. The terms of
// the f-sum reach ~1e73 around t = 500 while the result stays O(1), so double
// accumulation is hopeless there; 240 digits leaves a wide safety margin.
using BigFloat = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<240>,
                                               boost::multiprecision::et_off>;

/// Precomputed rows of Pascal's triangle (exact).
class PascalTable {
public:
    explicit PascalTable(int max_n) {
        rows_.resize(static_cast<std::size_t>(max_n) + 1);
        for (int n = 0; n <= max_n; ++n) {
            auto& row = rows_[static_cast<std::size_t>(n)];
            row.resize(static_cast<std::size_t>(n) + 1);
            row.front() = 1;
            row.back() = 1;
            for (int k = 1; k < n; ++k)
                row[static_cast<std::size_t>(k)] =
                    rows_[static_cast<std::size_t>(n) - 1][static_cast<std::size_t>(k) - 1] +
                    rows_[static_cast<std::size_t>(n) - 1][static_cast<std::size_t>(k)];
        }
    }

    int max_n() const { return static_cast<int>(rows_.size()) - 1; }

    const BigInt& choose(int n, int k) const {
        return rows_[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
    }

private:
    std::vector<std::vector<BigInt>> rows_;
};

/// Binomial coefficient under the slot-counting conventions:
/// C(n, k) = 0 for k < 0, C(n, 0) = 1 for every integer n (including
/// negative), and C(n, k) = 0 for 0 <= n < k or n < 0 < k. The C(-1, 0) = 1
/// case is what makes the straight all-R / all-L path count as one.
inline BigInt binom_count(long long n, long long k, const PascalTable* table = nullptr) {
    if (k < 0) return 0;
    if (k == 0) return 1;
    if (n < 0 || k > n) return 0;
    if (table && n <= table->max_n())
        return table->choose(static_cast<int>(n), static_cast<int>(k));
    BigInt result = 1;
    for (long long i = 1; i <= k; ++i) {
        result *= n - k + i;
        result /= i;  // exact: product of i consecutive integers is divisible by i!
    }
    return result;
}

/// base^e by repeated squaring; exact for exact scalar types.
template <class T>
T pow_t(T base, long long e) {
    if (e < 0) throw std::domain_error("pow_t: negative exponent");
    T result(1);
    while (e > 0) {
        if (e & 1) result *= base;
        base *= base;
        e >>= 1;
    }
    return result;
}

}  // namespace dqca
