#pragma once

#include <algorithm>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "mgn/multiset.hpp"
#include "mgn/rational.hpp"

namespace mgn {

// <tau_{d_1} ... tau_{d_n}>_g, the integral of psi_1^{d_1}...psi_n^{d_n} over
// the moduli space of stable n-pointed genus-g curves.
struct TauQuery {
    int g = 0;
    std::vector<int> d;  // canonical form: sorted descending
};

// Evaluates tau correlators with the Virasoro (DVV) recursion on the largest
// index, with the string and dilaton equations for indices 0 and 1 and the
// base cases <tau_0^3>_0 = 1 and <tau_1>_1 = 1/24.  Values are memoized on
// the canonical (g, sorted d) key; iteration is over sub-multisets rather
// than point subsets, so repeated exponents cost nothing extra.
class TauEngine {
public:
    Rational tau_number(int g, std::vector<int> d) {
        const int n = static_cast<int>(d.size());
        if (2 * g - 2 + n <= 0 || g < 0)
            throw std::invalid_argument("tau_number: unstable (g,n)");
        for (int v : d)
            if (v < 0)
                throw std::invalid_argument("tau_number: negative exponent");
        std::sort(d.begin(), d.end(), std::greater<int>());
        long long sum = 0;
        for (int v : d)
            sum += v;
        if (sum != 3LL * g - 3 + n)
            return Rational{0};
        return eval(g, d);
    }

    struct TableRow {
        int g = 0, n = 0;
        std::vector<int> d;
        Rational value;
    };

    // All stable queries with g <= g_max, every d_i >= 2 and
    // sum d_i = 3g-3+n, sorted by (g, n, lexicographic d).
    std::vector<TableRow> export_table(int g_max) {
        if (g_max < 2)
            throw std::invalid_argument("export_table: g_max must be >= 2");
        std::vector<TableRow> rows;
        for (int g = 2; g <= g_max; ++g) {
            for (int n = 1; n <= 3 * g - 3; ++n) {
                std::vector<int> d;
                emit_partitions(3 * g - 3 + n, n, 3 * g - 3 + n, d, g, n, rows);
            }
        }
        std::sort(rows.begin(), rows.end(), [](const TableRow& a, const TableRow& b) {
            if (a.g != b.g) return a.g < b.g;
            if (a.n != b.n) return a.n < b.n;
            return a.d < b.d;
        });
        return rows;
    }

private:
    std::unordered_map<std::size_t, std::vector<std::pair<std::vector<std::int32_t>, Rational>>> memo_;
    std::mutex mu_;

    static std::vector<std::int32_t> make_key(int g, const std::vector<int>& d) {
        std::vector<std::int32_t> key;
        key.reserve(d.size() + 1);
        key.push_back(g);
        for (int v : d)
            key.push_back(v);
        return key;
    }

    bool lookup(const std::vector<std::int32_t>& key, Rational& out) {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = memo_.find(detail::hash_ints(key));
        if (it == memo_.end())
            return false;
        for (const auto& e : it->second)
            if (e.first == key) {
                out = e.second;
                return true;
            }
        return false;
    }

    void store(const std::vector<std::int32_t>& key, const Rational& value) {
        std::lock_guard<std::mutex> lock(mu_);
        auto& bucket = memo_[detail::hash_ints(key)];
        for (const auto& e : bucket)
            if (e.first == key)
                return;
        bucket.emplace_back(key, value);
    }

    // Re-entry point for internally generated queries: validates dimension
    // and stability, returning 0 instead of throwing.
    Rational sub(int g, std::vector<int> d) {
        const int n = static_cast<int>(d.size());
        if (g < 0 || 2 * g - 2 + n <= 0)
            return Rational{0};
        std::sort(d.begin(), d.end(), std::greater<int>());
        long long sum = 0;
        for (int v : d)
            sum += v;
        if (sum != 3LL * g - 3 + n)
            return Rational{0};
        return eval(g, d);
    }

    // Pre: d sorted descending, on-dimension, stable.
    Rational eval(int g, const std::vector<int>& d) {
        const int n = static_cast<int>(d.size());
        if (g == 0 && n == 3)
            return Rational{1};  // all d_i = 0 by the dimension constraint
        if (g == 1 && n == 1 && d[0] == 1)
            return Rational(1, 24);

        const auto key = make_key(g, d);
        Rational cached;
        if (lookup(key, cached))
            return cached;

        Rational result{0};
        if (d.back() == 0) {
            // string equation: drop one tau_0, lower one other index
            std::vector<int> rest(d.begin(), d.end() - 1);
            for (const auto& [v, mult] : detail::run_lengths(rest)) {
                if (v == 0)
                    continue;
                std::vector<int> child = rest;
                *std::find(child.begin(), child.end(), v) = v - 1;
                result += Rational(mult) * sub(g, std::move(child));
            }
        } else if (d.back() == 1) {
            std::vector<int> rest = d;
            rest.pop_back();
            result = Rational(2 * g - 2 + n - 1) * sub(g, std::move(rest));
        } else {
            result = dvv(g, d);
        }
        store(key, result);
        return result;
    }

    // DVV step removing tau_{m+1}, m = d[0]-1 >= 1.
    Rational dvv(int g, const std::vector<int>& d) {
        const int m = d[0] - 1;
        const std::vector<int> tail(d.begin() + 1, d.end());
        const auto runs = detail::run_lengths(tail);

        Rational acc{0};
        for (const auto& [v, mult] : runs) {
            std::vector<int> child = tail;
            *std::find(child.begin(), child.end(), v) = v + m;
            acc += Rational(mult) *
                   Rational(double_factorial(2 * v + 2 * m + 1), double_factorial(2 * v - 1)) *
                   sub(g, std::move(child));
        }

        const Rational half(1, 2);
        for (int a = 0; a <= m - 1; ++a) {
            const int b = m - 1 - a;
            const Rational w(double_factorial(2 * a + 1) * double_factorial(2 * b + 1));
            if (g >= 1) {
                std::vector<int> child = tail;
                child.push_back(a);
                child.push_back(b);
                acc += half * w * sub(g - 1, std::move(child));
            }
            // splitting sum over ordered (genus, sub-multiset) pairs; the
            // genus of side one is pinned by its dimension constraint
            detail::for_each_submultiset(runs, [&](const std::vector<int>& s1, const Integer& ways,
                                                   int size1, long long sum1) {
                const long long num = sum1 + a + 2 - size1;
                if (num % 3 != 0)
                    return;
                const long long g1 = num / 3;
                if (g1 < 0 || g1 > g)
                    return;
                const long long g2 = g - g1;
                const int n1 = size1 + 1;
                const int n2 = static_cast<int>(tail.size()) - size1 + 1;
                if (2 * g1 - 2 + n1 <= 0 || 2 * g2 - 2 + n2 <= 0)
                    return;
                std::vector<int> side1 = s1;
                side1.push_back(a);
                Rational f1 = sub(static_cast<int>(g1), std::move(side1));
                if (f1 == 0)
                    return;
                std::vector<int> side2 = detail::multiset_complement(runs, s1);
                side2.push_back(b);
                Rational f2 = sub(static_cast<int>(g2), std::move(side2));
                acc += half * w * Rational(ways) * f1 * f2;
            });
        }
        return acc / Rational(double_factorial(2 * m + 3));
    }

    void emit_partitions(int remaining, int slots, int cap, std::vector<int>& d, int g, int n,
                         std::vector<TableRow>& rows) {
        if (slots == 0) {
            if (remaining != 0)
                return;
            TableRow row;
            row.g = g;
            row.n = n;
            row.d = d;
            row.value = tau_number(g, d);
            rows.push_back(std::move(row));
            return;
        }
        const int hi = std::min(cap, remaining - 2 * (slots - 1));
        for (int v = hi; v >= 2; --v) {
            d.push_back(v);
            emit_partitions(remaining - v, slots - 1, v, d, g, n, rows);
            d.pop_back();
        }
    }
};

}  // namespace mgn
