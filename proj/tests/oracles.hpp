#pragma once

// Test-only oracles for tau correlators, kept independent of the library's
// DVV evaluation path:
//   * genus 0: the closed multinomial formula (n-3)! / prod d_i!
//   * genus 1: F_1 = (1/24) log(d^3F_0/dt_0^3), expanded over set partitions
//   * all genera: the KdV equation in Witten's form,
//       (2n+1)<<tau_n tau_0^2>> = <<tau_{n-1} tau_0>><<tau_0^3>>
//                                + 2<<tau_{n-1} tau_0^2>><<tau_0^2>>
//                                + (1/4)<<tau_{n-1} tau_0^4>>
//     combined with the string and dilaton equations.

#include <algorithm>
#include <functional>
#include <map>
#include <vector>

#include "mgn/rational.hpp"

namespace oracle {

using mgn::Integer;
using mgn::Rational;

inline Rational genus0_tau(const std::vector<int>& d) {
    const int n = static_cast<int>(d.size());
    if (n < 3)
        return Rational{0};
    long long sum = 0;
    for (int v : d)
        sum += v;
    if (sum != n - 3)
        return Rational{0};
    Rational r{mgn::factorial(n - 3)};
    for (int v : d)
        r /= Rational(mgn::factorial(v));
    return r;
}

namespace detail {

template <typename F>
void for_each_set_partition(int n, F&& fn) {
    std::vector<int> block_of(n, 0);
    std::function<void(int, int)> rec = [&](int i, int nblocks) {
        if (i == n) {
            fn(block_of, nblocks);
            return;
        }
        for (int b = 0; b <= nblocks; ++b) {
            block_of[i] = b;
            rec(i + 1, std::max(nblocks, b + 1));
        }
    };
    rec(0, 0);
}

}  // namespace detail

// <tau_{d_1}...tau_{d_n}>_1 from the log formula; practical for small n.
inline Rational genus1_tau(const std::vector<int>& d) {
    const int n = static_cast<int>(d.size());
    long long sum = 0;
    for (int v : d)
        sum += v;
    if (sum != n)
        return Rational{0};
    Rational total{0};
    detail::for_each_set_partition(n, [&](const std::vector<int>& block_of, int nblocks) {
        Rational term{1};
        for (int b = 0; b < nblocks; ++b) {
            std::vector<int> block = {0, 0, 0};
            for (int i = 0; i < n; ++i)
                if (block_of[i] == b)
                    block.push_back(d[i]);
            term *= genus0_tau(block);
            if (term == 0)
                break;
        }
        if (term == 0)
            return;
        Rational sign = (nblocks % 2 == 1) ? Rational{1} : Rational{-1};
        total += sign * Rational(mgn::factorial(nblocks - 1)) * term;
    });
    return total / Rational{24};
}

class KdvOracle {
public:
    Rational tau(int g, std::vector<int> d) {
        std::sort(d.begin(), d.end(), std::greater<int>());
        return sub(g, d);
    }

private:
    std::map<std::pair<int, std::vector<int>>, Rational> memo_;

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
        if (g == 0)
            return genus0_tau(d);
        auto key = std::make_pair(g, d);
        auto it = memo_.find(key);
        if (it != memo_.end())
            return it->second;
        Rational value = eval(g, d);
        memo_.emplace(std::move(key), value);
        return value;
    }

    Rational eval(int g, const std::vector<int>& d) {
        const int n = static_cast<int>(d.size());
        if (g == 1 && n == 1)
            return Rational(1, 24);  // <tau_1>_1
        if (d.back() == 0) {
            std::vector<int> rest(d.begin(), d.end() - 1);
            Rational acc{0};
            for (std::size_t i = 0; i < rest.size(); ++i) {
                if (rest[i] == 0 || (i > 0 && rest[i] == rest[i - 1]))
                    continue;
                int mult = static_cast<int>(std::count(rest.begin(), rest.end(), rest[i]));
                std::vector<int> child = rest;
                child[i] -= 1;
                acc += Rational(mult) * sub(g, std::move(child));
            }
            return acc;
        }
        if (d.back() == 1) {
            std::vector<int> rest(d.begin(), d.end() - 1);
            return Rational(2 * g - 2 + n - 1) * sub(g, std::move(rest));
        }
        return kdv_step(g, d);
    }

    // All entries >= 2.  Write X = <tau_{F+2} tau_0 tau_0 tail>_g two ways:
    // by the KdV equation and by applying the string equation twice, then
    // solve for the target T = <tau_F tail>_g.
    Rational kdv_step(int g, const std::vector<int>& d) {
        const int F = d[0];
        const std::vector<int> tail(d.begin() + 1, d.end());

        // string^2 expansion of X, excluding the target itself
        Rational e_str{0};
        for (std::size_t i = 0; i < tail.size(); ++i) {
            if (i > 0 && tail[i] == tail[i - 1])
                continue;
            int mult = static_cast<int>(std::count(tail.begin(), tail.end(), tail[i]));
            {
                std::vector<int> child = tail;
                child[i] -= 1;
                child.push_back(F + 1);
                e_str += Rational(2 * mult) * sub(g, std::move(child));
            }
            {
                std::vector<int> child = tail;
                child[i] -= 2;
                child.push_back(F + 2);
                e_str += Rational(mult) * sub(g, std::move(child));
            }
            if (mult >= 2) {
                std::vector<int> child = tail;
                child[i] -= 1;
                auto j = std::find(child.begin() + i + 1, child.end(), tail[i]);
                *j -= 1;
                child.push_back(F + 2);
                e_str += Rational(mult * (mult - 1)) * sub(g, std::move(child));
            }
            for (std::size_t k = i + 1; k < tail.size(); ++k) {
                if (tail[k] == tail[i] || (k > i + 1 && tail[k] == tail[k - 1]))
                    continue;
                int mult_k = static_cast<int>(std::count(tail.begin(), tail.end(), tail[k]));
                std::vector<int> child = tail;
                child[i] -= 1;
                child[k] -= 1;
                child.push_back(F + 2);
                e_str += Rational(2 * mult * mult_k) * sub(g, std::move(child));
            }
        }

        // string expansion of the self-referential piece
        // <tau_{F+1} tau_0 tail>_g = T + e_a0
        Rational e_a0{0};
        for (std::size_t i = 0; i < tail.size(); ++i) {
            if (i > 0 && tail[i] == tail[i - 1])
                continue;
            int mult = static_cast<int>(std::count(tail.begin(), tail.end(), tail[i]));
            std::vector<int> child = tail;
            child[i] -= 1;
            child.push_back(F + 1);
            e_a0 += Rational(mult) * sub(g, std::move(child));
        }

        Rational rhs = e_a0;
        for_each_subset(tail, [&](const std::vector<int>& s1, const std::vector<int>& s2) {
            for (int g1 = 0; g1 <= g; ++g1) {
                const int g2 = g - g1;
                const bool self_piece = (g1 == g && s2.empty());
                if (!self_piece) {
                    std::vector<int> f1 = s1;
                    f1.push_back(F + 1);
                    f1.push_back(0);
                    Rational v1 = sub(g1, std::move(f1));
                    if (v1 != 0) {
                        std::vector<int> f2 = s2;
                        f2.insert(f2.end(), {0, 0, 0});
                        rhs += v1 * sub(g2, std::move(f2));
                    }
                }
                std::vector<int> b1 = s1;
                b1.push_back(F + 1);
                b1.insert(b1.end(), {0, 0});
                Rational v1 = sub(g1, std::move(b1));
                if (v1 != 0) {
                    std::vector<int> b2 = s2;
                    b2.insert(b2.end(), {0, 0});
                    rhs += Rational{2} * v1 * sub(g2, std::move(b2));
                }
            }
        });
        {
            std::vector<int> c = tail;
            c.push_back(F + 1);
            c.insert(c.end(), {0, 0, 0, 0});
            rhs += Rational(1, 4) * sub(g - 1, std::move(c));
        }

        return (rhs - Rational(2 * F + 5) * e_str) / Rational(2 * F + 4);
    }

    template <typename F>
    static void for_each_subset(const std::vector<int>& items, F&& fn) {
        const std::size_t n = items.size();
        for (std::size_t mask = 0; mask < (1ULL << n); ++mask) {
            std::vector<int> s1, s2;
            for (std::size_t i = 0; i < n; ++i)
                ((mask >> i) & 1 ? s1 : s2).push_back(items[i]);
            fn(s1, s2);
        }
    }
};

}  // namespace oracle
