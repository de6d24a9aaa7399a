#pragma once

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "mgn/bernoulli.hpp"
#include "mgn/kappa_psi.hpp"
#include "mgn/multiset.hpp"
#include "mgn/rational.hpp"

namespace mgn {

// Mixed monomial in psi_i, kappa_a and odd Chern characters ch_{2j-1}(E) of
// the Hodge bundle.  Even components vanish identically and are not admitted.
struct ChQuery {
    int g = 0, n = 0;
    std::vector<int> d;       // psi exponents per point
    std::vector<int> kappas;  // kappa indices, each >= 1
    std::vector<int> chs;     // odd Chern character indices
};

class HodgeEngine {
public:
    explicit HodgeEngine(KappaPsiEngine& kp) : kp_(kp) {}

    Rational ch_number(ChQuery q) {
        validate(q);
        return sub(std::move(q));
    }

    // lambda monomial (exponent vector over lambda_1..lambda_g) rewritten as a
    // combination of ch multisets via Newton's identities, with all even power
    // sums set to zero.
    static std::vector<std::pair<Rational, std::vector<int>>> lambda_to_ch(
        const std::vector<int>& lam) {
        ChPoly poly = ch_poly_one();
        for (std::size_t j = 0; j < lam.size(); ++j)
            for (int e = 0; e < lam[j]; ++e)
                poly = ch_poly_mul(poly, elementary(static_cast<int>(j) + 1));
        std::vector<std::pair<Rational, std::vector<int>>> out;
        out.reserve(poly.size());
        for (auto& [ms, c] : poly)
            out.emplace_back(c, ms);
        return out;
    }

    // top intersection of a lambda monomial, on M_bar_g for g >= 2 and on
    // M_bar_{1,1} for g = 1
    Rational lambda_number(int g, const std::vector<int>& lam) {
        if (g < 1)
            throw std::invalid_argument("lambda_number: genus must be >= 1");
        for (std::size_t j = 0; j < lam.size(); ++j)
            if (lam[j] < 0 || (lam[j] > 0 && static_cast<int>(j) + 1 > g))
                return Rational{0};
        const int n = (g >= 2) ? 0 : 1;
        return mixed_number(g, n, std::vector<int>(n, 0), {}, {}, lam);
    }

    // psi/kappa/ch monomial times a lambda monomial on (g,n)
    Rational mixed_number(int g, int n, const std::vector<int>& d, const std::vector<int>& kappas,
                          const std::vector<int>& chs, const std::vector<int>& lam) {
        Rational acc{0};
        for (const auto& [c, ms] : lambda_to_ch(lam)) {
            ChQuery q;
            q.g = g;
            q.n = n;
            q.d = d;
            q.kappas = kappas;
            q.chs = chs;
            q.chs.insert(q.chs.end(), ms.begin(), ms.end());
            validate(q);
            acc += c * sub(std::move(q));
        }
        return acc;
    }

private:
    KappaPsiEngine& kp_;
    std::unordered_map<std::size_t, std::vector<std::pair<std::vector<std::int32_t>, Rational>>> memo_;
    std::mutex mu_;

    // polynomials in the odd power sums, keyed by the ch-index multiset
    using ChPoly = std::map<std::vector<int>, Rational>;

    static ChPoly ch_poly_one() { return ChPoly{{{}, Rational{1}}}; }

    static ChPoly ch_poly_mul(const ChPoly& x, const ChPoly& y) {
        ChPoly out;
        for (const auto& [ma, ca] : x)
            for (const auto& [mb, cb] : y) {
                std::vector<int> ms = ma;
                ms.insert(ms.end(), mb.begin(), mb.end());
                std::sort(ms.begin(), ms.end(), std::greater<int>());
                out[ms] += ca * cb;
            }
        for (auto it = out.begin(); it != out.end();)
            it = (it->second == 0) ? out.erase(it) : std::next(it);
        return out;
    }

    // e_j over the odd power sums: e_j = (1/j) sum_{i odd <= j} e_{j-i} p_i,
    // then p_{2i-1} = (2i-1)! ch_{2i-1} folded into the coefficients.
    static const ChPoly& elementary(int j) {
        static std::vector<ChPoly> cache;
        static std::mutex mu;
        std::lock_guard<std::mutex> lock(mu);
        if (cache.empty())
            cache.push_back(ch_poly_one());
        while (static_cast<int>(cache.size()) <= j) {
            const int m = static_cast<int>(cache.size());
            ChPoly acc;
            for (int i = 1; i <= m; i += 2) {
                for (const auto& [ms, c] : cache[m - i]) {
                    std::vector<int> key = ms;
                    key.push_back(i);
                    std::sort(key.begin(), key.end(), std::greater<int>());
                    acc[key] += c * Rational(factorial(i), m);
                }
            }
            for (auto it = acc.begin(); it != acc.end();)
                it = (it->second == 0) ? acc.erase(it) : std::next(it);
            cache.push_back(std::move(acc));
        }
        return cache[j];
    }

    static void validate(const ChQuery& q) {
        if (q.g < 0 || 2 * q.g - 2 + q.n <= 0)
            throw std::invalid_argument("ch_number: unstable (g,n)");
        if (static_cast<int>(q.d.size()) != q.n)
            throw std::invalid_argument("ch_number: psi exponent count != n");
        for (int c : q.chs)
            if (c < 1 || c % 2 == 0)
                throw std::invalid_argument("ch_number: ch index must be odd and positive");
        for (int a : q.kappas)
            if (a < 1)
                throw std::invalid_argument("ch_number: kappa index must be >= 1");
        for (int v : q.d)
            if (v < 0)
                throw std::invalid_argument("ch_number: negative psi exponent");
    }

    Rational sub(ChQuery q) {
        std::sort(q.d.begin(), q.d.end(), std::greater<int>());
        std::sort(q.kappas.begin(), q.kappas.end(), std::greater<int>());
        std::sort(q.chs.begin(), q.chs.end(), std::greater<int>());
        long long deg = 0;
        for (int v : q.d)
            deg += v;
        for (int a : q.kappas)
            deg += a;
        for (int c : q.chs)
            deg += c;
        if (deg != 3LL * q.g - 3 + q.n)
            return Rational{0};
        if (q.chs.empty())
            return kp_.kappa_psi_number(q.g, q.n, std::move(q.d), std::move(q.kappas));
        if (q.g == 0)
            return Rational{0};  // rank-zero Hodge bundle

        std::vector<std::int32_t> key;
        key.push_back(q.g);
        key.push_back(q.n);
        for (int v : q.d)
            key.push_back(v);
        key.push_back(-1);
        for (int a : q.kappas)
            key.push_back(a);
        key.push_back(-1);
        for (int c : q.chs)
            key.push_back(c);
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = memo_.find(detail::hash_ints(key));
            if (it != memo_.end())
                for (const auto& e : it->second)
                    if (e.first == key)
                        return e.second;
        }

        Rational value = eval(q);

        std::lock_guard<std::mutex> lock(mu_);
        auto& bucket = memo_[detail::hash_ints(key)];
        bool present = false;
        for (const auto& e : bucket)
            if (e.first == key)
                present = true;
        if (!present)
            bucket.emplace_back(std::move(key), value);
        return value;
    }

    // Pre: on-dimension, chs nonempty (sorted descending), g >= 1.
    Rational eval(const ChQuery& q) {
        const int floor_n = (q.g == 1) ? 1 : 0;
        if (q.n > floor_n) {
            // the Hodge bundle is pulled back from the unpointed space, so the
            // whole expression pushes down point by point
            Rational acc{0};
            for (auto& t : forget_last_point(q.g, q.n, q.d, q.kappas)) {
                ChQuery child;
                child.g = q.g;
                child.n = q.n - 1;
                child.d = std::move(t.d);
                child.kappas = std::move(t.kappas);
                child.chs = q.chs;
                acc += t.coeff * sub(std::move(child));
            }
            return acc;
        }

        if (q.g == 1)  // on (1,1) the only on-dimension ch monomial is ch_1
            return (q.chs == std::vector<int>{1} && q.kappas.empty() && q.d[0] == 0)
                       ? Rational(1, 24)
                       : Rational{0};

        // Mumford's formula on M_bar_g, expanding the largest odd component:
        // ch_{2i-1} = B_{2i}/(2i)! [ kappa_{2i-1}
        //   + 1/2 sum_{h=0}^{g-1} i_{h,*} sum_{a+b=2i-2} (-1)^b K_1^a K_2^b ]
        const int g = q.g;
        const int c = q.chs[0];
        const int i2 = c + 1;  // 2i
        std::vector<int> rest(q.chs.begin() + 1, q.chs.end());

        Rational inner{0};
        {
            ChQuery kterm;
            kterm.g = g;
            kterm.n = 0;
            kterm.kappas = q.kappas;
            kterm.kappas.push_back(c);
            kterm.chs = rest;
            inner += sub(std::move(kterm));
        }

        const Rational half(1, 2);
        for (int a = 0; a <= i2 - 2; ++a) {
            const int b = i2 - 2 - a;
            const Rational sign = (b % 2 == 0) ? half : -half;
            {
                ChQuery irr;  // domain M_bar_{g-1,2}; kappa and ch restrict to themselves
                irr.g = g - 1;
                irr.n = 2;
                irr.d = {a, b};
                irr.kappas = q.kappas;
                irr.chs = rest;
                if (2 * irr.g - 2 + irr.n > 0)
                    inner += sign * sub(std::move(irr));
            }
            const auto kruns = detail::run_lengths(q.kappas);
            const auto cruns = detail::run_lengths(rest);
            for (int h = 1; h <= g - 1; ++h) {
                // kappa and ch split additively over the two factors
                Rational termh{0};
                detail::for_each_submultiset(kruns, [&](const std::vector<int>& k1,
                                                        const Integer& kways, int, long long) {
                    detail::for_each_submultiset(cruns, [&](const std::vector<int>& c1,
                                                            const Integer& cways, int,
                                                            long long) {
                        ChQuery s1;
                        s1.g = h;
                        s1.n = 1;
                        s1.d = {a};
                        s1.kappas = k1;
                        s1.chs = c1;
                        Rational v1 = sub(std::move(s1));
                        if (v1 == 0)
                            return;
                        ChQuery s2;
                        s2.g = g - h;
                        s2.n = 1;
                        s2.d = {b};
                        s2.kappas = detail::multiset_complement(kruns, k1);
                        s2.chs = detail::multiset_complement(cruns, c1);
                        termh += Rational(kways * cways) * v1 * sub(std::move(s2));
                    });
                });
                inner += sign * termh;
            }
        }
        return bernoulli(i2) / Rational(factorial(i2)) * inner;
    }
};

}  // namespace mgn
