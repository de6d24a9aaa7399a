#pragma once

#include <algorithm>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "mgn/multiset.hpp"
#include "mgn/rational.hpp"
#include "mgn/tau.hpp"

namespace mgn {

// Mixed monomial integral of psi_1^{d_1}...psi_n^{d_n} kappa_{a_1}...kappa_{a_m}
// over the moduli space of stable n-pointed genus-g curves (Arbarello-Cornalba
// kappa classes).
struct KappaPsiQuery {
    int g = 0, n = 0;
    std::vector<int> d;       // psi exponents, one per point
    std::vector<int> kappas;  // kappa indices, multiset, each >= 1
};

// One step of the kappa reduction: trades the largest kappa index a for a new
// marked point carrying psi^(a+1).  Comes from kappa_a = pi_*(psi_{n+1}^{a+1})
// and pi^* kappa_b = kappa_b - psi_{n+1}^b for the remaining factors, whose
// product expands by inclusion-exclusion over sub-multisets S of the remaining
// indices, each merged set contributing (-1)^|S| psi_{n+1}^{a+1+sum S}.  The
// full-merge term carries no kappa and is pushed straight back down to
// kappa_{a + sum} on the original space.
inline std::vector<std::pair<Rational, KappaPsiQuery>> kappa_reduce_step(KappaPsiQuery q) {
    if (q.kappas.empty())
        throw std::invalid_argument("kappa_reduce_step: no kappa factor to remove");
    std::sort(q.kappas.begin(), q.kappas.end());
    const int a = q.kappas.back();
    q.kappas.pop_back();

    std::vector<std::pair<Rational, KappaPsiQuery>> out;
    if (q.kappas.empty()) {
        KappaPsiQuery main = q;
        main.n += 1;
        main.d.push_back(a + 1);
        out.emplace_back(Rational{1}, std::move(main));
        return out;
    }

    const auto runs = detail::run_lengths([&] {
        auto k = q.kappas;
        std::sort(k.begin(), k.end(), std::greater<int>());
        return k;
    }());
    std::vector<int> take(runs.size(), 0);
    for (;;) {
        Integer ways{1};
        int picked = 0;
        long long merged = a;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            ways *= binomial(runs[i].second, take[i]);
            picked += take[i];
            merged += static_cast<long long>(take[i]) * runs[i].first;
        }
        const Rational coeff = (picked % 2 == 0) ? Rational(ways) : -Rational(ways);
        if (picked == static_cast<int>(q.kappas.size())) {
            KappaPsiQuery full = q;
            full.kappas.assign(1, static_cast<int>(merged));
            out.emplace_back(coeff, std::move(full));
        } else {
            KappaPsiQuery term = q;
            term.n += 1;
            term.d.push_back(static_cast<int>(merged) + 1);
            term.kappas.clear();
            for (std::size_t i = 0; i < runs.size(); ++i)
                for (int c = 0; c < runs[i].second - take[i]; ++c)
                    term.kappas.push_back(runs[i].first);
            out.emplace_back(coeff, std::move(term));
        }
        std::size_t i = 0;
        while (i < runs.size() && take[i] == runs[i].second)
            take[i++] = 0;
        if (i == runs.size())
            break;
        ++take[i];
    }
    return out;
}

// One-point forgetful pushforward: removes the last marked point of a
// psi/kappa query, emitting a combination of queries on (g, n-1).  Classes
// pulled back from below (delta_irr, lambda, Chern characters) ride along
// untouched, so the same expansion drives every push-down in the library.
struct ForgetTerm {
    Rational coeff;
    std::vector<int> d;
    std::vector<int> kappas;
};

inline std::vector<ForgetTerm> forget_last_point(int g, int n, const std::vector<int>& d,
                                                 const std::vector<int>& kappas) {
    if (n < 1 || static_cast<int>(d.size()) != n)
        throw std::invalid_argument("forget_last_point: bad point data");
    if (2 * g - 2 + (n - 1) <= 0)
        throw std::invalid_argument("forget_last_point: target space unstable");

    const int dn = d[n - 1];
    std::vector<ForgetTerm> out;

    // kappa_a on (g,n) = pi^* kappa_a + psi_n^a: expand over the kappa factors
    // that contribute their psi_n part, then push psi_n^m forward to kappa_{m-1}
    auto runs = detail::run_lengths([&] {
        auto k = kappas;
        std::sort(k.begin(), k.end(), std::greater<int>());
        return k;
    }());
    std::vector<int> take(runs.size(), 0);
    for (;;) {
        Integer ways{1};
        long long m = dn;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            ways *= binomial(runs[i].second, take[i]);
            m += static_cast<long long>(take[i]) * runs[i].first;
        }
        if (m > 0) {
            ForgetTerm term;
            term.coeff = Rational(ways);
            term.d.assign(d.begin(), d.end() - 1);
            for (std::size_t i = 0; i < runs.size(); ++i)
                for (int c = 0; c < runs[i].second - take[i]; ++c)
                    term.kappas.push_back(runs[i].first);
            if (m == 1)
                term.coeff *= Rational(2 * g - 2 + n - 1);  // kappa_0 is a scalar
            else
                term.kappas.push_back(static_cast<int>(m - 1));
            out.push_back(std::move(term));
        }
        std::size_t i = 0;
        while (i < runs.size() && take[i] == runs[i].second)
            take[i++] = 0;
        if (i == runs.size())
            break;
        ++take[i];
    }

    if (dn == 0) {
        // section terms of the comparison psi_i = pi^* psi_i + D_{i,n}
        for (int j = 0; j < n - 1; ++j) {
            if (d[j] == 0)
                continue;
            ForgetTerm term;
            term.coeff = Rational{1};
            term.d.assign(d.begin(), d.end() - 1);
            term.d[j] -= 1;
            term.kappas = kappas;
            out.push_back(std::move(term));
        }
    }
    return out;
}

class KappaPsiEngine {
public:
    explicit KappaPsiEngine(TauEngine& tau) : tau_(tau) {}

    Rational kappa_psi_number(int g, int n, std::vector<int> d, std::vector<int> kappas) {
        if (g < 0 || 2 * g - 2 + n <= 0)
            throw std::invalid_argument("kappa_psi_number: unstable (g,n)");
        if (static_cast<int>(d.size()) != n)
            throw std::invalid_argument("kappa_psi_number: psi exponent count != n");
        for (int v : d)
            if (v < 0)
                throw std::invalid_argument("kappa_psi_number: negative psi exponent");
        for (int a : kappas)
            if (a < 1)
                throw std::invalid_argument("kappa_psi_number: kappa index must be >= 1");
        return sub(g, n, std::move(d), std::move(kappas));
    }

private:
    TauEngine& tau_;
    std::unordered_map<std::size_t, std::vector<std::pair<std::vector<std::int32_t>, Rational>>> memo_;
    std::mutex mu_;

    Rational sub(int g, int n, std::vector<int> d, std::vector<int> kappas) {
        std::sort(d.begin(), d.end(), std::greater<int>());
        std::sort(kappas.begin(), kappas.end(), std::greater<int>());
        long long deg = 0;
        for (int v : d)
            deg += v;
        for (int a : kappas)
            deg += a;
        if (deg != 3LL * g - 3 + n)
            return Rational{0};
        if (kappas.empty())
            return tau_.tau_number(g, std::move(d));

        std::vector<std::int32_t> key;
        key.push_back(g);
        key.push_back(n);
        for (int v : d)
            key.push_back(v);
        key.push_back(-1);
        for (int a : kappas)
            key.push_back(a);
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = memo_.find(detail::hash_ints(key));
            if (it != memo_.end())
                for (const auto& e : it->second)
                    if (e.first == key)
                        return e.second;
        }

        KappaPsiQuery q{g, n, d, kappas};
        Rational acc{0};
        for (auto& [c, child] : kappa_reduce_step(std::move(q)))
            acc += c * sub(child.g, child.n, std::move(child.d), std::move(child.kappas));

        std::lock_guard<std::mutex> lock(mu_);
        auto& bucket = memo_[detail::hash_ints(key)];
        bool present = false;
        for (const auto& e : bucket)
            if (e.first == key)
                present = true;
        if (!present)
            bucket.emplace_back(std::move(key), acc);
        return acc;
    }
};

}  // namespace mgn
