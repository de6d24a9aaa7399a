#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "mgn/hodge.hpp"
#include "mgn/kappa_psi.hpp"
#include "mgn/multiset.hpp"
#include "mgn/rational.hpp"

namespace mgn {

struct SpaceId {
    int g = 0, n = 0;
    int dim() const { return 3 * g - 3 + n; }
    bool stable() const { return g >= 0 && n >= 0 && 2 * g - 2 + n > 0; }
    bool operator==(const SpaceId&) const = default;
};

// Reducible boundary divisor label.  For n > 0: h is the genus of the
// component carrying point 1 and mask its set of marked points (bit i-1 for
// point i, bit 0 always set in canonical form).  For n = 0: the smaller genus
// and an empty mask.
struct RedLabel {
    int h = 0;
    std::uint32_t mask = 0;
    bool operator==(const RedLabel&) const = default;
};

struct DivClass {
    enum Kind { Psi, Kappa1, DeltaIrr, DeltaRed } kind = Psi;
    int index = 0;   // point index for Psi
    RedLabel red{};  // for DeltaRed
};

inline bool red_label_valid(SpaceId sp, RedLabel L) {
    if (sp.n == 0)
        return L.mask == 0 && L.h >= 1 && sp.g - L.h >= 1;
    if (!(L.mask & 1u) || L.mask >= (1u << sp.n))
        return false;
    const int size = std::popcount(L.mask);
    if (L.h < 0 || L.h > sp.g)
        return false;
    if (L.h == 0 && size < 2)
        return false;
    if (sp.g - L.h == 0 && sp.n - size < 2)
        return false;
    return true;
}

inline RedLabel red_canonical(SpaceId sp, RedLabel L) {
    if (sp.n == 0) {
        L.h = std::min(L.h, sp.g - L.h);
        return L;
    }
    if (!(L.mask & 1u)) {
        L.mask = static_cast<std::uint32_t>(~L.mask) & ((1u << sp.n) - 1);
        L.h = sp.g - L.h;
    }
    return L;
}

// Monomial in the divisor classes together with kappa_a (a >= 1, produced by
// push-downs), delta_irr, reducible boundary classes and lambda classes.
struct Monomial {
    SpaceId sp;
    std::vector<int> psi;                      // size n
    std::vector<std::pair<int, int>> kappa;    // (index, exponent), index ascending
    int irr = 0;                               // delta_irr exponent
    std::vector<std::pair<RedLabel, int>> red; // (label, exponent)
    std::vector<int> lam;                      // lam[j-1] = exponent of lambda_j

    int degree() const {
        int d = irr;
        for (int v : psi)
            d += v;
        for (const auto& [a, e] : kappa)
            d += a * e;
        for (const auto& [L, e] : red)
            d += e;
        for (std::size_t j = 0; j < lam.size(); ++j)
            d += static_cast<int>(j + 1) * lam[j];
        return d;
    }
    int lambda_degree() const {
        int d = 0;
        for (std::size_t j = 0; j < lam.size(); ++j)
            d += static_cast<int>(j + 1) * lam[j];
        return d;
    }
};

inline bool red_order(const std::pair<RedLabel, int>& a, const std::pair<RedLabel, int>& b) {
    const int pa = std::popcount(a.first.mask), pb = std::popcount(b.first.mask);
    if (a.first.h != b.first.h)
        return a.first.h < b.first.h;
    if (pa != pb)
        return pa < pb;
    return a.first.mask < b.first.mask;
}

inline std::vector<std::int32_t> serialize(const Monomial& m) {
    std::vector<std::int32_t> k;
    k.reserve(8 + m.psi.size() + 2 * m.kappa.size() + 3 * m.red.size() + m.lam.size());
    k.push_back(m.sp.g);
    k.push_back(m.sp.n);
    for (int v : m.psi)
        k.push_back(v);
    k.push_back(-1);
    for (const auto& [a, e] : m.kappa) {
        k.push_back(a);
        k.push_back(e);
    }
    k.push_back(-1);
    k.push_back(m.irr);
    for (const auto& [L, e] : m.red) {
        k.push_back(L.h);
        k.push_back(static_cast<std::int32_t>(L.mask));
        k.push_back(e);
    }
    k.push_back(-1);
    for (int v : m.lam)
        k.push_back(v);
    return k;
}

namespace detail {

struct KeyHash {
    std::size_t operator()(const std::vector<std::int32_t>& k) const { return hash_ints(k); }
};

}  // namespace detail

// Linear combination of monomials on a single space.
class Poly {
public:
    void add(const Monomial& m, const Rational& c) {
        if (c == 0)
            return;
        auto key = serialize(m);
        auto it = terms_.find(key);
        if (it == terms_.end())
            terms_.emplace(std::move(key), std::make_pair(m, c));
        else {
            it->second.second += c;
            if (it->second.second == 0)
                terms_.erase(it);
        }
    }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    template <typename F>
    void for_each(F&& fn) const {
        for (const auto& [k, mc] : terms_)
            fn(mc.first, mc.second);
    }

private:
    std::unordered_map<std::vector<std::int32_t>, std::pair<Monomial, Rational>, detail::KeyHash>
        terms_;
};

struct ProdMono {
    Monomial a, b;
};

class ProdPoly {
public:
    void add(const ProdMono& m, const Rational& c) {
        if (c == 0)
            return;
        auto key = serialize(m.a);
        key.push_back(-2);
        auto kb = serialize(m.b);
        key.insert(key.end(), kb.begin(), kb.end());
        auto it = terms_.find(key);
        if (it == terms_.end())
            terms_.emplace(std::move(key), std::make_pair(m, c));
        else {
            it->second.second += c;
            if (it->second.second == 0)
                terms_.erase(it);
        }
    }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    template <typename F>
    void for_each(F&& fn) const {
        for (const auto& [k, mc] : terms_)
            fn(mc.first, mc.second);
    }

private:
    std::unordered_map<std::vector<std::int32_t>, std::pair<ProdMono, Rational>, detail::KeyHash>
        terms_;
};

inline Monomial mono_mul(const Monomial& x, const Monomial& y) {
    Monomial out = x;
    for (std::size_t i = 0; i < y.psi.size(); ++i)
        out.psi[i] += y.psi[i];
    for (const auto& [a, e] : y.kappa) {
        bool merged = false;
        for (auto& [oa, oe] : out.kappa)
            if (oa == a) {
                oe += e;
                merged = true;
            }
        if (!merged)
            out.kappa.emplace_back(a, e);
    }
    std::sort(out.kappa.begin(), out.kappa.end());
    out.irr += y.irr;
    for (const auto& [L, e] : y.red) {
        bool merged = false;
        for (auto& [oL, oe] : out.red)
            if (oL == L) {
                oe += e;
                merged = true;
            }
        if (!merged)
            out.red.emplace_back(L, e);
    }
    std::sort(out.red.begin(), out.red.end(), red_order);
    if (out.lam.size() < y.lam.size())
        out.lam.resize(y.lam.size(), 0);
    for (std::size_t j = 0; j < y.lam.size(); ++j)
        out.lam[j] += y.lam[j];
    return out;
}

inline Poly poly_mul(const Poly& x, const Poly& y, int degree_cap) {
    Poly out;
    x.for_each([&](const Monomial& mx, const Rational& cx) {
        y.for_each([&](const Monomial& my, const Rational& cy) {
            Monomial m = mono_mul(mx, my);
            if (m.degree() <= degree_cap)
                out.add(m, cx * cy);
        });
    });
    return out;
}

inline Poly poly_pow(const Poly& base, int e, const Monomial& unit, int degree_cap) {
    Poly acc;
    acc.add(unit, Rational{1});
    for (int i = 0; i < e; ++i)
        acc = poly_mul(acc, base, degree_cap);
    return acc;
}

inline ProdPoly prod_mul(const ProdPoly& x, const ProdPoly& y, int cap_a, int cap_b) {
    ProdPoly out;
    x.for_each([&](const ProdMono& mx, const Rational& cx) {
        y.for_each([&](const ProdMono& my, const Rational& cy) {
            ProdMono m{mono_mul(mx.a, my.a), mono_mul(mx.b, my.b)};
            if (m.a.degree() <= cap_a && m.b.degree() <= cap_b)
                out.add(m, cx * cy);
        });
    });
    return out;
}

inline ProdPoly prod_pow(const ProdPoly& base, int e, const ProdMono& unit, int cap_a,
                         int cap_b) {
    ProdPoly acc;
    acc.add(unit, Rational{1});
    for (int i = 0; i < e; ++i)
        acc = prod_mul(acc, base, cap_a, cap_b);
    return acc;
}

inline Monomial unit_monomial(SpaceId sp) {
    Monomial m;
    m.sp = sp;
    m.psi.assign(sp.n, 0);
    return m;
}

class DivisorEngine {
public:
    DivisorEngine(KappaPsiEngine& kp, HodgeEngine& hodge) : kp_(kp), hodge_(hodge) {}

    Rational evaluate(const Monomial& m) { return eval_outer(m, nullptr); }

    // evaluation with a prescribed first boundary restriction (order-independence hook)
    Rational evaluate_restricting_first(const Monomial& m, const DivClass& first) {
        return eval_outer(m, &first);
    }

    // psi_1..psi_n, kappa_1, delta_irr, then the reducible classes ordered by
    // (h, |N|, lexicographic N)
    static std::vector<DivClass> enumerate_classes(SpaceId sp) {
        if (!sp.stable())
            throw std::invalid_argument("enumerate_classes: unstable space");
        std::vector<DivClass> out;
        for (int i = 1; i <= sp.n; ++i)
            out.push_back(DivClass{DivClass::Psi, i, {}});
        out.push_back(DivClass{DivClass::Kappa1, 0, {}});
        out.push_back(DivClass{DivClass::DeltaIrr, 0, {}});
        if (sp.n == 0) {
            for (int h = 1; 2 * h <= sp.g; ++h)
                out.push_back(DivClass{DivClass::DeltaRed, 0, RedLabel{h, 0}});
            return out;
        }
        struct Entry {
            RedLabel L;
            std::vector<int> pts;
        };
        std::vector<Entry> entries;
        for (int h = 0; h <= sp.g; ++h)
            for (std::uint32_t mask = 1; mask < (1u << sp.n); mask += 2) {
                RedLabel L{h, mask};
                if (!red_label_valid(sp, L))
                    continue;
                Entry e{L, {}};
                for (int p = 1; p <= sp.n; ++p)
                    if (mask & (1u << (p - 1)))
                        e.pts.push_back(p);
                entries.push_back(std::move(e));
            }
        std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
            if (a.L.h != b.L.h)
                return a.L.h < b.L.h;
            if (a.pts.size() != b.pts.size())
                return a.pts.size() < b.pts.size();
            return a.pts < b.pts;
        });
        for (const auto& e : entries)
            out.push_back(DivClass{DivClass::DeltaRed, 0, e.L});
        return out;
    }

    // Least representative under simultaneous relabeling of the marked points.
    static Monomial canonicalize(Monomial m) {
        normalize_lists(m);
        if (m.red.empty() || m.sp.n == 0) {
            std::sort(m.psi.begin(), m.psi.end(), std::greater<int>());
            return m;
        }
        const int n = m.sp.n;

        // relabeling-invariant point signatures: psi exponent plus, per red
        // factor, the (genus, size, exponent) of the side containing the point
        std::vector<std::vector<int>> sig(n);
        for (int p = 0; p < n; ++p) {
            sig[p].push_back(-m.psi[p]);  // larger psi exponents take lower labels
            std::vector<std::vector<int>> facts;
            for (const auto& [L, e] : m.red) {
                const int size = std::popcount(L.mask);
                if (L.mask & (1u << p))
                    facts.push_back({L.h, size, e});
                else
                    facts.push_back({m.sp.g - L.h, m.sp.n - size, e});
            }
            std::sort(facts.begin(), facts.end());
            for (auto& f : facts)
                sig[p].insert(sig[p].end(), f.begin(), f.end());
        }
        std::vector<int> order(n);
        for (int p = 0; p < n; ++p)
            order[p] = p;
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return sig[a] < sig[b]; });

        std::vector<std::pair<int, int>> groups;  // [begin, end) into order
        int start = 0;
        for (int i = 1; i <= n; ++i) {
            if (i == n || sig[order[i]] != sig[order[start]]) {
                groups.emplace_back(start, i);
                start = i;
            }
        }

        Monomial best;
        std::vector<std::int32_t> best_key;
        std::vector<int> arrangement = order;
        // odometer over per-group permutations
        for (;;) {
            // position i (0-based new label i+1) <- original point arrangement[i]
            std::vector<int> newpos(n);  // original -> new (0-based)
            for (int i = 0; i < n; ++i)
                newpos[arrangement[i]] = i;
            Monomial cand = m;
            for (int p = 0; p < n; ++p)
                cand.psi[newpos[p]] = m.psi[p];
            for (auto& [L, e] : cand.red) {
                std::uint32_t remapped = 0;
                for (int p = 0; p < n; ++p)
                    if (L.mask & (1u << p))
                        remapped |= 1u << newpos[p];
                L.mask = remapped;
            }
            normalize_lists(cand);
            auto key = serialize(cand);
            for (int i = 0; i < n; ++i)
                key[2 + i] = -key[2 + i];  // compare psi parts descending
            if (best_key.empty() || key < best_key) {
                best_key = std::move(key);
                best = std::move(cand);
            }
            // advance
            std::size_t gidx = 0;
            for (; gidx < groups.size(); ++gidx) {
                auto [b, e] = groups[gidx];
                if (std::next_permutation(arrangement.begin() + b, arrangement.begin() + e))
                    break;
            }
            if (gidx == groups.size())
                break;
        }
        return best;
    }

    // --- single-class pull-backs -------------------------------------------

    // pull-back of delta_irr to its own double cover M_bar_{g-1,n+2}
    static Poly irr_self_pullback(SpaceId sp) {
        if (sp.g < 1)
            throw std::invalid_argument("irr_self_pullback: needs g >= 1");
        const SpaceId tgt{sp.g - 1, sp.n + 2};
        Poly out;
        out.add(psi_mono(tgt, sp.n + 1), Rational{-1});
        out.add(psi_mono(tgt, sp.n + 2), Rational{-1});
        if (tgt.g >= 1) {
            Monomial mi = unit_monomial(tgt);
            mi.irr = 1;
            out.add(mi, Rational{1});
        }
        if (sp.n == 0) {
            for (int h = 1; h <= sp.g - 2; ++h)
                out.add(red_mono(tgt, RedLabel{h, 0b01u}), Rational{1});
        } else {
            for (int h = 0; h <= sp.g - 1; ++h)
                for (std::uint32_t M = 1; M < (1u << sp.n); M += 2) {
                    if (h == sp.g - 1 && M == (1u << sp.n) - 1)
                        continue;
                    out.add(red_mono(tgt, RedLabel{h, M | (1u << sp.n)}), Rational{1});
                    out.add(red_mono(tgt, RedLabel{h, M | (1u << (sp.n + 1))}), Rational{1});
                }
        }
        return out;
    }

    // pull-back of a different reducible class along the normalization of delta_irr
    static Poly red_class_to_irr(SpaceId sp, RedLabel M) {
        const SpaceId tgt{sp.g - 1, sp.n + 2};
        const std::uint32_t glue = (1u << sp.n) | (1u << (sp.n + 1));
        Poly out;
        std::vector<RedLabel> cands;
        if (M.h >= 1)
            cands.push_back(RedLabel{M.h - 1, M.mask | glue});
        if (M.h <= sp.g - 1) {
            // for n = 0 the label (h, empty) on the target reads (g-1-h, {1,2})
            if (sp.n == 0)
                cands.push_back(RedLabel{tgt.g - M.h, 0b11u});
            else
                cands.push_back(RedLabel{M.h, M.mask});
        }
        for (auto& L : cands)
            L = red_canonical(tgt, L);
        if (cands.size() == 2 && cands[0] == cands[1])
            cands.pop_back();  // merged summand (n=0, 2h=g)
        for (const auto& L : cands) {
            if (!red_label_valid(tgt, L))
                throw std::logic_error("red_class_to_irr: produced invalid label");
            out.add(red_mono(tgt, L), Rational{1});
        }
        return out;
    }

    struct Sides {
        SpaceId A, B;
        std::vector<int> ptsA, ptsB;  // original labels, ascending
        int glueA = 0, glueB = 0;     // local indices of the glued points
    };

    static Sides sides_of(SpaceId sp, RedLabel t) {
        Sides s;
        for (int p = 1; p <= sp.n; ++p)
            ((t.mask & (1u << (p - 1))) ? s.ptsA : s.ptsB).push_back(p);
        s.A = SpaceId{t.h, static_cast<int>(s.ptsA.size()) + 1};
        s.B = SpaceId{sp.g - t.h, static_cast<int>(s.ptsB.size()) + 1};
        s.glueA = s.A.n;  // the extra point * is ordered last on side one
        s.glueB = 1;      // and is the point labeled 1 on side two
        return s;
    }

    static int local_index_A(const Sides& s, int p) {
        for (std::size_t i = 0; i < s.ptsA.size(); ++i)
            if (s.ptsA[i] == p)
                return static_cast<int>(i) + 1;
        throw std::logic_error("local_index_A: point not on side one");
    }
    static int local_index_B(const Sides& s, int p) {
        for (std::size_t i = 0; i < s.ptsB.size(); ++i)
            if (s.ptsB[i] == p)
                return static_cast<int>(i) + 2;
        throw std::logic_error("local_index_B: point not on side two");
    }

    // self-intersection of a reducible boundary class on its product cover
    static ProdPoly red_self_pullback(SpaceId sp, RedLabel t) {
        const Sides s = sides_of(sp, t);
        ProdPoly out;
        out.add(ProdMono{psi_mono(s.A, s.glueA), unit_monomial(s.B)}, Rational{-1});
        out.add(ProdMono{unit_monomial(s.A), psi_mono(s.B, s.glueB)}, Rational{-1});
        if (sp.n == 0 && s.A.g < s.B.g) {
            out.add(ProdMono{unit_monomial(s.A), red_mono(s.B, RedLabel{s.B.g - s.A.g, 0b1u})},
                    Rational{1});
        } else if (sp.n > 0 && t.mask == (1u << sp.n) - 1 && s.A.g >= s.B.g && s.B.g > 0) {
            const std::uint32_t all = (1u << s.A.n) - 1;
            out.add(ProdMono{red_mono(s.A, RedLabel{s.A.g - s.B.g, all}), unit_monomial(s.B)},
                    Rational{1});
        }
        return out;
    }

    // pull-back of a different reducible class to the product cover of t
    static ProdPoly red_class_to_red(SpaceId sp, RedLabel t, RedLabel M) {
        const Sides s = sides_of(sp, t);
        ProdPoly out;
        if (sp.n == 0) {
            const int g1 = s.A.g, g2 = s.B.g, h = M.h;
            if (g1 > h) {
                out.add(ProdMono{red_mono(s.A, RedLabel{g1 - h, 0b1u}), unit_monomial(s.B)},
                        Rational{1});
                out.add(ProdMono{unit_monomial(s.A), red_mono(s.B, RedLabel{g2 - h, 0b1u})},
                        Rational{1});
            } else if (h > g1) {
                std::vector<RedLabel> cands{RedLabel{g2 - h, 0b1u}, RedLabel{h - g1, 0b1u}};
                for (auto& L : cands)
                    L = red_canonical(s.B, L);
                if (cands[0] == cands[1])
                    cands.pop_back();  // 2h = g: the two summands coincide
                for (const auto& L : cands)
                    out.add(ProdMono{unit_monomial(s.A), red_mono(s.B, L)}, Rational{1});
            }
            return out;
        }
        const std::uint32_t full = (1u << sp.n) - 1;
        const std::uint32_t N1 = t.mask, N2 = full & ~t.mask;
        // (1): the class restricts to side one unchanged
        if (t.h >= M.h && (M.mask & ~N1) == 0) {
            std::uint32_t mask = 0;
            for (int p = 1; p <= sp.n; ++p)
                if (M.mask & (1u << (p - 1)))
                    mask |= 1u << (local_index_A(s, p) - 1);
            RedLabel L = red_canonical(s.A, RedLabel{M.h, mask});
            if (!red_label_valid(s.A, L))
                throw std::logic_error("red_class_to_red: invalid case-1 label");
            out.add(ProdMono{red_mono(s.A, L), unit_monomial(s.B)}, Rational{1});
        }
        // (3): middle component sits on side two with the glue point
        if (M.h >= t.h && (N1 & ~M.mask) == 0) {
            std::uint32_t mask = 1u << (s.glueB - 1);
            for (int p = 1; p <= sp.n; ++p)
                if ((M.mask & ~N1) & (1u << (p - 1)))
                    mask |= 1u << (local_index_B(s, p) - 1);
            RedLabel L = red_canonical(s.B, RedLabel{M.h - t.h, mask});
            if (!red_label_valid(s.B, L))
                throw std::logic_error("red_class_to_red: invalid case-3 label");
            out.add(ProdMono{unit_monomial(s.A), red_mono(s.B, L)}, Rational{1});
        }
        // (4): middle component sits on side one with the glue point
        if (M.h >= s.B.g && (N2 & ~M.mask) == 0) {
            std::uint32_t mask = 1u << (s.glueA - 1);
            for (int p = 1; p <= sp.n; ++p)
                if ((M.mask & ~N2) & (1u << (p - 1)))
                    mask |= 1u << (local_index_A(s, p) - 1);
            RedLabel L = red_canonical(s.A, RedLabel{M.h - s.B.g, mask});
            if (!red_label_valid(s.A, L))
                throw std::logic_error("red_class_to_red: invalid case-4 label");
            out.add(ProdMono{red_mono(s.A, L), unit_monomial(s.B)}, Rational{1});
        }
        return out;
    }

    // memoized results, for cache persistence
    std::vector<std::pair<Monomial, Rational>> memo_snapshot() const {
        std::vector<std::pair<Monomial, Rational>> out;
        out.reserve(memo_.size());
        for (const auto& [key, value] : memo_)
            out.emplace_back(deserialize(key), value);
        return out;
    }

    void memo_insert(const Monomial& m0, const Rational& value) {
        Monomial m = m0;
        normalize_lists(m);
        m = canonicalize(std::move(m));
        std::lock_guard<std::mutex> lock(mu_);
        memo_.emplace(serialize(m), value);
    }

    static Monomial deserialize(const std::vector<std::int32_t>& k) {
        Monomial m;
        std::size_t i = 0;
        m.sp.g = k[i++];
        m.sp.n = k[i++];
        m.psi.resize(m.sp.n);
        for (int p = 0; p < m.sp.n; ++p)
            m.psi[p] = k[i++];
        ++i;  // sentinel
        while (k[i] != -1) {
            int a = k[i++];
            int e = k[i++];
            m.kappa.emplace_back(a, e);
        }
        ++i;
        m.irr = k[i++];
        while (i < k.size() && k[i] != -1) {
            RedLabel L{k[i], static_cast<std::uint32_t>(k[i + 1])};
            m.red.emplace_back(L, k[i + 2]);
            i += 3;
        }
        ++i;
        while (i < k.size())
            m.lam.push_back(k[i++]);
        return m;
    }

    // full push-down of a boundary-free-of-DeltaRed monomial to the unpointed
    // space (M_bar_{1,1} in genus one); delta_irr and lambda factors ride along
    std::vector<std::pair<Rational, Monomial>> pushdown(const Monomial& m0) const {
        Monomial m = m0;
        normalize_lists(m);
        if (!m.red.empty())
            throw std::invalid_argument("pushdown: monomial has reducible boundary factors");
        std::vector<std::pair<Rational, Monomial>> work{{Rational{1}, std::move(m)}}, done;
        const int floor_n = (m0.sp.g >= 2) ? 0 : (m0.sp.g == 1 ? 1 : 3);
        while (!work.empty()) {
            auto [c, cur] = std::move(work.back());
            work.pop_back();
            if (cur.sp.n <= floor_n) {
                done.emplace_back(c, std::move(cur));
                continue;
            }
            for (auto& t : forget_terms(cur))
                work.emplace_back(c * t.first, std::move(t.second));
        }
        return done;
    }

private:
    KappaPsiEngine& kp_;
    HodgeEngine& hodge_;
    std::unordered_map<std::vector<std::int32_t>, Rational, detail::KeyHash> memo_;
    std::mutex mu_;

    static Monomial psi_mono(SpaceId sp, int i) {
        Monomial m = unit_monomial(sp);
        m.psi[i - 1] = 1;
        return m;
    }
    static Monomial red_mono(SpaceId sp, RedLabel L) {
        Monomial m = unit_monomial(sp);
        m.red.emplace_back(L, 1);
        return m;
    }

    static void normalize_lists(Monomial& m) {
        for (auto& [L, e] : m.red)
            L = red_canonical(m.sp, L);
        std::erase_if(m.kappa, [](const auto& p) { return p.second == 0; });
        std::erase_if(m.red, [](const auto& p) { return p.second == 0; });
        std::sort(m.kappa.begin(), m.kappa.end());
        // merge equal labels that became identical after canonicalization
        std::sort(m.red.begin(), m.red.end(), red_order);
        std::vector<std::pair<RedLabel, int>> merged;
        for (const auto& [L, e] : m.red) {
            if (!merged.empty() && merged.back().first == L)
                merged.back().second += e;
            else
                merged.emplace_back(L, e);
        }
        m.red = std::move(merged);
        std::vector<std::pair<int, int>> kmerged;
        for (const auto& [a, e] : m.kappa) {
            if (!kmerged.empty() && kmerged.back().first == a)
                kmerged.back().second += e;
            else
                kmerged.emplace_back(a, e);
        }
        m.kappa = std::move(kmerged);
        while (!m.lam.empty() && m.lam.back() == 0)
            m.lam.pop_back();
    }

    void validate(const Monomial& m) const {
        if (!m.sp.stable())
            throw std::invalid_argument("evaluate: unstable space");
        if (static_cast<int>(m.psi.size()) != m.sp.n)
            throw std::invalid_argument("evaluate: psi exponent count != n");
        for (int v : m.psi)
            if (v < 0)
                throw std::invalid_argument("evaluate: negative exponent");
        for (const auto& [a, e] : m.kappa)
            if (a < 1 || e < 0)
                throw std::invalid_argument("evaluate: bad kappa factor");
        if (m.irr < 0)
            throw std::invalid_argument("evaluate: negative exponent");
        for (const auto& [L, e] : m.red) {
            if (e < 0)
                throw std::invalid_argument("evaluate: negative exponent");
            if (!red_label_valid(m.sp, red_canonical(m.sp, L)))
                throw std::invalid_argument("evaluate: invalid boundary label");
        }
        for (int v : m.lam)
            if (v < 0)
                throw std::invalid_argument("evaluate: negative exponent");
    }

    Rational eval_outer(Monomial m, const DivClass* force) {
        validate(m);
        normalize_lists(m);
        if (m.degree() != m.sp.dim())
            return Rational{0};
        return eval_inner(std::move(m), force);
    }

    Rational eval_inner(Monomial m, const DivClass* force) {
        // lambda_j vanishes above the rank
        for (std::size_t j = 0; j < m.lam.size(); ++j)
            if (m.lam[j] > 0 && static_cast<int>(j) + 1 > m.sp.g)
                return Rational{0};
        const int lamdeg = m.lambda_degree();
        if (m.sp.g == 0 && (m.irr > 0 || lamdeg > 0))
            return Rational{0};
        // delta_irr and lambda are pulled back from the unpointed space (from
        // M_bar_{1,1} in genus one), so their joint degree is capped by its
        // dimension; this is the delta_irr^{m+1} = 0 identity in general form
        if (m.sp.g >= 1) {
            const int cap = (m.sp.g >= 2) ? 3 * m.sp.g - 3 : 1;
            if (m.irr + lamdeg > cap)
                return Rational{0};
        }

        m = canonicalize(std::move(m));
        const auto key = serialize(m);
        if (!force) {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = memo_.find(key);
            if (it != memo_.end())
                return it->second;
        }

        Rational value;
        if (force) {
            if (force->kind == DivClass::DeltaIrr) {
                if (m.irr < 1)
                    throw std::invalid_argument("forced restriction: no delta_irr factor");
                value = restrict_irr(m);
            } else if (force->kind == DivClass::DeltaRed) {
                const RedLabel L = red_canonical(m.sp, force->red);
                std::size_t idx = m.red.size();
                for (std::size_t i = 0; i < m.red.size(); ++i)
                    if (m.red[i].first == L)
                        idx = i;
                if (idx == m.red.size())
                    throw std::invalid_argument("forced restriction: factor not present");
                value = restrict_red(m, idx);
            } else {
                throw std::invalid_argument("forced restriction: not a boundary class");
            }
            return value;
        }

        if (!m.red.empty()) {
            value = restrict_red(m, choose_red(m));
        } else if (m.irr > 0) {
            const int floor_n = (m.sp.g >= 2) ? 0 : 1;  // g >= 1 here
            if (m.sp.n > floor_n)
                value = pushdown_value(m);
            else
                value = restrict_irr(m);
        } else if (lamdeg == 0) {
            std::vector<int> kappas;
            for (const auto& [a, e] : m.kappa)
                kappas.insert(kappas.end(), e, a);
            value = kp_.kappa_psi_number(m.sp.g, m.sp.n, m.psi, std::move(kappas));
        } else {
            std::vector<int> kappas;
            for (const auto& [a, e] : m.kappa)
                kappas.insert(kappas.end(), e, a);
            value = hodge_.mixed_number(m.sp.g, m.sp.n, m.psi, kappas, {}, m.lam);
        }

        std::lock_guard<std::mutex> lock(mu_);
        memo_.emplace(std::move(key), value);
        return value;
    }

    // balanced-split preference; delta_irr is only restricted when no
    // reducible factor remains
    static std::size_t choose_red(const Monomial& m) {
        std::size_t best = 0;
        int best_score = 1 << 30;
        for (std::size_t i = 0; i < m.red.size(); ++i) {
            const auto& L = m.red[i].first;
            const int size = std::popcount(L.mask);
            const int score =
                std::abs(3 * (2 * L.h - m.sp.g) + (2 * size - m.sp.n));
            if (score < best_score) {
                best_score = score;
                best = i;
            }
        }
        return best;
    }

    std::vector<std::pair<Rational, Monomial>> forget_terms(const Monomial& m) const {
        // remove the point with the largest psi exponent (fewer section terms)
        Monomial s = m;
        std::sort(s.psi.begin(), s.psi.end());
        std::vector<int> kappas;
        for (const auto& [a, e] : s.kappa)
            kappas.insert(kappas.end(), e, a);
        std::vector<std::pair<Rational, Monomial>> out;
        for (auto& t : forget_last_point(s.sp.g, s.sp.n, s.psi, kappas)) {
            Monomial child;
            child.sp = SpaceId{s.sp.g, s.sp.n - 1};
            child.psi = std::move(t.d);
            auto runs = detail::run_lengths([&] {
                std::sort(t.kappas.begin(), t.kappas.end(), std::greater<int>());
                return t.kappas;
            }());
            for (const auto& [a, mult] : runs)
                child.kappa.emplace_back(a, mult);
            std::sort(child.kappa.begin(), child.kappa.end());
            child.irr = s.irr;
            child.lam = s.lam;
            out.emplace_back(t.coeff, std::move(child));
        }
        return out;
    }

    Rational pushdown_value(const Monomial& m) {
        Rational acc{0};
        for (auto& [c, child] : forget_terms(m))
            acc += c * eval_inner(std::move(child), nullptr);
        return acc;
    }

    Rational restrict_irr(const Monomial& m) {
        const SpaceId tgt{m.sp.g - 1, m.sp.n + 2};
        Monomial base = unit_monomial(tgt);
        for (int i = 0; i < m.sp.n; ++i)
            base.psi[i] = m.psi[i];
        base.kappa = m.kappa;  // i_0^* kappa_a = kappa_a
        base.lam = m.lam;      // extension by a trivial bundle
        Poly P;
        P.add(base, Rational{1});
        const int cap = tgt.dim();
        for (const auto& [L, e] : m.red) {
            P = poly_mul(P, poly_pow(red_class_to_irr(m.sp, L), e, unit_monomial(tgt), cap),
                         cap);
            if (P.empty())
                return Rational{0};
        }
        if (m.irr > 1)
            P = poly_mul(P, poly_pow(irr_self_pullback(m.sp), m.irr - 1, unit_monomial(tgt), cap),
                         cap);
        Rational acc{0};
        P.for_each([&](const Monomial& child, const Rational& c) {
            acc += c * eval_inner(child, nullptr);
        });
        return acc / 2;  // the gluing map has degree two
    }

    Rational restrict_red(const Monomial& m, std::size_t idx) {
        const auto [t, e_target] = m.red[idx];
        const Sides s = sides_of(m.sp, t);
        const int capA = s.A.dim(), capB = s.B.dim();

        Monomial baseA = unit_monomial(s.A), baseB = unit_monomial(s.B);
        for (int p = 1; p <= m.sp.n; ++p) {
            if (m.psi[p - 1] == 0)
                continue;
            if (t.mask & (1u << (p - 1)))
                baseA.psi[local_index_A(s, p) - 1] = m.psi[p - 1];
            else
                baseB.psi[local_index_B(s, p) - 1] = m.psi[p - 1];
        }
        ProdPoly P;
        P.add(ProdMono{baseA, baseB}, Rational{1});
        const ProdMono unit{unit_monomial(s.A), unit_monomial(s.B)};

        for (const auto& [a, e] : m.kappa) {
            ProdPoly f;
            Monomial ka = unit_monomial(s.A);
            ka.kappa.emplace_back(a, 1);
            Monomial kb = unit_monomial(s.B);
            kb.kappa.emplace_back(a, 1);
            f.add(ProdMono{ka, unit_monomial(s.B)}, Rational{1});
            f.add(ProdMono{unit_monomial(s.A), kb}, Rational{1});
            P = prod_mul(P, prod_pow(f, e, unit, capA, capB), capA, capB);
        }
        if (m.irr > 0) {
            ProdPoly f;
            if (s.A.g >= 1) {
                Monomial ia = unit_monomial(s.A);
                ia.irr = 1;
                f.add(ProdMono{ia, unit_monomial(s.B)}, Rational{1});
            }
            if (s.B.g >= 1) {
                Monomial ib = unit_monomial(s.B);
                ib.irr = 1;
                f.add(ProdMono{unit_monomial(s.A), ib}, Rational{1});
            }
            if (f.empty())
                return Rational{0};
            P = prod_mul(P, prod_pow(f, m.irr, unit, capA, capB), capA, capB);
        }
        for (std::size_t j = 0; j < m.lam.size(); ++j) {
            if (m.lam[j] == 0)
                continue;
            const int deg = static_cast<int>(j) + 1;
            ProdPoly f;  // lambda splits over the direct sum of the Hodge bundles
            for (int u = 0; u <= deg; ++u) {
                const int v = deg - u;
                if (u > s.A.g || v > s.B.g)
                    continue;
                Monomial la = unit_monomial(s.A);
                if (u > 0) {
                    la.lam.assign(u, 0);
                    la.lam[u - 1] = 1;
                }
                Monomial lb = unit_monomial(s.B);
                if (v > 0) {
                    lb.lam.assign(v, 0);
                    lb.lam[v - 1] = 1;
                }
                f.add(ProdMono{la, lb}, Rational{1});
            }
            if (f.empty())
                return Rational{0};
            P = prod_mul(P, prod_pow(f, m.lam[j], unit, capA, capB), capA, capB);
        }
        for (std::size_t i = 0; i < m.red.size(); ++i) {
            if (i == idx)
                continue;
            const auto& [L, e] = m.red[i];
            ProdPoly f = red_class_to_red(m.sp, t, L);
            if (f.empty())
                return Rational{0};
            P = prod_mul(P, prod_pow(f, e, unit, capA, capB), capA, capB);
        }
        if (e_target > 1)
            P = prod_mul(P, prod_pow(red_self_pullback(m.sp, t), e_target - 1, unit, capA, capB),
                         capA, capB);

        Rational acc{0};
        P.for_each([&](const ProdMono& pm, const Rational& c) {
            if (pm.a.degree() != capA)
                return;
            Rational va = eval_inner(pm.a, nullptr);
            if (va == 0)
                return;
            acc += c * va * eval_inner(pm.b, nullptr);
        });
        const bool half = (m.sp.n == 0 && 2 * t.h == m.sp.g);
        return half ? acc / 2 : acc;
    }
};

}  // namespace mgn
