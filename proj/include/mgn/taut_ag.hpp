#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mgn/bernoulli.hpp"
#include "mgn/hodge.hpp"
#include "mgn/rational.hpp"

namespace mgn {

// prod_{i=1}^{g} |B_{2i}| / (4i), the value of lambda_1...lambda_g against the
// fundamental class of the compactified moduli of abelian varieties
inline Rational proportionality_value(int g) {
    if (g < 1)
        throw std::invalid_argument("proportionality_value: genus must be >= 1");
    Rational acc{1};
    for (int i = 1; i <= g; ++i) {
        Rational b = bernoulli(2 * i);
        if (b < 0)
            b = -b;
        acc *= b / Rational(4 * i);
    }
    return acc;
}

// Tautological ring of the compactified A_g: Q[lambda_1..lambda_g] modulo the
// even Chern character relations, equivalently the homogeneous parts of
// (1 - lambda_1 + lambda_2 - ...)(1 + lambda_1 + lambda_2 + ...) = 1.
// Monomials are exponent vectors over lambda_1..lambda_g.  The relations are
// used as the rewriting rule
//   lambda_k^2 = 2 sum_{i=0}^{k-1} (-1)^{i+k+1} lambda_i lambda_{2k-i},
// which terminates on square-free monomials; the top graded piece has the
// single basis element lambda_1...lambda_g.
class TautRing {
public:
    explicit TautRing(int g) : g_(g), prop_(proportionality_value(g)) {
        if (g < 1)
            throw std::invalid_argument("TautRing: genus must be >= 1");
    }

    int genus() const { return g_; }
    int top_degree() const { return g_ * (g_ + 1) / 2; }

    static int monomial_degree(const std::vector<int>& exps) {
        int d = 0;
        for (std::size_t j = 0; j < exps.size(); ++j)
            d += static_cast<int>(j + 1) * exps[j];
        return d;
    }

    // square-free monomials of the given degree, ordered lexicographically by
    // their ascending index sequences
    static std::vector<std::vector<int>> squarefree_basis(int g, int degree) {
        std::vector<std::vector<int>> seqs;
        std::vector<int> cur;
        auto rec = [&](auto&& self, int next, int remaining) -> void {
            if (remaining == 0) {
                seqs.push_back(cur);
                return;
            }
            for (int j = next; j <= g && j <= remaining; ++j) {
                cur.push_back(j);
                self(self, j + 1, remaining - j);
                cur.pop_back();
            }
        };
        rec(rec, 1, degree);
        std::sort(seqs.begin(), seqs.end());
        std::vector<std::vector<int>> out;
        out.reserve(seqs.size());
        for (const auto& s : seqs) {
            std::vector<int> exps(g, 0);
            for (int j : s)
                exps[j - 1] = 1;
            out.push_back(std::move(exps));
        }
        return out;
    }

    // value of a top-degree monomial; strategy selects which repeated index is
    // rewritten first (0: smallest, 1: largest), giving two independent
    // reduction orders
    Rational evaluate_top(const std::vector<int>& exps, int strategy = 0) {
        if (strategy != 0 && strategy != 1)
            throw std::invalid_argument("evaluate_top: unknown strategy");
        std::vector<int> e = padded(exps);
        if (monomial_degree(e) != top_degree())
            throw std::invalid_argument("evaluate_top: monomial degree != g(g+1)/2");
        return socle_coefficient(e, strategy) * prop_;
    }

    // pairing of a degree-c basis element against a degree-(3g-3) monomial
    Rational pair_value(const std::vector<int>& basis_elem, const std::vector<int>& lam_mono,
                        int strategy = 0) {
        std::vector<int> a = padded(basis_elem), b = padded(lam_mono);
        if (monomial_degree(a) + monomial_degree(b) != top_degree())
            throw std::invalid_argument("pair_value: degrees are not complementary");
        std::vector<int> prod(g_, 0);
        for (int j = 0; j < g_; ++j)
            prod[j] = a[j] + b[j];
        return evaluate_top(prod, strategy);
    }

private:
    int g_;
    Rational prop_;
    std::map<std::pair<std::vector<int>, int>, Rational> memo_;

    std::vector<int> padded(const std::vector<int>& exps) const {
        std::vector<int> e(g_, 0);
        for (std::size_t j = 0; j < exps.size(); ++j) {
            if (exps[j] < 0)
                throw std::invalid_argument("negative lambda exponent");
            if (exps[j] > 0 && static_cast<int>(j) >= g_)
                throw std::invalid_argument("lambda index above the genus");
            if (static_cast<int>(j) < g_)
                e[j] = exps[j];
        }
        return e;
    }

    Rational socle_coefficient(const std::vector<int>& exps, int strategy) {
        int k = 0;  // 1-based index of the repeated factor to rewrite
        if (strategy == 0) {
            for (int j = 1; j <= g_; ++j)
                if (exps[j - 1] >= 2) {
                    k = j;
                    break;
                }
        } else {
            for (int j = g_; j >= 1; --j)
                if (exps[j - 1] >= 2) {
                    k = j;
                    break;
                }
        }
        if (k == 0) {
            // square-free of top degree: necessarily lambda_1...lambda_g
            for (int j = 1; j <= g_; ++j)
                if (exps[j - 1] != 1)
                    throw std::logic_error("socle_coefficient: unexpected square-free monomial");
            return Rational{1};
        }
        auto key = std::make_pair(exps, strategy);
        auto it = memo_.find(key);
        if (it != memo_.end())
            return it->second;
        Rational acc{0};
        for (int i = 0; i <= k - 1; ++i) {
            const int other = 2 * k - i;
            if (other > g_)
                continue;
            std::vector<int> child = exps;
            child[k - 1] -= 2;
            if (i >= 1)
                child[i - 1] += 1;
            child[other - 1] += 1;
            const Rational sign = ((i + k + 1) % 2 == 0) ? Rational{2} : Rational{-2};
            acc += sign * socle_coefficient(child, strategy);
        }
        memo_.emplace(std::move(key), acc);
        return acc;
    }
};

// class in the tautological ring, expressed over a square-free basis
struct RingElement {
    int genus = 0;
    int degree = 0;
    std::vector<std::pair<std::vector<int>, Rational>> terms;  // (exponent vector, coefficient)
};

inline std::string format_coefficient(const Rational& c) {
    if (denominator(c) == 1)
        return numerator(c).str();
    return fraction_str(c);
}

// "<coeff> * la1la2 + <coeff> * la3 ..." with basis monomials in lexicographic
// order of their index sequences
inline std::string format_class(const RingElement& elem) {
    std::string out;
    for (const auto& [exps, c] : elem.terms) {
        if (c == 0)
            continue;
        if (!out.empty())
            out += " + ";
        out += format_coefficient(c);
        out += " * ";
        std::string mono;
        for (std::size_t j = 0; j < exps.size(); ++j)
            for (int e = 0; e < exps[j]; ++e)
                mono += "la" + std::to_string(j + 1);
        out += mono.empty() ? "1" : mono;
    }
    return out.empty() ? "0" : out;
}

// coefficient of lambda_1 lambda_2 ... lambda_{g-3} in the projected Jacobian
// class: (1/(2g-2)) prod_{i=1}^{g-2} 2/((2i+1)|B_{2i}|)
inline Rational conjecture1_coefficient(int g) {
    if (g < 3)
        throw std::invalid_argument("conjecture1_coefficient: genus must be >= 3");
    Rational acc = Rational(1, 2 * g - 2);
    for (int i = 1; i <= g - 2; ++i) {
        Rational b = bernoulli(2 * i);
        if (b < 0)
            b = -b;
        acc *= Rational{2} / (Rational(2 * i + 1) * b);
    }
    return acc;
}

// coefficient of lambda_2 lambda_3 ... lambda_{g-4} lambda_{g-2}:
// (g(2g-2)/12 - 2^{g-3}) times the first coefficient
inline Rational conjecture2_coefficient(int g) {
    if (g < 5)
        throw std::invalid_argument("conjecture2_coefficient: genus must be >= 5");
    Rational factor = Rational(g * (2 * g - 2), 12) - rat_pow(Rational{2}, g - 3);
    return factor * conjecture1_coefficient(g);
}

// Projection of the Jacobian-locus class into the tautological ring: solves
// pair(Lambda_i, sum_j a_j s_j) = (1/2) <Lambda_i on M_bar_g> over the
// square-free basis s_j of degree (g-2 choose 2).
inline RingElement jacobian_class(int g, HodgeEngine& hodge,
                                  const std::vector<std::vector<int>>* lambdas_override = nullptr) {
    if (g < 3)
        throw std::invalid_argument("jacobian_class: genus must be >= 3");
    TautRing ring(g);
    const int c = (g - 2) * (g - 3) / 2;
    auto basis = TautRing::squarefree_basis(g, c);
    const std::size_t k = basis.size();

    std::vector<std::vector<int>> lambdas;
    if (lambdas_override) {
        lambdas = *lambdas_override;
    } else {
        lambdas = TautRing::squarefree_basis(g, 3 * g - 3);
        if (lambdas.size() < k)
            throw std::runtime_error("jacobian_class: not enough square-free monomials");
        lambdas.resize(k);
    }
    if (lambdas.size() != k)
        throw std::invalid_argument("jacobian_class: need exactly one monomial per basis element");

    // rows: pairings; right-hand side: half the Torelli push-forward integrals
    std::vector<std::vector<Rational>> M(k, std::vector<Rational>(k + 1));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j)
            M[i][j] = ring.pair_value(basis[j], lambdas[i]);
        M[i][k] = hodge.lambda_number(g, lambdas[i]) / Rational{2};
    }

    // exact Gaussian elimination
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot = col;
        while (pivot < k && M[pivot][col] == 0)
            ++pivot;
        if (pivot == k)
            throw std::runtime_error("jacobian_class: singular pairing matrix");
        std::swap(M[col], M[pivot]);
        for (std::size_t row = 0; row < k; ++row) {
            if (row == col || M[row][col] == 0)
                continue;
            Rational f = M[row][col] / M[col][col];
            for (std::size_t j = col; j <= k; ++j)
                M[row][j] -= f * M[col][j];
        }
    }

    RingElement out;
    out.genus = g;
    out.degree = c;
    for (std::size_t j = 0; j < k; ++j)
        out.terms.emplace_back(basis[j], M[j][k] / M[j][j]);
    return out;
}

}  // namespace mgn
