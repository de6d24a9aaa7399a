#pragma once

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mgn/divisor.hpp"

namespace mgn {

struct ParseError : std::runtime_error {
    std::size_t offset;
    ParseError(std::size_t off, const std::string& msg)
        : std::runtime_error(msg + " (byte " + std::to_string(off) + ")"), offset(off) {}
};

struct Factor {
    enum Kind { Psi, Kappa, Lambda, Ch, DIrr, DRed } kind = Psi;
    int index = 0;         // point index / kappa / lambda / ch index / red genus
    std::vector<int> pts;  // DRed subset, ascending, containing 1 when n > 0
    int exp = 1;
};

struct Expression {
    SpaceId sp;
    std::vector<Factor> factors;
};

namespace detail {

class Scanner {
public:
    explicit Scanner(std::string_view text) : text_(text) {}

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }
    bool eof() {
        skip_ws();
        return pos_ >= text_.size();
    }
    std::size_t pos() const { return pos_; }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }
    void expect(char c, const char* what) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != c)
            throw ParseError(pos_, std::string("expected '") + c + "' " + what);
        ++pos_;
    }
    bool consume(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    bool consume_word(std::string_view w) {
        skip_ws();
        if (text_.substr(pos_, w.size()) == w) {
            pos_ += w.size();
            return true;
        }
        return false;
    }
    int integer(const char* what) {
        skip_ws();
        const std::size_t start = pos_;
        bool neg = false;
        if (pos_ < text_.size() && text_[pos_] == '-') {
            neg = true;
            ++pos_;
        }
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
            throw ParseError(start, std::string("expected integer ") + what);
        long v = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            v = v * 10 + (text_[pos_] - '0');
            if (v > 1000000)
                throw ParseError(start, "integer out of range");
            ++pos_;
        }
        return neg ? -static_cast<int>(v) : static_cast<int>(v);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

// Grammar: M(g,n): factor (* factor)*    factor := token ['^' posint]
// tokens: psi<i>, ka<j>, la<j>, ch<j>, d_irr, d<h>_{i1,i2,...}, d<h>
inline Expression parse_expression(std::string_view text) {
    detail::Scanner sc(text);
    Expression out;

    sc.skip_ws();
    const std::size_t mpos = sc.pos();
    if (!sc.consume_word("M"))
        throw ParseError(mpos, "expected 'M(g,n):'");
    sc.expect('(', "after M");
    out.sp.g = sc.integer("genus");
    sc.expect(',', "between g and n");
    out.sp.n = sc.integer("marked-point count");
    sc.expect(')', "after n");
    sc.expect(':', "after space");
    if (!out.sp.stable())
        throw ParseError(mpos, "unstable space: need 2g-2+n > 0");
    if (out.sp.n > 30)
        throw ParseError(mpos, "marked-point count out of range");

    bool first = true;
    while (!sc.eof()) {
        if (!first)
            sc.expect('*', "between factors");
        first = false;
        sc.skip_ws();
        const std::size_t fpos = sc.pos();
        Factor f;
        if (sc.consume_word("psi")) {
            f.kind = Factor::Psi;
            f.index = sc.integer("psi point index");
            if (f.index < 1 || f.index > out.sp.n)
                throw ParseError(fpos, "psi index outside 1..n");
        } else if (sc.consume_word("ka")) {
            f.kind = Factor::Kappa;
            f.index = sc.integer("kappa index");
            if (f.index < 1)
                throw ParseError(fpos, "kappa index must be >= 1");
        } else if (sc.consume_word("la")) {
            f.kind = Factor::Lambda;
            f.index = sc.integer("lambda index");
            if (f.index < 1)
                throw ParseError(fpos, "lambda index must be >= 1");
        } else if (sc.consume_word("ch")) {
            f.kind = Factor::Ch;
            f.index = sc.integer("ch index");
            if (f.index < 1 || f.index % 2 == 0)
                throw ParseError(fpos, "ch index must be odd and positive");
        } else if (sc.consume_word("d_irr")) {
            f.kind = Factor::DIrr;
        } else if (sc.consume_word("d")) {
            f.kind = Factor::DRed;
            f.index = sc.integer("boundary genus");
            if (out.sp.n > 0) {
                sc.expect('_', "before boundary subset");
                sc.expect('{', "to open boundary subset");
                for (;;) {
                    int p = sc.integer("subset element");
                    if (p < 1 || p > out.sp.n)
                        throw ParseError(fpos, "subset element outside 1..n");
                    if (!f.pts.empty() && p <= f.pts.back())
                        throw ParseError(fpos, "malformed subset: must be strictly ascending");
                    f.pts.push_back(p);
                    if (!sc.consume(','))
                        break;
                }
                sc.expect('}', "to close boundary subset");
                if (f.pts.front() != 1)
                    throw ParseError(fpos, "boundary subset must contain point 1");
                RedLabel L{f.index, 0};
                for (int p : f.pts)
                    L.mask |= 1u << (p - 1);
                if (!red_label_valid(out.sp, L))
                    throw ParseError(fpos, "boundary divisor violates stability");
            } else {
                if (f.index < 1 || 2 * f.index > out.sp.g)
                    throw ParseError(fpos, "boundary genus must satisfy 1 <= h <= g/2");
            }
        } else {
            throw ParseError(fpos, "unknown token");
        }
        if (sc.consume('^')) {
            const std::size_t epos = sc.pos();
            f.exp = sc.integer("exponent");
            if (f.exp < 1)
                throw ParseError(epos, "exponent must be a positive integer");
        }
        out.factors.push_back(std::move(f));
    }

    bool has_boundary = false, has_ch = false, has_high_kappa = false;
    for (const auto& f : out.factors) {
        has_boundary |= (f.kind == Factor::DIrr || f.kind == Factor::DRed);
        has_ch |= (f.kind == Factor::Ch);
        has_high_kappa |= (f.kind == Factor::Kappa && f.index >= 2);
    }
    if (has_boundary && has_ch)
        throw ParseError(0, "ch classes cannot be mixed with boundary divisors");
    if (has_boundary && has_high_kappa)
        throw ParseError(0, "kappa indices >= 2 cannot be mixed with boundary divisors");
    return out;
}

inline bool expression_is_divisor_monomial(const Expression& e) {
    for (const auto& f : e.factors)
        if (f.kind == Factor::Ch || (f.kind == Factor::Kappa && f.index >= 2))
            return false;
    return true;
}

inline Monomial expression_to_monomial(const Expression& e) {
    Monomial m = unit_monomial(e.sp);
    for (const auto& f : e.factors) {
        switch (f.kind) {
            case Factor::Psi: m.psi[f.index - 1] += f.exp; break;
            case Factor::Kappa: {
                bool merged = false;
                for (auto& [a, x] : m.kappa)
                    if (a == f.index) {
                        x += f.exp;
                        merged = true;
                    }
                if (!merged)
                    m.kappa.emplace_back(f.index, f.exp);
                break;
            }
            case Factor::Lambda: {
                if (static_cast<int>(m.lam.size()) < f.index)
                    m.lam.resize(f.index, 0);
                m.lam[f.index - 1] += f.exp;
                break;
            }
            case Factor::DIrr: m.irr += f.exp; break;
            case Factor::DRed: {
                RedLabel L{f.index, 0};
                for (int p : f.pts)
                    L.mask |= 1u << (p - 1);
                bool merged = false;
                for (auto& [oL, x] : m.red)
                    if (oL == L) {
                        x += f.exp;
                        merged = true;
                    }
                if (!merged)
                    m.red.emplace_back(L, f.exp);
                break;
            }
            case Factor::Ch: throw std::invalid_argument("ch factor in divisor monomial");
        }
    }
    std::sort(m.kappa.begin(), m.kappa.end());
    std::sort(m.red.begin(), m.red.end(), red_order);
    return m;
}

inline int expression_degree(const Expression& e) {
    int d = 0;
    for (const auto& f : e.factors) {
        switch (f.kind) {
            case Factor::Psi:
            case Factor::DIrr:
            case Factor::DRed: d += f.exp; break;
            case Factor::Kappa:
            case Factor::Lambda:
            case Factor::Ch: d += f.index * f.exp; break;
        }
    }
    return d;
}

namespace detail {

inline void append_factor(std::string& out, const std::string& token, int exp) {
    if (!out.empty())
        out += " * ";
    out += token;
    if (exp != 1)
        out += "^" + std::to_string(exp);
}

}  // namespace detail

// token string in the enumerate_classes order (psi_i, ka, d_irr, reducible
// classes by (h,|N|,lex)), with ch and lambda factors appended
inline std::string monomial_tokens(const Monomial& m, const std::vector<int>& chs = {}) {
    std::string out;
    for (int i = 1; i <= m.sp.n; ++i)
        if (m.psi[i - 1] > 0)
            detail::append_factor(out, "psi" + std::to_string(i), m.psi[i - 1]);
    for (const auto& [a, e] : m.kappa)
        if (e > 0)
            detail::append_factor(out, "ka" + std::to_string(a), e);
    if (m.irr > 0)
        detail::append_factor(out, "d_irr", m.irr);
    std::vector<std::pair<RedLabel, int>> red = m.red;
    std::sort(red.begin(), red.end(), red_order);
    for (const auto& [L, e] : red) {
        if (e <= 0)
            continue;
        std::string tok = "d" + std::to_string(L.h);
        if (m.sp.n > 0) {
            tok += "_{";
            bool first = true;
            for (int p = 1; p <= m.sp.n; ++p)
                if (L.mask & (1u << (p - 1))) {
                    if (!first)
                        tok += ",";
                    tok += std::to_string(p);
                    first = false;
                }
            tok += "}";
        }
        detail::append_factor(out, tok, e);
    }
    for (int c : chs)
        detail::append_factor(out, "ch" + std::to_string(c), 1);
    for (std::size_t j = 0; j < m.lam.size(); ++j)
        if (m.lam[j] > 0)
            detail::append_factor(out, "la" + std::to_string(j + 1), m.lam[j]);
    return out.empty() ? "1" : out;
}

// canonical printed form: merged factors in display order with the space prefix
inline std::string normalize(const Expression& e) {
    std::string body;
    if (expression_is_divisor_monomial(e)) {
        body = monomial_tokens(expression_to_monomial(e));
    } else {
        // psi, kappa, ch, lambda with boundary-free content
        std::vector<int> psi(e.sp.n, 0), kap, chs, lam;
        for (const auto& f : e.factors) {
            switch (f.kind) {
                case Factor::Psi: psi[f.index - 1] += f.exp; break;
                case Factor::Kappa: kap.insert(kap.end(), f.exp, f.index); break;
                case Factor::Ch: chs.insert(chs.end(), f.exp, f.index); break;
                case Factor::Lambda: {
                    if (static_cast<int>(lam.size()) < f.index)
                        lam.resize(f.index, 0);
                    lam[f.index - 1] += f.exp;
                    break;
                }
                default: break;
            }
        }
        std::sort(kap.begin(), kap.end());
        std::sort(chs.begin(), chs.end());
        for (int i = 1; i <= e.sp.n; ++i)
            if (psi[i - 1] > 0)
                detail::append_factor(body, "psi" + std::to_string(i), psi[i - 1]);
        for (std::size_t i = 0; i < kap.size();) {
            std::size_t j = i;
            while (j < kap.size() && kap[j] == kap[i])
                ++j;
            detail::append_factor(body, "ka" + std::to_string(kap[i]), static_cast<int>(j - i));
            i = j;
        }
        for (std::size_t i = 0; i < chs.size();) {
            std::size_t j = i;
            while (j < chs.size() && chs[j] == chs[i])
                ++j;
            detail::append_factor(body, "ch" + std::to_string(chs[i]), static_cast<int>(j - i));
            i = j;
        }
        for (std::size_t j = 0; j < lam.size(); ++j)
            if (lam[j] > 0)
                detail::append_factor(body, "la" + std::to_string(j + 1), lam[j]);
        if (body.empty())
            body = "1";
    }
    return "M(" + std::to_string(e.sp.g) + "," + std::to_string(e.sp.n) + "): " + body;
}

}  // namespace mgn
