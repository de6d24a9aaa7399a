#pragma once

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mgn/divisor.hpp"
#include "mgn/expr.hpp"

namespace mgn {

inline constexpr const char* kCacheHeader = "# mgn-cache 1";

// One entry per line: SPACE g n<TAB>canonical-monomial<TAB>p/q.  Only
// monomials expressible in the divisor classes plus lambda factors are
// persisted (push-down artifacts with higher kappa indices stay in memory).
inline void save_cache(const DivisorEngine& engine, std::ostream& out) {
    struct Line {
        int g, n;
        std::string tokens, value;
    };
    std::vector<Line> lines;
    for (const auto& [m, value] : engine.memo_snapshot()) {
        bool plain = true;
        for (const auto& [a, e] : m.kappa)
            if (a != 1)
                plain = false;
        if (!plain)
            continue;
        lines.push_back(Line{m.sp.g, m.sp.n, monomial_tokens(m), fraction_str(value)});
    }
    std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
        if (a.g != b.g)
            return a.g < b.g;
        if (a.n != b.n)
            return a.n < b.n;
        return a.tokens < b.tokens;
    });
    out << kCacheHeader << "\n";
    for (const auto& l : lines)
        out << "SPACE " << l.g << " " << l.n << "\t" << l.tokens << "\t" << l.value << "\n";
}

// returns the number of entries loaded; malformed content throws
inline std::size_t load_cache(DivisorEngine& engine, std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        return 0;
    if (line != kCacheHeader)
        throw std::runtime_error("cache: unrecognized header");
    std::size_t count = 0;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream ls(line);
        std::string word;
        int g = 0, n = 0;
        ls >> word >> g >> n;
        if (word != "SPACE")
            throw std::runtime_error("cache: malformed line: " + line);
        std::string rest;
        std::getline(ls, rest);
        const auto tab1 = rest.find('\t');
        const auto tab2 = rest.find('\t', tab1 + 1);
        if (tab1 == std::string::npos || tab2 == std::string::npos)
            throw std::runtime_error("cache: malformed line: " + line);
        const std::string tokens = rest.substr(tab1 + 1, tab2 - tab1 - 1);
        const std::string value = rest.substr(tab2 + 1);
        Expression e = parse_expression("M(" + std::to_string(g) + "," + std::to_string(n) +
                                        "): " + tokens);
        engine.memo_insert(expression_to_monomial(e), parse_fraction(value));
        ++count;
    }
    return count;
}

}  // namespace mgn
