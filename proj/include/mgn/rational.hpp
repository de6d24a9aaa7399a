#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mgn {

// Every quantity in this library is an exact fraction; there is no
// floating-point path anywhere.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Renders "p/q" with q > 0; integers are printed as "p/1" so that output
// stays machine-parsable.
inline std::string fraction_str(const Rational& r) {
    std::string s = numerator(r).str();
    s += '/';
    s += denominator(r).str();
    return s;
}

inline Rational parse_fraction(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos)
        return Rational(Integer(std::string(text)));
    Integer num{std::string(text.substr(0, slash))};
    Integer den{std::string(text.substr(slash + 1))};
    if (den == 0)
        throw std::invalid_argument("fraction with zero denominator");
    return Rational(num, den);
}

inline Rational rat_pow(const Rational& base, int e) {
    if (e < 0)
        throw std::invalid_argument("rat_pow: negative exponent");
    Rational acc{1};
    Rational b = base;
    for (int k = e; k > 0; k >>= 1) {
        if (k & 1)
            acc *= b;
        b *= b;
    }
    return acc;
}

inline Integer factorial(int n) {
    if (n < 0)
        throw std::invalid_argument("factorial of negative integer");
    Integer acc{1};
    for (int i = 2; i <= n; ++i)
        acc *= i;
    return acc;
}

// k!! with the empty-product conventions (-1)!! = 0!! = 1.
inline Integer double_factorial(int k) {
    if (k < -1)
        throw std::invalid_argument("double_factorial requires k >= -1");
    Integer acc{1};
    for (int i = k; i >= 2; i -= 2)
        acc *= i;
    return acc;
}

inline Integer binomial(int n, int k) {
    if (k < 0 || k > n)
        return Integer{0};
    if (k > n - k)
        k = n - k;
    Integer acc{1};
    for (int i = 1; i <= k; ++i) {
        acc *= n - k + i;
        acc /= i;  // exact at every step
    }
    return acc;
}

namespace detail {

inline void hash_mix(std::size_t& h, std::size_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
}

inline std::size_t hash_ints(const std::vector<std::int32_t>& key) {
    std::size_t h = 0x811c9dc5;
    for (auto v : key)
        hash_mix(h, static_cast<std::size_t>(static_cast<std::uint32_t>(v)));
    return h;
}

}  // namespace detail

}  // namespace mgn
