#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <vector>

#include "mgn/bernoulli.hpp"
#include "mgn/rational.hpp"

using mgn::Integer;
using mgn::Rational;

namespace {

// Akiyama-Tanigawa algorithm; agrees with the library's convention on even
// indices, which is all we expose.
Rational bernoulli_at(int n) {
    std::vector<Rational> a(n + 1);
    for (int m = 0; m <= n; ++m) {
        a[m] = Rational(1, m + 1);
        for (int j = m; j >= 1; --j)
            a[j - 1] = Rational(j) * (a[j - 1] - a[j]);
    }
    return a[0];
}

// small deterministic PRNG for property sampling
std::uint64_t next_rand(std::uint64_t& s) {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    return s >> 33;
}

Rational random_rational(std::uint64_t& s) {
    const long long num = static_cast<long long>(next_rand(s) % 2001) - 1000;
    const long long den = static_cast<long long>(next_rand(s) % 999) + 1;
    return Rational(num, den);
}

}  // namespace

TEST_CASE("double factorial") {
    CHECK(mgn::double_factorial(-1) == 1);
    CHECK(mgn::double_factorial(0) == 1);
    CHECK(mgn::double_factorial(5) == 15);
    CHECK(mgn::double_factorial(8) == 384);
    CHECK(mgn::double_factorial(9) == 945);
    CHECK_THROWS_AS(mgn::double_factorial(-2), std::invalid_argument);
}

TEST_CASE("bernoulli convention and oracle agreement") {
    CHECK(mgn::bernoulli(2) == Rational(1, 6));
    CHECK(mgn::bernoulli(4) == Rational(-1, 30));
    CHECK(mgn::bernoulli(6) == Rational(1, 42));
    for (int k = 2; k <= 30; k += 2)
        CHECK(mgn::bernoulli(k) == bernoulli_at(k));
    for (int k = 2; k <= 30; k += 2)
        CHECK(mgn::bernoulli(k) != 0);
    CHECK_THROWS_AS(mgn::bernoulli(3), std::invalid_argument);
    CHECK_THROWS_AS(mgn::bernoulli(0), std::invalid_argument);
    CHECK_THROWS_AS(mgn::bernoulli(-2), std::invalid_argument);
}

TEST_CASE("rational arithmetic is exact") {
    std::uint64_t seed = 20240901;
    for (int i = 0; i < 200; ++i) {
        Rational a = random_rational(seed);
        Rational b = random_rational(seed);
        CHECK((a + b) - b == a);
        if (b != 0)
            CHECK((a * b) / b == a);
    }
    CHECK(mgn::rat_pow(Rational(-2, 3), 3) == Rational(-8, 27));
    CHECK(mgn::rat_pow(Rational(7, 2), 0) == 1);
}

TEST_CASE("fraction formatting") {
    CHECK(mgn::fraction_str(Rational(1, 2)) == "1/2");
    CHECK(mgn::fraction_str(Rational(-8, 6)) == "-4/3");
    CHECK(mgn::fraction_str(Rational(5)) == "5/1");
    CHECK(mgn::fraction_str(Rational(0)) == "0/1");
    CHECK(mgn::parse_fraction("-251987683/4320") == Rational(-251987683LL, 4320));
    CHECK(mgn::parse_fraction("7") == Rational(7));
    CHECK_THROWS_AS(mgn::parse_fraction("1/0"), std::invalid_argument);
}

TEST_CASE("binomial") {
    CHECK(mgn::binomial(12, 3) == 220);
    CHECK(mgn::binomial(8, 2) == 28);
    CHECK(mgn::binomial(5, 7) == 0);
    CHECK(mgn::binomial(40, 20) == Integer("137846528820"));
}
