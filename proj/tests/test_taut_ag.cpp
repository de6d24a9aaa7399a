#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "mgn/taut_ag.hpp"

using mgn::HodgeEngine;
using mgn::KappaPsiEngine;
using mgn::Rational;
using mgn::RingElement;
using mgn::TautRing;
using mgn::TauEngine;

namespace {

struct Engines {
    TauEngine tau;
    KappaPsiEngine kp{tau};
    HodgeEngine hodge{kp};
};

std::vector<std::pair<std::vector<int>, Rational>> nonzero_terms(const RingElement& e) {
    std::vector<std::pair<std::vector<int>, Rational>> out;
    for (const auto& t : e.terms)
        if (t.second != 0)
            out.push_back(t);
    return out;
}

void all_exponents(int g, int degree, int maxidx, std::vector<int>& cur,
                   std::vector<std::vector<int>>& out) {
    if (maxidx == 0) {
        if (degree == 0) {
            std::vector<int> exps(cur.rbegin(), cur.rend());
            out.push_back(exps);
        }
        return;
    }
    for (int e = 0; e * maxidx <= degree; ++e) {
        cur.push_back(e);
        all_exponents(g, degree - e * maxidx, maxidx - 1, cur, out);
        cur.pop_back();
    }
}

}  // namespace

TEST_CASE("proportionality values") {
    CHECK(mgn::proportionality_value(1) == Rational(1, 24));
    CHECK(mgn::proportionality_value(2) == Rational(1, 5760));
    CHECK_THROWS_AS(mgn::proportionality_value(0), std::invalid_argument);
    for (int g = 1; g <= 7; ++g)
        CHECK(mgn::proportionality_value(g) > 0);
}

TEST_CASE("square-free basis sizes match the class displays") {
    CHECK(TautRing::squarefree_basis(4, 1).size() == 1);
    CHECK(TautRing::squarefree_basis(5, 3).size() == 2);
    CHECK(TautRing::squarefree_basis(6, 6).size() == 4);
    CHECK(TautRing::squarefree_basis(7, 10).size() == 7);
    // enough degree-(3g-3) square-free monomials to run the solve
    CHECK(TautRing::squarefree_basis(4, 9).size() == 1);
    CHECK(TautRing::squarefree_basis(5, 12).size() == 2);
    CHECK(TautRing::squarefree_basis(6, 15).size() == 4);
    CHECK(TautRing::squarefree_basis(7, 18).size() == 7);
}

TEST_CASE("socle evaluation") {
    for (int g = 1; g <= 7; ++g) {
        TautRing ring(g);
        std::vector<int> full(g, 1);
        CHECK(ring.evaluate_top(full) == mgn::proportionality_value(g));
    }
    TautRing r4(4);
    CHECK(r4.evaluate_top({10}) == Rational(1, 1814400));
    CHECK_THROWS_AS(r4.evaluate_top({9}), std::invalid_argument);
    CHECK_THROWS_AS(r4.evaluate_top({0, 0, 0, 0, 1}), std::invalid_argument);
}

TEST_CASE("reduction strategies agree") {
    for (int g = 2; g <= 6; ++g) {
        TautRing ring(g);
        std::vector<std::vector<int>> monos;
        std::vector<int> cur;
        all_exponents(g, g * (g + 1) / 2, g, cur, monos);
        for (const auto& m : monos)
            CHECK(ring.evaluate_top(m, 0) == ring.evaluate_top(m, 1));
    }
}

TEST_CASE("pairing") {
    TautRing r5(5);
    // nonsingular 2x2 pairing between degree 3 and degree 12
    auto b3 = TautRing::squarefree_basis(5, 3);
    auto b12 = TautRing::squarefree_basis(5, 12);
    REQUIRE(b3.size() == 2);
    REQUIRE(b12.size() == 2);
    Rational det = r5.pair_value(b3[0], b12[0]) * r5.pair_value(b3[1], b12[1]) -
                   r5.pair_value(b3[0], b12[1]) * r5.pair_value(b3[1], b12[0]);
    CHECK(det != 0);
    CHECK_THROWS_AS(r5.pair_value(b3[0], b3[0]), std::invalid_argument);
}

TEST_CASE("Jacobian classes at genus 4 and 5") {
    Engines e;
    {
        RingElement j4 = mgn::jacobian_class(4, e.hodge);
        auto terms = nonzero_terms(j4);
        REQUIRE(terms.size() == 1);
        CHECK(terms[0].first == std::vector<int>{1, 0, 0, 0});
        CHECK(terms[0].second == 8);
        CHECK(mgn::format_class(j4) == "8 * la1");
    }
    {
        RingElement j5 = mgn::jacobian_class(5, e.hodge);
        CHECK(mgn::format_class(j5) == "72 * la1la2 + -48 * la3");
    }
}

TEST_CASE("Jacobian class is basis independent") {
    Engines e;
    // default Lambda choice vs a swapped/alternative choice at genus 5
    RingElement a = mgn::jacobian_class(5, e.hodge);
    std::vector<std::vector<int>> alt = {{0, 0, 0, 1, 1} /* la4 la5 ... degree 9: wrong */};
    // degree-12 alternatives: la3la4la5 and la1la2la4la5
    alt = {{0, 0, 1, 1, 1}, {1, 1, 0, 1, 1}};
    RingElement b = mgn::jacobian_class(5, e.hodge, &alt);
    REQUIRE(a.terms.size() == b.terms.size());
    for (std::size_t i = 0; i < a.terms.size(); ++i) {
        CHECK(a.terms[i].first == b.terms[i].first);
        CHECK(a.terms[i].second == b.terms[i].second);
    }
    // swapped order of the default monomials
    std::vector<std::vector<int>> swapped = {{1, 1, 0, 1, 1}, {0, 0, 1, 1, 1}};
    RingElement c = mgn::jacobian_class(5, e.hodge, &swapped);
    for (std::size_t i = 0; i < a.terms.size(); ++i)
        CHECK(a.terms[i].second == c.terms[i].second);
}

TEST_CASE("conjecture formulas") {
    const Rational c1[] = {1, 8, 72, 384, 768};
    for (int g = 3; g <= 7; ++g)
        CHECK(mgn::conjecture1_coefficient(g) == c1[g - 3]);
    for (int g = 8; g <= 12; ++g)
        CHECK(denominator(mgn::conjecture1_coefficient(g)) != 1);
    const Rational c2[] = {-48, -1152, -6912};
    for (int g = 5; g <= 7; ++g)
        CHECK(mgn::conjecture2_coefficient(g) == c2[g - 5]);
    for (int g = 8; g <= 12; ++g)
        CHECK(denominator(mgn::conjecture2_coefficient(g)) != 1);
    CHECK_THROWS_AS(mgn::conjecture1_coefficient(2), std::invalid_argument);
    CHECK_THROWS_AS(mgn::conjecture2_coefficient(4), std::invalid_argument);
}

TEST_CASE("conjectures match the solved classes at low genus") {
    Engines e;
    RingElement j4 = mgn::jacobian_class(4, e.hodge);
    CHECK(j4.terms[0].second == mgn::conjecture1_coefficient(4));  // la1 = la_{1..g-3}
    RingElement j5 = mgn::jacobian_class(5, e.hodge);
    // basis order at degree 3: la1la2, la3; C_{1,2} and C_3 = C_{2,..,g-4,g-2}? for
    // g=5 the conjecture-2 monomial is la_{g-2} = la3
    CHECK(j5.terms[0].second == mgn::conjecture1_coefficient(5));
    CHECK(j5.terms[1].second == mgn::conjecture2_coefficient(5));
}
