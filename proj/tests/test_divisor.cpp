#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "mgn/divisor.hpp"

using mgn::DivClass;
using mgn::DivisorEngine;
using mgn::HodgeEngine;
using mgn::KappaPsiEngine;
using mgn::Monomial;
using mgn::Rational;
using mgn::RedLabel;
using mgn::SpaceId;
using mgn::TauEngine;

namespace {

struct Engines {
    TauEngine tau;
    KappaPsiEngine kp{tau};
    HodgeEngine hodge{kp};
    DivisorEngine div{kp, hodge};
};

Monomial mono(SpaceId sp) { return mgn::unit_monomial(sp); }

// all exponent vectors of the given total degree over the class list
void exponent_vectors(int degree, std::size_t slots, std::vector<int>& cur,
                      std::vector<std::vector<int>>& out) {
    if (slots == 0) {
        if (degree == 0)
            out.push_back(cur);
        return;
    }
    for (int e = degree; e >= 0; --e) {
        cur.push_back(e);
        exponent_vectors(degree - e, slots - 1, cur, out);
        cur.pop_back();
    }
}

Monomial from_exponents(SpaceId sp, const std::vector<DivClass>& classes,
                        const std::vector<int>& exps) {
    Monomial m = mono(sp);
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const auto& c = classes[i];
        const int e = exps[i];
        if (e == 0)
            continue;
        switch (c.kind) {
            case DivClass::Psi: m.psi[c.index - 1] += e; break;
            case DivClass::Kappa1: m.kappa.emplace_back(1, e); break;
            case DivClass::DeltaIrr: m.irr += e; break;
            case DivClass::DeltaRed: m.red.emplace_back(c.red, e); break;
        }
    }
    return m;
}

}  // namespace

TEST_CASE("class enumeration counts and order") {
    auto c30 = DivisorEngine::enumerate_classes(SpaceId{3, 0});
    REQUIRE(c30.size() == 3);
    CHECK(c30[0].kind == DivClass::Kappa1);
    CHECK(c30[1].kind == DivClass::DeltaIrr);
    CHECK(c30[2].kind == DivClass::DeltaRed);
    CHECK(c30[2].red.h == 1);

    auto c11 = DivisorEngine::enumerate_classes(SpaceId{1, 1});
    REQUIRE(c11.size() == 3);
    CHECK(c11[0].kind == DivClass::Psi);

    auto c03 = DivisorEngine::enumerate_classes(SpaceId{0, 3});
    CHECK(c03.size() == 5);  // delta_irr included even though it is the zero class

    // (g+1) 2^{n-1} + 1 classes for n > 0
    for (int g = 0; g <= 3; ++g)
        for (int n = 1; n <= 4; ++n) {
            if (2 * g - 2 + n <= 0)
                continue;
            auto cs = DivisorEngine::enumerate_classes(SpaceId{g, n});
            CHECK(static_cast<int>(cs.size()) == (g + 1) * (1 << (n - 1)) + 1);
        }
    // [g/2] + 2 classes for n = 0
    for (int g = 2; g <= 6; ++g) {
        auto cs = DivisorEngine::enumerate_classes(SpaceId{g, 0});
        CHECK(static_cast<int>(cs.size()) == g / 2 + 2);
    }
}

TEST_CASE("canonicalization") {
    // psi_2^2 delta_{1,{2}} on (3,2) relabels to psi_1^2 delta_{1,{1}}
    Monomial m = mono(SpaceId{3, 2});
    m.psi[1] = 2;
    m.red.emplace_back(RedLabel{1, 0b10u}, 1);
    Monomial c = DivisorEngine::canonicalize(m);
    CHECK(c.psi == std::vector<int>{2, 0});
    REQUIRE(c.red.size() == 1);
    CHECK(c.red[0].first.h == 1);
    CHECK(c.red[0].first.mask == 0b01u);
    Monomial cc = DivisorEngine::canonicalize(c);  // idempotent
    CHECK(cc.psi == c.psi);
    CHECK(cc.red == c.red);

    // evaluation is constant on relabeling orbits
    Engines e;
    Monomial a = mono(SpaceId{1, 3});
    a.psi = {2, 1, 0};
    Monomial b = mono(SpaceId{1, 3});
    b.psi = {0, 2, 1};
    CHECK(e.div.evaluate(a) == e.div.evaluate(b));
    Monomial r1 = mono(SpaceId{2, 2});
    r1.psi = {1, 0};
    r1.red.emplace_back(RedLabel{1, 0b01u}, 3);
    Monomial r2 = mono(SpaceId{2, 2});
    r2.psi = {0, 1};
    r2.red.emplace_back(RedLabel{1, 0b10u}, 3);
    CHECK(e.div.evaluate(r1) == e.div.evaluate(r2));
}

TEST_CASE("single-class pull-back shapes") {
    // self-restriction of delta_irr on M_bar_4: -psi_1 -psi_2 + delta_irr
    // + delta_{1,{1}} + delta_{2,{1}} on (3,2)
    auto p = DivisorEngine::irr_self_pullback(SpaceId{4, 0});
    CHECK(p.size() == 5);

    // delta_h pulled to the delta_irr cover: two summands, merged when 2h = g
    auto q = DivisorEngine::red_class_to_irr(SpaceId{4, 0}, RedLabel{1, 0});
    CHECK(q.size() == 2);  // delta_{0,{1,2}} + delta_{2,{1,2}}
    auto qm = DivisorEngine::red_class_to_irr(SpaceId{4, 0}, RedLabel{2, 0});
    CHECK(qm.size() == 1);  // the two summands coincide

    // n=0 with g1 < g2 picks up pr2 delta_{g2-g1,{1}} beyond the two psi terms
    auto s = DivisorEngine::red_self_pullback(SpaceId{5, 0}, RedLabel{2, 0});
    CHECK(s.size() == 3);
    auto s2 = DivisorEngine::red_self_pullback(SpaceId{5, 0}, RedLabel{1, 0});
    CHECK(s2.size() == 3);
    // equal split: -pr1 psi_* - pr2 psi_1 only
    auto s3 = DivisorEngine::red_self_pullback(SpaceId{4, 0}, RedLabel{2, 0});
    CHECK(s3.size() == 2);

    // n=0 cross restriction with g1 > h lands on both factors
    auto x = DivisorEngine::red_class_to_red(SpaceId{6, 0}, RedLabel{3, 0}, RedLabel{1, 0});
    CHECK(x.size() == 2);
    // h > g1 lands twice on the second factor
    auto y = DivisorEngine::red_class_to_red(SpaceId{6, 0}, RedLabel{1, 0}, RedLabel{2, 0});
    CHECK(y.size() == 2);
    // transverse-empty case: delta_{0,{1,2}} against delta_{0,{1,3}} on (1,3)
    auto z = DivisorEngine::red_class_to_red(SpaceId{1, 3}, RedLabel{0, 0b011u},
                                             RedLabel{0, 0b101u});
    CHECK(z.empty());
}

TEST_CASE("stacky factor pinned on the one-pointed torus") {
    Engines e;
    Monomial m = mono(SpaceId{1, 1});
    m.irr = 1;
    CHECK(e.div.evaluate(m) == Rational(1, 2));
    Monomial m2 = mono(SpaceId{1, 1});
    m2.irr = 2;  // delta_irr^2 = 0 in genus 1 (nilpotency cap), and off-dimension anyway
    CHECK(e.div.evaluate(m2) == 0);
}

TEST_CASE("basic known values through every delegate") {
    Engines e;
    Monomial psi = mono(SpaceId{1, 1});
    psi.psi[0] = 1;
    CHECK(e.div.evaluate(psi) == Rational(1, 24));
    Monomial ka = mono(SpaceId{1, 1});
    ka.kappa.emplace_back(1, 1);
    CHECK(e.div.evaluate(ka) == Rational(1, 24));
    Monomial la = mono(SpaceId{1, 1});
    la.lam = {1};
    CHECK(e.div.evaluate(la) == Rational(1, 24));
    Monomial off = mono(SpaceId{2, 0});
    off.kappa.emplace_back(1, 1);
    CHECK(e.div.evaluate(off) == 0);  // degree mismatch
}

TEST_CASE("fundamental identity kappa_1 = 12 lambda_1 - delta + psi") {
    Engines e;
    auto check_space = [&](SpaceId sp) {
        auto classes = DivisorEngine::enumerate_classes(sp);
        std::vector<std::vector<int>> cofactors;
        std::vector<int> cur;
        exponent_vectors(sp.dim() - 1, classes.size(), cur, cofactors);
        for (const auto& exps : cofactors) {
            Monomial x = from_exponents(sp, classes, exps);
            Monomial kx = x;
            kx.kappa.emplace_back(1, 1);
            Rational lhs = e.div.evaluate(kx);
            Monomial lx = x;
            lx.lam = {1};
            Rational rhs = Rational{12} * e.div.evaluate(lx);
            Monomial ix = x;
            ix.irr += 1;
            rhs -= e.div.evaluate(ix);
            for (const auto& c : classes)
                if (c.kind == DivClass::DeltaRed) {
                    Monomial dx = x;
                    dx.red.emplace_back(c.red, 1);
                    rhs -= e.div.evaluate(dx);
                }
            for (int i = 1; i <= sp.n; ++i) {
                Monomial px = x;
                px.psi[i - 1] += 1;
                rhs += e.div.evaluate(px);
            }
            INFO("g=" << sp.g << " n=" << sp.n);
            CHECK(lhs == rhs);
        }
    };
    check_space(SpaceId{2, 0});
    check_space(SpaceId{1, 2});
    check_space(SpaceId{3, 0});
}

TEST_CASE("order independence of the first boundary restriction") {
    auto run_space = [](SpaceId sp) {
        Engines fresh;
        auto classes = DivisorEngine::enumerate_classes(sp);
        std::vector<std::vector<int>> monos;
        std::vector<int> cur;
        exponent_vectors(sp.dim(), classes.size(), cur, monos);
        for (const auto& exps : monos) {
            Monomial m = from_exponents(sp, classes, exps);
            std::vector<DivClass> present;
            if (m.irr > 0)
                present.push_back(DivClass{DivClass::DeltaIrr, 0, {}});
            for (const auto& [L, e] : m.red)
                present.push_back(DivClass{DivClass::DeltaRed, 0, L});
            if (present.size() < 2)
                continue;
            std::vector<Rational> values;
            for (const auto& c : present) {
                Engines e;  // independent memo tables per evaluation order
                values.push_back(e.div.evaluate_restricting_first(m, c));
            }
            for (const auto& v : values)
                CHECK(v == values.front());
        }
    };
    run_space(SpaceId{3, 0});
    run_space(SpaceId{2, 1});
}

TEST_CASE("push-down agrees with direct evaluation") {
    Engines e;
    auto check = [&](Monomial m) {
        Rational direct = e.div.evaluate(m);
        Rational pushed{0};
        for (const auto& [c, term] : e.div.pushdown(m))
            pushed += c * e.div.evaluate(term);
        CHECK(direct == pushed);
    };
    {
        Monomial m = mono(SpaceId{2, 1});
        m.psi[0] = 4;
        check(m);
    }
    {
        Monomial m = mono(SpaceId{2, 1});
        m.psi[0] = 2;
        m.kappa.emplace_back(1, 1);
        m.irr = 1;
        check(m);
    }
    {
        Monomial m = mono(SpaceId{2, 2});
        m.psi = {2, 1};
        m.irr = 2;
        check(m);
    }
    {
        Monomial m = mono(SpaceId{1, 3});
        m.psi = {1, 0, 0};
        m.kappa.emplace_back(1, 1);
        m.irr = 1;
        check(m);
    }
}

TEST_CASE("delta_irr nilpotency via the pull-back degree cap") {
    Engines e;
    // psi_1^4 delta_irr^4 on (2,4): irr exponent exceeds 3g-3 = 3
    Monomial m = mono(SpaceId{2, 4});
    m.psi = {4, 0, 0, 0};
    m.irr = 4;
    CHECK(e.div.evaluate(m) == 0);
    // lambda+irr cap: lambda_1^3 delta_irr on (2,1)
    Monomial m2 = mono(SpaceId{2, 1});
    m2.lam = {3};
    m2.irr = 1;
    CHECK(e.div.evaluate(m2) == 0);
}

TEST_CASE("lambda_g lambda_{g-1} kills the boundary") {
    Engines e;
    {
        Monomial m = mono(SpaceId{2, 1});  // lambda_1 lambda_2 delta_irr, degree 4
        m.lam = {1, 1};
        m.irr = 1;
        CHECK(e.div.evaluate(m) == 0);
    }
    {
        Monomial m = mono(SpaceId{3, 0});  // lambda_2 lambda_3 delta_irr, degree 6
        m.lam = {0, 1, 1};
        m.irr = 1;
        CHECK(e.div.evaluate(m) == 0);
        Monomial m2 = mono(SpaceId{3, 0});
        m2.lam = {0, 1, 1};
        m2.red.emplace_back(RedLabel{1, 0}, 1);
        CHECK(e.div.evaluate(m2) == 0);
    }
}

TEST_CASE("dual route for lambda_1^3 and kappa_1^3 on the genus-2 space") {
    Engines e;
    // lambda_1 = (kappa_1 + delta_irr + delta_1)/12 on M_bar_2
    const SpaceId sp{2, 0};
    Rational direct;
    {
        Monomial m = mono(sp);
        m.lam = {3};
        direct = e.div.evaluate(m);
    }
    Rational expanded{0};
    for (int i = 0; i <= 3; ++i)
        for (int j = 0; i + j <= 3; ++j) {
            const int k = 3 - i - j;
            Monomial m = mono(sp);
            if (i)
                m.kappa.emplace_back(1, i);
            m.irr = j;
            if (k)
                m.red.emplace_back(RedLabel{1, 0}, k);
            Rational multi{mgn::factorial(3) / (mgn::factorial(i) * mgn::factorial(j) *
                                                mgn::factorial(k))};
            expanded += multi * e.div.evaluate(m);
        }
    expanded /= Rational{12 * 12 * 12};
    CHECK(direct == expanded);
    CHECK(direct == Rational(1, 2880));

    // kappa_1^3 on M_bar_2, frozen after the dual-path derivation
    Monomial k3 = mono(sp);
    k3.kappa.emplace_back(1, 3);
    CHECK(e.div.evaluate(k3) == Rational(43, 2880));
}

TEST_CASE("argument validation") {
    Engines e;
    Monomial bad = mono(SpaceId{0, 2});
    CHECK_THROWS_AS(e.div.evaluate(bad), std::invalid_argument);
    Monomial badred = mono(SpaceId{2, 2});
    badred.red.emplace_back(RedLabel{2, 0b01u}, 1);  // genus-0 side with one point
    badred.psi = {0, 0};
    CHECK_THROWS_AS(e.div.evaluate(badred), std::invalid_argument);
}
