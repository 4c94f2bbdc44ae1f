#include <doctest.h>

#include <random>

#include "loopnest/poly.hpp"
#include "loopnest/rational.hpp"
#include "loopnest/series_io.hpp"

using namespace loopnest;

TEST_CASE("rational arithmetic and normalization") {
    Rational a(2, 4), b(1, 2);
    CHECK(a == b);
    CHECK((a + b) == Rational(1));
    CHECK((a * Rational(-3, 5)) == Rational(-3, 10));
    CHECK((Rational(7, 3) / Rational(7, 3)).is_one());
    CHECK(Rational(-4, -8) == Rational(1, 2));
    CHECK(Rational(3, -6).num() == -1);
    CHECK(Rational::from_string("-22/7") == Rational(-22, 7));
    CHECK(Rational(5).str() == "5");
    CHECK(Rational(-5, 10).str() == "-1/2");
    CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
    CHECK_THROWS_AS(Rational(1, 3) / Rational(0), std::domain_error);
}

TEST_CASE("rational overflow is detected, not wrapped") {
    Rational big(INT64_MAX / 2, 1);
    CHECK_THROWS_AS(big * big, overflow_error);
}

TEST_CASE("poly ring basics") {
    Poly u = Poly::var(VU), n = Poly::var(VN);
    Trunc tr{8, 8};
    Poly p = Poly::mul(u + n, u + n, tr); // u^2 + 2un + n^2
    CHECK(p.coeff(mono_var(VU, 2)) == Rational(1));
    Mono un = mono_one();
    un[VU] = 1;
    un[VN] = 1;
    CHECK(p.coeff(un) == Rational(2));
    CHECK((p - p).is_zero());

    // truncation is an ideal: u^9 dies
    Trunc tight{3, 8};
    Poly q = Poly::var(VU, 3);
    CHECK(Poly::mul(q, q, tight).is_zero());

    // Euler operator u d/du
    Poly e = Poly::var(VU, 3).euler(VU);
    CHECK(e.coeff(mono_var(VU, 3)) == Rational(3));
}

TEST_CASE("poly random add/mul consistency against map model") {
    std::mt19937 rng(12345);
    Trunc tr{6, 6};
    auto random_poly = [&]() {
        Poly p;
        int terms = int(rng() % 6);
        for (int i = 0; i < terms; ++i) {
            Mono m = mono_one();
            m[VU] = rng() % 4;
            m[VN] = rng() % 3;
            m[VG] = rng() % 3;
            p.add_term(m, Rational(std::int64_t(rng() % 7) - 3));
        }
        return p;
    };
    for (int trial = 0; trial < 200; ++trial) {
        Poly a = random_poly(), b = random_poly(), c = random_poly();
        CHECK(Poly::mul(a, b + c, tr) == Poly::mul(a, b, tr) + Poly::mul(a, c, tr));
        CHECK(Poly::mul(a, b, tr) == Poly::mul(b, a, tr));
    }
}

TEST_CASE("series json dump round-trips bit-exactly") {
    Poly p;
    Mono m = mono_one();
    m[VU] = 1;
    p.add_term(m, Rational(1));
    m[VU] = 3;
    m[VS] = 2;
    m[VN] = 1;
    p.add_term(m, Rational(-7, 3));
    m[VN] = 0;
    p.add_term(m, Rational(22, 7));

    auto j = series_to_json(p, 5, true);
    CHECK(j["vars"].size() == 2);
    CHECK(j["max_u"] == 5);
    Poly back = series_from_json(j);
    CHECK(back == p);

    // and through an actual string
    std::string text = j.dump();
    Poly back2 = series_from_json(nlohmann::json::parse(text));
    CHECK(back2 == p);
}

TEST_CASE("series json rejects unspecialized weights") {
    Poly p = Poly::var(VG);
    CHECK_THROWS_AS(series_to_json(p, 3, false), std::invalid_argument);
}
