#include <catch2/catch_amalgamated.hpp>

#include "tmod/fields.hpp"

using namespace tmod;

TEST_CASE("prime field F_2 and F_3 basics") {
    fq_field F2(2, 1, 1);
    REQUIRE(F2.size == 2);
    REQUIRE(F2.add(1, 1) == 0);
    REQUIRE(F2.mul(1, 1) == 1);
    REQUIRE(F2.inv(1) == 1);

    fq_field F3(3, 1, 1);
    REQUIRE(F3.size == 3);
    REQUIRE(F3.add(2, 2) == 1);
    REQUIRE(F3.mul(2, 2) == 1);
    REQUIRE(F3.inv(2) == 2);
    REQUIRE(F3.neg(1) == 2);
}

TEST_CASE("field axioms hold exhaustively on small fields") {
    for (auto [p, e, m] : {std::tuple{2, 1, 2}, {3, 1, 2}, {2, 2, 1}, {5, 1, 1}}) {
        fq_field F(p, e, m);
        CAPTURE(p, e, m);
        for (fq_elem a = 0; a < F.size; ++a) {
            for (fq_elem b = 0; b < F.size; ++b) {
                REQUIRE(F.add(a, b) == F.add(b, a));
                REQUIRE(F.mul(a, b) == F.mul(b, a));
                REQUIRE(F.add(a, F.neg(a)) == 0);
                if (a != 0) REQUIRE(F.mul(a, F.inv(a)) == 1);
                for (fq_elem c = 0; c < F.size; ++c) {
                    REQUIRE(F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c)));
                    REQUIRE(F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c)));
                }
            }
        }
    }
}

TEST_CASE("x^{q^m} = x for every element") {
    for (auto [p, e, m] : {std::tuple{2, 1, 1}, {3, 1, 2}, {2, 2, 1}}) {
        fq_field F(p, e, m);
        CAPTURE(p, e, m);
        for (fq_elem x = 0; x < F.size; ++x) REQUIRE(F.frob_q_iter(x, m) == x);
    }
}

TEST_CASE("Frobenius x -> x^q is a ring homomorphism") {
    fq_field F(3, 1, 2);
    for (fq_elem a = 0; a < F.size; ++a)
        for (fq_elem b = 0; b < F.size; ++b) {
            REQUIRE(F.frob_q(F.add(a, b)) == F.add(F.frob_q(a), F.frob_q(b)));
            REQUIRE(F.frob_q(F.mul(a, b)) == F.mul(F.frob_q(a), F.frob_q(b)));
        }
}

TEST_CASE("F_9 contains a square root of -1") {
    // needed so that a (q-1)th root of -theta exists downstream
    fq_field F(3, 1, 2);
    fq_elem z = 0;
    REQUIRE(F.kth_root(F.neg(1), 2, z));
    REQUIRE(F.mul(z, z) == F.neg(1));
}

TEST_CASE("subfield F_q recovered as Frobenius fixed points") {
    fq_field F(3, 1, 2); // F_9 over F_3
    auto sub = F.subfield_fq();
    REQUIRE(sub.size() == 3);
    for (auto x : sub)
        for (auto y : sub) REQUIRE(F.frob_q(F.mul(x, y)) == F.mul(x, y));
}

TEST_CASE("deterministic construction") {
    fq_field a(3, 1, 2), b(3, 1, 2);
    REQUIRE(a.modulus == b.modulus);
    for (fq_elem x = 0; x < a.size; ++x)
        for (fq_elem y = 0; y < a.size; ++y) REQUIRE(a.mul(x, y) == b.mul(x, y));
}

TEST_CASE("bad parameters rejected") {
    REQUIRE_THROWS_AS(fq_field(4, 1, 1), config_error);
    REQUIRE_THROWS_AS(fq_field(2, 0, 1), config_error);
}
