#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "tmod/exp.hpp"

using namespace tmod;
using namespace tmod::testing;

TEST_CASE("e_0 is the identity") {
    auto ctx = ctx_q3();
    for (auto e : {carlitz(ctx), carlitz_tensor(ctx, 2), prolongation(ctx, 1)}) {
        auto ec = compute_exp_coeffs(e, 3);
        auto diff = ec.e(0) - cmat::identity(ctx, e.dim());
        REQUIRE(diff.is_zero());
    }
}

TEST_CASE("Carlitz e_1 and e_2 against the closed forms") {
    for (auto ctx : {ctx_q2(), ctx_q3()}) {
        auto c = carlitz(ctx);
        auto ec = compute_exp_coeffs(c, 2);
        auto theta = cinf_num::theta_pow(ctx);
        // e_1 (theta^q - theta) = 1
        auto r1 = ec.e(1).at(0, 0) * (theta.qpow(1) - theta) - cinf_num::one(ctx);
        REQUIRE((r1.is_zero() || r1.val() >= ctx->P / 2));
        // e_2 (theta^{q^2}-theta)(theta^{q^2}-theta^q) = 1
        auto r2 = ec.e(2).at(0, 0) * (theta.qpow(2) - theta) * (theta.qpow(2) - theta.qpow(1)) -
                  cinf_num::one(ctx);
        REQUIRE((r2.is_zero() || r2.val() >= ctx->P / 2));
    }
}

TEST_CASE("functional-equation residual vanishes for the example modules") {
    for (auto ctx : {ctx_q2(), ctx_q3()}) {
        auto c = carlitz(ctx);
        std::vector<t_module> mods = {c,
                                      carlitz_tensor(ctx, 2),
                                      carlitz_tensor(ctx, 3),
                                      prolongation(ctx, 1),
                                      prolongation(ctx, 2),
                                      direct_sum(c, c)};
        for (const auto& e : mods) {
            auto ec = compute_exp_coeffs(e, 6);
            auto res = exp_functional_residual(e, ec);
            CAPTURE(e.name, ctx->q());
            for (long long v : res) REQUIRE(v >= ctx->P / 2);
        }
    }
}

TEST_CASE("v(e_i) is strictly increasing for Carlitz") {
    for (auto ctx : {ctx_q2(), ctx_q3()}) {
        auto ec = compute_exp_coeffs(carlitz(ctx), 8);
        for (int i = 1; i < 8; ++i)
            REQUIRE(ec.e(i + 1).min_val() > ec.e(i).min_val());
    }
}

TEST_CASE("exp_eval basics") {
    auto ctx = ctx_q2();
    auto c = carlitz(ctx);
    auto ec = compute_exp_coeffs(c, 12);
    SECTION("x = 0 evaluates to 0") {
        auto r = exp_eval(c, ec, {cinf_num::zero(ctx)}, ctx->P / 2);
        REQUIRE(r.value[0].is_zero());
    }
    SECTION("F_q-linearity") {
        rng g(12);
        auto x = random_cinf(ctx, g, 0, 4, 4), y = random_cinf(ctx, g, 0, 4, 4);
        auto ex = exp_eval(c, ec, {x}, ctx->P / 2).value[0];
        auto ey = exp_eval(c, ec, {y}, ctx->P / 2).value[0];
        auto exy = exp_eval(c, ec, {x + y}, ctx->P / 2).value[0];
        auto diff = exy - (ex + ey);
        REQUIRE((diff.is_zero() || diff.val() >= ctx->P / 2));
    }
}

TEST_CASE("Carlitz period") {
    for (auto ctx : {ctx_q2(), ctx_q3()}) {
        int terms = 14;
        auto pi = carlitz_period(ctx, terms);
        CAPTURE(ctx->q());
        SECTION("valuation is -q/(q-1) in theta-units") {
            // oracle: v(theta*lambda_theta) since every product factor is a 1-unit
            long long expect = (-cinf_num::theta_pow(ctx) * lambda_theta(ctx)).val();
            REQUIRE(pi.val() == expect);
            REQUIRE(pi.val() * (ctx->q() - 1) == -ctx->r * ctx->q());
        }
        SECTION("exp(pi~) = 0 to precision but pi~/theta escapes the lattice") {
            auto c = carlitz(ctx);
            auto ec = compute_exp_coeffs(c, 14);
            auto in = lattice_member(c, ec, {pi}, ctx->P / 2);
            REQUIRE(in.member);
            auto theta = cinf_num::theta_pow(ctx);
            auto out = lattice_member(c, ec, {pi * theta.inv()}, ctx->P / 2);
            REQUIRE_FALSE(out.member);
        }
        SECTION("exp(-pi~/theta) = lambda_theta (the t = 0 torsion value)") {
            auto c = carlitz(ctx);
            auto ec = compute_exp_coeffs(c, 14);
            auto v = exp_eval(c, ec, {-(pi * cinf_num::theta_pow(ctx).inv())}, ctx->P / 2);
            auto diff = v.value[0] - lambda_theta(ctx);
            REQUIRE((diff.is_zero() || diff.val() >= ctx->P / 2));
        }
    }
}

TEST_CASE("lattice membership for polynomial multiples of the period") {
    auto ctx = ctx_q2();
    auto c = carlitz(ctx);
    auto ec = compute_exp_coeffs(c, 14);
    auto pi = carlitz_period(ctx, 14);
    auto theta = cinf_num::theta_pow(ctx);
    rng g(77);
    for (int rep = 0; rep < 3; ++rep) {
        // random p(theta) * pi~ with deg p <= 2, acting through dphi = theta
        cinf_num mult = cinf_num::zero(ctx);
        for (int k = 0; k <= 2; ++k)
            mult = mult + cinf_num::theta_pow(ctx, k).scaled(
                              ctx->F->from_int(static_cast<long long>(g.next() % ctx->q())));
        if (mult.is_zero()) mult = cinf_num::one(ctx);
        auto in = lattice_member(c, ec, {mult * pi}, ctx->P / 2);
        REQUIRE(in.member);
        REQUIRE(in.residual_v >= ctx->P / 2);
    }
    SECTION("pi~ + 1 is not in the lattice") {
        auto out = lattice_member(c, ec, {pi + cinf_num::one(ctx)}, ctx->P / 2);
        REQUIRE_FALSE(out.member);
    }
}

TEST_CASE("exp is injective on high-valuation inputs: the first term dominates") {
    auto ctx = ctx_q3();
    auto c = carlitz(ctx);
    auto ec = compute_exp_coeffs(c, 8);
    rng g(55);
    for (int rep = 0; rep < 10; ++rep) {
        auto x = random_cinf(ctx, g, 1, 6, 4);
        if (x.is_zero()) continue;
        auto v = exp_eval(c, ec, {x}, ctx->P / 2).value[0];
        REQUIRE_FALSE(v.is_zero());
        REQUIRE(v.val() == x.val());
    }
}

TEST_CASE("exp_eval aborts when coefficients cannot reach the target") {
    auto ctx = ctx_q2();
    auto c = carlitz(ctx);
    auto ec = compute_exp_coeffs(c, 3);
    auto pi = carlitz_period(ctx, 14);
    // v(e_3 pi^{q^3}) = 24 - 16 = 8 for q = 2: nowhere near P/2
    REQUIRE_THROWS_AS(exp_eval(c, ec, {pi}, ctx->P / 2), precision_error);
}
