#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "tmod/mero.hpp"

using namespace tmod;
using namespace tmod::testing;

namespace {

constexpr int CAP = 2, HOR = 6, GRD = 2, D = 24;

mero_fn simple_pole(const cinf_ctx_ptr& ctx, int i, const cinf_num& c, int cap = CAP) {
    mero_fn g(ctx, cap, HOR, GRD);
    g.set_part(i, 1, c);
    return g;
}

// Test-side oracle: recover principal-part coefficients at c from a disk
// expansion by clearing the pole and reading hyperderivatives at c. The top
// `order` product coefficients only hold truncation edge effects and are cut.
std::vector<cinf_num> refit_principal(const tate_series& f, const cinf_num& c, int order) {
    int deg = f.degree();
    tate_series cleared = f;
    for (int k = 0; k < order; ++k) cleared = cleared * tate_series::t_minus(c);
    cleared = cleared.truncated_deg(deg);
    std::vector<cinf_num> out; // out[k-1] = coefficient of (t-c)^{-k}
    for (int k = 1; k <= order; ++k)
        out.push_back(hyperderivative(cleared, order - k).eval(c));
    return out;
}

} // namespace

TEST_CASE("scalar residue reads the order-1 coefficient at theta") {
    auto ctx = ctx_q2();
    auto c = lambda_theta(ctx) * cinf_num::theta_pow(ctx, 2);
    auto g = simple_pole(ctx, 0, c);
    REQUIRE((g.residue() - c).is_zero());

    mero_fn g2(ctx, 2, HOR, GRD);
    g2.set_part(0, 2, cinf_num::one(ctx)); // 1/(t-theta)^2
    REQUIRE(g2.residue().is_zero());
}

TEST_CASE("residue of h(t)/(t-theta)^2 is the first hyperderivative of h at theta") {
    auto ctx = ctx_q3();
    rng rgen(3);
    // random polynomial h of degree 4
    std::vector<cinf_num> hc;
    for (int i = 0; i <= 4; ++i) hc.push_back(random_cinf(ctx, rgen, -3, 3, 3));
    tate_series h(ctx, hc);
    auto theta = cinf_num::theta_pow(ctx);

    // build h/(t-theta)^2 by recentering h at theta
    auto hs = taylor_at(h, theta);
    mero_fn g(ctx, 2, HOR, GRD);
    g.set_part(0, 2, hs.coeff(0));
    g.set_part(0, 1, hs.coeff(1));
    std::vector<cinf_num> rest(hs.coeffs().begin() + 2, hs.coeffs().end());
    g.set_tail(taylor_at(tate_series(ctx, rest), -theta));

    // oracle: expand h around theta to order 1
    auto expect = hyperderivative(h, 1).eval(theta);
    REQUIRE((g.residue() - expect).is_zero());
}

TEST_CASE("expand_on_disk of 1/(t-theta) is the geometric series") {
    auto ctx = ctx_q2();
    auto g = simple_pole(ctx, 0, cinf_num::one(ctx));
    auto [f, err] = expand_on_disk(g, D);
    for (int n = 0; n <= D; ++n) {
        // -theta^{-(n+1)} t^n
        auto expect = -cinf_num::theta_pow(ctx, -(n + 1));
        REQUIRE((f.coeff(n) - expect).is_zero());
    }
}

TEST_CASE("expand_on_disk leaves a pure tail unchanged") {
    auto ctx = ctx_q2();
    rng g0(8);
    mero_fn g(ctx, CAP, HOR, GRD);
    std::vector<cinf_num> cs;
    for (int i = 0; i <= 5; ++i) cs.push_back(random_cinf(ctx, g0, -2, 2, 3));
    g.set_tail(tate_series(ctx, cs));
    auto [f, err] = expand_on_disk(g, D);
    REQUIRE((f - g.tail()).is_zero());
}

TEST_CASE("principal-part refit recovers the stored coefficients") {
    auto ctx = ctx_q3();
    mero_fn g(ctx, 2, HOR, GRD);
    auto a2 = lambda_theta(ctx), a1 = cinf_num::theta_pow(ctx, -1);
    g.set_part(0, 2, a2);
    g.set_part(0, 1, a1);
    auto [f, err] = expand_on_disk(g, 40);
    auto fit = refit_principal(f, cinf_num::theta_pow(ctx), 2);
    long long tol = ctx->P / 2;
    auto d1 = fit[0] - a1, d2 = fit[1] - a2;
    REQUIRE((d1.is_zero() || d1.val() >= tol));
    REQUIRE((d2.is_zero() || d2.val() >= tol));
}

TEST_CASE("twist moves the pole one orbit step: 1/(t-theta) -> 1/(t-theta^q)") {
    auto ctx = ctx_q2();
    auto g = simple_pole(ctx, 0, cinf_num::one(ctx));
    auto tg = g.twisted(ctx->P / 2);
    auto expect = simple_pole(ctx, 1, cinf_num::one(ctx));
    // oracle: compare unit-disk expansions to degree D
    auto [a, e1] = expand_on_disk(tg, D);
    auto [b, e2] = expand_on_disk(expect, D);
    auto diff = a - b;
    for (int n = 0; n <= D; ++n) REQUIRE(diff.coeff(n).is_zero());
}

TEST_CASE("twist of a horizon-0 function has zero residue at theta") {
    auto ctx = ctx_q3();
    auto g = simple_pole(ctx, 0, lambda_theta(ctx));
    auto tg = g.twisted(ctx->P / 2);
    REQUIRE(tg.residue().is_zero());
    REQUIRE((tg.part(1, 1) - lambda_theta(ctx).qpow(1)).is_zero());
}

TEST_CASE("twisting through the guard band") {
    auto ctx = ctx_q2();
    SECTION("a negligible part is absorbed into the bound") {
        auto g = simple_pole(ctx, HOR + GRD, cinf_num::one(ctx));
        auto tg = g.twisted(ctx->P / 2);
        // |1/(t - theta^{q^9})| ~ q^{-512} on the unit disk: below threshold
        REQUIRE(tg.tail_bound() >= ctx->P / 2);
        REQUIRE(tg.max_pole_order(ctx->P / 2) == 0);
    }
    SECTION("a significant part beyond the guard raises an error") {
        auto g = simple_pole(ctx, HOR + GRD, cinf_num::theta_pow(ctx, 300));
        REQUIRE_THROWS_AS(g.twisted(ctx->P / 2), precision_error);
    }
}

TEST_CASE("expand_on_disk is linear and commutes with twist") {
    auto ctx = ctx_q3();
    auto g1 = simple_pole(ctx, 0, lambda_theta(ctx));
    auto g2 = simple_pole(ctx, 1, cinf_num::theta_pow(ctx, -2));
    auto [e1, r1] = expand_on_disk(g1, D);
    auto [e2, r2] = expand_on_disk(g2, D);
    auto [esum, rs] = expand_on_disk(g1 + g2, D);
    REQUIRE((esum - (e1 + e2)).is_zero());

    auto [et, rt] = expand_on_disk(g1.twisted(ctx->P / 2), D);
    auto diff = et - twist(e1);
    for (int n = 0; n <= D; ++n) REQUIRE(diff.coeff(n).is_zero());
}

TEST_CASE("mul_poly: (t-theta) * 1/(t-theta) = 1") {
    auto ctx = ctx_q2();
    auto g = simple_pole(ctx, 0, cinf_num::one(ctx));
    auto prod = g.mul_poly(tate_series::t_minus(cinf_num::theta_pow(ctx)));
    REQUIRE(prod.max_pole_order(ctx->P / 2) == 0);
    REQUIRE((prod.tail().coeff(0) - cinf_num::one(ctx)).is_zero());
    REQUIRE(prod.tail().degree() <= 0);
}

TEST_CASE("mul_poly: t * 1/(t-theta) = 1 + theta/(t-theta)") {
    auto ctx = ctx_q3();
    auto g = simple_pole(ctx, 0, cinf_num::one(ctx));
    auto prod = g.mul_poly(tate_series::monomial(cinf_num::one(ctx), 1));
    REQUIRE((prod.part(0, 1) - cinf_num::theta_pow(ctx)).is_zero());
    REQUIRE((prod.tail().coeff(0) - cinf_num::one(ctx)).is_zero());
}

TEST_CASE("holomorphy check on parts and tails") {
    auto ctx = ctx_q2();
    long long thr = ctx->P / 2;
    SECTION("polynomial tail, no parts: holomorphic") {
        mero_fn g(ctx, CAP, HOR, GRD);
        g.set_tail(tate_series::monomial(cinf_num::theta_pow(ctx, -1), 3));
        auto rep = holomorphy_check(g, 0, thr);
        REQUIRE(rep.pass);
    }
    SECTION("a simple pole fails order 0 and passes order 1") {
        auto g = simple_pole(ctx, 0, cinf_num::one(ctx));
        REQUIRE_FALSE(holomorphy_check(g, 0, thr).pass);
        REQUIRE(holomorphy_check(g, 1, thr).pass);
    }
    SECTION("a pole smuggled into the tail fails the slope test") {
        // geometric expansion of 1/(t-theta) kept as a bare tail
        auto g = simple_pole(ctx, 0, cinf_num::one(ctx));
        auto [f, err] = expand_on_disk(g, 40);
        mero_fn h(ctx, CAP, HOR, GRD);
        h.set_tail(f);
        auto rep = holomorphy_check(h, 0, thr);
        REQUIRE_FALSE(rep.pass);
        REQUIRE_FALSE(rep.slope_ok);
    }
}

TEST_CASE("partial fractions from a factored rational function") {
    auto ctx = ctx_q3();
    // 1/((t-theta)(t-theta^q)) = (1/(theta-theta^q)) [1/(t-theta) - 1/(t-theta^q)]
    auto one = cinf_num::one(ctx);
    auto g = mero_from_rational(ctx, tate_series::constant(one), {1, 1}, 2, HOR, GRD);
    auto theta = cinf_num::theta_pow(ctx);
    auto thq = theta.qpow(1);
    auto r0 = (theta - thq).inv();
    auto diff0 = g.part(0, 1) - r0;
    auto diff1 = g.part(1, 1) + r0;
    long long tol = ctx->P + ctx->r * 3 - 8; // both residues carry a full window beyond their valuation
    REQUIRE((diff0.is_zero() || diff0.val() >= tol));
    REQUIRE((diff1.is_zero() || diff1.val() >= tol));
}

TEST_CASE("partial fractions with a double pole match the refit oracle") {
    auto ctx = ctx_q2();
    // (t - theta^q) / ((t-theta)^2 (t-theta^q)^2), proper with a double pole at each point
    auto num = tate_series::t_minus(cinf_num::theta_pow(ctx).qpow(1));
    auto g = mero_from_rational(ctx, num, {2, 2}, 2, HOR, GRD);
    // refit evaluates at |t| = q with a second pole at |t| = q^2, so the
    // expansion must reach degree ~P/2 + slack for the tail to drop out
    auto [f, err] = expand_on_disk(g, 128);
    auto fit = refit_principal(f, cinf_num::theta_pow(ctx), 2);
    long long tol = ctx->P / 2;
    auto d1 = fit[0] - g.part(0, 1);
    auto d2 = fit[1] - g.part(0, 2);
    REQUIRE((d1.is_zero() || d1.val() >= tol));
    REQUIRE((d2.is_zero() || d2.val() >= tol));
}
