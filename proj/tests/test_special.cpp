#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "tmod/special.hpp"

using namespace tmod;
using namespace tmod::testing;

namespace {

long long diff_v(const cinf_num& a, const cinf_num& b) {
    cinf_num d = a - b;
    return d.is_zero() ? d.prec() : d.val();
}

long long parts_match_v(const mero_fn& a, const mero_fn& b) {
    long long v = EXACT_PREC;
    int cap = std::max(a.order_cap(), b.order_cap());
    for (int i = 0; i <= a.tracked(); ++i)
        for (int k = 1; k <= cap; ++k) {
            cinf_num ca = k <= a.order_cap() ? a.part(i, k) : cinf_num::zero(a.ctx());
            cinf_num cb = k <= b.order_cap() ? b.part(i, k) : cinf_num::zero(a.ctx());
            v = std::min(v, diff_v(ca, cb));
        }
    return v;
}

} // namespace

TEST_CASE("omega: value at t = 0 is lambda_theta") {
    for (auto ctx : {ctx_q2(), ctx_q3()}) {
        auto par = sf_params::defaults(ctx);
        auto w = anderson_thakur_omega(ctx, par);
        auto [f, err] = expand_on_disk(w.comps[0], 4);
        REQUIRE(diff_v(f.coeff(0), lambda_theta(ctx)) >= par.threshold);
    }
}

TEST_CASE("omega satisfies twist(omega) = (t - theta) omega") {
    for (auto ctx : {ctx_q2(), ctx_q3()}) {
        auto par = sf_params::defaults(ctx);
        auto w = anderson_thakur_omega(ctx, par);
        auto lhs = w.comps[0].twisted(par.threshold);
        auto rhs = w.comps[0].mul_poly(tate_series::t_minus(cinf_num::theta_pow(ctx)));
        auto resid = lhs - rhs;
        CAPTURE(ctx->q(), resid.min_val());
        REQUIRE(resid.min_val() >= par.threshold);
        // derived oracle: unit-disk series of both sides agree to degree D
        auto [a, e1] = expand_on_disk(lhs, par.tdeg);
        auto [b, e2] = expand_on_disk(rhs, par.tdeg);
        for (int n = 0; n <= par.tdeg; ++n) REQUIRE(diff_v(a.coeff(n), b.coeff(n)) >= par.threshold);
    }
}

TEST_CASE("omega passes the special-function equation for Carlitz") {
    for (auto ctx : {ctx_q2(), ctx_q3()}) {
        auto par = sf_params::defaults(ctx);
        auto w = anderson_thakur_omega(ctx, par);
        auto rep = sf_check(w, par.threshold);
        CAPTURE(ctx->q(), rep.residual_v);
        REQUIRE(rep.pass);
    }
}

TEST_CASE("omega is meromorphic of order exactly one along the orbit") {
    for (auto ctx : {ctx_q2(), ctx_q3()}) {
        auto par = sf_params::defaults(ctx);
        auto w = anderson_thakur_omega(ctx, par);
        REQUIRE_FALSE(holomorphy_check(w.comps[0], 0, par.threshold).pass);
        REQUIRE(holomorphy_check(w.comps[0], 1, par.threshold).pass);
    }
}

TEST_CASE("residue of the zero function is zero") {
    auto ctx = ctx_q2();
    auto par = sf_params::defaults(ctx);
    special_fn z{carlitz(ctx), {mero_fn(ctx, 1, par.horizon, par.guard)}, std::nullopt, ""};
    REQUIRE(residue_at_j(z)[0].is_zero());
    REQUIRE(sf_check(z, par.threshold).pass);
}

TEST_CASE("constants are not special functions: omega + 1 fails sf_check") {
    auto ctx = ctx_q2();
    auto par = sf_params::defaults(ctx);
    auto w = anderson_thakur_omega(ctx, par);
    mero_fn one(ctx, w.comps[0].order_cap(), par.horizon, par.guard);
    one.set_tail(tate_series::constant(cinf_num::one(ctx)));
    w.comps[0] = w.comps[0] + one;
    REQUIRE_FALSE(sf_check(w, par.threshold).pass);
}

TEST_CASE("residue of omega is the Carlitz period") {
    for (auto ctx : {ctx_q2(), ctx_q3()}) {
        auto par = sf_params::defaults(ctx);
        auto w = anderson_thakur_omega(ctx, par);
        auto pi = carlitz_period(ctx, par.terms);
        REQUIRE(diff_v(residue_at_j(w)[0], pi) >= par.threshold);
        // derived oracle: the residue is a lattice vector (exp kills it)
        auto c = carlitz(ctx);
        auto ec = compute_exp_coeffs(c, par.exp_terms);
        REQUIRE(lattice_member(c, ec, residue_at_j(w), par.threshold).member);
    }
}

TEST_CASE("sf_from_lattice at u = t reproduces omega part by part") {
    for (auto ctx : {ctx_q2(), ctx_q3()}) {
        auto par = sf_params::defaults(ctx);
        auto c = carlitz(ctx);
        auto ec = compute_exp_coeffs(c, par.exp_terms);
        auto pi = carlitz_period(ctx, par.terms);
        auto rep = sf_from_lattice(c, ec, {pi}, u_identity(), par);
        auto w = anderson_thakur_omega(ctx, par);
        CAPTURE(ctx->q());
        REQUIRE(parts_match_v(rep.w.comps[0], w.comps[0]) >= par.threshold);
        REQUIRE(rep.cancellation_v >= par.threshold);
        REQUIRE(rep.route_match_v >= par.threshold);
        REQUIRE(sf_check(rep.w, par.threshold).pass);
        // round trip: residue comes back exactly (e_0 = 1)
        REQUIRE(diff_v(residue_at_j(rep.w)[0], pi) >= par.threshold);
    }
}

TEST_CASE("sf_from_lattice with a non-monomial separating u gives the same function") {
    for (auto ctx : {ctx_q2(), ctx_q3()}) {
        auto par = sf_params::defaults(ctx);
        auto c = carlitz(ctx);
        auto ec = compute_exp_coeffs(c, par.exp_terms);
        auto pi = carlitz_period(ctx, par.terms);
        separating_u u{{0, 1, 1}}; // u = t^2 + t, u' = 2t + 1 != 0 for p in {2,3}
        auto rep = sf_from_lattice(c, ec, {pi}, u, par);
        auto w = anderson_thakur_omega(ctx, par);
        CAPTURE(ctx->q(), rep.cancellation_v, rep.route_match_v);
        REQUIRE(rep.cancellation_v >= par.threshold);
        REQUIRE(rep.route_match_v >= par.threshold);
        REQUIRE(parts_match_v(rep.w.comps[0], w.comps[0]) >= par.threshold);
    }
}

TEST_CASE("sf_from_lattice of lambda = 0 is zero") {
    auto ctx = ctx_q2();
    auto par = sf_params::defaults(ctx);
    auto c = carlitz(ctx);
    auto ec = compute_exp_coeffs(c, par.exp_terms);
    auto rep = sf_from_lattice(c, ec, {cinf_num::zero(ctx)}, u_identity(), par);
    REQUIRE(rep.w.comps[0].is_zero(par.threshold));
}

TEST_CASE("non-separating u is rejected") {
    auto ctx = ctx_q2();
    separating_u u{{0, 0, 1}}; // u = t^2 = (t)^2 in char 2, u' = 0
    REQUIRE_THROWS_AS(u.validate(ctx->p()), config_error);
}

TEST_CASE("tensor stacked generator satisfies the equation and the order bound") {
    for (auto ctx : {ctx_q2(), ctx_q3()}) {
        auto par = sf_params::defaults(ctx);
        for (int n : {2, 3}) {
            auto w = tensor_stacked_generator(ctx, n, par);
            CAPTURE(ctx->q(), n);
            REQUIRE(sf_check(w, par.threshold).pass);
            for (const auto& comp : w.comps)
                REQUIRE(comp.max_pole_order(par.threshold) <= n);
            for (const auto& comp : w.comps)
                REQUIRE(holomorphy_check(comp, n, par.threshold).pass);
        }
    }
}

TEST_CASE("prolongation hyperderivative basis passes its construction oracle") {
    for (auto ctx : {ctx_q2(), ctx_q3()}) {
        auto par = sf_params::defaults(ctx);
        for (int k : {1, 2}) {
            CAPTURE(ctx->q(), k);
            auto basis = prolongation_basis(ctx, k, par); // throws if sf_check fails
            REQUIRE(static_cast<int>(basis.size()) == k + 1);
            // pole order of d^(j) omega at every tracked point is j+1
            for (int j = 1; j <= k + 1; ++j) {
                const auto& top = basis[static_cast<size_t>(j - 1)].comps[0];
                REQUIRE(top.max_pole_order(par.threshold) == j);
            }
        }
    }
}

TEST_CASE("hyperderivative mero matches the disk-expansion refit oracle") {
    auto ctx = ctx_q2();
    auto par = sf_params::defaults(ctx);
    auto om = omega_power_mero(ctx, 1, par, 1);
    auto d1 = hyperderivative_mero(om, 1);
    // oracle: differentiate the unit-disk expansion and refit the principal
    // part at theta by clearing the double pole
    auto [f, err] = expand_on_disk(om, 160);
    auto df = hyperderivative(f, 1);
    int deg = df.degree();
    auto theta = cinf_num::theta_pow(ctx);
    tate_series cleared = df;
    for (int k = 0; k < 2; ++k) cleared = cleared * tate_series::t_minus(theta);
    cleared = cleared.truncated_deg(deg);
    auto c2 = cleared.eval(theta);
    auto c1 = hyperderivative(cleared, 1).eval(theta);
    REQUIRE(diff_v(c2, d1.part(0, 2)) >= par.threshold);
    REQUIRE(diff_v(c1, d1.part(0, 1)) >= par.threshold);
}

TEST_CASE("residues of special functions are lattice vectors (kernel property)") {
    for (auto ctx : {ctx_q2(), ctx_q3()}) {
        auto par = sf_params::defaults(ctx);
        SECTION("tensor square") {
            auto w = tensor_stacked_generator(ctx, 2, par);
            auto ec = compute_exp_coeffs(w.e, par.exp_terms);
            auto mem = lattice_member(w.e, ec, residue_at_j(w), par.threshold);
            CAPTURE(ctx->q(), mem.residual_v);
            REQUIRE(mem.member);
        }
        SECTION("first prolongation") {
            auto basis = prolongation_basis(ctx, 1, par);
            auto ec = compute_exp_coeffs(basis[0].e, par.exp_terms);
            for (const auto& w : basis) {
                auto mem = lattice_member(w.e, ec, residue_at_j(w), par.threshold);
                CAPTURE(ctx->q(), mem.residual_v);
                REQUIRE(mem.member);
            }
        }
    }
}

TEST_CASE("residue round-trip through sf_from_lattice on higher-dimensional modules") {
    for (auto ctx : {ctx_q2(), ctx_q3()}) {
        auto par = sf_params::defaults(ctx);
        separating_u u2{{0, 1, 1}};
        SECTION("tensor square") {
            auto w = tensor_stacked_generator(ctx, 2, par);
            auto ec = compute_exp_coeffs(w.e, par.exp_terms);
            cvec lam = residue_at_j(w);
            for (const auto& u : {u_identity(), u2}) {
                auto rep = sf_from_lattice(w.e, ec, lam, u, par);
                CAPTURE(ctx->q(), u.to_string(), rep.cancellation_v, rep.route_match_v);
                REQUIRE(rep.cancellation_v >= par.threshold);
                REQUIRE(rep.route_match_v >= par.threshold);
                REQUIRE(sf_check(rep.w, par.threshold).pass);
                cvec back = residue_at_j(rep.w);
                for (int i = 0; i < 2; ++i)
                    REQUIRE(diff_v(back[static_cast<size_t>(i)], lam[static_cast<size_t>(i)]) >=
                            par.threshold);
                // and the function itself is the stacked generator again
                for (int i = 0; i < 2; ++i)
                    REQUIRE(parts_match_v(rep.w.comps[static_cast<size_t>(i)],
                                          w.comps[static_cast<size_t>(i)]) >= par.threshold);
            }
        }
        SECTION("first prolongation") {
            auto basis = prolongation_basis(ctx, 1, par);
            auto ec = compute_exp_coeffs(basis[0].e, par.exp_terms);
            cvec lam = residue_at_j(basis[1]); // (0, pi~)
            auto rep = sf_from_lattice(basis[0].e, ec, lam, u_identity(), par);
            REQUIRE(sf_check(rep.w, par.threshold).pass);
            cvec back = residue_at_j(rep.w);
            for (int i = 0; i < 2; ++i)
                REQUIRE(diff_v(back[static_cast<size_t>(i)], lam[static_cast<size_t>(i)]) >= par.threshold);
        }
    }
}

TEST_CASE("t-multiplication: t w is special and residue(t w) = dphi(t) residue(w)") {
    for (auto ctx : {ctx_q2(), ctx_q3()}) {
        auto par = sf_params::defaults(ctx);
        auto w = tensor_stacked_generator(ctx, 2, par);
        auto t = tate_series::monomial(cinf_num::one(ctx), 1);
        special_fn tw = w;
        for (auto& c : tw.comps) c = c.mul_poly(t);
        REQUIRE(sf_check(tw, par.threshold).pass);
        cvec lhs = residue_at_j(tw);
        cvec rhs = w.e.a0().apply(residue_at_j(w));
        for (size_t i = 0; i < lhs.size(); ++i)
            REQUIRE(diff_v(lhs[i], rhs[i]) >= par.threshold);
    }
}

TEST_CASE("no holomorphic special functions: exact cancellation vs stripped copy") {
    auto ctx = ctx_q2();
    auto par = sf_params::defaults(ctx);
    auto w = anderson_thakur_omega(ctx, par);
    SECTION("omega - omega passes and is zero") {
        special_fn z = w;
        z.comps[0] = w.comps[0] - w.comps[0];
        REQUIRE(sf_check(z, par.threshold).pass);
        REQUIRE(z.comps[0].is_zero(par.threshold));
    }
    SECTION("stripping the polar part breaks the equation") {
        // delete the pole data but keep the disk restriction: the resulting
        // "everywhere holomorphic" claim cannot satisfy the equation
        auto [f, err] = expand_on_disk(w.comps[0], par.tdeg);
        special_fn stripped = w;
        stripped.comps[0] = mero_fn(ctx, w.comps[0].order_cap(), par.horizon, par.guard);
        stripped.comps[0].set_tail(f);
        REQUIRE_FALSE(sf_check(stripped, par.threshold).pass);
        REQUIRE_FALSE(stripped.comps[0].is_zero(par.threshold));
        // and the holomorphy claim itself is refuted by the decay test
        REQUIRE_FALSE(holomorphy_check(stripped.comps[0], 0, par.threshold).pass);
    }
}

TEST_CASE("filtration jumps for the example families") {
    for (auto ctx : {ctx_q2(), ctx_q3()}) {
        auto par = sf_params::defaults(ctx);
        CAPTURE(ctx->q());
        SECTION("carlitz: single jump at 1") {
            auto w = anderson_thakur_omega(ctx, par);
            auto rep = filtration_ranks(w.e, {w}, par.threshold);
            REQUIRE(rep.ranks == std::vector<int>{0, 1});
            REQUIRE(rep.jumps == std::vector<int>{1});
        }
        SECTION("tensor powers: single jump at n") {
            for (int n : {2, 3}) {
                auto w = tensor_stacked_generator(ctx, n, par);
                auto rep = filtration_ranks(w.e, {w}, par.threshold);
                CAPTURE(n);
                REQUIRE(rep.jumps == std::vector<int>{n});
                REQUIRE(rep.ranks[static_cast<size_t>(n)] == 1);
                REQUIRE(rep.ranks[static_cast<size_t>(n - 1)] == 0);
            }
        }
        SECTION("prolongations: a jump at every degree") {
            for (int k : {1, 2}) {
                auto basis = prolongation_basis(ctx, k, par);
                auto rep = filtration_ranks(basis[0].e, basis, par.threshold);
                CAPTURE(k);
                std::vector<int> expect;
                for (int n = 1; n <= k + 1; ++n) expect.push_back(n);
                REQUIRE(rep.jumps == expect);
                for (int n = 0; n <= k + 1; ++n) REQUIRE(rep.ranks[static_cast<size_t>(n)] == n);
            }
        }
        SECTION("direct sum of two Carlitz copies: jump at 1 with rank 2") {
            auto om = anderson_thakur_omega(ctx, par);
            auto e = direct_sum(om.e, om.e);
            mero_fn zero(ctx, 1, par.horizon, par.guard);
            special_fn w1{e, {om.comps[0], zero}, std::nullopt, ""};
            special_fn w2{e, {zero, om.comps[0]}, std::nullopt, ""};
            auto rep = filtration_ranks(e, {w1, w2}, par.threshold);
            REQUIRE(rep.jumps == std::vector<int>{1});
            REQUIRE(rep.ranks[1] == 2);
        }
    }
}

TEST_CASE("coordinate changes leave the residue map alone") {
    auto ctx = ctx_q3();
    auto par = sf_params::defaults(ctx);
    auto om = anderson_thakur_omega(ctx, par);
    auto e = direct_sum(om.e, om.e);
    mero_fn zero(ctx, 1, par.horizon, par.guard);
    special_fn w{e, {zero, om.comps[0]}, std::nullopt, ""}; // omega in the last slot

    SECTION("identity") {
        tau_poly m{{cmat::identity(ctx, 2)}};
        auto rep = coordinate_change_check(e, m, w, par.threshold);
        REQUIRE(rep.pass);
    }
    SECTION("scalar matrix: residue scales") {
        tau_poly m{{cmat::identity(ctx, 2).scaled(lambda_theta(ctx))}};
        auto rep = coordinate_change_check(e, m, w, par.threshold);
        REQUIRE(rep.pass);
    }
    SECTION("Id + E_{1d} tau: the twisted term is regular at theta") {
        cmat m1(ctx, 2);
        m1.at(0, 1) = cinf_num::one(ctx);
        tau_poly m{{cmat::identity(ctx, 2), m1}};
        auto rep = coordinate_change_check(e, m, w, par.threshold);
        CAPTURE(rep.residual_v);
        REQUIRE(rep.pass);
    }
}
