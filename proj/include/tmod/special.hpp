#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tmod/exp.hpp"
#include "tmod/tmodule.hpp"

namespace tmod {

/// Runtime caps shared by the special-function constructions.
struct sf_params {
    int horizon = 6;       // reported pole range I
    int guard = 2;         // extra tracked indices absorbing twists
    int tdeg = 48;         // disk expansion degree cap D
    int terms = 10;        // product truncation for omega
    int exp_terms = 14;    // exp coefficient count
    long long threshold;   // zero test / pass margin, in pi-units

    static sf_params defaults(const cinf_ctx_ptr& ctx) {
        sf_params p;
        p.threshold = ctx->P / 2;
        // omega product factors: the first neglected factor must sit below the
        // precision budget, and at least one pole must fall beyond the guard
        long long need = 2 * ctx->P;
        int t = p.horizon + p.guard + 2;
        while (static_cast<long long>(ctx->r) * mero_fn::ipow(ctx->q(), t + 1) < need) ++t;
        p.terms = t;
        return p;
    }
};

/**
 * A d-vector of meromorphic functions satisfying (or meant to satisfy) the
 * special-function equation phi(t) w = t w, tagged with the lattice vector and
 * separating element it was built from, when it was.
 */
struct special_fn {
    t_module e;
    std::vector<mero_fn> comps;
    std::optional<cvec> source_lambda;
    std::string source_u;
};

/// u in F_q[t] with u' != 0, given by prime-field integer coefficients
/// (little-endian in t).
struct separating_u {
    std::vector<int> coeffs;

    void validate(int p) const {
        if (coeffs.size() < 2) throw config_error("separating u: must be non-constant");
        bool dnz = false;
        for (size_t k = 1; k < coeffs.size(); ++k)
            dnz = dnz || (static_cast<long long>(k) * coeffs[k]) % p != 0;
        if (!dnz)
            throw config_error("separating u: u' = 0 (u lies in F_q[t^p])");
    }

    std::string to_string() const {
        std::string s;
        for (size_t k = coeffs.size(); k-- > 0;) {
            if (coeffs[k] == 0) continue;
            if (!s.empty()) s += "+";
            if (k == 0 || coeffs[k] != 1) s += std::to_string(coeffs[k]);
            if (k >= 1) s += "t";
            if (k >= 2) s += "^" + std::to_string(k);
        }
        return s.empty() ? "0" : s;
    }

    cinf_num at_theta(const cinf_ctx_ptr& ctx) const {
        cinf_num acc = cinf_num::zero(ctx);
        for (size_t k = coeffs.size(); k-- > 0;)
            acc = acc * cinf_num::theta_pow(ctx) + cinf_num::from_int(ctx, coeffs[k]);
        return acc;
    }

    tate_series as_poly(const cinf_ctx_ptr& ctx) const {
        std::vector<cinf_num> cs;
        for (int c : coeffs) cs.push_back(cinf_num::from_int(ctx, c));
        return tate_series(ctx, std::move(cs));
    }
};

inline separating_u u_identity() { return separating_u{{0, 1}}; } // u = t

/// omega(t)^n as a truncated product: an exact proper rational function with
/// order-n poles along the orbit; far poles fold into the neglect bound.
inline mero_fn omega_power_mero(const cinf_ctx_ptr& ctx, int n, const sf_params& par,
                                int order_cap) {
    cinf_num c = lambda_theta(ctx);
    for (int i = 0; i <= par.terms; ++i)
        c = c * (-cinf_num::theta_pow(ctx).qpow(i));
    std::vector<int> mult(static_cast<size_t>(par.terms) + 1, n);
    auto g = mero_from_rational(ctx, tate_series::constant(c.pow(n)), mult,
                                std::max(order_cap, n), par.horizon, par.guard);
    return g;
}

/// The Anderson-Thakur function as a special function of the Carlitz module.
inline special_fn anderson_thakur_omega(const cinf_ctx_ptr& ctx, const sf_params& par,
                                        int order_cap = 1) {
    special_fn w{carlitz(ctx), {omega_power_mero(ctx, 1, par, order_cap)}, std::nullopt, ""};
    return w;
}

struct sf_check_report {
    bool pass;
    long long residual_v;                // valuation floor of phi(t) w - t w
    std::vector<long long> component_v;  // per component
};

/// The special-function equation, instantiated on the stored representation:
/// every principal-part coefficient and the disk content of phi(t)w - tw must
/// sit below the threshold.
inline sf_check_report sf_check(const special_fn& w, long long threshold) {
    const t_module& e = w.e;
    auto lhs = apply_phi_t(e, w.comps, threshold);
    sf_check_report rep;
    rep.residual_v = EXACT_PREC;
    auto tpoly = tate_series::monomial(cinf_num::one(e.ctx()), 1);
    for (int i = 0; i < e.dim(); ++i) {
        mero_fn resid = lhs[static_cast<size_t>(i)] - w.comps[static_cast<size_t>(i)].mul_poly(tpoly);
        long long v = resid.min_val();
        rep.component_v.push_back(v);
        rep.residual_v = std::min(rep.residual_v, v);
    }
    rep.pass = rep.residual_v >= threshold;
    return rep;
}

/// res_j(dt (x) w): the order-1 principal coefficients at t = theta,
/// componentwise (coordinates are fixed, Lie_kappa = id).
inline cvec residue_at_j(const special_fn& w) {
    cvec out;
    out.reserve(w.comps.size());
    for (const auto& c : w.comps) out.push_back(c.residue());
    return out;
}

struct sf_build_report {
    special_fn w;
    long long cancellation_v; // off-orbit pole cancellation evidence (u route),
                              // relative to the assembled numerator's scale
    long long route_match_v;  // agreement between the u route and the direct form
};

/**
 * The special function attached to a lattice vector lambda through a
 * separating u. Two routes are computed:
 *
 * direct:  w = sum_{i,j} e_i (N^{(i)})^j lambda^{(i)} (t - theta^{q^i})^{-(j+1)},
 *          the partial-fraction expansion of exp-hat applied to
 *          (t (x) 1 - 1 (x) dphi_t)^{-1} lambda, which is u-free;
 *
 * u route: for each orbit index the sum over j of
 *          e_i (n_u^{(i)})^j [G_u(t, dphi_t) lambda]^{(i)} / (u(t)-u(theta)^{q^i})^{j+1}
 *          with n_u = dphi_u - u(theta) and G_u(X,Y) = (u(X)-u(Y))/(X-Y),
 *          assembled over the common denominator. The numerator must be
 *          divisible by the off-orbit cofactor G_u(t, theta^{q^i})^d: the
 *          division remainder is the cancellation evidence, and the quotient
 *          must reproduce the direct principal parts.
 *
 * The u route realizes the different ideal (u') through the divided
 * difference G_u, whose diagonal value G_u(t,t) = u'(t) generates it; with
 * the constant u'(theta) in its place the off-orbit poles fail to cancel.
 */
inline sf_build_report sf_from_lattice(const t_module& em, const exp_coeffs& ec,
                                       const cvec& lambda, const separating_u& u,
                                       const sf_params& par, bool verify_u_route = true) {
    auto ctx = em.ctx();
    const int d = em.dim();
    const int tracked = par.horizon + par.guard;
    u.validate(ctx->p());
    if (static_cast<int>(lambda.size()) != d)
        throw domain_error("sf_from_lattice: lambda length != module dimension");
    if (ec.count() < tracked)
        throw config_error("sf_from_lattice: exp coefficients shorter than the pole horizon");

    cmat N = em.nilpotent();
    std::vector<mero_fn> comps(static_cast<size_t>(d),
                               mero_fn(ctx, d, par.horizon, par.guard));

    // direct route, plus bound accounting for everything past the horizon
    std::vector<long long> term_v;
    cvec lam_i = lambda;
    for (int i = 0; i <= ec.count(); ++i) {
        if (i > 0)
            for (auto& c : lam_i) c = c.qpow(1);
        cmat Ni = N.qpow(i);
        cvec v = lam_i;
        long long tv = EXACT_PREC;
        for (int j = 0; j < d; ++j) {
            cvec coeff = ec.e(i).apply(v);
            tv = std::min(tv, vec_min_val(coeff));
            if (i <= tracked) {
                for (int k = 0; k < d; ++k)
                    comps[static_cast<size_t>(k)].add_part(i, j + 1, coeff[static_cast<size_t>(k)]);
            } else {
                long long bound =
                    sat_add(vec_min_val(coeff),
                            static_cast<long long>(ctx->r) * mero_fn::ipow(ctx->q(), i));
                for (auto& c : comps) c.absorb_neglected(bound);
            }
            v = Ni.apply(v);
        }
        term_v.push_back(sat_add(tv, i > tracked
                                         ? static_cast<long long>(ctx->r) *
                                               mero_fn::ipow(ctx->q(), i)
                                         : 0));
    }
    // dropped i > count: monotone extrapolation as in exp_eval
    bool monotone = true;
    int n = static_cast<int>(term_v.size());
    for (int i = std::max(1, n - 3); i < n; ++i)
        monotone = monotone && term_v[static_cast<size_t>(i)] >= term_v[static_cast<size_t>(i - 1)];
    if (vec_min_val(lambda) < EXACT_PREC && (!monotone || term_v.back() < par.threshold))
        throw precision_error("sf_from_lattice: series tail not provably below threshold",
                              term_v.back(), par.threshold);
    for (auto& c : comps) c.absorb_neglected(term_v.back());

    sf_build_report rep{special_fn{em, std::move(comps), lambda, u.to_string()},
                        EXACT_PREC, EXACT_PREC};
    if (!verify_u_route) return rep;

    // u route: verify off-orbit cancellation and cross-check the parts
    const auto& uc = u.coeffs;
    int du = static_cast<int>(uc.size()) - 1;
    cinf_num u_theta = u.at_theta(ctx);
    tate_series upoly = u.as_poly(ctx);
    cmat a0 = em.a0();
    for (int i = 0; i <= tracked; ++i) {
        cmat a0i = a0.qpow(i);
        cvec lami = lambda;
        for (auto& c : lami) c = c.qpow(i);
        // W_i(t) = G_u(t, A_0^{(i)}) lambda^{(i)}: degree du-1 with vector coefficients
        std::vector<cvec> W(static_cast<size_t>(du), cvec(static_cast<size_t>(d), cinf_num::zero(ctx)));
        for (int a = 0; a < du; ++a) {
            cmat S(ctx, d);
            cmat pw = cmat::identity(ctx, d);
            // S_a = sum_{m >= a+1} u_m A0i^{m-1-a}
            for (int m = a + 1; m <= du; ++m) {
                if (uc[static_cast<size_t>(m)] != 0)
                    S = S + pw.scaled(cinf_num::from_int(ctx, uc[static_cast<size_t>(m)]));
                pw = pw * a0i;
            }
            W[static_cast<size_t>(a)] = S.apply(lami);
        }
        cinf_num u_theta_i = u_theta.qpow(i);
        tate_series Dpoly = upoly - tate_series::constant(u_theta_i);
        cmat nu = dphi_of_poly(em, uc).qpow(i) -
                  cmat::identity(ctx, d).scaled(u_theta_i);
        // Num = sum_j (e_i nu^j W) D^{d-1-j}, one series per component
        std::vector<tate_series> num(static_cast<size_t>(d), tate_series::zero(ctx));
        std::vector<cvec> cur = W;
        for (int j = 0; j < d; ++j) {
            tate_series dpow = tate_series::constant(cinf_num::one(ctx));
            for (int rep2 = 0; rep2 < d - 1 - j; ++rep2) dpow = dpow * Dpoly;
            for (int a = 0; a < du; ++a) {
                cvec coeff = ec.e(i).apply(cur[static_cast<size_t>(a)]);
                for (int k = 0; k < d; ++k)
                    num[static_cast<size_t>(k)] =
                        num[static_cast<size_t>(k)] +
                        (dpow * tate_series::monomial(coeff[static_cast<size_t>(k)], a));
            }
            for (int a = 0; a < du; ++a) cur[static_cast<size_t>(a)] = nu.apply(cur[static_cast<size_t>(a)]);
        }
        cinf_num ci = cinf_num::theta_pow(ctx).qpow(i);
        auto [G, grem] = poly_divmod(Dpoly, tate_series::t_minus(ci));
        for (int k2 = 0; k2 <= grem.degree(); ++k2) {
            const auto& c = grem.coeff(k2);
            if (!c.is_zero()) rep.cancellation_v = std::min(rep.cancellation_v, c.val());
        }
        tate_series Gd = tate_series::constant(cinf_num::one(ctx));
        for (int rep2 = 0; rep2 < d; ++rep2) Gd = Gd * G;
        // scale of the assembled numerator: remainders are certified relative
        // to it (the terms live at the orbit point's size, not at O(1))
        long long num_scale = EXACT_PREC;
        for (int k = 0; k < d; ++k)
            for (int l = 0; l <= num[static_cast<size_t>(k)].degree(); ++l) {
                const auto& c = num[static_cast<size_t>(k)].coeff(l);
                if (!c.is_zero()) num_scale = std::min(num_scale, c.val());
            }
        for (int k = 0; k < d; ++k) {
            auto [Q, rem] = poly_divmod(num[static_cast<size_t>(k)], Gd);
            for (int l = 0; l <= rem.degree(); ++l) {
                const auto& c = rem.coeff(l);
                long long v = c.is_zero() ? c.prec() : c.val();
                if (v < EXACT_PREC && num_scale < EXACT_PREC)
                    rep.cancellation_v = std::min(rep.cancellation_v, v - std::min(num_scale, 0LL));
            }
            // Q/(t-c_i)^d: recenter to read the principal coefficients
            tate_series qs = taylor_at(Q, ci);
            for (int l = 0; l < d; ++l) {
                cinf_num got = qs.coeff(l);
                cinf_num want = rep.w.comps[static_cast<size_t>(k)].part(i, d - l);
                cinf_num diff = got - want;
                long long v = diff.is_zero() ? diff.prec() : diff.val();
                if (v < EXACT_PREC) rep.route_match_v = std::min(rep.route_match_v, v);
            }
        }
    }
    return rep;
}

/// The stacked generator (1, (t-theta), ..., (t-theta)^{n-1})^T omega^n of the
/// n-th Carlitz tensor power.
inline special_fn tensor_stacked_generator(const cinf_ctx_ptr& ctx, int n, const sf_params& par) {
    auto e = carlitz_tensor(ctx, n);
    auto wn = omega_power_mero(ctx, n, par, n);
    std::vector<mero_fn> comps;
    mero_fn cur = wn;
    auto tm = tate_series::t_minus(cinf_num::theta_pow(ctx));
    for (int k = 0; k < n; ++k) {
        comps.push_back(cur);
        if (k + 1 < n) cur = cur.mul_poly(tm);
    }
    return special_fn{e, std::move(comps), std::nullopt, ""};
}

/// The hyperderivative basis omega_1..omega_{k+1} of the k-th prolongation;
/// each element is validated against the special-function equation before it
/// is handed out (this is the oracle pinning the derived phi(t)).
inline std::vector<special_fn> prolongation_basis(const cinf_ctx_ptr& ctx, int k,
                                                  const sf_params& par) {
    auto e = prolongation(ctx, k);
    int d = k + 1;
    auto om = omega_power_mero(ctx, 1, par, d);
    std::vector<mero_fn> ders; // ders[j] = d^(j) omega, pole order j+1
    ders.push_back(om);
    for (int j = 1; j <= k; ++j) ders.push_back(hyperderivative_mero(om, j));
    std::vector<special_fn> basis;
    for (int j = 1; j <= d; ++j) {
        std::vector<mero_fn> comps;
        for (int row = 1; row <= d; ++row) {
            if (row <= j)
                comps.push_back(ders[static_cast<size_t>(j - row)]);
            else
                comps.push_back(mero_fn(ctx, d, par.horizon, par.guard));
        }
        special_fn w{e, std::move(comps), std::nullopt, ""};
        auto chk = sf_check(w, par.threshold);
        if (!chk.pass)
            throw domain_error("prolongation basis element " + std::to_string(j) +
                               " failed the special-function equation (residual v=" +
                               std::to_string(chk.residual_v) + "); derived phi(t) is wrong");
        basis.push_back(std::move(w));
    }
    return basis;
}

struct filtration_report {
    std::vector<int> ranks; // ranks[n] = r_n for n = 0..d
    std::vector<int> jumps; // {n : r_n > r_{n-1}}
};

/**
 * Pole-order filtration ranks of the F_q-span of the given basis: r_n is the
 * F_q-dimension of the subspace whose members have every pole order <= n.
 * Combinations run over constant (F_q) coefficients; the adapted bases of the
 * example families make this exact.
 */
inline filtration_report filtration_ranks(const t_module& em,
                                          const std::vector<special_fn>& basis,
                                          long long threshold) {
    auto ctx = em.ctx();
    int d = em.dim();
    for (const auto& b : basis) {
        auto chk = sf_check(b, threshold);
        if (!chk.pass)
            throw domain_error("filtration_ranks: basis element fails sf_check (residual v=" +
                               std::to_string(chk.residual_v) + ")");
    }
    auto fq = ctx->F->subfield_fq();
    int B = static_cast<int>(basis.size());
    long long total = 1;
    for (int i = 0; i < B; ++i) total *= static_cast<long long>(fq.size());

    filtration_report rep;
    for (int n = 0; n <= d; ++n) {
        long long members = 0;
        for (long long code = 0; code < total; ++code) {
            long long c = code;
            std::vector<mero_fn> comb(static_cast<size_t>(d),
                                      mero_fn(ctx, d, basis[0].comps[0].horizon(),
                                              basis[0].comps[0].guard()));
            bool nonzero_combo = false;
            for (int b = 0; b < B; ++b) {
                fq_elem s = fq[static_cast<size_t>(c % fq.size())];
                c /= static_cast<long long>(fq.size());
                if (s == 0) continue;
                nonzero_combo = true;
                for (int comp = 0; comp < d; ++comp)
                    comb[static_cast<size_t>(comp)] =
                        comb[static_cast<size_t>(comp)] +
                        basis[static_cast<size_t>(b)].comps[static_cast<size_t>(comp)].scaled(
                            cinf_num::monomial(ctx, s, 0));
            }
            int maxord = 0;
            for (const auto& comp : comb) maxord = std::max(maxord, comp.max_pole_order(threshold));
            (void)nonzero_combo;
            if (maxord <= n) ++members;
        }
        // members = q^{r_n}
        int r = 0;
        while ((mero_fn::ipow(static_cast<long long>(ctx->q()), r)) < members) ++r;
        rep.ranks.push_back(r);
    }
    for (int n = 1; n <= d; ++n)
        if (rep.ranks[static_cast<size_t>(n)] > rep.ranks[static_cast<size_t>(n - 1)])
            rep.jumps.push_back(n);
    return rep;
}

struct coordinate_change_report {
    bool pass;
    long long residual_v;
    t_module conjugated;
};

/// Verify residue_j(M w) = M_0 residue_j(w) for an invertible tau-matrix M,
/// after checking that M phi M^{-1} is again a valid module.
inline coordinate_change_report coordinate_change_check(const t_module& em, const tau_poly& m,
                                                        const special_fn& w, long long threshold) {
    auto minv = m.inverse();
    t_module conj{em.name + "~", m * em.phi_t * minv, "conjugated"};
    validate_t_module(conj);
    auto mw = apply_tau_poly(m, w.comps, threshold);
    cvec lhs;
    lhs.reserve(mw.size());
    for (const auto& c : mw) lhs.push_back(c.residue());
    cvec rhs = m.coeff(0).apply(residue_at_j(w));
    long long v = EXACT_PREC;
    for (size_t i = 0; i < lhs.size(); ++i) {
        cinf_num diff = lhs[i] - rhs[i];
        v = std::min(v, diff.is_zero() ? diff.prec() : diff.val());
    }
    return {v >= threshold, v, std::move(conj)};
}

} // namespace tmod
