#pragma once

#include <utility>
#include <vector>

#include "tmod/tmodule.hpp"

namespace tmod {

/**
 * Coefficients of exp_E = sum_i e_i tau^i in coordinates. e_0 = Id and for
 * i >= 1 the functional equation exp_E dphi(t) = phi(t) exp_E pins e_i as the
 * unique solution of
 *
 *   e_i (theta^{q^i} Id + N^{(i)}) - A_0 e_i = sum_{j=1..min(s,i)} A_j e_{i-j}^{(j)},
 *
 * which we solve exactly: the scalar part is (theta^{q^i}-theta) e_i and the
 * remaining commutator-style perturbation X -> X N^{(i)} - N X is nilpotent,
 * so the Neumann expansion terminates in at most 2d-1 steps.
 */
struct exp_coeffs {
    std::vector<cmat> mats; // e_0 .. e_count
    int count() const { return static_cast<int>(mats.size()) - 1; }
    const cmat& e(int i) const { return mats.at(static_cast<size_t>(i)); }
};

inline exp_coeffs compute_exp_coeffs(const t_module& em, int count) {
    if (count < 1) throw config_error("exp_coeffs: count >= 1 required");
    auto ctx = em.ctx();
    int d = em.dim();
    cmat N = em.nilpotent();
    cinf_num theta = cinf_num::theta_pow(ctx);
    exp_coeffs out;
    out.mats.push_back(cmat::identity(ctx, d));
    for (int i = 1; i <= count; ++i) {
        cmat B(ctx, d);
        for (int j = 1; j <= std::min(em.phi_t.deg(), i); ++j)
            B = B + em.phi_t.coeff(j) * out.e(i - j).qpow(j);
        cinf_num c = theta.qpow(i) - theta;
        if (c.is_zero())
            throw precision_error("exp_coeffs: theta^{q^i} - theta vanished", c.prec(), 1);
        cinf_num cinv = c.inv();
        cmat Ni = N.qpow(i);
        cmat x(ctx, d);
        cmat term = B.scaled(cinv);
        for (int k = 0; k < 2 * d; ++k) {
            x = x + term;
            cmat pert = term * Ni - N * term;
            if (pert.is_zero()) break;
            if (k == 2 * d - 1)
                throw domain_error("exp_coeffs: perturbation failed to nilpotate");
            term = (cmat(ctx, d) - pert).scaled(cinv);
        }
        out.mats.push_back(std::move(x));
    }
    return out;
}

/// Valuation floor of the functional-equation residual in each tau-degree:
/// e_n (A_0)^{(n)} - sum_j A_j e_{n-j}^{(j)}. This is the oracle certifying
/// the recursion output.
inline std::vector<long long> exp_functional_residual(const t_module& em, const exp_coeffs& ec) {
    std::vector<long long> out;
    for (int n = 0; n <= ec.count(); ++n) {
        cmat lhs = ec.e(n) * em.a0().qpow(n);
        for (int j = 0; j <= std::min(em.phi_t.deg(), n); ++j)
            lhs = lhs - em.phi_t.coeff(j) * ec.e(n - j).qpow(j);
        out.push_back(lhs.min_val());
    }
    return out;
}

inline long long vec_min_val(const cvec& v) {
    long long m = EXACT_PREC;
    for (const auto& c : v) m = std::min(m, c.is_zero() ? c.prec() : c.val());
    return m;
}

struct exp_eval_result {
    cvec value;
    long long tail_v; // valuation floor of the dropped series tail
};

/**
 * exp_E(x) = sum_i e_i x^{(i)}, truncated at the available coefficients. The
 * dropped tail is bounded by monotone extrapolation of v(e_i x^{(i)}) over the
 * last computed terms; if that bound cannot reach `target_v` the evaluation
 * aborts with a precision error instead of silently truncating.
 */
inline exp_eval_result exp_eval(const t_module& em, const exp_coeffs& ec, const cvec& x,
                                long long target_v) {
    auto ctx = em.ctx();
    int d = em.dim();
    if (static_cast<int>(x.size()) != d)
        throw domain_error("exp_eval: vector length != module dimension");
    cvec acc(static_cast<size_t>(d), cinf_num::zero(ctx));
    long long vx = vec_min_val(x);
    if (vx >= EXACT_PREC) return {acc, EXACT_PREC}; // x = 0
    std::vector<long long> term_v;
    cvec xq = x;
    for (int i = 0; i <= ec.count(); ++i) {
        if (i > 0)
            for (auto& c : xq) c = c.qpow(1);
        cvec term = ec.e(i).apply(xq);
        for (int k = 0; k < d; ++k) acc[static_cast<size_t>(k)] = acc[static_cast<size_t>(k)] + term[static_cast<size_t>(k)];
        term_v.push_back(std::min(vec_min_val(term), EXACT_PREC));
    }
    // monotone growth over the last few terms, then one-step extrapolation
    int n = static_cast<int>(term_v.size());
    long long last = term_v.back();
    bool monotone = true;
    for (int i = std::max(1, n - 3); i < n; ++i) monotone = monotone && term_v[static_cast<size_t>(i)] >= term_v[static_cast<size_t>(i - 1)];
    if (!monotone || last < target_v)
        throw precision_error("exp_eval: series tail not provably below target", last, target_v);
    return {acc, last};
}

/**
 * The Carlitz period, normalized so that it equals the residue at t = theta of
 * the Anderson-Thakur function: pi~ = -theta lambda_theta
 * prod_{i>=1} (1 - theta^{1-q^i})^{-1}, truncated after `terms` factors.
 */
inline cinf_num carlitz_period(const cinf_ctx_ptr& ctx, int terms) {
    long long needed = ctx->P + 8;
    long long qi = ctx->q();
    for (int i = 1; i <= terms; ++i) {
        if (static_cast<long long>(ctx->r) * (qi - 1) >= needed) break;
        if (i == terms)
            throw precision_error("carlitz_period: not enough product terms for the precision",
                                  static_cast<long long>(ctx->r) * (qi - 1), needed);
        qi *= ctx->q();
    }
    cinf_num acc = -(cinf_num::theta_pow(ctx) * lambda_theta(ctx));
    for (int i = 1; i <= terms; ++i) {
        // 1 - theta^{1-q^i}
        cinf_num f = cinf_num::one(ctx) -
                     cinf_num::theta_pow(ctx, 1 - mero_fn::ipow(ctx->q(), i));
        acc = acc * f.inv();
    }
    return acc;
}

struct membership_report {
    bool member;
    long long residual_v;
};

/// x in Lambda_E iff exp_E(x) = 0; the residual valuation is the evidence.
inline membership_report lattice_member(const t_module& em, const exp_coeffs& ec, const cvec& x,
                                        long long threshold) {
    auto r = exp_eval(em, ec, x, threshold);
    long long v = std::min(vec_min_val(r.value), r.tail_v);
    return {v >= threshold, v};
}

} // namespace tmod
