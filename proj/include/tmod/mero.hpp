#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "tmod/tate.hpp"

namespace tmod {

/**
 * Meromorphic function on the rigid affine t-line over the C_infty model,
 * with poles confined to the Frobenius orbit theta, theta^q, theta^{q^2}, ...
 * Stored as principal parts plus a holomorphic remainder on the unit disk:
 *
 *   f = tail(t) + sum_{i<=I+g} sum_{k<=cap} part(i,k) (t - theta^{q^i})^{-k}.
 *
 * horizon I is the reported pole range; guard g extra indices absorb twists.
 * tail_bound is a valuation floor for everything neglected (far poles,
 * truncated tail content): the neglected part of the function has absolute
 * value at most q^{-(tail_bound - s)/r} on the disk of log-radius s/r,
 * for s up to r*q^horizon.
 */
class mero_fn {
public:
    mero_fn() = default;
    mero_fn(cinf_ctx_ptr ctx, int order_cap, int horizon, int guard)
        : ctx_(std::move(ctx)), cap_(order_cap), horizon_(horizon), guard_(guard),
          parts_(static_cast<size_t>(horizon + guard + 1),
                 std::vector<cinf_num>(static_cast<size_t>(order_cap), cinf_num::zero(ctx_))),
          tail_(tate_series::zero(ctx_)), tail_bound_(EXACT_PREC) {}

    const cinf_ctx_ptr& ctx() const { return ctx_; }
    int order_cap() const { return cap_; }
    int horizon() const { return horizon_; }
    int guard() const { return guard_; }
    int tracked() const { return horizon_ + guard_; } // highest tracked pole index
    const tate_series& tail() const { return tail_; }
    long long tail_bound() const { return tail_bound_; }

    const cinf_num& part(int i, int k) const { return parts_[static_cast<size_t>(i)][static_cast<size_t>(k - 1)]; }

    void set_part(int i, int k, cinf_num c) {
        if (k < 1 || k > cap_ || i < 0 || i > tracked())
            throw domain_error("mero: part index out of range");
        parts_[static_cast<size_t>(i)][static_cast<size_t>(k - 1)] = std::move(c);
    }

    void add_part(int i, int k, const cinf_num& c) { set_part(i, k, part(i, k) + c); }

    void set_tail(tate_series t) { tail_ = std::move(t); }

    void absorb_neglected(long long bound_v) { tail_bound_ = std::min(tail_bound_, bound_v); }

    /// theta^{q^i}, the i-th pole point.
    cinf_num pole_point(int i) const {
        return cinf_num::theta_pow(ctx_).qpow(i);
    }

    /// Largest k with a part coefficient that is nonzero above `threshold`.
    int pole_order(int i, long long threshold) const {
        for (int k = cap_; k >= 1; --k) {
            const cinf_num& c = part(i, k);
            if (!c.is_zero() && c.val() < threshold) return k;
        }
        return 0;
    }

    int max_pole_order(long long threshold) const {
        int best = 0;
        for (int i = 0; i <= tracked(); ++i) best = std::max(best, pole_order(i, threshold));
        return best;
    }

    /// Order-1 coefficient at the pole t = theta (the scalar residue).
    const cinf_num& residue() const { return part(0, 1); }

    /// Valuation floor over everything stored and neglected; >= threshold
    /// certifies "zero at threshold".
    long long min_val() const {
        long long v = tail_bound_;
        for (const auto& row : parts_)
            for (const auto& c : row) v = std::min(v, c.is_zero() ? c.prec() : c.val());
        for (const auto& c : tail_.coeffs()) v = std::min(v, c.is_zero() ? c.prec() : c.val());
        return v;
    }

    bool is_zero(long long threshold) const { return min_val() >= threshold; }

    mero_fn operator-() const {
        mero_fn out = *this;
        for (auto& row : out.parts_)
            for (auto& c : row) c = -c;
        out.tail_ = -tail_;
        return out;
    }

    friend mero_fn operator+(const mero_fn& a, const mero_fn& b) {
        check_compat(a, b);
        mero_fn out(a.ctx_, std::max(a.cap_, b.cap_), a.horizon_, a.guard_);
        for (int i = 0; i <= out.tracked(); ++i) {
            for (int k = 1; k <= a.cap_; ++k) out.add_part(i, k, a.part(i, k));
            for (int k = 1; k <= b.cap_; ++k) out.add_part(i, k, b.part(i, k));
        }
        out.tail_ = a.tail_ + b.tail_;
        out.tail_bound_ = std::min(a.tail_bound_, b.tail_bound_);
        return out;
    }

    friend mero_fn operator-(const mero_fn& a, const mero_fn& b) { return a + (-b); }

    mero_fn scaled(const cinf_num& c) const {
        mero_fn out(ctx_, cap_, horizon_, guard_);
        for (int i = 0; i <= tracked(); ++i)
            for (int k = 1; k <= cap_; ++k) out.set_part(i, k, part(i, k) * c);
        out.tail_ = tail_.scaled(c);
        out.tail_bound_ = sat_add(tail_bound_, c.val());
        return out;
    }

    /// Multiplication by a polynomial in t. Principal parts are recentered and
    /// split exactly; the polynomial overflow joins the tail.
    mero_fn mul_poly(const tate_series& poly) const {
        int dp = poly.degree();
        if (dp < 0) return mero_fn(ctx_, cap_, horizon_, guard_);
        mero_fn out(ctx_, cap_, horizon_, guard_);
        tate_series spill = tate_series::zero(ctx_);
        for (int i = 0; i <= tracked(); ++i) {
            bool all_exact_zero = true;
            for (int k = 1; k <= cap_ && all_exact_zero; ++k) {
                const cinf_num& a = part(i, k);
                all_exact_zero = a.is_zero() && a.exact();
            }
            if (all_exact_zero) continue;
            cinf_num c = pole_point(i);
            tate_series ps = taylor_at(poly, c); // poly in s = t - c
            // (sum_k a_k s^{-k}) * (sum_l b_l s^l)
            std::vector<cinf_num> poly_in_s; // nonnegative s-exponents
            for (int k = 1; k <= cap_; ++k) {
                const cinf_num& a = part(i, k);
                if (a.is_zero() && a.exact()) continue;
                for (int l = 0; l <= ps.degree(); ++l) {
                    long long e = l - k;
                    cinf_num term = a * ps.coeff(l);
                    if (e < 0) {
                        out.add_part(i, static_cast<int>(-e), term);
                    } else {
                        if (static_cast<size_t>(e) >= poly_in_s.size())
                            poly_in_s.resize(static_cast<size_t>(e) + 1, cinf_num::zero(ctx_));
                        poly_in_s[static_cast<size_t>(e)] = poly_in_s[static_cast<size_t>(e)] + term;
                    }
                }
            }
            if (!poly_in_s.empty())
                spill = spill + taylor_at(tate_series(ctx_, std::move(poly_in_s)), -c);
        }
        out.tail_ = tail_ * poly + spill;
        // |poly| <= q^{-shift/r} on every sampled disk
        long long shift = EXACT_PREC;
        long long smax = max_radius_rlog();
        for (int l = 0; l <= dp; ++l)
            if (!poly.coeff(l).is_zero())
                shift = std::min(shift, poly.coeff(l).val() - l * smax);
        out.tail_bound_ = sat_add(tail_bound_, shift);
        return out;
    }

    /// Frobenius twist: the part at index i moves to i+1 with q-powered
    /// coefficients; whatever leaves the tracked range is absorbed into the
    /// neglect bound (it must lie below `threshold`, else the horizon guard
    /// has been exhausted).
    mero_fn twisted(long long threshold) const {
        mero_fn out(ctx_, cap_, horizon_, guard_);
        for (int i = 0; i <= tracked(); ++i) {
            for (int k = 1; k <= cap_; ++k) {
                const cinf_num& c = part(i, k);
                if (c.is_zero() && c.exact()) continue;
                cinf_num cq = c.qpow(1);
                if (i + 1 <= tracked()) {
                    out.add_part(i + 1, k, cq);
                } else {
                    long long bound = cq.is_zero()
                                          ? cq.prec()
                                          : sat_add(cq.val(), static_cast<long long>(ctx_->r) *
                                                                  ipow(ctx_->q(), i + 1));
                    if (bound < threshold)
                        throw precision_error("mero: twist pushed a significant pole beyond the guard band",
                                              bound, threshold);
                    out.absorb_neglected(bound);
                }
            }
        }
        out.tail_ = twist(tail_);
        out.tail_bound_ = std::min(out.tail_bound_,
                                   tail_bound_ >= EXACT_PREC ? EXACT_PREC
                                                             : tail_bound_ * ctx_->q());
        return out;
    }

    /// Largest log-radius (in 1/r units) at which bounds are quoted.
    long long max_radius_rlog() const {
        return static_cast<long long>(ctx_->r) * ipow(ctx_->q(), horizon_);
    }

    static long long ipow(long long b, int e) {
        long long r = 1;
        for (int i = 0; i < e; ++i) r *= b;
        return r;
    }

private:
    static void check_compat(const mero_fn& a, const mero_fn& b) {
        if (a.horizon_ != b.horizon_ || a.guard_ != b.guard_)
            throw domain_error("mero: mismatched horizon/guard");
    }

    cinf_ctx_ptr ctx_;
    int cap_ = 0, horizon_ = 0, guard_ = 0;
    std::vector<std::vector<cinf_num>> parts_;
    tate_series tail_;
    long long tail_bound_ = EXACT_PREC;
};

/// d^(j) of c (t-a)^{-k} is C(-k,j) c (t-a)^{-k-j}; the tail differentiates
/// coefficientwise. Pole orders grow by j, so the output carries a larger cap.
inline mero_fn hyperderivative_mero(const mero_fn& g, int j) {
    if (j == 0) return g;
    auto ctx = g.ctx();
    mero_fn out(ctx, g.order_cap() + j, g.horizon(), g.guard());
    for (int i = 0; i <= g.tracked(); ++i)
        for (int k = 1; k <= g.order_cap(); ++k) {
            const cinf_num& c = g.part(i, k);
            if (c.is_zero() && c.exact()) continue;
            int b = binom_mod_p(-k, j, ctx->p());
            out.add_part(i, k + j, c.scaled(ctx->F->from_int(b)));
        }
    out.set_tail(hyperderivative(g.tail(), j));
    out.absorb_neglected(g.tail_bound());
    return out;
}

struct disk_expansion {
    tate_series series;
    long long err_v; // valuation floor of everything not represented
};

/// Expand on the unit disk to degree cap: each principal part becomes a
/// geometric series, the tail is kept as is.
inline disk_expansion expand_on_disk(const mero_fn& g, int cap) {
    auto ctx = g.ctx();
    const fq_field& F = *ctx->F;
    std::vector<cinf_num> out(static_cast<size_t>(cap) + 1, cinf_num::zero(ctx));
    long long err = g.tail_bound();
    long long dropped_tail = EXACT_PREC;
    auto tail_trunc = g.tail().truncated_deg(cap, &dropped_tail);
    err = std::min(err, dropped_tail);
    for (int n = 0; n <= std::min(cap, tail_trunc.degree()); ++n)
        out[static_cast<size_t>(n)] = tail_trunc.coeff(n);

    for (int i = 0; i <= g.tracked(); ++i) {
        cinf_num c = g.pole_point(i);
        cinf_num cinv = cinf_num::monomial(ctx, 1, static_cast<long long>(ctx->r) * mero_fn::ipow(ctx->q(), i));
        for (int k = 1; k <= g.order_cap(); ++k) {
            const cinf_num& a = g.part(i, k);
            if (a.is_zero() && a.exact()) continue;
            // (t-c)^{-k} = (-1)^k c^{-k} sum_n C(n+k-1, k-1) (t/c)^n
            int sign = (k % 2 == 0 || ctx->p() == 2) ? 1 : ctx->p() - 1;
            cinf_num base = a.scaled(F.from_int(sign)) * cinv.pow(k);
            cinf_num cpow = cinf_num::one(ctx);
            for (int n = 0; n <= cap; ++n) {
                int b = binom_mod_p(n + k - 1, k - 1, ctx->p());
                if (b != 0)
                    out[static_cast<size_t>(n)] =
                        out[static_cast<size_t>(n)] + base.scaled(F.from_int(b)) * cpow;
                cpow = cpow * cinv;
            }
            if (!a.is_zero())
                err = std::min(err, a.val() + static_cast<long long>(ctx->r) *
                                                  mero_fn::ipow(ctx->q(), i) * (k + cap + 1));
        }
    }
    return {tate_series(ctx, std::move(out)), err};
}

/**
 * Build a mero_fn from a proper rational function num / prod_i (t-c_i)^{m_i},
 * poles at the orbit points c_i = theta^{q^i} with multiplicities mult[i]
 * (index = orbit position). Principal parts are obtained from truncated local
 * expansions; poles beyond the tracked range fold into the neglect bound.
 */
inline mero_fn mero_from_rational(const cinf_ctx_ptr& ctx, const tate_series& num,
                                  const std::vector<int>& mult, int order_cap, int horizon,
                                  int guard) {
    long long W = 2 * ctx->P; // relative working window for exact inputs
    mero_fn out(ctx, order_cap, horizon, guard);
    long long total_deg = 0;
    for (int m : mult) total_deg += m;
    if (num.degree() >= total_deg)
        throw domain_error("mero_from_rational: rational function must be proper");

    std::vector<cinf_num> c(mult.size());
    for (size_t i = 0; i < mult.size(); ++i) {
        c[i] = cinf_num::theta_pow(ctx).qpow(static_cast<int>(i));
        c[i] = c[i].truncated(c[i].val() + W);
    }

    for (size_t i = 0; i < mult.size(); ++i) {
        int mi = mult[i];
        if (mi == 0) continue;
        if (mi > order_cap && static_cast<int>(i) <= horizon + guard)
            throw domain_error("mero_from_rational: pole order exceeds cap");
        // local expansion around c_i of num / cof, cof = prod_{j != i} (t-c_j)^{m_j}
        // in s = t - c_i, keep s-degree < mi
        tate_series cof(ctx, {cinf_num::one(ctx)});
        for (size_t j = 0; j < mult.size(); ++j) {
            if (j == i) continue;
            tate_series fac(ctx, {c[i] - c[j], cinf_num::one(ctx)}); // s + (c_i - c_j)
            for (int rep = 0; rep < mult[j]; ++rep) cof = (cof * fac).truncated_deg(mi - 1);
        }
        tate_series num_s = taylor_at(num, c[i]).truncated_deg(mi - 1);
        tate_series h = (num_s * series_inverse(cof, mi - 1)).truncated_deg(mi - 1);
        // h_l is the coefficient of (t-c_i)^{l-mi}
        for (int l = 0; l < mi; ++l) {
            cinf_num coeff = h.coeff(l);
            int k = mi - l;
            if (static_cast<int>(i) <= horizon + guard) {
                out.add_part(static_cast<int>(i), k, coeff);
            } else if (!coeff.is_zero()) {
                out.absorb_neglected(coeff.val() + static_cast<long long>(ctx->r) *
                                                       mero_fn::ipow(ctx->q(), static_cast<int>(i)) * k);
            }
        }
    }
    return out;
}

struct holomorphy_report {
    bool pass;
    int max_order;
    bool slope_ok;
    long long min_slope;
};

/**
 * Evidence that g is meromorphic with pole orders <= n along the orbit and
 * holomorphic elsewhere on disks of log-radius up to q^horizon: exact order
 * check on the stored parts, and a decay (slope) test on the stored tail
 * coefficients over their last quarter.
 */
inline holomorphy_report holomorphy_check(const mero_fn& g, int n, long long threshold) {
    holomorphy_report rep{};
    rep.max_order = g.max_pole_order(threshold);
    long long smax = g.max_radius_rlog();
    const auto& cs = g.tail().coeffs();
    int deg = g.tail().degree();
    rep.min_slope = EXACT_PREC;
    rep.slope_ok = true;
    if (deg >= 8) {
        int window = std::max(4, deg / 4);
        long long prev_v = NORM_NEG_INF;
        bool have_prev = false;
        for (int k = deg - window; k <= deg; ++k) {
            const auto& ck = cs[static_cast<size_t>(k)];
            long long v = ck.is_zero() ? (ck.exact() ? EXACT_PREC : ck.prec()) : ck.val();
            if (v >= EXACT_PREC) continue; // exact zero: no constraint
            if (have_prev) rep.min_slope = std::min(rep.min_slope, v - prev_v);
            prev_v = v;
            have_prev = true;
        }
        rep.slope_ok = rep.min_slope > smax;
    }
    if (g.tail_bound() < threshold)
        throw precision_error("holomorphy_check: neglected terms above threshold",
                              g.tail_bound(), threshold);
    rep.pass = rep.max_order <= n && rep.slope_ok;
    return rep;
}

} // namespace tmod
