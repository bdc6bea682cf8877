#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "tmod/cinf.hpp"

namespace tmod {

/// -infinity stand-in for log-norms of (precision-)zero series.
inline constexpr long long NORM_NEG_INF = std::numeric_limits<long long>::min() / 8;

/**
 * Truncated power series / polynomial in t with cinf_num coefficients.
 * Models an element of C_infty<t>_rho restricted to degrees <= its length.
 * Log-radii and log-norms are integers in (1/r) log_q units throughout.
 */
class tate_series {
public:
    tate_series() = default;
    explicit tate_series(cinf_ctx_ptr ctx, long long rho_rlog = 0)
        : ctx_(std::move(ctx)), rho_rlog_(rho_rlog) {}
    tate_series(cinf_ctx_ptr ctx, std::vector<cinf_num> coeffs, long long rho_rlog = 0)
        : ctx_(std::move(ctx)), coeffs_(std::move(coeffs)), rho_rlog_(rho_rlog) {
        trim();
    }

    const cinf_ctx_ptr& ctx() const { return ctx_; }
    long long rho_rlog() const { return rho_rlog_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<cinf_num>& coeffs() const { return coeffs_; }

    const cinf_num coeff(int n) const {
        if (n < 0 || n >= static_cast<int>(coeffs_.size())) return cinf_num::zero(ctx_);
        return coeffs_[n];
    }

    bool is_zero() const {
        return std::all_of(coeffs_.begin(), coeffs_.end(),
                           [](const cinf_num& c) { return c.is_zero(); });
    }

    static tate_series zero(const cinf_ctx_ptr& ctx) { return tate_series(ctx); }

    static tate_series constant(const cinf_num& c) {
        return tate_series(c.ctx(), {c});
    }

    static tate_series monomial(const cinf_num& c, int n) {
        std::vector<cinf_num> v(static_cast<size_t>(n) + 1, cinf_num::zero(c.ctx()));
        v[static_cast<size_t>(n)] = c;
        return tate_series(c.ctx(), std::move(v));
    }

    /// t - c as a degree-1 polynomial.
    static tate_series t_minus(const cinf_num& c) {
        return tate_series(c.ctx(), {-c, cinf_num::one(c.ctx())});
    }

    friend tate_series operator+(const tate_series& a, const tate_series& b) {
        auto n = std::max(a.coeffs_.size(), b.coeffs_.size());
        std::vector<cinf_num> out;
        out.reserve(n);
        for (size_t i = 0; i < n; ++i) out.push_back(a.coeff(static_cast<int>(i)) + b.coeff(static_cast<int>(i)));
        return tate_series(a.ctx_ ? a.ctx_ : b.ctx_, std::move(out), std::max(a.rho_rlog_, b.rho_rlog_));
    }

    tate_series operator-() const {
        std::vector<cinf_num> out;
        out.reserve(coeffs_.size());
        for (const auto& c : coeffs_) out.push_back(-c);
        return tate_series(ctx_, std::move(out), rho_rlog_);
    }

    friend tate_series operator-(const tate_series& a, const tate_series& b) { return a + (-b); }

    friend tate_series operator*(const tate_series& a, const tate_series& b) {
        if (a.coeffs_.empty() || b.coeffs_.empty()) return tate_series(a.ctx_ ? a.ctx_ : b.ctx_);
        std::vector<cinf_num> out(a.coeffs_.size() + b.coeffs_.size() - 1,
                                  cinf_num::zero(a.ctx_));
        for (size_t i = 0; i < a.coeffs_.size(); ++i) {
            if (a.coeffs_[i].is_zero() && a.coeffs_[i].exact()) continue;
            for (size_t j = 0; j < b.coeffs_.size(); ++j)
                out[i + j] = out[i + j] + a.coeffs_[i] * b.coeffs_[j];
        }
        return tate_series(a.ctx_, std::move(out), std::min(a.rho_rlog_, b.rho_rlog_));
    }

    tate_series scaled(const cinf_num& c) const {
        std::vector<cinf_num> out;
        out.reserve(coeffs_.size());
        for (const auto& a : coeffs_) out.push_back(a * c);
        return tate_series(ctx_, std::move(out), rho_rlog_);
    }

    /// Truncate to degrees <= cap; reports the min valuation of dropped
    /// coefficients through `dropped` (EXACT_PREC when nothing real dropped).
    tate_series truncated_deg(int cap, long long* dropped = nullptr) const {
        long long dmin = EXACT_PREC;
        std::vector<cinf_num> out;
        for (size_t n = 0; n < coeffs_.size(); ++n) {
            if (static_cast<int>(n) <= cap) out.push_back(coeffs_[n]);
            else if (!coeffs_[n].is_zero()) dmin = std::min(dmin, coeffs_[n].val());
        }
        if (dropped) *dropped = dmin;
        return tate_series(ctx_, std::move(out), rho_rlog_);
    }

    cinf_num eval(const cinf_num& x) const {
        cinf_num acc = cinf_num::zero(ctx_ ? ctx_ : x.ctx());
        for (size_t i = coeffs_.size(); i-- > 0;) acc = acc * x + coeffs_[i];
        return acc;
    }

private:
    void trim() {
        while (!coeffs_.empty() && coeffs_.back().is_zero() && coeffs_.back().exact())
            coeffs_.pop_back();
    }

    cinf_ctx_ptr ctx_;
    std::vector<cinf_num> coeffs_;
    long long rho_rlog_ = 0;
};

/// log_q of the Gauss norm ||f||_rho = max_n |a_n| rho^n, in (1/r) units.
/// For C_infty[t] the defining infimum is attained coefficientwise.
inline long long gauss_norm_rlog(const tate_series& f, long long rho_rlog) {
    long long best = NORM_NEG_INF;
    const auto& cs = f.coeffs();
    for (size_t n = 0; n < cs.size(); ++n) {
        if (cs[n].is_zero()) continue;
        best = std::max(best, -cs[n].val() + static_cast<long long>(n) * rho_rlog);
    }
    return best;
}

/// Frobenius twist: sum a_n t^n -> sum a_n^q t^n.
inline tate_series twist(const tate_series& f, int i = 1) {
    std::vector<cinf_num> out;
    out.reserve(f.coeffs().size());
    for (const auto& c : f.coeffs()) out.push_back(c.qpow(i));
    return tate_series(f.ctx(), std::move(out), f.rho_rlog());
}

/// Divided-power derivative: a_n t^n -> C(n,j) a_n t^{n-j}.
inline tate_series hyperderivative(const tate_series& f, long long j) {
    if (j < 0) throw domain_error("hyperderivative: negative order");
    if (j == 0) return f;
    const auto& cs = f.coeffs();
    std::vector<cinf_num> out;
    int p = f.ctx()->p();
    for (size_t n = j; n < cs.size(); ++n) {
        int b = binom_mod_p(static_cast<long long>(n), j, p);
        out.push_back(cs[n].scaled(f.ctx()->F->from_int(b)));
    }
    return tate_series(f.ctx(), std::move(out), f.rho_rlog());
}

/// Taylor recentering: returns g with f(t) = sum_k g_k (t-c)^k, exactly.
/// g_k is the k-th hyperderivative of f at c.
inline tate_series taylor_at(const tate_series& f, const cinf_num& c) {
    const auto& cs = f.coeffs();
    int d = f.degree();
    if (d < 0) return f;
    int p = f.ctx()->p();
    std::vector<cinf_num> out(static_cast<size_t>(d) + 1, cinf_num::zero(f.ctx()));
    for (int k = 0; k <= d; ++k) {
        cinf_num acc = cinf_num::zero(f.ctx());
        cinf_num cpow = cinf_num::one(f.ctx());
        for (int n = k; n <= d; ++n) {
            int b = binom_mod_p(n, k, p);
            if (b != 0 && !cs[static_cast<size_t>(n)].is_zero())
                acc = acc + cs[static_cast<size_t>(n)].scaled(f.ctx()->F->from_int(b)) * cpow;
            cpow = cpow * c;
        }
        out[static_cast<size_t>(k)] = acc;
    }
    return tate_series(f.ctx(), std::move(out), f.rho_rlog());
}

/// Inverse of g as a power series in t, modulo t^{order+1}. g(0) must be a unit.
inline tate_series series_inverse(const tate_series& g, int order) {
    if (g.coeff(0).is_zero())
        throw domain_error("series_inverse: constant term is zero at precision");
    cinf_num c0inv = g.coeff(0).inv();
    std::vector<cinf_num> out(static_cast<size_t>(order) + 1, cinf_num::zero(g.ctx()));
    out[0] = c0inv;
    for (int n = 1; n <= order; ++n) {
        cinf_num acc = cinf_num::zero(g.ctx());
        for (int k = 1; k <= n; ++k) acc = acc + g.coeff(k) * out[static_cast<size_t>(n - k)];
        out[static_cast<size_t>(n)] = -(acc * c0inv);
    }
    return tate_series(g.ctx(), std::move(out), g.rho_rlog());
}

/// Euclidean division f = q*g + rem. The leading coefficient of g must be
/// invertible at precision.
inline std::pair<tate_series, tate_series> poly_divmod(const tate_series& f,
                                                       const tate_series& g) {
    int dg = g.degree();
    while (dg >= 0 && g.coeff(dg).is_zero()) --dg;
    if (dg < 0) throw domain_error("poly_divmod: division by zero polynomial");
    cinf_num lead_inv = g.coeff(dg).inv();
    std::vector<cinf_num> rem(f.coeffs());
    std::vector<cinf_num> quot;
    int df = static_cast<int>(rem.size()) - 1;
    if (df >= dg) quot.assign(static_cast<size_t>(df - dg) + 1, cinf_num::zero(f.ctx()));
    for (int k = df; k >= dg; --k) {
        cinf_num c = rem[static_cast<size_t>(k)] * lead_inv;
        quot[static_cast<size_t>(k - dg)] = c;
        if (c.is_zero()) continue;
        for (int j = 0; j <= dg; ++j)
            rem[static_cast<size_t>(k - dg + j)] =
                rem[static_cast<size_t>(k - dg + j)] - c * g.coeff(j);
    }
    if (df >= dg) rem.resize(static_cast<size_t>(dg));
    return {tate_series(f.ctx(), std::move(quot)), tate_series(f.ctx(), std::move(rem))};
}

} // namespace tmod
