#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tmod/errors.hpp"
#include "tmod/fields.hpp"

namespace tmod {

/// Exponents are in pi-units: the monomial pi^k has valuation k/r against the
/// convention v(theta) = -1. prec values at or above EXACT_PREC mean "exact".
inline constexpr long long EXACT_PREC = std::numeric_limits<long long>::max() / 8;

inline long long sat_add(long long a, long long b) {
    if (a >= EXACT_PREC || b >= EXACT_PREC) return EXACT_PREC;
    return a + b;
}

/// Shared parameters of the truncated model of C_infty: the residue field
/// F_{q^m}, the ramification index r (pi^r = 1/theta), and the relative
/// precision budget P injected by series operations (inverse, roots).
struct cinf_ctx {
    cinf_ctx(int p, int e, int m, int r, long long P)
        : F(std::make_shared<const fq_field>(p, e, m)), r(r), P(P) {
        if (r < 1) throw config_error("cinf: ramification index must be >= 1");
        if (P < 1) throw config_error("cinf: precision must be >= 1");
    }
    fq_field_ptr F;
    int r;
    long long P;
    int q() const { return F->q; }
    int p() const { return F->p; }

    bool operator==(const cinf_ctx& o) const {
        return *F == *o.F && r == o.r && P == o.P;
    }
};

using cinf_ctx_ptr = std::shared_ptr<const cinf_ctx>;

inline cinf_ctx_ptr make_cinf_ctx(int p, int e, int m, int r, long long P) {
    return std::make_shared<const cinf_ctx>(p, e, m, r, P);
}

/**
 * Element of the truncated model of C_infty: a finite Laurent expansion
 *   x = sum_k d_k pi^k   (d_k in F_{q^m}, k in Z),
 * together with prec: every exponent >= prec is unknown. Values are immutable
 * after construction; all operations are pure and propagate precision
 * worst-case. |x| = q^{-v(x)} with v in (1/r)Z, so |theta| = q.
 */
class cinf_num {
public:
    cinf_num() = default;
    explicit cinf_num(cinf_ctx_ptr ctx, long long prec = EXACT_PREC)
        : ctx_(std::move(ctx)), prec_(prec) {}

    static cinf_num zero(const cinf_ctx_ptr& ctx) { return cinf_num(ctx); }

    static cinf_num monomial(const cinf_ctx_ptr& ctx, fq_elem c, long long k,
                             long long prec = EXACT_PREC) {
        cinf_num x(ctx, prec);
        if (c != 0 && k < prec) x.digits_.emplace_back(k, c);
        return x;
    }

    static cinf_num one(const cinf_ctx_ptr& ctx) { return monomial(ctx, 1, 0); }

    static cinf_num from_int(const cinf_ctx_ptr& ctx, long long c) {
        return monomial(ctx, ctx->F->from_int(c), 0);
    }

    /// theta^k, exact: a single digit at exponent -r*k.
    static cinf_num theta_pow(const cinf_ctx_ptr& ctx, long long k = 1) {
        return monomial(ctx, 1, -static_cast<long long>(ctx->r) * k);
    }

    const cinf_ctx_ptr& ctx() const { return ctx_; }
    long long prec() const { return prec_; }
    bool exact() const { return prec_ >= EXACT_PREC; }

    /// Zero test at the element's own precision.
    bool is_zero() const { return digits_.empty(); }

    /// Valuation in pi-units; for a (precision-)zero element this is prec.
    long long val() const { return digits_.empty() ? prec_ : digits_.front().first; }

    const std::vector<std::pair<long long, fq_elem>>& digits() const { return digits_; }

    fq_elem digit_at(long long k) const {
        auto it = std::lower_bound(digits_.begin(), digits_.end(), k,
                                   [](const auto& d, long long kk) { return d.first < kk; });
        return (it != digits_.end() && it->first == k) ? it->second : 0;
    }

    fq_elem leading_digit() const {
        if (digits_.empty()) throw domain_error("cinf: leading digit of zero");
        return digits_.front().second;
    }

    cinf_num operator-() const {
        cinf_num out(ctx_, prec_);
        out.digits_ = digits_;
        for (auto& d : out.digits_) d.second = ctx_->F->neg(d.second);
        return out;
    }

    friend cinf_num operator+(const cinf_num& a, const cinf_num& b) {
        check_ctx(a, b);
        cinf_num out(a.ctx_, std::min(a.prec_, b.prec_));
        const fq_field& F = *a.ctx_->F;
        auto ia = a.digits_.begin(), ib = b.digits_.begin();
        while (ia != a.digits_.end() || ib != b.digits_.end()) {
            long long k;
            fq_elem c;
            if (ib == b.digits_.end() || (ia != a.digits_.end() && ia->first < ib->first)) {
                k = ia->first; c = ia->second; ++ia;
            } else if (ia == a.digits_.end() || ib->first < ia->first) {
                k = ib->first; c = ib->second; ++ib;
            } else {
                k = ia->first; c = F.add(ia->second, ib->second); ++ia; ++ib;
            }
            if (k >= out.prec_) break;
            if (c != 0) out.digits_.emplace_back(k, c);
        }
        return out;
    }

    friend cinf_num operator-(const cinf_num& a, const cinf_num& b) { return a + (-b); }

    friend cinf_num operator*(const cinf_num& a, const cinf_num& b) {
        check_ctx(a, b);
        long long prec = std::min(sat_add(a.prec_, b.val()), sat_add(b.prec_, a.val()));
        cinf_num out(a.ctx_, prec);
        if (a.digits_.empty() || b.digits_.empty()) return out;
        const fq_field& F = *a.ctx_->F;
        std::vector<std::pair<long long, fq_elem>> acc;
        acc.reserve(a.digits_.size() * b.digits_.size() / 2 + 8);
        for (const auto& [ka, ca] : a.digits_) {
            if (prec < EXACT_PREC && ka + b.val() >= prec) break;
            for (const auto& [kb, cb] : b.digits_) {
                long long k = ka + kb;
                if (k >= prec) break;
                acc.emplace_back(k, F.mul(ca, cb));
            }
        }
        std::sort(acc.begin(), acc.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        for (const auto& [k, c] : acc) {
            if (!out.digits_.empty() && out.digits_.back().first == k)
                out.digits_.back().second = F.add(out.digits_.back().second, c);
            else
                out.digits_.emplace_back(k, c);
        }
        std::erase_if(out.digits_, [](const auto& d) { return d.second == 0; });
        return out;
    }

    cinf_num scaled(fq_elem c) const {
        cinf_num out(ctx_, prec_);
        if (c == 0) return out;
        out.digits_ = digits_;
        for (auto& d : out.digits_) d.second = ctx_->F->mul(d.second, c);
        return out;
    }

    /// x^{q^i}: exact Frobenius power. Exponents scale by q^i, digits are
    /// raised to q^i, and so does the precision bound.
    cinf_num qpow(int i) const {
        if (i == 0) return *this;
        if (i < 0) throw domain_error("cinf: inverse Frobenius not supported");
        long long qi = 1;
        for (int k = 0; k < i; ++k) qi *= ctx_->q();
        cinf_num out(ctx_, prec_ >= EXACT_PREC ? EXACT_PREC : prec_ * qi);
        out.digits_.reserve(digits_.size());
        for (const auto& [k, c] : digits_)
            out.digits_.emplace_back(k * qi, ctx_->F->frob_q_iter(c, i));
        return out;
    }

    /// Leading-term inversion followed by Newton refinement of the 1-unit part.
    /// Exact monomials invert exactly.
    cinf_num inv() const {
        if (digits_.empty())
            throw precision_error("cinf: inverse of (precision-)zero", prec_, prec_);
        const fq_field& F = *ctx_->F;
        long long v = val();
        if (digits_.size() == 1 && exact())
            return monomial(ctx_, F.inv(leading_digit()), -v);
        // relative precision available for the result
        long long rel = exact() ? ctx_->P : prec_ - v;
        if (rel <= 0) throw precision_error("cinf: no precision left for inverse", rel, 1);
        long long out_prec = sat_add(-v, rel < EXACT_PREC ? rel : ctx_->P);

        // z approximates x^{-1}; start from the inverse of the leading term.
        cinf_num z = monomial(ctx_, F.inv(leading_digit()), -v, out_prec);
        cinf_num onev = one(ctx_);
        cinf_num xt = truncated(std::min(prec_, sat_add(v, rel)));
        while (true) {
            cinf_num err = onev - xt * z; // valuation strictly positive, doubles per step
            if (err.is_zero() || err.val() + (-v) >= out_prec) break;
            z = z + z * err;
        }
        cinf_num out = z.truncated(out_prec);
        return out;
    }

    /// Deterministic k-th root: exhaustive smallest root of the leading digit,
    /// then Newton lifting of the 1-unit. Requires gcd(k, p) = 1, k | v(x).
    cinf_num kth_root(long long k) const {
        if (k <= 0) throw domain_error("cinf: root order must be positive");
        if (k == 1) return *this;
        if (k % ctx_->p() == 0) throw domain_error("cinf: root order divisible by p");
        if (digits_.empty()) throw domain_error("cinf: k-th root of (precision-)zero");
        const fq_field& F = *ctx_->F;
        long long v = val();
        if (v % k != 0)
            throw domain_error("cinf: valuation " + std::to_string(v) +
                               " not divisible by root order " + std::to_string(k) +
                               " in (1/r)-units");
        fq_elem lead_root = 0;
        if (!F.kth_root(leading_digit(), k, lead_root))
            throw domain_error("cinf: leading digit has no " + std::to_string(k) +
                               "-th root in the residue field");

        long long rel = exact() ? ctx_->P : prec_ - v;
        long long out_prec = sat_add(-(-v / k), rel); // v/k + rel
        cinf_num y = monomial(ctx_, lead_root, v / k, out_prec);
        cinf_num kinv = from_int(ctx_, 1).scaled(F.inv(F.from_int(k)));
        cinf_num xt = truncated(std::min(prec_, sat_add(v, rel)));
        while (true) {
            cinf_num err = y.pow(k) - xt;
            if (err.is_zero() || err.val() - v + v / k >= out_prec) break;
            // y <- y - (y^k - x) / (k y^{k-1})
            cinf_num deriv = y.pow(k - 1).scaled(F.from_int(k));
            y = y - err * deriv.inv();
            y = y.truncated(out_prec);
        }
        if (exact() && y.digits_.size() == 1) {
            // the root of an exact monomial may itself be exact
            cinf_num cand = monomial(ctx_, y.leading_digit(), y.val());
            cinf_num diff = cand.pow(k) - *this;
            if (diff.is_zero() && diff.exact()) return cand;
        }
        return y.truncated(out_prec);
    }

    cinf_num pow(long long k) const {
        if (k < 0) return inv().pow(-k);
        cinf_num acc = one(ctx_);
        cinf_num base = *this;
        while (k > 0) {
            if (k & 1) acc = acc * base;
            base = k > 1 ? base * base : base;
            k >>= 1;
        }
        return acc;
    }

    /// Same value, weaker precision claim.
    cinf_num truncated(long long new_prec) const {
        if (new_prec >= prec_) return *this;
        cinf_num out(ctx_, new_prec);
        for (const auto& d : digits_) {
            if (d.first >= new_prec) break;
            out.digits_.push_back(d);
        }
        return out;
    }

    std::string to_string() const {
        std::string s;
        for (const auto& [k, c] : digits_) {
            if (!s.empty()) s += " + ";
            std::string cs = ctx_->F->to_string(c);
            if (cs.find('+') != std::string::npos) cs = "(" + cs + ")";
            s += cs + "*pi^" + std::to_string(k);
        }
        if (s.empty()) s = "0";
        if (!exact()) s += " + O(pi^" + std::to_string(prec_) + ")";
        return s;
    }

private:
    static void check_ctx(const cinf_num& a, const cinf_num& b) {
        if (!a.ctx_ || !b.ctx_ || !(*a.ctx_ == *b.ctx_))
            throw domain_error("cinf: mismatched field parameters");
    }

    cinf_ctx_ptr ctx_;
    std::vector<std::pair<long long, fq_elem>> digits_;
    long long prec_ = EXACT_PREC;
};

/// The fixed (q-1)th root of -theta. Deterministic through the residue-field
/// element order; requires r to be a multiple of q-1.
inline cinf_num lambda_theta(const cinf_ctx_ptr& ctx) {
    int q = ctx->q();
    if (q == 2) return cinf_num::theta_pow(ctx, 1); // -theta = theta
    if (ctx->r % (q - 1) != 0)
        throw config_error("lambda_theta: r must be a multiple of q-1");
    return (-cinf_num::theta_pow(ctx, 1)).kth_root(q - 1);
}

/// C(n, j) mod p by Lucas' theorem; n may be negative (via the reflection
/// C(-n, j) = (-1)^j C(n+j-1, j)).
inline int binom_mod_p(long long n, long long j, int p) {
    if (j < 0) return 0;
    if (n < 0) {
        int sign = (j % 2 == 0 || p == 2) ? 1 : p - 1;
        long long nn = -n + j - 1;
        return static_cast<int>((static_cast<long long>(sign) * binom_mod_p(nn, j, p)) % p);
    }
    long long res = 1;
    while (j > 0 || n > 0) {
        long long nd = n % p, jd = j % p;
        if (jd > nd) return 0;
        // C(nd, jd) mod p for digits < p
        long long c = 1;
        for (long long i = 0; i < jd; ++i) {
            c = (c * ((nd - i) % p)) % p;
            // divide by (i+1) mod p
            long long inv = 1, base = (i + 1) % p, exp = p - 2;
            while (exp > 0) {
                if (exp & 1) inv = (inv * base) % p;
                base = (base * base) % p;
                exp >>= 1;
            }
            c = (c * inv) % p;
        }
        res = (res * c) % p;
        n /= p; j /= p;
    }
    return static_cast<int>(res);
}

} // namespace tmod
