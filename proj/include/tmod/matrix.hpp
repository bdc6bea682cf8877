#pragma once

#include <utility>
#include <vector>

#include "tmod/cinf.hpp"

namespace tmod {

using cvec = std::vector<cinf_num>;

/// Dense square matrix over the C_infty model.
class cmat {
public:
    cmat() = default;
    cmat(cinf_ctx_ptr ctx, int n)
        : ctx_(std::move(ctx)), n_(n),
          a_(static_cast<size_t>(n) * n, cinf_num::zero(ctx_)) {}

    static cmat identity(const cinf_ctx_ptr& ctx, int n) {
        cmat m(ctx, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = cinf_num::one(ctx);
        return m;
    }

    int dim() const { return n_; }
    const cinf_ctx_ptr& ctx() const { return ctx_; }

    cinf_num& at(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
    const cinf_num& at(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

    bool is_zero() const {
        for (const auto& x : a_)
            if (!x.is_zero()) return false;
        return true;
    }

    long long min_val() const {
        long long v = EXACT_PREC;
        for (const auto& x : a_) v = std::min(v, x.is_zero() ? x.prec() : x.val());
        return v;
    }

    friend cmat operator+(const cmat& x, const cmat& y) {
        cmat out(x.ctx_, x.n_);
        for (size_t i = 0; i < x.a_.size(); ++i) out.a_[i] = x.a_[i] + y.a_[i];
        return out;
    }

    friend cmat operator-(const cmat& x, const cmat& y) {
        cmat out(x.ctx_, x.n_);
        for (size_t i = 0; i < x.a_.size(); ++i) out.a_[i] = x.a_[i] - y.a_[i];
        return out;
    }

    friend cmat operator*(const cmat& x, const cmat& y) {
        cmat out(x.ctx_, x.n_);
        for (int i = 0; i < x.n_; ++i)
            for (int j = 0; j < x.n_; ++j) {
                cinf_num acc = cinf_num::zero(x.ctx_);
                for (int k = 0; k < x.n_; ++k) acc = acc + x.at(i, k) * y.at(k, j);
                out.at(i, j) = acc;
            }
        return out;
    }

    cmat scaled(const cinf_num& c) const {
        cmat out(ctx_, n_);
        for (size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] * c;
        return out;
    }

    /// Entrywise q^i power.
    cmat qpow(int i) const {
        cmat out(ctx_, n_);
        for (size_t k = 0; k < a_.size(); ++k) out.a_[k] = a_[k].qpow(i);
        return out;
    }

    cvec apply(const cvec& v) const {
        cvec out(static_cast<size_t>(n_), cinf_num::zero(ctx_));
        for (int i = 0; i < n_; ++i) {
            cinf_num acc = cinf_num::zero(ctx_);
            for (int j = 0; j < n_; ++j) acc = acc + at(i, j) * v[static_cast<size_t>(j)];
            out[static_cast<size_t>(i)] = acc;
        }
        return out;
    }

    cmat pow(int k) const {
        cmat acc = identity(ctx_, n_);
        for (int i = 0; i < k; ++i) acc = acc * *this;
        return acc;
    }

    /// Gauss-Jordan inverse, pivoting on the largest entry (smallest valuation).
    cmat inverse() const {
        cmat a = *this;
        cmat inv = identity(ctx_, n_);
        for (int col = 0; col < n_; ++col) {
            int piv = -1;
            long long best = EXACT_PREC;
            for (int row = col; row < n_; ++row) {
                const cinf_num& x = a.at(row, col);
                if (!x.is_zero() && x.val() < best) { best = x.val(); piv = row; }
            }
            if (piv < 0) throw domain_error("cmat: matrix is singular at working precision");
            if (piv != col) {
                for (int j = 0; j < n_; ++j) {
                    std::swap(a.at(piv, j), a.at(col, j));
                    std::swap(inv.at(piv, j), inv.at(col, j));
                }
            }
            cinf_num pinv = a.at(col, col).inv();
            for (int j = 0; j < n_; ++j) {
                a.at(col, j) = a.at(col, j) * pinv;
                inv.at(col, j) = inv.at(col, j) * pinv;
            }
            for (int row = 0; row < n_; ++row) {
                if (row == col) continue;
                cinf_num f = a.at(row, col);
                if (f.is_zero() && f.exact()) continue;
                for (int j = 0; j < n_; ++j) {
                    a.at(row, j) = a.at(row, j) - f * a.at(col, j);
                    inv.at(row, j) = inv.at(row, j) - f * inv.at(col, j);
                }
            }
        }
        return inv;
    }

private:
    cinf_ctx_ptr ctx_;
    int n_ = 0;
    cvec a_;
};

/**
 * Polynomial in the q-Frobenius tau with matrix coefficients,
 * M = M_0 + M_1 tau + ... + M_s tau^s, under tau * c = c^q * tau.
 */
struct tau_poly {
    std::vector<cmat> mats;

    int deg() const { return static_cast<int>(mats.size()) - 1; }
    int dim() const { return mats.empty() ? 0 : mats[0].dim(); }
    const cinf_ctx_ptr& ctx() const { return mats.at(0).ctx(); }

    const cmat& coeff(int i) const { return mats.at(static_cast<size_t>(i)); }

    static tau_poly from(std::vector<cmat> ms) {
        while (ms.size() > 1 && ms.back().is_zero()) ms.pop_back();
        return tau_poly{std::move(ms)};
    }

    friend tau_poly operator+(const tau_poly& x, const tau_poly& y) {
        std::vector<cmat> out;
        int s = std::max(x.deg(), y.deg());
        for (int i = 0; i <= s; ++i) {
            if (i <= x.deg() && i <= y.deg()) out.push_back(x.coeff(i) + y.coeff(i));
            else if (i <= x.deg()) out.push_back(x.coeff(i));
            else out.push_back(y.coeff(i));
        }
        return from(std::move(out));
    }

    friend tau_poly operator*(const tau_poly& x, const tau_poly& y) {
        auto ctx = x.ctx();
        int n = x.dim();
        std::vector<cmat> out(static_cast<size_t>(x.deg() + y.deg()) + 1, cmat(ctx, n));
        for (int i = 0; i <= x.deg(); ++i)
            for (int j = 0; j <= y.deg(); ++j)
                out[static_cast<size_t>(i + j)] =
                    out[static_cast<size_t>(i + j)] + x.coeff(i) * y.coeff(j).qpow(i);
        return from(std::move(out));
    }

    /// Inverse in Mat_d(C_infty{tau}) when it terminates (M_0 invertible and
    /// the higher part topologically nilpotent enough to die in `max_terms`).
    tau_poly inverse(int max_terms = 16) const {
        auto ctx = this->ctx();
        int n = dim();
        cmat m0inv = coeff(0).inverse();
        // M = M_0 (I + R), R = M_0^{-1}(M_1 tau + ...); M^{-1} = (sum (-R)^k) M_0^{-1}
        tau_poly r{{cmat(ctx, n)}};
        for (int i = 1; i <= deg(); ++i) r.mats.push_back(m0inv * coeff(i));
        tau_poly acc{{cmat::identity(ctx, n)}};
        tau_poly term{{cmat::identity(ctx, n)}};
        for (int k = 1; k <= max_terms; ++k) {
            term = term * r;
            bool zero = true;
            for (const auto& m : term.mats) zero = zero && m.is_zero();
            if (zero) break;
            if (k == max_terms)
                throw domain_error("tau_poly: inverse does not terminate (tau-part not nilpotent)");
            // acc += (-1)^k term
            tau_poly signed_term = term;
            if (k % 2 == 1)
                for (auto& m : signed_term.mats) m = cmat(ctx, n) - m;
            acc = acc + signed_term;
        }
        tau_poly m0i{{m0inv}};
        return acc * m0i;
    }
};

} // namespace tmod
