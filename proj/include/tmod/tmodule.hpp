#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tmod/matrix.hpp"
#include "tmod/mero.hpp"

namespace tmod {

/**
 * Anderson t-module over the C_infty model in fixed coordinates: the dimension
 * d and the tau-polynomial phi(t) = A_0 + A_1 tau + ... + A_s tau^s acting on
 * G_a^d. Validated so that N = A_0 - theta*Id satisfies N^d = 0 exactly.
 */
struct t_module {
    std::string name;
    tau_poly phi_t;
    std::string provenance;

    int dim() const { return phi_t.dim(); }
    const cinf_ctx_ptr& ctx() const { return phi_t.ctx(); }

    const cmat& a0() const { return phi_t.coeff(0); }

    /// N = dphi(t) - theta Id, the nilpotent part of the tangent action.
    cmat nilpotent() const {
        auto c = ctx();
        return a0() - cmat::identity(c, dim()).scaled(cinf_num::theta_pow(c));
    }
};

/// Nilpotency validation: returns the first power k <= d with N^k = 0, or the
/// offending power via exception.
inline void validate_t_module(const t_module& e) {
    if (e.phi_t.mats.empty()) throw domain_error("t_module: empty tau polynomial");
    if (e.phi_t.deg() < 1 || e.phi_t.coeff(e.phi_t.deg()).is_zero())
        throw domain_error("t_module '" + e.name + "': leading tau coefficient vanishes");
    cmat n = e.nilpotent();
    cmat pw = cmat::identity(e.ctx(), e.dim());
    for (int k = 1; k <= e.dim(); ++k) pw = pw * n;
    if (!pw.is_zero())
        throw domain_error("t_module '" + e.name + "': (A_0 - theta*Id)^" +
                           std::to_string(e.dim()) + " != 0, tangent action is not nilpotent");
}

/// The Carlitz module: phi(t) = theta + tau on G_a.
inline t_module carlitz(const cinf_ctx_ptr& ctx) {
    cmat a0(ctx, 1), a1(ctx, 1);
    a0.at(0, 0) = cinf_num::theta_pow(ctx);
    a1.at(0, 0) = cinf_num::one(ctx);
    t_module e{"carlitz", tau_poly{{a0, a1}}, "carlitz"};
    validate_t_module(e);
    return e;
}

/// n-th tensor power of the Carlitz module: theta on the diagonal, 1 on the
/// superdiagonal, and a single tau in the lower-left corner.
inline t_module carlitz_tensor(const cinf_ctx_ptr& ctx, int n) {
    if (n < 1) throw config_error("carlitz_tensor: n >= 1 required");
    cmat a0(ctx, n), a1(ctx, n);
    for (int i = 0; i < n; ++i) {
        a0.at(i, i) = cinf_num::theta_pow(ctx);
        if (i + 1 < n) a0.at(i, i + 1) = cinf_num::one(ctx);
    }
    a1.at(n - 1, 0) = cinf_num::one(ctx);
    t_module e{"carlitz_tensor:" + std::to_string(n), tau_poly{{a0, a1}},
               "carlitz_tensor(" + std::to_string(n) + ")"};
    validate_t_module(e);
    return e;
}

/// k-th prolongation of the Carlitz module: theta Id minus a superdiagonal of
/// ones, plus Id*tau. This shape makes the hyperderivative stack of omega
/// satisfy the special-function equation (checked downstream against that
/// oracle whenever the basis is constructed).
inline t_module prolongation(const cinf_ctx_ptr& ctx, int k) {
    if (k < 0) throw config_error("prolongation: k >= 0 required");
    int d = k + 1;
    cmat a0(ctx, d), a1(ctx, d);
    for (int i = 0; i < d; ++i) {
        a0.at(i, i) = cinf_num::theta_pow(ctx);
        if (i + 1 < d) a0.at(i, i + 1) = -cinf_num::one(ctx);
        a1.at(i, i) = cinf_num::one(ctx);
    }
    t_module e{"prolongation:" + std::to_string(k), tau_poly{{a0, a1}},
               "prolongation(" + std::to_string(k) + ")"};
    validate_t_module(e);
    return e;
}

inline t_module direct_sum(const t_module& x, const t_module& y) {
    auto ctx = x.ctx();
    int dx = x.dim(), dy = y.dim(), d = dx + dy;
    int s = std::max(x.phi_t.deg(), y.phi_t.deg());
    std::vector<cmat> mats;
    for (int j = 0; j <= s; ++j) {
        cmat m(ctx, d);
        if (j <= x.phi_t.deg())
            for (int i = 0; i < dx; ++i)
                for (int l = 0; l < dx; ++l) m.at(i, l) = x.phi_t.coeff(j).at(i, l);
        if (j <= y.phi_t.deg())
            for (int i = 0; i < dy; ++i)
                for (int l = 0; l < dy; ++l) m.at(dx + i, dx + l) = y.phi_t.coeff(j).at(i, l);
        mats.push_back(std::move(m));
    }
    t_module e{x.name + "+" + y.name, tau_poly::from(std::move(mats)),
               "direct_sum(" + x.provenance + "," + y.provenance + ")"};
    validate_t_module(e);
    return e;
}

inline t_module user_defined(std::string name, tau_poly phi) {
    t_module e{std::move(name), std::move(phi), "user_defined"};
    // report the offending power for diagnostics
    cmat n = e.nilpotent();
    cmat pw = cmat::identity(e.ctx(), e.dim());
    for (int k = 1; k <= e.dim(); ++k) pw = pw * n;
    if (!pw.is_zero())
        throw domain_error("user_defined t-module '" + e.name + "' rejected: (A_0-theta*Id)^" +
                           std::to_string(e.dim()) + " has an entry of size q^" +
                           std::to_string(-pw.min_val()) + "/" + std::to_string(e.ctx()->r) +
                           " above zero");
    validate_t_module(e);
    return e;
}

/// phi(a) for a = sum c_k t^k in F_q[t], by Horner composition in phi(t).
inline tau_poly phi_of_poly(const t_module& e, const std::vector<int>& a_coeffs) {
    auto ctx = e.ctx();
    int d = e.dim();
    tau_poly acc{{cmat(ctx, d)}};
    for (size_t k = a_coeffs.size(); k-- > 0;) {
        acc = acc * e.phi_t;
        cmat c0 = cmat::identity(ctx, d).scaled(cinf_num::from_int(ctx, a_coeffs[k]));
        acc = acc + tau_poly{{c0}};
    }
    return acc;
}

/// dphi(a) = a(A_0): the tangent action of a on Lie_E.
inline cmat dphi_of_poly(const t_module& e, const std::vector<int>& a_coeffs) {
    auto ctx = e.ctx();
    int d = e.dim();
    cmat acc(ctx, d);
    for (size_t k = a_coeffs.size(); k-- > 0;) {
        acc = acc * e.a0();
        acc = acc + cmat::identity(ctx, d).scaled(cinf_num::from_int(ctx, a_coeffs[k]));
    }
    return acc;
}

/// A tau-matrix polynomial acting on a vector of meromorphic functions:
/// M_0 w + M_1 w^(1) + ... + M_s w^(s).
inline std::vector<mero_fn> apply_tau_poly(const tau_poly& m, const std::vector<mero_fn>& w,
                                           long long threshold) {
    int d = m.dim();
    if (static_cast<int>(w.size()) != d)
        throw domain_error("apply_tau_poly: vector length != matrix dimension");
    std::vector<mero_fn> tw = w;
    std::vector<mero_fn> out;
    out.reserve(w.size());
    for (int i = 0; i < d; ++i)
        out.push_back(mero_fn(m.ctx(), w[0].order_cap(), w[0].horizon(), w[0].guard()));
    for (int j = 0; j <= m.deg(); ++j) {
        if (j > 0)
            for (auto& c : tw) c = c.twisted(threshold);
        const cmat& a = m.coeff(j);
        for (int i = 0; i < d; ++i)
            for (int l = 0; l < d; ++l) {
                const cinf_num& c = a.at(i, l);
                if (c.is_zero() && c.exact()) continue;
                out[static_cast<size_t>(i)] =
                    out[static_cast<size_t>(i)] + tw[static_cast<size_t>(l)].scaled(c);
            }
    }
    return out;
}

/// phi(t) acting on vectors of meromorphic functions.
inline std::vector<mero_fn> apply_phi_t(const t_module& e, const std::vector<mero_fn>& w,
                                        long long threshold) {
    if (static_cast<int>(w.size()) != e.dim())
        throw domain_error("apply_phi_t: vector length != module dimension");
    return apply_tau_poly(e.phi_t, w, threshold);
}

/// Same action on vectors of Tate series.
inline std::vector<tate_series> apply_phi_t(const t_module& e,
                                            const std::vector<tate_series>& w) {
    int d = e.dim();
    if (static_cast<int>(w.size()) != d)
        throw domain_error("apply_phi_t: vector length != module dimension");
    std::vector<tate_series> tw = w;
    std::vector<tate_series> out(w.size(), tate_series::zero(e.ctx()));
    for (int j = 0; j <= e.phi_t.deg(); ++j) {
        if (j > 0)
            for (auto& c : tw) c = twist(c);
        const cmat& a = e.phi_t.coeff(j);
        for (int i = 0; i < d; ++i)
            for (int l = 0; l < d; ++l) {
                const cinf_num& c = a.at(i, l);
                if (c.is_zero() && c.exact()) continue;
                out[static_cast<size_t>(i)] =
                    out[static_cast<size_t>(i)] + tw[static_cast<size_t>(l)].scaled(c);
            }
    }
    return out;
}

} // namespace tmod
