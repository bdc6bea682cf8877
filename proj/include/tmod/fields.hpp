#pragma once

#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "tmod/errors.hpp"

namespace tmod {

/// Element of F_{p^n}, encoded as c_0 + c_1*p + ... + c_{n-1}*p^{n-1} where the
/// c_i are the coordinates over F_p in the power basis of the fixed modulus.
using fq_elem = std::uint32_t;

namespace detail {

// Dense polynomials over F_p, little-endian coefficients. Only used to set up
// field tables; sizes here are tiny.
inline std::vector<int> fp_poly_mod(std::vector<int> a, const std::vector<int>& m, int p) {
    const int dm = static_cast<int>(m.size()) - 1;
    while (static_cast<int>(a.size()) - 1 >= dm) {
        int da = static_cast<int>(a.size()) - 1;
        int lead = a[da];
        if (lead != 0) {
            for (int i = 0; i <= dm; ++i) {
                int& c = a[da - dm + i];
                c = ((c - lead * m[i]) % p + p) % p;
            }
        }
        a.pop_back();
    }
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}

inline std::vector<int> fp_poly_mul(const std::vector<int>& a, const std::vector<int>& b, int p) {
    if (a.empty() || b.empty()) return {};
    std::vector<int> c(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            c[i + j] = (c[i + j] + a[i] * b[j]) % p;
    while (!c.empty() && c.back() == 0) c.pop_back();
    return c;
}

inline bool fp_poly_irreducible(const std::vector<int>& m, int p) {
    const int n = static_cast<int>(m.size()) - 1;
    // trial division by every monic polynomial of degree 1..n/2
    for (int d = 1; 2 * d <= n; ++d) {
        std::uint64_t count = 1;
        for (int i = 0; i < d; ++i) count *= static_cast<std::uint64_t>(p);
        for (std::uint64_t code = 0; code < count; ++code) {
            std::vector<int> div(d + 1, 0);
            std::uint64_t c = code;
            for (int i = 0; i < d; ++i) { div[i] = static_cast<int>(c % p); c /= p; }
            div[d] = 1;
            if (fp_poly_mod(m, div, p).empty()) return false;
        }
    }
    return true;
}

} // namespace detail

/**
 * Arithmetic context for F_{p^n} with n = e*m, i.e. the residue field F_{q^m}
 * with q = p^e. The modulus is the lexicographically first monic irreducible
 * polynomial of degree n over F_p (ordered by the integer code of its low
 * coefficients), so the construction is deterministic. Multiplication runs
 * through discrete-log tables built from the smallest-code generator; this is
 * also the total order used whenever a deterministic root pick is needed.
 */
class fq_field {
public:
    fq_field(int p, int e, int m) : p(p), e(e), m(m), n(e * m) {
        if (p < 2 || e < 1 || m < 1) throw config_error("field: need p>=2, e>=1, m>=1");
        for (int d = 2; d * d <= p; ++d)
            if (p % d == 0) throw config_error("field: p=" + std::to_string(p) + " is not prime");
        std::uint64_t s = 1;
        for (int i = 0; i < n; ++i) {
            s *= static_cast<std::uint64_t>(p);
            if (s > (1u << 20)) throw config_error("field: q^m too large for table arithmetic");
        }
        size = static_cast<std::uint32_t>(s);
        q = 1;
        for (int i = 0; i < e; ++i) q *= p;

        modulus = find_modulus();
        build_tables();
    }

    int p, e, m, n;
    std::uint32_t size; // p^n
    int q;              // p^e
    std::vector<int> modulus; // monic, degree n, little-endian over F_p

    fq_elem zero() const { return 0; }
    fq_elem one() const { return 1; }

    /// Embed an integer constant (element of the prime field).
    fq_elem from_int(long long c) const {
        long long r = c % p;
        if (r < 0) r += p;
        return static_cast<fq_elem>(r);
    }

    fq_elem add(fq_elem a, fq_elem b) const {
        fq_elem out = 0, mul = 1;
        for (int i = 0; i < n; ++i) {
            int da = static_cast<int>(a % p), db = static_cast<int>(b % p);
            out += static_cast<fq_elem>((da + db) % p) * mul;
            a /= p; b /= p; mul *= p;
        }
        return out;
    }

    fq_elem neg(fq_elem a) const {
        fq_elem out = 0, mul = 1;
        for (int i = 0; i < n; ++i) {
            int da = static_cast<int>(a % p);
            out += static_cast<fq_elem>((p - da) % p) * mul;
            a /= p; mul *= p;
        }
        return out;
    }

    fq_elem sub(fq_elem a, fq_elem b) const { return add(a, neg(b)); }

    fq_elem mul(fq_elem a, fq_elem b) const {
        if (a == 0 || b == 0) return 0;
        return exp_[(log_[a] + log_[b]) % (size - 1)];
    }

    fq_elem inv(fq_elem a) const {
        if (a == 0) throw domain_error("field: inverse of zero");
        return exp_[(size - 1 - log_[a]) % (size - 1)];
    }

    fq_elem pow(fq_elem a, long long k) const {
        if (a == 0) {
            if (k < 0) throw domain_error("field: inverse of zero");
            return k == 0 ? 1 : 0;
        }
        long long ordk = static_cast<long long>(log_[a]) * (k % static_cast<long long>(size - 1));
        long long idx = ordk % static_cast<long long>(size - 1);
        if (idx < 0) idx += size - 1;
        return exp_[static_cast<size_t>(idx)];
    }

    /// q-power Frobenius x -> x^q (the twist on coefficients).
    fq_elem frob_q(fq_elem a) const { return pow(a, q); }

    fq_elem frob_q_iter(fq_elem a, int i) const {
        for (int k = 0; k < i; ++k) a = frob_q(a);
        return a;
    }

    /// Smallest k-th root of a in the code order, if one exists.
    bool kth_root(fq_elem a, long long k, fq_elem& out) const {
        if (a == 0) { out = 0; return true; }
        for (std::uint32_t y = 1; y < size; ++y) {
            if (pow(y, k) == a) { out = y; return true; }
        }
        return false;
    }

    /// The subfield F_q = fixed points of frob_q, in code order.
    std::vector<fq_elem> subfield_fq() const {
        std::vector<fq_elem> out;
        for (std::uint32_t x = 0; x < size; ++x)
            if (frob_q(x) == x) out.push_back(x);
        return out;
    }

    /// Render as a polynomial in the generator "g" over F_p, e.g. "g+2".
    std::string to_string(fq_elem a) const {
        if (a == 0) return "0";
        std::string s;
        fq_elem v = a;
        for (int i = 0; i < n; ++i) {
            int c = static_cast<int>(v % p);
            v /= p;
            if (c == 0) continue;
            if (!s.empty()) s += "+";
            if (i == 0) s += std::to_string(c);
            else {
                if (c != 1) s += std::to_string(c) + "*";
                s += "g";
                if (i > 1) s += "^" + std::to_string(i);
            }
        }
        return s;
    }

    bool operator==(const fq_field& o) const {
        return p == o.p && e == o.e && m == o.m;
    }

private:
    std::vector<std::uint32_t> log_, exp_;

    std::vector<int> find_modulus() const {
        if (n == 1) return {0, 1}; // x itself won't be used; arithmetic is plain mod p
        std::uint64_t count = 1;
        for (int i = 0; i < n; ++i) count *= static_cast<std::uint64_t>(p);
        for (std::uint64_t code = 1; code < count; ++code) {
            std::vector<int> mpoly(n + 1, 0);
            std::uint64_t c = code;
            for (int i = 0; i < n; ++i) { mpoly[i] = static_cast<int>(c % p); c /= p; }
            mpoly[n] = 1;
            if (detail::fp_poly_irreducible(mpoly, p)) return mpoly;
        }
        throw error("field: no irreducible modulus found"); // unreachable
    }

    fq_elem mul_slow(fq_elem a, fq_elem b) const {
        std::vector<int> pa, pb;
        for (int i = 0; i < n; ++i) { pa.push_back(static_cast<int>(a % p)); a /= p; }
        for (int i = 0; i < n; ++i) { pb.push_back(static_cast<int>(b % p)); b /= p; }
        auto pc = detail::fp_poly_mul(pa, pb, p);
        pc = n == 1 ? pc : detail::fp_poly_mod(pc, modulus, p);
        fq_elem out = 0, mul = 1;
        for (size_t i = 0; i < pc.size(); ++i) { out += static_cast<fq_elem>(pc[i]) * mul; mul *= p; }
        return out;
    }

    void build_tables() {
        log_.assign(size, 0);
        exp_.assign(size - 1, 0);
        for (std::uint32_t g = 2; g < size || size == 2; ++g) {
            std::uint32_t cand = size == 2 ? 1 : g;
            std::uint32_t x = 1;
            bool ok = true;
            std::vector<std::uint32_t> seen;
            seen.reserve(size - 1);
            for (std::uint32_t i = 0; i + 1 < size; ++i) {
                seen.push_back(x);
                x = mul_slow(x, cand);
                if (x == 1 && i + 2 < size) { ok = false; break; }
            }
            if (ok && x == 1) {
                for (std::uint32_t i = 0; i + 1 < size; ++i) {
                    exp_[i] = seen[i];
                    log_[seen[i]] = i;
                }
                return;
            }
            if (size == 2) break;
        }
        throw error("field: no generator found"); // unreachable
    }
};

using fq_field_ptr = std::shared_ptr<const fq_field>;

} // namespace tmod
