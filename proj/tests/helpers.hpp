#pragma once

#include <cstdint>

#include "tmod/cinf.hpp"

namespace tmod::testing {

inline cinf_ctx_ptr ctx_q2(long long P = 200) { return make_cinf_ctx(2, 1, 1, 1, P); }
inline cinf_ctx_ptr ctx_q3(long long P = 200) { return make_cinf_ctx(3, 1, 2, 2, P); }

// Small deterministic generator so property samples are reproducible.
struct rng {
    std::uint64_t s;
    explicit rng(std::uint64_t seed) : s(seed ? seed : 0x9e3779b97f4a7c15ull) {}
    std::uint64_t next() {
        s ^= s << 13; s ^= s >> 7; s ^= s << 17;
        return s;
    }
    long long range(long long lo, long long hi) { // inclusive
        return lo + static_cast<long long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
};

inline cinf_num random_cinf(const cinf_ctx_ptr& ctx, rng& g, long long vmin = -6,
                            long long vmax = 6, int ndigits = 8) {
    cinf_num x = cinf_num::zero(ctx);
    for (int i = 0; i < ndigits; ++i) {
        long long k = g.range(vmin, vmax);
        fq_elem c = static_cast<fq_elem>(g.next() % ctx->F->size);
        x = x + cinf_num::monomial(ctx, c, k);
    }
    return x;
}

inline cinf_num random_nonzero(const cinf_ctx_ptr& ctx, rng& g) {
    for (;;) {
        cinf_num x = random_cinf(ctx, g);
        if (!x.is_zero()) return x;
    }
}

} // namespace tmod::testing
