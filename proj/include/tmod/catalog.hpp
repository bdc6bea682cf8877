#pragma once

#include <string>
#include <vector>

#include "tmod/config.hpp"
#include "tmod/special.hpp"

namespace tmod {

struct family_basis {
    t_module e;
    std::vector<special_fn> basis;
};

/// The standard special-function bases of the example families, by module
/// descriptor. Direct sums are assembled blockwise from their summands.
inline family_basis standard_basis(const cinf_ctx_ptr& ctx, const std::string& desc,
                                   const sf_params& par) {
    auto plus = detail::split(desc, '+');
    std::vector<std::string> items;
    if (plus.size() > 1) {
        items = plus;
    } else if (desc.rfind("direct_sum:", 0) == 0) {
        items = detail::split(desc.substr(11), ',');
        if (items.size() < 2) throw config_error("module: direct_sum needs two summands");
    }
    if (!items.empty()) {
        std::vector<family_basis> blocks;
        for (const auto& it : items) blocks.push_back(standard_basis(ctx, it, par));
        t_module e = blocks[0].e;
        for (size_t i = 1; i < blocks.size(); ++i) e = direct_sum(e, blocks[i].e);
        family_basis out{e, {}};
        int total = e.dim();
        int offset = 0;
        for (const auto& blk : blocks) {
            for (const auto& w : blk.basis) {
                std::vector<mero_fn> comps;
                for (int i = 0; i < total; ++i) comps.push_back(mero_fn(ctx, 1, par.horizon, par.guard));
                for (int i = 0; i < blk.e.dim(); ++i) comps[static_cast<size_t>(offset + i)] = w.comps[static_cast<size_t>(i)];
                out.basis.push_back(special_fn{e, std::move(comps), std::nullopt, ""});
            }
            offset += blk.e.dim();
        }
        return out;
    }

    size_t cpos = desc.find(':');
    std::string kind = desc.substr(0, cpos);
    std::string rest = cpos == std::string::npos ? "" : desc.substr(cpos + 1);
    if (kind == "carlitz") {
        auto w = anderson_thakur_omega(ctx, par);
        return {w.e, {w}};
    }
    if (kind == "carlitz_tensor") {
        auto w = tensor_stacked_generator(ctx, std::stoi(rest), par);
        return {w.e, {w}};
    }
    if (kind == "prolongation") {
        auto basis = prolongation_basis(ctx, std::stoi(rest), par);
        return {basis[0].e, basis};
    }
    throw config_error("no standard special-function basis for module '" + desc + "'");
}

/// The derived generator of the period lattice: the residue of the family's
/// first basis element.
inline cvec derived_generator(const family_basis& fb) {
    return residue_at_j(fb.basis.at(0));
}

/// lambda descriptors: "generator" or "poly:c0,c1,..." (a F_q[t]-multiple of
/// the generator acting through dphi).
inline cvec parse_lambda(const family_basis& fb, const std::string& desc) {
    cvec gen = derived_generator(fb);
    if (desc == "generator" || desc.empty()) return gen;
    if (desc.rfind("poly:", 0) == 0) {
        std::vector<int> coeffs;
        for (const auto& c : detail::split(desc.substr(5), ',')) coeffs.push_back(std::stoi(c));
        return dphi_of_poly(fb.e, coeffs).apply(gen);
    }
    throw config_error("lambda: expected 'generator' or 'poly:c0,c1,...'");
}

} // namespace tmod
