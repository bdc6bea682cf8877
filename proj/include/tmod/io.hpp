#pragma once

#include <string>

#include <json.hpp>

#include "tmod/config.hpp"
#include "tmod/mero.hpp"
#include "tmod/special.hpp"

namespace tmod {

using nlohmann::json;

/// Canonical rendering: digits as [exponent, [c_0, c_1, ...]] pairs in
/// increasing exponent, coefficients base-p little-endian over F_p. Parsing
/// this back reproduces the value bit-exactly.
inline json cinf_to_json(const cinf_num& x) {
    json digits = json::array();
    for (const auto& [k, c] : x.digits()) {
        json coeff = json::array();
        fq_elem v = c;
        int p = x.ctx()->p();
        for (int i = 0; i < x.ctx()->F->n; ++i) {
            coeff.push_back(static_cast<int>(v % static_cast<fq_elem>(p)));
            v /= static_cast<fq_elem>(p);
        }
        digits.push_back(json::array({k, coeff}));
    }
    json out;
    out["digits"] = digits;
    if (x.exact())
        out["prec"] = "exact";
    else
        out["prec"] = x.prec();
    out["str"] = x.to_string();
    return out;
}

inline cinf_num cinf_from_json(const cinf_ctx_ptr& ctx, const json& j) {
    long long prec = EXACT_PREC;
    if (j.contains("prec") && !j["prec"].is_string()) prec = j["prec"].get<long long>();
    cinf_num out(ctx, prec);
    cinf_num acc = out;
    for (const auto& d : j.at("digits")) {
        long long k = d.at(0).get<long long>();
        fq_elem c = 0, mul = 1;
        for (const auto& ci : d.at(1)) {
            c += static_cast<fq_elem>(ci.get<int>()) * mul;
            mul *= static_cast<fq_elem>(ctx->p());
        }
        acc = acc + cinf_num::monomial(ctx, c, k, prec);
    }
    return acc;
}

inline json tate_to_json(const tate_series& f) {
    json coeffs = json::array();
    for (const auto& c : f.coeffs()) coeffs.push_back(cinf_to_json(c));
    return json{{"coeffs", coeffs}};
}

inline json vec_to_json(const cvec& v) {
    json out = json::array();
    for (const auto& c : v) out.push_back(cinf_to_json(c));
    return out;
}

inline cvec vec_from_json(const cinf_ctx_ptr& ctx, const json& j) {
    cvec out;
    for (const auto& c : j) out.push_back(cinf_from_json(ctx, c));
    return out;
}

inline json mero_to_json(const mero_fn& g) {
    json parts = json::array();
    for (int i = 0; i <= g.tracked(); ++i)
        for (int k = 1; k <= g.order_cap(); ++k) {
            const cinf_num& c = g.part(i, k);
            if (c.is_zero() && c.exact()) continue;
            parts.push_back(json{{"orbit", i}, {"order", k}, {"coeff", cinf_to_json(c)}});
        }
    json out;
    out["order_cap"] = g.order_cap();
    out["horizon"] = g.horizon();
    out["guard"] = g.guard();
    out["parts"] = parts;
    out["tail"] = tate_to_json(g.tail());
    out["tail_bound"] = g.tail_bound() >= EXACT_PREC ? json("exact") : json(g.tail_bound());
    return out;
}

inline json special_fn_to_json(const special_fn& w) {
    json comps = json::array();
    for (const auto& c : w.comps) comps.push_back(mero_to_json(c));
    json out;
    out["module"] = w.e.name;
    out["comps"] = comps;
    if (w.source_lambda) out["lambda"] = vec_to_json(*w.source_lambda);
    if (!w.source_u.empty()) out["u"] = w.source_u;
    return out;
}

inline json matrix_to_json(const cmat& m) {
    json rows = json::array();
    for (int i = 0; i < m.dim(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.dim(); ++j) row.push_back(cinf_to_json(m.at(i, j)));
        rows.push_back(row);
    }
    return rows;
}

inline cmat matrix_from_json(const cinf_ctx_ptr& ctx, const json& j) {
    int n = static_cast<int>(j.size());
    cmat m(ctx, n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(j.at(static_cast<size_t>(i)).size()) != n)
            throw config_error("module matrix: rows must be square");
        for (int k = 0; k < n; ++k)
            m.at(i, k) = cinf_from_json(ctx, j.at(static_cast<size_t>(i)).at(static_cast<size_t>(k)));
    }
    return m;
}

/// Structured module descriptors: {"type": "carlitz"},
/// {"type": "carlitz_tensor", "n": 2}, {"type": "prolongation", "k": 1},
/// {"type": "direct_sum", "summands": [...]}, or
/// {"type": "user_defined", "name": "...", "mats": [A_0, A_1, ...]} with the
/// matrices as nested arrays of rendered cinf values.
inline t_module module_from_json(const cinf_ctx_ptr& ctx, const json& j) {
    std::string type = j.at("type").get<std::string>();
    if (type == "carlitz") return carlitz(ctx);
    if (type == "carlitz_tensor") return carlitz_tensor(ctx, j.at("n").get<int>());
    if (type == "prolongation") return prolongation(ctx, j.at("k").get<int>());
    if (type == "direct_sum") {
        const auto& summands = j.at("summands");
        if (summands.size() < 2) throw config_error("module: direct_sum needs two summands");
        t_module acc = module_from_json(ctx, summands.at(0));
        for (size_t i = 1; i < summands.size(); ++i)
            acc = direct_sum(acc, module_from_json(ctx, summands.at(i)));
        return acc;
    }
    if (type == "user_defined") {
        std::vector<cmat> mats;
        for (const auto& mj : j.at("mats")) mats.push_back(matrix_from_json(ctx, mj));
        if (mats.empty()) throw config_error("module: user_defined needs matrices");
        std::string name = j.contains("name") ? j["name"].get<std::string>() : "user_defined";
        return user_defined(name, tau_poly::from(std::move(mats)));
    }
    throw config_error("module: unknown type '" + type + "'");
}

/// Accept either a compact string descriptor or inline JSON starting with '{'.
inline t_module build_module_any(const cinf_ctx_ptr& ctx, const std::string& desc) {
    if (!desc.empty() && desc.front() == '{') {
        json j;
        try {
            j = json::parse(desc);
        } catch (const std::exception& ex) {
            throw config_error(std::string("module: bad JSON descriptor: ") + ex.what());
        }
        return module_from_json(ctx, j);
    }
    return build_module(ctx, desc);
}

} // namespace tmod
