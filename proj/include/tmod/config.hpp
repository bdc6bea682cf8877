#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tmod/special.hpp"

namespace tmod {

/**
 * One bundle of run parameters: field model, caps, module descriptor and
 * special-function inputs. Reports are deterministic functions of this
 * structure (randomized cases draw from the explicit seed).
 */
struct run_config {
    int p = 2, e = 1, m = 1, r = 1;
    long long prec = 200;     // P, in (1/r)-units
    int tdeg = 48;            // D
    int horizon = 6;          // I
    int guard = 2;            // g
    int terms = 0;            // omega product factors; 0 = derive from prec
    int exp_terms = 14;       // exp coefficient count
    long long threshold = 0;  // zero/pass margin in (1/r)-units; 0 = prec/2
    std::string module = "carlitz";
    std::string lambda = "generator"; // or "poly:c0,c1,..." acting through dphi
    std::string u = "t";              // or "t^2+t", or "coeffs:0,1,1"
    std::uint64_t seed = 0xC0FFEEULL;
    std::string json_path;            // optional report mirror

    /// Fill p/e/m/r from a plain q: m = 2 unless p = 2, r = q-1 (so that the
    /// (q-1)th root of -theta exists).
    void set_q(int q) {
        if (q < 2) throw config_error("q must be at least 2");
        int pp = 2, ee = 1;
        int qq = q;
        for (int cand = 2; cand <= qq; ++cand) {
            if (qq % cand == 0) {
                pp = cand;
                ee = 0;
                while (qq > 1) {
                    if (qq % cand != 0)
                        throw config_error("q = " + std::to_string(q) + " is not a prime power");
                    qq /= cand;
                    ++ee;
                }
                break;
            }
        }
        p = pp;
        e = ee;
        m = (p == 2) ? 1 : 2;
        r = std::max(1, q - 1);
    }

    int q() const {
        int out = 1;
        for (int i = 0; i < e; ++i) out *= p;
        return out;
    }

    void validate() const {
        if (prec < 8) throw config_error("config: prec must be at least 8");
        if (tdeg < 4 || horizon < 1 || guard < 0 || exp_terms < 1)
            throw config_error("config: caps must be positive");
        long long thr = threshold == 0 ? prec / 2 : threshold;
        if (thr <= 0 || thr >= prec)
            throw config_error("config: threshold must be strictly between 0 and prec");
        if (exp_terms < horizon + guard)
            throw config_error("config: exp_terms must cover horizon + guard");
    }

    cinf_ctx_ptr make_ctx() const {
        validate();
        return make_cinf_ctx(p, e, m, r, prec);
    }

    sf_params params(const cinf_ctx_ptr& ctx) const {
        sf_params par = sf_params::defaults(ctx);
        par.horizon = horizon;
        par.guard = guard;
        par.tdeg = tdeg;
        par.exp_terms = exp_terms;
        par.threshold = threshold == 0 ? prec / 2 : threshold;
        if (terms > 0)
            par.terms = terms;
        else {
            long long need = 2 * prec;
            int t = horizon + guard + 2;
            while (static_cast<long long>(r) * mero_fn::ipow(q(), t + 1) < need) ++t;
            par.terms = t;
        }
        return par;
    }

    nlohmann::json to_json() const {
        return nlohmann::json{{"p", p},         {"e", e},
                              {"m", m},         {"r", r},
                              {"prec", prec},   {"tdeg", tdeg},
                              {"horizon", horizon}, {"guard", guard},
                              {"terms", terms}, {"exp_terms", exp_terms},
                              {"threshold", threshold}, {"module", module},
                              {"lambda", lambda}, {"u", u},
                              {"seed", seed}};
    }

    void load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw config_error("config: cannot open " + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const std::exception& ex) {
            throw config_error(std::string("config: bad JSON: ") + ex.what());
        }
        if (j.contains("q")) set_q(j["q"].get<int>());
        if (j.contains("p")) p = j["p"].get<int>();
        if (j.contains("e")) e = j["e"].get<int>();
        if (j.contains("m")) m = j["m"].get<int>();
        if (j.contains("r")) r = j["r"].get<int>();
        if (j.contains("prec")) prec = j["prec"].get<long long>();
        if (j.contains("tdeg")) tdeg = j["tdeg"].get<int>();
        if (j.contains("horizon")) horizon = j["horizon"].get<int>();
        if (j.contains("guard")) guard = j["guard"].get<int>();
        if (j.contains("terms")) terms = j["terms"].get<int>();
        if (j.contains("exp_terms")) exp_terms = j["exp_terms"].get<int>();
        if (j.contains("threshold")) threshold = j["threshold"].get<long long>();
        if (j.contains("module"))
            module = j["module"].is_object() ? j["module"].dump() : j["module"].get<std::string>();
        if (j.contains("lambda")) lambda = j["lambda"].get<std::string>();
        if (j.contains("u")) u = j["u"].get<std::string>();
        if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
    }
};

namespace detail {
inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= s.size()) {
        size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}
} // namespace detail

/// Module descriptors: carlitz | carlitz_tensor:n | prolongation:k |
/// direct_sum:desc,desc | nested via '+' (carlitz+carlitz).
inline t_module build_module(const cinf_ctx_ptr& ctx, const std::string& desc) {
    auto plus = detail::split(desc, '+');
    if (plus.size() > 1) {
        t_module acc = build_module(ctx, plus[0]);
        for (size_t i = 1; i < plus.size(); ++i) acc = direct_sum(acc, build_module(ctx, plus[i]));
        return acc;
    }
    size_t cpos = desc.find(':');
    std::string kind = desc.substr(0, cpos);
    std::string rest = cpos == std::string::npos ? "" : desc.substr(cpos + 1);
    if (kind == "carlitz") return carlitz(ctx);
    if (kind == "carlitz_tensor") {
        if (rest.empty()) throw config_error("module: carlitz_tensor:n expected");
        return carlitz_tensor(ctx, std::stoi(rest));
    }
    if (kind == "prolongation") {
        if (rest.empty()) throw config_error("module: prolongation:k expected");
        return prolongation(ctx, std::stoi(rest));
    }
    if (kind == "direct_sum") {
        auto items = detail::split(rest, ',');
        if (items.size() < 2) throw config_error("module: direct_sum needs two summands");
        t_module acc = build_module(ctx, items[0]);
        for (size_t i = 1; i < items.size(); ++i) acc = direct_sum(acc, build_module(ctx, items[i]));
        return acc;
    }
    throw config_error("module: unknown descriptor '" + desc + "'");
}

/// u descriptors: "t", "t^2+t", or "coeffs:c0,c1,...".
inline separating_u parse_u(const std::string& s) {
    if (s == "t") return u_identity();
    if (s.rfind("coeffs:", 0) == 0) {
        separating_u u;
        for (const auto& c : detail::split(s.substr(7), ',')) u.coeffs.push_back(std::stoi(c));
        return u;
    }
    // tiny polynomial grammar: terms "c", "t", "c t^k", separated by '+'
    separating_u u;
    for (const auto& term : detail::split(s, '+')) {
        int coeff = 1;
        size_t tpos = term.find('t');
        if (tpos == std::string::npos) {
            coeff = std::stoi(term);
            if (u.coeffs.empty()) u.coeffs.resize(1, 0);
            u.coeffs[0] += coeff;
            continue;
        }
        if (tpos > 0) {
            std::string c = term.substr(0, tpos);
            if (!c.empty() && c != "*") coeff = std::stoi(c);
        }
        int deg = 1;
        size_t caret = term.find('^');
        if (caret != std::string::npos) deg = std::stoi(term.substr(caret + 1));
        if (static_cast<int>(u.coeffs.size()) <= deg) u.coeffs.resize(static_cast<size_t>(deg) + 1, 0);
        u.coeffs[static_cast<size_t>(deg)] += coeff;
    }
    return u;
}

} // namespace tmod
