// Command-line front end: special functions, periods, exponentials, residues
// and pole-order filtrations of Anderson t-modules over a truncated model of
// C_infty, plus the self-verification suite.

#include <chrono>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tmod/catalog.hpp"
#include "tmod/config.hpp"
#include "tmod/io.hpp"
#include "tmod/verify.hpp"

using namespace tmod;
using nlohmann::json;

namespace {

struct report_sink {
    json j;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    explicit report_sink(const std::string& command, const run_config& cfg) {
        j["command"] = command;
        j["config"] = cfg.to_json();
        j["outputs"] = json::object();
        j["verdicts"] = json::object();
    }

    void output(const std::string& key, json v) { j["outputs"][key] = std::move(v); }

    bool verdict(const std::string& key, bool pass, long long residual_v) {
        j["verdicts"][key] = json{{"pass", pass},
                                  {"residual_v", residual_v >= EXACT_PREC ? json("exact")
                                                                          : json(residual_v)}};
        std::cout << (pass ? "pass" : "FAIL") << "  " << key << "  (residual v="
                  << (residual_v >= EXACT_PREC ? std::string("exact")
                                               : std::to_string(residual_v))
                  << ")\n";
        return pass;
    }

    void finish(const std::string& path) {
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
        j["wall_ms"] = ms;
        if (!path.empty()) {
            std::ofstream out(path);
            out << j.dump(2) << "\n";
        }
    }
};

long long val_or_exact(const cinf_num& x) { return x.is_zero() ? x.prec() : x.val(); }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact special functions, residues and filtrations of Anderson t-modules"};
    app.require_subcommand(1);

    run_config cfg;
    int q_flag = 0;
    std::string config_path;
    app.add_option("--q", q_flag, "base field size q (prime power); sets p, e, m, r defaults");
    app.add_option("--p-exp", cfg.e, "exponent e with q = p^e");
    app.add_option("--m", cfg.m, "residue extension degree of the coefficient field");
    app.add_option("--ram", cfg.r, "ramification index r (value group (1/r)Z)");
    app.add_option("--prec", cfg.prec, "working precision P in (1/r)-units");
    app.add_option("--tdeg", cfg.tdeg, "disk expansion degree cap D");
    app.add_option("--horizon", cfg.horizon, "tracked pole range I");
    app.add_option("--guard", cfg.guard, "guard band g beyond the horizon");
    app.add_option("--terms", cfg.terms, "product truncation for omega (0 = derive from prec)");
    app.add_option("--exp-terms", cfg.exp_terms, "number of exp coefficients");
    app.add_option("--threshold", cfg.threshold, "pass margin in (1/r)-units (0 = prec/2)");
    app.add_option("--module", cfg.module, "module descriptor (carlitz, carlitz_tensor:n, prolongation:k, a+b)");
    app.add_option("--lambda", cfg.lambda, "lattice vector: generator | poly:c0,c1,...");
    app.add_option("--u", cfg.u, "separating element, e.g. t or t^2+t");
    app.add_option("--seed", cfg.seed, "seed for randomized cases");
    app.add_option("--json", cfg.json_path, "write the report as JSON to this path");
    app.add_option("--config", config_path, "read a JSON config file (flags override)");

    auto* cmd_omega = app.add_subcommand("omega", "Anderson-Thakur function of the Carlitz module");
    auto* cmd_period = app.add_subcommand("period", "Carlitz period via the residue normalization");
    auto* cmd_exp = app.add_subcommand("exp-coeffs", "exponential coefficients of a module");
    auto* cmd_sf = app.add_subcommand("sf", "special function attached to a lattice vector");
    auto* cmd_res = app.add_subcommand("residue", "residue vector of a special function");
    auto* cmd_filt = app.add_subcommand("filtration", "pole-order filtration of a family basis");
    auto* cmd_verify = app.add_subcommand("verify", "run the full acceptance suite");
    for (auto* sub : {cmd_omega, cmd_period, cmd_exp, cmd_sf, cmd_res, cmd_filt, cmd_verify})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2; // usage errors exit 2, --help exits 0
    }

    try {
        if (!config_path.empty()) cfg.load_file(config_path);
        if (q_flag != 0) cfg.set_q(q_flag);
        cfg.validate();
    } catch (const config_error& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return 2;
    }

    try {
        if (cmd_verify->parsed()) {
            std::vector<int> qs = q_flag != 0 ? std::vector<int>{q_flag} : std::vector<int>{2, 3};
            report_sink rep("verify", cfg);
            bool ok = run_acceptance(cfg, qs, std::cout);
            rep.j["outputs"]["fields"] = qs;
            rep.j["verdicts"]["acceptance"] = json{{"pass", ok}};
            rep.finish(cfg.json_path);
            return ok ? 0 : 1;
        }

        auto ctx = cfg.make_ctx();
        auto par = cfg.params(ctx);
        bool ok = true;

        if (cmd_omega->parsed()) {
            report_sink rep("omega", cfg);
            auto w = anderson_thakur_omega(ctx, par);
            auto [disk, err] = expand_on_disk(w.comps[0], par.tdeg);
            auto chk = sf_check(w, par.threshold);
            std::cout << "omega(0)      = " << disk.coeff(0).to_string() << "\n";
            std::cout << "lambda_theta  = " << lambda_theta(ctx).to_string() << "\n";
            std::cout << "residue at j  = " << w.comps[0].residue().to_string() << "\n";
            rep.output("omega", special_fn_to_json(w));
            rep.output("disk_expansion", tate_to_json(disk));
            rep.output("residue", cinf_to_json(w.comps[0].residue()));
            ok &= rep.verdict("sf_equation", chk.pass, chk.residual_v);
            ok &= rep.verdict("constant_coefficient_is_lambda_theta",
                              val_or_exact(disk.coeff(0) - lambda_theta(ctx)) >= par.threshold,
                              val_or_exact(disk.coeff(0) - lambda_theta(ctx)));
            rep.finish(cfg.json_path);
            return ok ? 0 : 1;
        }

        if (cmd_period->parsed()) {
            report_sink rep("period", cfg);
            auto pi = carlitz_period(ctx, par.terms);
            auto c = carlitz(ctx);
            auto ec = compute_exp_coeffs(c, par.exp_terms);
            auto mem = lattice_member(c, ec, {pi}, par.threshold);
            std::cout << "pi~          = " << pi.to_string() << "\n";
            std::cout << "v(pi~)       = " << pi.val() << "/" << ctx->r << " (log_q units)\n";
            rep.output("period", cinf_to_json(pi));
            rep.output("valuation", pi.val());
            ok &= rep.verdict("exp_of_period_vanishes", mem.member, mem.residual_v);
            rep.finish(cfg.json_path);
            return ok ? 0 : 1;
        }

        if (cmd_exp->parsed()) {
            report_sink rep("exp-coeffs", cfg);
            auto e = build_module_any(ctx, cfg.module);
            auto ec = compute_exp_coeffs(e, cfg.exp_terms);
            auto res = exp_functional_residual(e, ec);
            json mats = json::array();
            for (int i = 0; i <= std::min(ec.count(), cfg.horizon); ++i) {
                std::cout << "e_" << i << ":\n";
                for (int r2 = 0; r2 < e.dim(); ++r2) {
                    std::cout << "  [";
                    for (int c2 = 0; c2 < e.dim(); ++c2)
                        std::cout << (c2 ? ", " : "") << ec.e(i).at(r2, c2).to_string();
                    std::cout << "]\n";
                }
                mats.push_back(matrix_to_json(ec.e(i)));
            }
            rep.output("module", e.name);
            rep.output("coeffs", mats);
            long long worst = EXACT_PREC;
            for (long long v : res) worst = std::min(worst, v);
            ok &= rep.verdict("functional_equation", worst >= par.threshold, worst);
            rep.finish(cfg.json_path);
            return ok ? 0 : 1;
        }

        if (cmd_sf->parsed() || cmd_res->parsed()) {
            report_sink rep(cmd_sf->parsed() ? "sf" : "residue", cfg);
            auto fb = standard_basis(ctx, cfg.module, par);
            auto ec = compute_exp_coeffs(fb.e, cfg.exp_terms);
            cvec lam = parse_lambda(fb, cfg.lambda);
            auto u = parse_u(cfg.u);
            auto built = sf_from_lattice(fb.e, ec, lam, u, par);
            auto chk = sf_check(built.w, par.threshold);
            cvec back = residue_at_j(built.w);
            long long round_v = EXACT_PREC;
            for (size_t i = 0; i < lam.size(); ++i) {
                cinf_num d = back[i] - lam[i];
                round_v = std::min(round_v, val_or_exact(d));
            }
            rep.output("module", fb.e.name);
            rep.output("lambda", vec_to_json(lam));
            rep.output("u", u.to_string());
            if (cmd_sf->parsed()) rep.output("sf", special_fn_to_json(built.w));
            rep.output("residue", vec_to_json(back));
            for (size_t i = 0; i < back.size(); ++i)
                std::cout << "residue[" << i << "] = " << back[i].to_string() << "\n";
            ok &= rep.verdict("sf_equation", chk.pass, chk.residual_v);
            ok &= rep.verdict("off_orbit_cancellation", built.cancellation_v >= par.threshold,
                              built.cancellation_v);
            ok &= rep.verdict("u_route_matches", built.route_match_v >= par.threshold,
                              built.route_match_v);
            ok &= rep.verdict("residue_round_trip", round_v >= par.threshold, round_v);
            if (cmd_res->parsed()) {
                auto mem = lattice_member(fb.e, ec, back, par.threshold);
                ok &= rep.verdict("residue_is_period", mem.member, mem.residual_v);
            }
            rep.finish(cfg.json_path);
            return ok ? 0 : 1;
        }

        if (cmd_filt->parsed()) {
            report_sink rep("filtration", cfg);
            auto fb = standard_basis(ctx, cfg.module, par);
            auto fr = filtration_ranks(fb.e, fb.basis, par.threshold);
            std::cout << "module " << fb.e.name << ": ranks";
            for (size_t n = 0; n < fr.ranks.size(); ++n)
                std::cout << " r_" << n << "=" << fr.ranks[n];
            std::cout << "\njumps at degrees {";
            for (size_t i = 0; i < fr.jumps.size(); ++i) std::cout << (i ? "," : "") << fr.jumps[i];
            std::cout << "}\n";
            rep.output("module", fb.e.name);
            rep.output("ranks", fr.ranks);
            rep.output("jumps", fr.jumps);
            ok &= rep.verdict("r0_trivial", fr.ranks.at(0) == 0, EXACT_PREC);
            rep.finish(cfg.json_path);
            return ok ? 0 : 1;
        }
    } catch (const config_error& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return 2;
    } catch (const precision_error& ex) {
        std::cerr << "precision error: " << ex.what() << "\n";
        return 1;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 2;
}
