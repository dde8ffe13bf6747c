#include "rackmsr/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "rackmsr/io.hpp"
#include "rackmsr/repair.hpp"
#include "rackmsr/verify.hpp"

namespace rackmsr::cli {

namespace {

int errc_exit(Errc c) {
    switch (c) {
    case Errc::pool_exhausted:
        return 3;
    case Errc::verification_failed:
        return 1;
    default:
        return 2;
    }
}

std::string field_str(const Field* F) {
    std::string s = "GF(" + std::to_string(F->q()) + ") = GF(" + std::to_string(F->p()) +
                    "^" + std::to_string(F->m()) + "), modulus";
    for (uint32_t c : F->modulus()) s += " " + std::to_string(c);
    return s;
}

std::string params_str(const CodeParams& p) {
    return std::string(theorem_name(p.theorem)) + " n=" + std::to_string(p.n) +
           " k=" + std::to_string(p.k) + " u=" + std::to_string(p.u) +
           " d_bar=" + std::to_string(p.dbar) + " (racks=" + std::to_string(p.nbar) +
           ", s_bar=" + std::to_string(p.sbar) + ", l=" + std::to_string(p.l) + ")";
}

std::string list_str(const std::vector<uint32_t>& v) {
    std::string s = "{";
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + "}";
}

// Lambda selection per the config; explicit assignment falls back to search,
// and the note records what actually happened.
RackCode build_code(const io::RunConfig& cfg, std::optional<uint64_t> seed_override,
                    std::string* note) {
    auto F = Field::make(cfg.p, cfg.m,
                         cfg.modulus.empty() ? std::optional<std::vector<uint32_t>>{}
                                             : std::optional(cfg.modulus));
    CodeParams p = derive(cfg.n, cfg.k, cfg.u, cfg.dbar, cfg.theorem);
    uint64_t seed = seed_override.value_or(cfg.lambda.seed);
    SearchStrategy strat = cfg.lambda.strategy == "random" ? SearchStrategy::random
                                                           : SearchStrategy::greedy;
    const char* strat_name = strat == SearchStrategy::random ? "random" : "greedy";
    LambdaSet ls;
    if (cfg.lambda.mode == "explicit") {
        try {
            ls = explicit_lambdas(F.get(), p);
            if (note) *note = "explicit assignment";
        } catch (const Error& e) {
            if (e.code() != Errc::explicit_unavailable &&
                e.code() != Errc::verification_failed)
                throw;
            ls = search_lambdas(F.get(), p, strat, seed, cfg.lambda.max_tries);
            if (note)
                *note = std::string(strat_name) + " search (explicit assignment failed: " +
                        e.what() + ")";
        }
    } else {
        ls = search_lambdas(F.get(), p, strat, seed, cfg.lambda.max_tries);
        if (note) *note = std::string(strat_name) + " search";
    }
    return RackCode(F, p, std::move(ls));
}

int do_build(const std::string& config_path, const std::string& out_path,
             std::optional<uint64_t> seed) {
    io::RunConfig cfg = io::load_config(config_path);
    std::string note;
    RackCode code = build_code(cfg, seed, &note);
    io::Bundle b = io::bundle_of(code, cfg.experiment);
    io::save_bundle(out_path, b);
    std::printf("field           %s\n", field_str(code.field()).c_str());
    std::printf("parameters      %s\n", params_str(code.params()).c_str());
    std::printf("threshold       q >= %llu guarantees a selection; this q is %u\n",
                static_cast<unsigned long long>(field_threshold(code.params())),
                code.field()->q());
    std::printf("coefficients    %s\n", note.c_str());
    std::printf("parity hash     %s\n", b.hash.c_str());
    std::printf("bundle          %s\n", out_path.c_str());
    return 0;
}

int do_verify(const std::string& bundle_path, const io::Experiment& exp, uint64_t seed,
              bool as_json) {
    io::Bundle b = io::load_bundle(bundle_path);
    RackCode code = io::code_from_bundle(b);
    if (as_json) {
        verify::Report rep = verify::run_all(code, exp, seed);
        nlohmann::ordered_json checks = nlohmann::ordered_json::array();
        for (const auto& c : rep.checks)
            checks.push_back({{"name", c.name},
                              {"ok", c.ok},
                              {"cases", c.cases},
                              {"seconds", c.seconds},
                              {"detail", c.detail}});
        const CodeParams& p = code.params();
        nlohmann::ordered_json j{{"instance",
                                  {{"theorem", theorem_name(p.theorem)},
                                   {"n", p.n},
                                   {"k", p.k},
                                   {"u", p.u},
                                   {"d_bar", p.dbar},
                                   {"s_bar", p.sbar},
                                   {"l", p.l},
                                   {"q", code.field()->q()}}},
                                 {"checks", checks},
                                 {"ok", rep.ok()}};
        std::printf("%s\n", j.dump(2).c_str());
        return rep.ok() ? 0 : 1;
    }
    std::printf("instance        %s over GF(%u)\n", params_str(code.params()).c_str(),
                code.field()->q());
    verify::Report rep = verify::run_all(code, exp, seed);
    for (const auto& c : rep.checks) {
        if (c.ok) {
            std::string tail = c.detail.empty() ? "" : " [" + c.detail + "]";
            std::printf("PASS %-24s %7llu cases %7.2fs%s\n", c.name.c_str(),
                        static_cast<unsigned long long>(c.cases), c.seconds, tail.c_str());
        } else {
            std::printf("FAIL %-24s %s\n", c.name.c_str(), c.detail.c_str());
        }
    }
    if (rep.ok()) {
        std::printf("verification passed (%zu checks)\n", rep.checks.size());
        return 0;
    }
    std::printf("verification FAILED\n");
    return 1;
}

nlohmann::json ledger_json(const RepairPlan& plan, const RepairResult& res, bool match) {
    nlohmann::json per = nlohmann::json::array();
    for (const auto& t : res.per_rack)
        per.push_back({{"rack", t.rack},
                       {"sent", t.sent},
                       {"accessed", t.accessed},
                       {"rounds", t.rounds}});
    nlohmann::json j{
        {"plan",
         {{"host", plan.host},
          {"failed", plan.I},
          {"helpers", plan.helpers},
          {"extra", plan.extra ? nlohmann::json(*plan.extra) : nlohmann::json()}}},
        {"recovered_match", match},
        {"bandwidth",
         {{"symbols", res.bandwidth},
          {"bound", res.bound_bw},
          {"ratio", res.ratio.str()},
          {"optimal", res.optimal_bw}}},
        {"access",
         {{"symbols", res.access},
          {"bound", res.bound_access.str()},
          {"optimal", res.optimal_access}}},
        {"per_rack", per}};
    return j;
}

int do_repair_single(const RackCode& code, const Codeword& word, uint32_t host,
                     const std::vector<uint32_t>& failed,
                     const std::vector<uint32_t>& helpers,
                     std::optional<uint32_t> extra, bool as_json) {
    const CodeParams& p = code.params();
    RepairPlan plan = plan_repair(p, host, failed, helpers, extra);
    RepairResult res = repair(code, word, plan);
    bool match = true;
    for (size_t j = 0; j < plan.I.size(); ++j) {
        uint32_t node = host * p.u + plan.I[j];
        if (!std::equal(res.recovered[j].begin(), res.recovered[j].end(),
                        word.begin() + node * p.l))
            match = false;
    }
    if (as_json) {
        std::printf("%s\n", ledger_json(plan, res, match).dump(2).c_str());
    } else {
        std::printf("plan            host rack %u, failed nodes %s, helpers %s%s\n",
                    plan.host, list_str(plan.I).c_str(), list_str(plan.helpers).c_str(),
                    plan.extra ? (", extra rack " + std::to_string(*plan.extra)).c_str()
                               : "");
        std::printf("recovered       %zu columns, %s\n", res.recovered.size(),
                    match ? "matching the stored word" : "MISMATCH against the stored word");
        std::printf("bandwidth       %llu symbols (bound %llu, ratio %s%s)\n",
                    static_cast<unsigned long long>(res.bandwidth),
                    static_cast<unsigned long long>(res.bound_bw), res.ratio.str().c_str(),
                    res.optimal_bw ? ", optimal" : "");
        std::printf("access          %llu symbols (bound %s%s)\n",
                    static_cast<unsigned long long>(res.access),
                    res.bound_access.str().c_str(), res.optimal_access ? ", optimal" : "");
        for (const auto& t : res.per_rack)
            std::printf("rack %-11u sent %-6llu accessed %-6llu rounds %llu\n", t.rack,
                        static_cast<unsigned long long>(t.sent),
                        static_cast<unsigned long long>(t.accessed),
                        static_cast<unsigned long long>(t.rounds));
    }
    return match ? 0 : 1;
}

// One summary row per bundle: parameters plus measured (not assumed)
// bandwidth/access ratios from the widest repair the instance supports.
nlohmann::ordered_json report_rows(const std::vector<std::string>& bundles,
                                   uint64_t seed) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const std::string& path : bundles) {
        RackCode code = io::code_from_bundle(io::load_bundle(path));
        const CodeParams& p = code.params();
        uint32_t h = p.h_max;
        if (p.dbar + 1 == p.nbar) h = std::min(h, p.u - p.v); // no spare rack
        std::vector<uint32_t> failed;
        for (uint32_t i = 0; i < h; ++i) failed.push_back(i);
        std::vector<uint32_t> helpers;
        for (uint32_t rck = 1; rck < p.nbar && helpers.size() < p.dbar; ++rck)
            helpers.push_back(rck);
        RepairPlan plan = plan_repair(p, 0, failed, helpers);
        RepairResult res = repair(code, code.random_codeword(seed), plan);
        Frac access_ratio =
            Frac::make(res.access * res.bound_access.den, res.bound_access.num);
        rows.push_back({{"theorem", theorem_name(p.theorem)},
                        {"n", p.n},
                        {"k", p.k},
                        {"u", p.u},
                        {"d_bar", p.dbar},
                        {"s_bar", p.sbar},
                        {"l", p.l},
                        {"q", code.field()->q()},
                        {"bandwidth", res.ratio.str()},
                        {"access", access_ratio.str()}});
    }
    return rows;
}

int do_report(const std::vector<std::string>& bundles, uint64_t seed, bool as_json) {
    nlohmann::ordered_json rows = report_rows(bundles, seed);
    if (as_json) {
        std::printf("%s\n", rows.dump(2).c_str());
        return 0;
    }
    // The text table is rendered from the same rows the JSON emission dumps,
    // so the two formats cannot drift apart.
    static constexpr const char* kCols[] = {"theorem", "n", "k", "u",     "d_bar",
                                            "s_bar",   "l", "q", "bandwidth",
                                            "access"};
    static constexpr int kWidth[] = {-7, 4, 4, 3, 5, 5, 7, 6, 10, 8};
    auto cell = [](const nlohmann::ordered_json& v) {
        return v.is_string() ? v.get<std::string>() : v.dump();
    };
    for (size_t c = 0; c < std::size(kCols); ++c)
        std::printf("%s%*s", c ? "  " : "", kWidth[c], kCols[c]);
    std::printf("\n");
    for (const auto& row : rows) {
        for (size_t c = 0; c < std::size(kCols); ++c)
            std::printf("%s%*s", c ? "  " : "", kWidth[c],
                        cell(row.at(kCols[c])).c_str());
        std::printf("\n");
    }
    return 0;
}

} // namespace

int run(std::vector<std::string> args) {
    CLI::App app{"rack-aware regenerating array codes"};
    app.require_subcommand(1);

    // build
    auto* build = app.add_subcommand("build", "construct a code instance and save it");
    std::string build_config, build_out = "bundle.json";
    std::optional<uint64_t> build_seed;
    build->add_option("--config", build_config, "run configuration (JSON)")->required();
    build->add_option("--out", build_out, "bundle output path");
    build->add_option("--seed", build_seed, "override the coefficient search seed");

    // verify
    auto* ver = app.add_subcommand("verify", "re-check a stored instance");
    std::string ver_bundle, ver_mds;
    uint64_t ver_seed = 0;
    uint32_t ver_trials = 0;
    std::vector<uint32_t> ver_h;
    bool folded_on = false, folded_off = false, kernels_on = false, kernels_off = false;
    bool ver_json = false;
    ver->add_option("--bundle", ver_bundle, "bundle to verify")->required();
    ver->add_option("--mds", ver_mds, "erasure sweep plan: exhaustive or sample:N");
    ver->add_option("--trials", ver_trials, "repair round-trips per h");
    ver->add_option("--widths", ver_h, "repair widths h to exercise")->delimiter(',');
    ver->add_flag("--folded", folded_on, "force the folded-instance sweep on");
    ver->add_flag("--no-folded", folded_off, "skip the folded-instance sweep");
    ver->add_flag("--kernels", kernels_on, "force the kernel identity suite on");
    ver->add_flag("--no-kernels", kernels_off, "skip the kernel identity suite");
    ver->add_option("--seed", ver_seed, "sweep seed");
    ver->add_flag("--json", ver_json, "print the report as JSON");

    // repair
    auto* rep = app.add_subcommand("repair", "run a repair and print the ledger");
    std::string rep_bundle, rep_word;
    std::optional<uint32_t> rep_host;
    std::vector<uint32_t> rep_failed, rep_helpers, rep_h;
    std::optional<uint32_t> rep_extra;
    uint32_t rep_trials = 0;
    uint64_t rep_seed = 0;
    bool rep_json = false;
    rep->add_option("--bundle", rep_bundle, "bundle to repair against")->required();
    rep->add_option("--word", rep_word, "codeword file (default: seeded random word)");
    rep->add_option("--host", rep_host, "rack with the failures");
    rep->add_option("--failed", rep_failed, "failed in-rack node indices")->delimiter(',');
    rep->add_option("--helpers", rep_helpers, "helper racks")->delimiter(',');
    rep->add_option("--extra", rep_extra, "spare rack for the extended rounds");
    rep->add_option("--trials", rep_trials, "random round-trips instead of one plan");
    rep->add_option("--widths", rep_h, "widths h for --trials mode")->delimiter(',');
    rep->add_option("--seed", rep_seed, "word/trial seed");
    rep->add_flag("--json", rep_json, "print the ledger as JSON");

    // report
    auto* repo = app.add_subcommand("report", "one summary row per bundle");
    std::vector<std::string> repo_bundles;
    uint64_t repo_seed = 0;
    bool repo_json = false;
    repo->add_option("bundles", repo_bundles, "bundles to summarize");
    repo->add_option("--seed", repo_seed, "measurement word seed");
    repo->add_flag("--json", repo_json, "print the table as JSON");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (build->parsed()) return do_build(build_config, build_out, build_seed);

        if (ver->parsed()) {
            io::Bundle b = io::load_bundle(ver_bundle);
            io::Experiment exp = b.experiment;
            if (ver->count("--mds")) {
                io::parse_mds(ver_mds);
                exp.verify.mds = ver_mds;
            }
            if (ver->count("--trials")) exp.repair.trials = ver_trials;
            if (ver->count("--widths")) exp.repair.h = ver_h;
            if (folded_on) exp.verify.folded = true;
            if (folded_off) exp.verify.folded = false;
            if (kernels_on) exp.verify.kernels = true;
            if (kernels_off) exp.verify.kernels = false;
            return do_verify(ver_bundle, exp, ver_seed, ver_json);
        }

        if (rep->parsed()) {
            io::Bundle b = io::load_bundle(rep_bundle);
            RackCode code = io::code_from_bundle(b);
            if (rep_trials > 0) {
                if (rep_host || !rep_failed.empty() || !rep_helpers.empty() ||
                    !rep_word.empty())
                    throw Error(Errc::invalid_argument,
                                "--trials replaces --host/--failed/--helpers/--word");
                std::vector<uint32_t> hs = rep_h;
                if (hs.empty()) {
                    const CodeParams& p = code.params();
                    uint32_t cap = p.dbar + 1 < p.nbar ? p.h_max
                                                       : std::min(p.h_max, p.u - p.v);
                    for (uint32_t h = 1; h <= cap; ++h) hs.push_back(h);
                }
                verify::CheckOutcome out =
                    verify::repair_sweep(code, hs, rep_trials, rep_seed);
                if (out.ok) {
                    std::printf("PASS %s: %llu cases in %.2fs\n", out.name.c_str(),
                                static_cast<unsigned long long>(out.cases), out.seconds);
                    return 0;
                }
                std::printf("FAIL %s: %s\n", out.name.c_str(), out.detail.c_str());
                return 1;
            }
            if (!rep_host || rep_failed.empty() || rep_helpers.empty())
                throw Error(Errc::invalid_argument,
                            "repair needs --host, --failed and --helpers (or --trials)");
            Codeword word = rep_word.empty() ? code.random_codeword(rep_seed)
                                             : io::load_codeword(rep_word, code);
            return do_repair_single(code, word, *rep_host, rep_failed, rep_helpers,
                                    rep_extra, rep_json);
        }

        if (repo->parsed()) return do_report(repo_bundles, repo_seed, repo_json);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return errc_exit(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}

} // namespace rackmsr::cli
