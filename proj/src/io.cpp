#include "rackmsr/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace rackmsr::io {

namespace {

using nlohmann::json;

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot open " + path);
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception& e) {
        throw Error(Errc::io_error, path + ": " + e.what());
    }
}

const json& need(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end() )
        throw Error(Errc::invalid_argument, where + " is missing \"" + key + "\"");
    return *it;
}

uint32_t get_u32(const json& j, const char* key, const std::string& where) {
    const json& v = need(j, key, where);
    if (!v.is_number_unsigned())
        throw Error(Errc::invalid_argument,
                    where + "." + key + " must be a nonnegative integer");
    return v.get<uint32_t>();
}

uint64_t get_u64(const json& j, const char* key, const std::string& where, uint64_t dflt) {
    auto it = j.find(key);
    if (it == j.end()) return dflt;
    if (!it->is_number_unsigned())
        throw Error(Errc::invalid_argument,
                    where + "." + key + " must be a nonnegative integer");
    return it->get<uint64_t>();
}

std::string get_str(const json& j, const char* key, const std::string& where,
                    const std::string& dflt) {
    auto it = j.find(key);
    if (it == j.end()) return dflt;
    if (!it->is_string())
        throw Error(Errc::invalid_argument, where + "." + key + " must be a string");
    return it->get<std::string>();
}

bool get_bool(const json& j, const char* key, const std::string& where, bool dflt) {
    auto it = j.find(key);
    if (it == j.end()) return dflt;
    if (!it->is_boolean())
        throw Error(Errc::invalid_argument, where + "." + key + " must be a boolean");
    return it->get<bool>();
}

std::vector<uint32_t> get_u32_list(const json& v, const std::string& where) {
    if (!v.is_array())
        throw Error(Errc::invalid_argument, where + " must be an array of integers");
    std::vector<uint32_t> out;
    for (const json& e : v) {
        if (!e.is_number_unsigned())
            throw Error(Errc::invalid_argument, where + " must hold nonnegative integers");
        out.push_back(e.get<uint32_t>());
    }
    return out;
}

Experiment experiment_from(const json& j, const std::string& where) {
    Experiment exp;
    auto it = j.find("experiment");
    if (it == j.end()) return exp;
    const json& e = *it;
    if (auto v = e.find("verify"); v != e.end()) {
        exp.verify.mds = get_str(*v, "mds", where + ".experiment.verify", "exhaustive");
        parse_mds(exp.verify.mds); // shape check up front
        exp.verify.folded = get_bool(*v, "folded", where + ".experiment.verify", true);
        exp.verify.kernels = get_bool(*v, "kernels", where + ".experiment.verify", true);
    }
    if (auto r = e.find("repair"); r != e.end()) {
        exp.repair.trials = static_cast<uint32_t>(
            get_u64(*r, "trials", where + ".experiment.repair", 10));
        if (auto h = r->find("h"); h != r->end())
            exp.repair.h = get_u32_list(*h, where + ".experiment.repair.h");
    }
    return exp;
}

json experiment_json(const Experiment& exp) {
    return json{{"verify", {{"mds", exp.verify.mds},
                            {"folded", exp.verify.folded},
                            {"kernels", exp.verify.kernels}}},
                {"repair", {{"trials", exp.repair.trials}, {"h", exp.repair.h}}}};
}

} // namespace

RunConfig load_config(const std::string& path) {
    json j = parse_file(path);
    RunConfig cfg;
    const json& f = need(j, "field", path);
    cfg.p = get_u32(f, "p", path + ".field");
    cfg.m = get_u32(f, "m", path + ".field");
    if (auto it = f.find("modulus"); it != f.end())
        cfg.modulus = get_u32_list(*it, path + ".field.modulus");
    const json& pj = need(j, "params", path);
    cfg.n = get_u32(pj, "n", path + ".params");
    cfg.k = get_u32(pj, "k", path + ".params");
    cfg.u = get_u32(pj, "u", path + ".params");
    cfg.dbar = get_u32(pj, "d_bar", path + ".params");
    cfg.theorem = theorem_from_name(
        need(pj, "theorem", path + ".params").get<std::string>());
    if (auto it = j.find("lambda"); it != j.end()) {
        cfg.lambda.mode = get_str(*it, "mode", path + ".lambda", "explicit");
        if (cfg.lambda.mode != "explicit" && cfg.lambda.mode != "search")
            throw Error(Errc::invalid_argument,
                        path + ".lambda.mode must be \"explicit\" or \"search\"");
        cfg.lambda.strategy = get_str(*it, "strategy", path + ".lambda", "greedy");
        if (cfg.lambda.strategy != "greedy" && cfg.lambda.strategy != "random")
            throw Error(Errc::invalid_argument,
                        path + ".lambda.strategy must be \"greedy\" or \"random\"");
        cfg.lambda.seed = get_u64(*it, "seed", path + ".lambda", 0);
        cfg.lambda.max_tries = get_u64(*it, "max_tries", path + ".lambda", 200000);
    }
    cfg.experiment = experiment_from(j, path);
    return cfg;
}

std::optional<uint64_t> parse_mds(const std::string& spec) {
    if (spec == "exhaustive") return std::nullopt;
    const std::string prefix = "sample:";
    if (spec.rfind(prefix, 0) == 0) {
        const std::string num = spec.substr(prefix.size());
        if (!num.empty() && num.find_first_not_of("0123456789") == std::string::npos) {
            uint64_t count = std::stoull(num);
            if (count > 0) return count;
        }
    }
    throw Error(Errc::invalid_argument,
                "mds plan must be \"exhaustive\" or \"sample:N\", got \"" + spec + "\"");
}

std::string parity_hash(const RackCode& code) {
    uint64_t h = 0xcbf29ce484222325ull;
    auto eat = [&h](uint32_t w) {
        for (int i = 0; i < 4; ++i) {
            h ^= (w >> (8 * i)) & 0xffu;
            h *= 0x100000001b3ull;
        }
    };
    for (uint32_t node = 0; node < code.params().n; ++node)
        for (const Felt& e : code.parity_block(node).a) eat(e.h);
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Bundle bundle_of(const RackCode& code, const Experiment& exp) {
    const Field* F = code.field();
    const CodeParams& p = code.params();
    const LambdaSet& ls = code.lambdas();
    Bundle b;
    b.p = F->p();
    b.m = F->m();
    b.modulus = F->modulus();
    b.n = p.n;
    b.k = p.k;
    b.u = p.u;
    b.dbar = p.dbar;
    b.theorem = p.theorem;
    b.lambda_mode =
        ls.mode == LambdaSet::Mode::explicit_assignment ? "explicit" : "search";
    b.lambda_strategy = ls.mode == LambdaSet::Mode::searched ? ls.strategy : "";
    b.lambda_seed = ls.seed;
    b.theta = F->dlog(ls.theta);
    for (const Felt& v : ls.lam) b.lambdas.push_back(F->dlog(v));
    b.hash = parity_hash(code);
    b.experiment = exp;
    return b;
}

std::string bundle_to_json(const Bundle& b) {
    json j{{"format", "rackmsr-bundle"},
           {"version", 1},
           {"field", {{"p", b.p}, {"m", b.m}, {"modulus", b.modulus}}},
           {"params",
            {{"n", b.n},
             {"k", b.k},
             {"u", b.u},
             {"d_bar", b.dbar},
             {"theorem", theorem_name(b.theorem)}}},
           {"lambda",
            {{"mode", b.lambda_mode},
             {"strategy", b.lambda_strategy},
             {"seed", b.lambda_seed},
             {"theta", b.theta},
             {"values", b.lambdas}}},
           {"parity_hash", b.hash},
           {"experiment", experiment_json(b.experiment)}};
    return j.dump(2) + "\n";
}

void save_bundle(const std::string& path, const Bundle& b) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::io_error, "cannot write " + path);
    out << bundle_to_json(b);
    if (!out) throw Error(Errc::io_error, "short write to " + path);
}

Bundle load_bundle(const std::string& path) {
    json j = parse_file(path);
    if (get_str(j, "format", path, "") != "rackmsr-bundle")
        throw Error(Errc::io_error, path + " is not a rackmsr bundle");
    if (get_u64(j, "version", path, 0) != 1)
        throw Error(Errc::io_error, path + ": unsupported bundle version");
    Bundle b;
    const json& f = need(j, "field", path);
    b.p = get_u32(f, "p", path + ".field");
    b.m = get_u32(f, "m", path + ".field");
    b.modulus = get_u32_list(need(f, "modulus", path + ".field"), path + ".field.modulus");
    const json& pj = need(j, "params", path);
    b.n = get_u32(pj, "n", path + ".params");
    b.k = get_u32(pj, "k", path + ".params");
    b.u = get_u32(pj, "u", path + ".params");
    b.dbar = get_u32(pj, "d_bar", path + ".params");
    b.theorem =
        theorem_from_name(need(pj, "theorem", path + ".params").get<std::string>());
    const json& lj = need(j, "lambda", path);
    b.lambda_mode = get_str(lj, "mode", path + ".lambda", "");
    b.lambda_strategy = get_str(lj, "strategy", path + ".lambda", "");
    b.lambda_seed = get_u64(lj, "seed", path + ".lambda", 0);
    b.theta = get_u32(lj, "theta", path + ".lambda");
    b.lambdas = get_u32_list(need(lj, "values", path + ".lambda"), path + ".lambda.values");
    b.hash = need(j, "parity_hash", path).get<std::string>();
    b.experiment = experiment_from(j, path);
    return b;
}

RackCode code_from_bundle(const Bundle& b) {
    auto F = Field::make(b.p, b.m, b.modulus);
    CodeParams p = derive(b.n, b.k, b.u, b.dbar, b.theorem);
    LambdaSet ls;
    if (b.lambda_mode == "explicit")
        ls.mode = LambdaSet::Mode::explicit_assignment;
    else if (b.lambda_mode == "search")
        ls.mode = LambdaSet::Mode::searched;
    else
        throw Error(Errc::invalid_argument, "unknown lambda mode \"" + b.lambda_mode + "\"");
    ls.strategy = b.lambda_strategy;
    ls.seed = b.lambda_seed;
    if (b.theta >= F->q() - 1)
        throw Error(Errc::invalid_argument, "theta exponent out of range");
    ls.theta = F->xi_pow(b.theta);
    for (uint32_t d : b.lambdas) {
        if (d >= F->q() - 1)
            throw Error(Errc::invalid_argument, "lambda exponent out of range");
        ls.lam.push_back(F->xi_pow(d));
    }
    CheckResult chk = validate_lambda_set(F.get(), p, ls);
    if (!chk.ok)
        throw Error(Errc::verification_failed, "bundle coefficients: " + chk.first_failure);
    ls.verified = true;
    RackCode code(F, p, std::move(ls));
    std::string computed = parity_hash(code);
    if (computed != b.hash)
        throw Error(Errc::verification_failed, "parity hash mismatch: bundle records " +
                                                   b.hash + ", code computes " + computed);
    return code;
}

void save_codeword(const std::string& path, const RackCode& code, const Codeword& c) {
    const CodeParams& p = code.params();
    const Field* F = code.field();
    if (c.size() != static_cast<size_t>(p.n) * p.l)
        throw Error(Errc::shape_mismatch, "codeword must hold n*l symbols");
    std::ofstream out(path);
    if (!out) throw Error(Errc::io_error, "cannot write " + path);
    out << "rackmsr-codeword v1\n";
    out << "field " << F->p() << ' ' << F->m();
    for (uint32_t coef : F->modulus()) out << ' ' << coef;
    out << '\n';
    out << "params " << p.n << ' ' << p.k << ' ' << p.u << ' ' << p.dbar << ' '
        << theorem_name(p.theorem) << '\n';
    out << "hash " << parity_hash(code) << '\n';
    char buf[16];
    for (uint32_t node = 0; node < p.n; ++node) {
        for (uint64_t t = 0; t < p.l; ++t) {
            std::snprintf(buf, sizeof buf, "%x", c[node * p.l + t].h);
            out << (t ? " " : "") << buf;
        }
        out << '\n';
    }
    if (!out) throw Error(Errc::io_error, "short write to " + path);
}

Codeword load_codeword(const std::string& path, const RackCode& code) {
    const CodeParams& p = code.params();
    const Field* F = code.field();
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot open " + path);
    std::string line;
    auto next = [&](const char* what) -> std::string& {
        if (!std::getline(in, line))
            throw Error(Errc::io_error, path + ": truncated before " + what);
        return line;
    };
    if (next("the header") != "rackmsr-codeword v1")
        throw Error(Errc::io_error, path + " is not a rackmsr codeword file");
    {
        std::istringstream fs(next("the field line"));
        std::string tag;
        uint32_t fp = 0, fm = 0;
        fs >> tag >> fp >> fm;
        std::vector<uint32_t> mod;
        for (uint32_t coef; fs >> coef;) mod.push_back(coef);
        if (tag != "field" || fp != F->p() || fm != F->m() || mod != F->modulus())
            throw Error(Errc::field_mismatch, path + " was written over a different field");
    }
    {
        std::istringstream ps(next("the params line"));
        std::string tag, th;
        uint32_t n = 0, k = 0, u = 0, dbar = 0;
        ps >> tag >> n >> k >> u >> dbar >> th;
        if (tag != "params" || n != p.n || k != p.k || u != p.u || dbar != p.dbar ||
            th != theorem_name(p.theorem))
            throw Error(Errc::shape_mismatch, path + " was written for different parameters");
    }
    {
        std::istringstream hs(next("the hash line"));
        std::string tag, hash;
        hs >> tag >> hash;
        if (tag != "hash" || hash != parity_hash(code))
            throw Error(Errc::invalid_argument,
                        path + " belongs to a different code instance (parity hash differs)");
    }
    Codeword c(static_cast<size_t>(p.n) * p.l);
    for (uint32_t node = 0; node < p.n; ++node) {
        std::istringstream ls(next("a node line"));
        for (uint64_t t = 0; t < p.l; ++t) {
            std::string tok;
            if (!(ls >> tok))
                throw Error(Errc::io_error, path + ": node line is short");
            if (tok.size() > 8 ||
                tok.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos)
                throw Error(Errc::io_error, path + ": bad symbol \"" + tok + "\"");
            unsigned long v = std::stoul(tok, nullptr, 16);
            if (v >= F->q())
                throw Error(Errc::io_error, path + ": bad symbol \"" + tok + "\"");
            c[node * p.l + t] = Felt{static_cast<uint32_t>(v)};
        }
    }
    return c;
}

} // namespace rackmsr::io
