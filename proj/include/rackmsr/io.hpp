#ifndef RACKMSR_IO_HPP
#define RACKMSR_IO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rackmsr/codes.hpp"

namespace rackmsr::io {

// Experiment defaults travel from the config into the bundle, so a bundle
// replays the same checks anywhere; command-line flags override per run.
struct VerifySpec {
    std::string mds = "exhaustive"; // "exhaustive" or "sample:N"
    bool folded = true;
    bool kernels = true;
};

struct RepairSpec {
    uint32_t trials = 10;
    std::vector<uint32_t> h; // empty = every h in [1, h_max]
};

struct Experiment {
    VerifySpec verify;
    RepairSpec repair;
};

struct LambdaSpec {
    std::string mode = "explicit";   // "explicit" | "search"
    std::string strategy = "greedy"; // search only
    uint64_t seed = 0;
    uint64_t max_tries = 200000;
};

struct RunConfig {
    uint32_t p = 0, m = 0;
    std::vector<uint32_t> modulus; // empty = pick the smallest primitive one
    uint32_t n = 0, k = 0, u = 0, dbar = 0;
    Theorem theorem = Theorem::T1;
    LambdaSpec lambda;
    Experiment experiment;
};

RunConfig load_config(const std::string& path);

// nullopt = exhaustive, value = sample count; rejects anything else.
std::optional<uint64_t> parse_mds(const std::string& spec);

// FNV-1a over the handle words of every parity block in node order.
std::string parity_hash(const RackCode& code);

// Everything needed to rebuild one code instance bit for bit.
struct Bundle {
    uint32_t p = 0, m = 0;
    std::vector<uint32_t> modulus; // c0..cm as actually built
    uint32_t n = 0, k = 0, u = 0, dbar = 0;
    Theorem theorem = Theorem::T1;
    std::string lambda_mode;     // "explicit" | "search"
    std::string lambda_strategy; // search only, else empty
    uint64_t lambda_seed = 0;
    uint32_t theta = 0;            // discrete log
    std::vector<uint32_t> lambdas; // discrete logs, parent_nbar * sbar of them
    std::string hash;              // "fnv1a64:<16 hex digits>"
    Experiment experiment;
};

Bundle bundle_of(const RackCode& code, const Experiment& exp);
std::string bundle_to_json(const Bundle& b); // sorted keys, stable bytes
void save_bundle(const std::string& path, const Bundle& b);
Bundle load_bundle(const std::string& path);
// Rebuilds the code, re-verifying the coefficients and the parity hash.
RackCode code_from_bundle(const Bundle& b);

void save_codeword(const std::string& path, const RackCode& code, const Codeword& c);
Codeword load_codeword(const std::string& path, const RackCode& code);

} // namespace rackmsr::io

#endif
