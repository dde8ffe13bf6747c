#ifndef RACKMSR_REPAIR_HPP
#define RACKMSR_REPAIR_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "rackmsr/codes.hpp"
#include "rackmsr/params.hpp"

namespace rackmsr {

// A repair episode: h failed nodes inside one host rack, served by dbar
// helper racks, plus one extra helper for the fold indices at or above u-v.
struct RepairPlan {
    uint32_t host = 0;              // failed rack
    uint32_t a = 0, b = 0;          // host group coordinates
    uint32_t h = 0;                 // failure count
    std::vector<uint32_t> I;        // failed in-rack indices, as given
    std::vector<uint32_t> J;        // surviving in-rack indices, sorted
    std::vector<uint32_t> helpers;  // dbar racks, sorted
    std::optional<uint32_t> extra;  // engaged only when h > u-v
};

struct RackTraffic {
    uint32_t rack = 0;
    uint64_t sent = 0;     // symbols uploaded to the host
    uint64_t accessed = 0; // distinct symbols read at the rack
    uint32_t rounds = 0;   // fold indices served
};

struct RepairResult {
    RepairPlan plan;
    std::vector<std::vector<Felt>> recovered; // per failed node, matching plan.I
    uint64_t bandwidth = 0;
    uint64_t access = 0;
    uint64_t bound_bw = 0;
    Frac bound_access;
    bool optimal_bw = false;
    bool optimal_access = false;
    Frac ratio; // bandwidth / bound_bw
    std::vector<RackTraffic> per_rack;
};

// Validates and normalizes a plan.  When no extra helper is given but the
// episode needs one (h > u-v), the smallest-index non-participating rack is
// drafted; when none is needed, any given extra is dropped.
RepairPlan plan_repair(const CodeParams& p, uint32_t host,
                       const std::vector<uint32_t>& failed_in_rack,
                       const std::vector<uint32_t>& helpers,
                       std::optional<uint32_t> extra = std::nullopt);

// In-rack selector index a helper or bystander rack answers with: the host's
// own b for plain hosts, the rack's own b (in-group) or the digit-sum
// selector sbar (out-group) when the host carries the diagonal-only kernel.
uint32_t answer_selector(const CodeParams& p, const RepairPlan& plan, uint32_t rack);

// The symbols of one node column a rack reads to serve the plan (row support
// of its answer selector).
std::vector<size_t> selector_support(const CodeParams& p, uint32_t a, uint32_t z);

// One helper's upload for fold index w: the selector applied to the
// theta-weighted combination of the rack's node columns.  Reads only the
// support coordinates.
std::vector<Felt> helper_payload(const RackCode& code, const Codeword& word,
                                 const RepairPlan& plan, uint32_t rack, uint32_t w);

// Runs the episode: per fold index, solves the punctured folded system from
// the payloads, then inverts the twiddle system across fold indices.  Reads
// nothing from the failed columns.
RepairResult repair(const RackCode& code, const Codeword& word, const RepairPlan& plan);

} // namespace rackmsr

#endif
