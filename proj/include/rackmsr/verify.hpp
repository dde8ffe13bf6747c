#ifndef RACKMSR_VERIFY_HPP
#define RACKMSR_VERIFY_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rackmsr/codes.hpp"
#include "rackmsr/io.hpp"

namespace rackmsr::verify {

struct CheckOutcome {
    std::string name;
    bool ok = true;
    std::string detail; // first failure, or a short summary when passing
    uint64_t cases = 0; // work units examined
    double seconds = 0.0;
};

struct Report {
    std::vector<CheckOutcome> checks;
    bool ok() const;
};

// Worker count: RACKMSR_THREADS when set and positive, else the hardware.
uint32_t thread_count();

// Runs fn(i) for every i in [0, count); fn returns an empty string on
// success.  Reports the failure with the lowest index, so results do not
// depend on scheduling.  Exceptions inside fn count as failures.
std::optional<std::pair<uint64_t, std::string>>
parallel_scan(uint64_t count, const std::function<std::string(uint64_t)>& fn);

// Random-input checks of the kernel layer: blow-up multiplicativity, the
// selector partition, both conjugation rules, and the projection chain.
CheckOutcome kernel_suite(const Field* F, uint32_t sbar, uint32_t ntil,
                          uint32_t trials, uint64_t seed);

// Re-runs every coefficient constraint of the instance.
CheckOutcome constraint_sweep(const RackCode& code);

// Erasure decoding over r-subsets of nodes: all of them, or `sample` random
// ones.  A fresh random codeword is drawn per case.
CheckOutcome mds_sweep(const RackCode& code, std::optional<uint64_t> sample,
                       uint64_t seed);

// Folded instances for every projection index: residuals vanish and every
// erasable rack subset decodes back.
CheckOutcome folded_sweep(const RackCode& code, uint64_t seed);

// Random repair round-trips for each requested h, with ledger invariants.
CheckOutcome repair_sweep(const RackCode& code, const std::vector<uint32_t>& hs,
                          uint32_t trials, uint64_t seed);

// The sweeps an experiment spec asks for, in a fixed order.
Report run_all(const RackCode& code, const io::Experiment& exp, uint64_t seed);

} // namespace rackmsr::verify

#endif
