#ifndef RACKMSR_PARAMS_HPP
#define RACKMSR_PARAMS_HPP

#include <cstdint>
#include <numeric>
#include <string>

namespace rackmsr {

// The two construction families: T1 groups racks sbar at a time, T2 groups
// sbar+1 at a time (shaving one digit off the sub-packetization).
enum class Theorem { T1, T2 };

std::string theorem_name(Theorem t);
Theorem theorem_from_name(const std::string& s);

struct CodeParams {
    // raw inputs
    uint32_t n = 0, k = 0, u = 0, dbar = 0;
    Theorem theorem = Theorem::T1;
    // derived
    uint32_t nbar = 0, kbar = 0, v = 0, r = 0, rbar = 0, sbar = 0;
    uint32_t group = 0, ntil = 0, parent_nbar = 0, h_max = 0;
    uint64_t l = 0, lbar = 0;
    bool shortened = false;

    friend bool operator==(const CodeParams&, const CodeParams&) = default;
};

// Validates the raw tuple and fills in every derived quantity.  Each invariant
// violation throws with its own error code.
CodeParams derive(uint32_t n, uint32_t k, uint32_t u, uint32_t dbar, Theorem theorem);

// Count of two-column-group determinant conditions behind the sufficient
// field-size bound: (1/2) sum_t sum_delta C(sbar-1,t-1) C(ut,delta)
// C(delta-1,t-1) (delta-t+1)(delta+t-2).
uint64_t omega(uint32_t sbar, uint32_t u);

// Sufficient (not necessary) field size for explicit assignment to be
// guaranteed; construction happily accepts smaller q when selection succeeds.
uint64_t field_threshold(const CodeParams& p);

// Exact reduced fraction; all bound comparisons cross-multiply.
struct Frac {
    uint64_t num = 0, den = 1;
    static Frac make(uint64_t n, uint64_t d) {
        uint64_t g = std::gcd(n, d);
        return {n / (g ? g : 1), d / (g ? g : 1)};
    }
    friend bool operator==(const Frac&, const Frac&) = default;
    std::string str() const {
        return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }
};

// Minimum inter-rack download for repairing h nodes in one rack: dbar*h*l/sbar.
uint64_t bandwidth_bound(const CodeParams& p, uint32_t h);
// Minimum helper-rack reads: dbar*h*u*l/(sbar*(u-v)), exact rational.
Frac access_bound(const CodeParams& p, uint32_t h);

} // namespace rackmsr

#endif
