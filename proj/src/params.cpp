#include "rackmsr/params.hpp"

#include "rackmsr/errors.hpp"

namespace rackmsr {

std::string theorem_name(Theorem t) { return t == Theorem::T1 ? "T1" : "T2"; }

Theorem theorem_from_name(const std::string& s) {
    if (s == "T1") return Theorem::T1;
    if (s == "T2") return Theorem::T2;
    throw Error(Errc::invalid_argument, "unknown construction family '" + s + "' (want T1 or T2)");
}

CodeParams derive(uint32_t n, uint32_t k, uint32_t u, uint32_t dbar, Theorem theorem) {
    CodeParams p;
    p.n = n; p.k = k; p.u = u; p.dbar = dbar; p.theorem = theorem;
    if (n == 0 || k == 0 || k >= n)
        throw Error(Errc::message_out_of_range,
                    "need 1 <= k < n, got n=" + std::to_string(n) + " k=" + std::to_string(k));
    if (u == 0 || n % u != 0)
        throw Error(Errc::nondivisible_nodes,
                    "u=" + std::to_string(u) + " must divide n=" + std::to_string(n));
    if (u > k || u > n - k)
        throw Error(Errc::storage_out_of_range,
                    "u=" + std::to_string(u) + " must be <= min(k, n-k)");
    p.nbar = n / u;
    p.kbar = k / u;
    p.v = k - p.kbar * u;
    p.r = n - k;
    p.rbar = p.nbar - p.kbar;
    // dbar = kbar is the degenerate sbar = 1 point (scalar parity columns).
    if (dbar < p.kbar || dbar > p.nbar - 1)
        throw Error(Errc::helpers_out_of_range,
                    "dbar=" + std::to_string(dbar) + " must lie in [" + std::to_string(p.kbar) +
                        ", " + std::to_string(p.nbar - 1) + "]");
    p.sbar = dbar - p.kbar + 1;
    p.group = (theorem == Theorem::T1) ? p.sbar : p.sbar + 1;
    p.ntil = (p.nbar + p.group - 1) / p.group;
    p.parent_nbar = p.group * p.ntil;
    p.shortened = p.parent_nbar != p.nbar;
    p.l = 1;
    for (uint32_t i = 0; i < p.ntil; ++i) p.l *= p.sbar;
    p.lbar = p.l / p.sbar;
    p.h_max = std::min(u, p.sbar * u - p.v);
    return p;
}

namespace {

uint64_t checked_mul(uint64_t a, uint64_t b) {
    uint64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        throw Error(Errc::invalid_argument, "omega: intermediate value overflows 64 bits");
    return r;
}

uint64_t binom(uint64_t n, uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    uint64_t r = 1;
    for (uint64_t i = 1; i <= k; ++i) r = checked_mul(r, n - k + i) / i;
    return r;
}

} // namespace

uint64_t omega(uint32_t sbar, uint32_t u) {
    if (sbar < 1 || u < 1) throw Error(Errc::invalid_argument, "omega: need sbar >= 1 and u >= 1");
    uint64_t twice = 0;
    for (uint64_t t = 1; t <= sbar; ++t)
        for (uint64_t d = t; d <= (uint64_t)u * t; ++d) {
            uint64_t term = checked_mul(binom(sbar - 1, t - 1), binom((uint64_t)u * t, d));
            term = checked_mul(term, binom(d - 1, t - 1));
            term = checked_mul(term, (d - t + 1) * (d + t - 2));
            if (__builtin_add_overflow(twice, term, &twice))
                throw Error(Errc::invalid_argument, "omega: sum overflows 64 bits");
        }
    return twice / 2;
}

uint64_t field_threshold(const CodeParams& p) {
    uint64_t ps = (p.theorem == Theorem::T1) ? p.sbar : p.sbar + 1;
    // tail term: (ps-1) * 2^(ps-2), zero when ps = 1
    uint64_t tail = (ps >= 2) ? (ps - 1) * ((uint64_t)1 << (ps - 2)) : 0;
    return (uint64_t)p.n * p.sbar + (uint64_t)p.u * (omega((uint32_t)ps, p.u) + tail);
}

uint64_t bandwidth_bound(const CodeParams& p, uint32_t h) {
    if (h < 1 || h > p.h_max)
        throw Error(Errc::h_out_of_range,
                    "h=" + std::to_string(h) + " outside [1, " + std::to_string(p.h_max) + "]");
    return (uint64_t)p.dbar * h * p.lbar;
}

Frac access_bound(const CodeParams& p, uint32_t h) {
    if (h < 1 || h > p.h_max)
        throw Error(Errc::h_out_of_range,
                    "h=" + std::to_string(h) + " outside [1, " + std::to_string(p.h_max) + "]");
    return Frac::make((uint64_t)p.dbar * h * p.u * p.lbar, p.u - p.v);
}

} // namespace rackmsr
