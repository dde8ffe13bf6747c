#ifndef RACKMSR_GF_HPP
#define RACKMSR_GF_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "rackmsr/errors.hpp"

namespace rackmsr {

// Field element handle: 0 is the zero element, 1+e is xi^e.  The handle is
// only meaningful together with its Field, which owns the log/antilog tables.
struct Felt {
    uint32_t h = 0;
    bool is_zero() const { return h == 0; }
    friend bool operator==(const Felt&, const Felt&) = default;
};

// GF(p^m) with a primitive modulus, so the residue of the indeterminate is a
// generator xi of the multiplicative group.  Elements also have a packed
// "value" form (polynomial coefficients written base p) used for the wire
// formats; arithmetic goes through the tables.
class Field {
public:
    static constexpr uint32_t max_q = 1u << 20;

    // modulus: coefficients c0..cm (monic) or c0..c(m-1) with the leading 1
    // implied.  Omitted -> smallest packed-value primitive polynomial.
    static std::shared_ptr<const Field> make(uint32_t p, uint32_t m,
                                             std::optional<std::vector<uint32_t>> modulus = {});

    uint32_t p() const { return p_; }
    uint32_t m() const { return m_; }
    uint32_t q() const { return q_; }
    const std::vector<uint32_t>& modulus() const { return mod_; } // c0..cm

    Felt zero() const { return {}; }
    Felt one() const { return {1}; }
    Felt xi() const;

    Felt from_value(uint32_t v) const;  // packed base-p value in [0, q)
    uint32_t value(Felt a) const;
    Felt xi_pow(uint64_t e) const;      // xi^e
    uint32_t dlog(Felt a) const;        // errors on zero

    Felt add(Felt a, Felt b) const;
    Felt sub(Felt a, Felt b) const;
    Felt neg(Felt a) const;
    Felt mul(Felt a, Felt b) const;
    Felt inv(Felt a) const;
    Felt pow(Felt a, int64_t e) const;  // negative e inverts first

    Felt element_of_order(uint32_t u) const; // xi^((q-1)/u)
    uint64_t order(Felt a) const;            // multiplicative order

    bool compatible(const Field& o) const {
        return p_ == o.p_ && m_ == o.m_ && mod_ == o.mod_;
    }

private:
    Field() = default;
    bool build_tables(); // true iff the current modulus is primitive

    uint32_t p_ = 0, m_ = 0, q_ = 0;
    std::vector<uint32_t> mod_;          // c0..cm, cm = 1
    std::vector<uint32_t> val_from_log_; // size q-1
    std::vector<uint32_t> log_from_val_; // size q, [0] unused
};

} // namespace rackmsr

#endif
