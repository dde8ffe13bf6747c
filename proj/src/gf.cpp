#include "rackmsr/gf.hpp"

#include <numeric>
#include <string>

namespace rackmsr {

const char* errc_name(Errc c) {
    switch (c) {
    case Errc::invalid_argument: return "invalid argument";
    case Errc::nondivisible_nodes: return "rack size does not divide node count";
    case Errc::storage_out_of_range: return "nodes-per-rack out of range";
    case Errc::helpers_out_of_range: return "helper rack count out of range";
    case Errc::message_out_of_range: return "message length out of range";
    case Errc::h_out_of_range: return "failure count out of range";
    case Errc::not_prime: return "characteristic is not prime";
    case Errc::bad_modulus: return "bad modulus";
    case Errc::field_too_large: return "field exceeds table cap";
    case Errc::bad_order: return "order does not divide q-1";
    case Errc::enumeration_too_large: return "constraint enumeration too large";
    case Errc::explicit_unavailable: return "explicit assignment unavailable";
    case Errc::field_mismatch: return "field mismatch";
    case Errc::shape_mismatch: return "shape mismatch";
    case Errc::io_error: return "io error";
    case Errc::singular_matrix: return "singular matrix";
    case Errc::inconsistent_system: return "inconsistent system";
    case Errc::division_by_zero: return "division by zero";
    case Errc::pool_exhausted: return "pool exhausted";
    case Errc::verification_failed: return "verification failed";
    }
    return "unknown error";
}

namespace {

bool is_prime(uint32_t p) {
    if (p < 2) return false;
    for (uint32_t d = 2; (uint64_t)d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

// packed base-p <-> coefficient helpers
uint32_t pack(const std::vector<uint32_t>& c, uint32_t p) {
    uint32_t v = 0;
    for (size_t i = c.size(); i-- > 0;) v = v * p + c[i];
    return v;
}

std::vector<uint32_t> unpack(uint32_t v, uint32_t p, uint32_t m) {
    std::vector<uint32_t> c(m, 0);
    for (uint32_t i = 0; i < m; ++i) { c[i] = v % p; v /= p; }
    return c;
}

} // namespace

bool Field::build_tables() {
    // Fill the antilog table by repeated multiplication with x modulo the
    // modulus.  The modulus is primitive exactly when this walk visits q-1
    // distinct nonzero residues and returns to 1 afterwards.
    val_from_log_.assign(q_ - 1, 0);
    log_from_val_.assign(q_, UINT32_MAX);
    std::vector<uint32_t> cur(m_, 0);
    cur[0] = 1;
    for (uint32_t i = 0; i < q_ - 1; ++i) {
        uint32_t v = pack(cur, p_);
        if (v == 0 || log_from_val_[v] != UINT32_MAX) return false;
        val_from_log_[i] = v;
        log_from_val_[v] = i;
        // multiply by x, reduce: x^m = -(c_{m-1} x^{m-1} + ... + c_0)
        uint32_t carry = cur[m_ - 1];
        for (size_t j = m_; j-- > 1;) cur[j] = cur[j - 1];
        cur[0] = 0;
        if (carry != 0)
            for (uint32_t j = 0; j < m_; ++j)
                cur[j] = (uint32_t)((cur[j] + (uint64_t)carry * (p_ - mod_[j])) % p_);
    }
    return pack(cur, p_) == 1;
}

std::shared_ptr<const Field> Field::make(uint32_t p, uint32_t m,
                                         std::optional<std::vector<uint32_t>> modulus) {
    if (!is_prime(p)) throw Error(Errc::not_prime, "p = " + std::to_string(p));
    if (m < 1) throw Error(Errc::invalid_argument, "extension degree m must be >= 1");
    uint64_t q = 1;
    for (uint32_t i = 0; i < m; ++i) {
        q *= p;
        if (q > max_q)
            throw Error(Errc::field_too_large,
                        "p^m exceeds cap 2^20 (p=" + std::to_string(p) + ", m=" + std::to_string(m) + ")");
    }
    auto F = std::shared_ptr<Field>(new Field());
    F->p_ = p;
    F->m_ = m;
    F->q_ = (uint32_t)q;
    if (modulus) {
        std::vector<uint32_t> c = *modulus;
        if (c.size() == m) c.push_back(1); // implied monic leading coefficient
        if (c.size() != m + 1)
            throw Error(Errc::bad_modulus, "expected degree " + std::to_string(m) + " coefficients");
        if (c[m] != 1) throw Error(Errc::bad_modulus, "modulus must be monic");
        for (uint32_t ci : c)
            if (ci >= p) throw Error(Errc::bad_modulus, "coefficient not reduced mod p");
        F->mod_ = c;
        if (!F->build_tables())
            throw Error(Errc::bad_modulus, "modulus is not primitive over GF(" + std::to_string(p) + ")");
    } else {
        // Smallest packed value first: the low-coefficient pack enumerates
        // candidates x^m + c_{m-1}x^{m-1} + ... + c_0 deterministically.
        bool found = false;
        for (uint32_t t = 0; t < F->q_; ++t) {
            std::vector<uint32_t> c = unpack(t, p, m);
            if (c[0] == 0) continue; // divisible by x, never primitive
            c.push_back(1);
            F->mod_ = c;
            if (F->build_tables()) { found = true; break; }
        }
        if (!found) throw Error(Errc::bad_modulus, "no primitive polynomial found"); // unreachable
    }
    return F;
}

Felt Field::xi() const { return xi_pow(1); }

Felt Field::from_value(uint32_t v) const {
    if (v >= q_) throw Error(Errc::invalid_argument, "value out of range");
    if (v == 0) return {};
    return {log_from_val_[v] + 1};
}

uint32_t Field::value(Felt a) const {
    if (a.is_zero()) return 0;
    if (a.h > q_ - 1) throw Error(Errc::invalid_argument, "bad element handle");
    return val_from_log_[a.h - 1];
}

Felt Field::xi_pow(uint64_t e) const { return {(uint32_t)(e % (q_ - 1)) + 1}; }

uint32_t Field::dlog(Felt a) const {
    if (a.is_zero()) throw Error(Errc::division_by_zero, "zero has no discrete log");
    return a.h - 1;
}

Felt Field::add(Felt a, Felt b) const {
    uint32_t va = value(a), vb = value(b);
    if (p_ == 2) return from_value(va ^ vb);
    uint32_t out = 0, mult = 1;
    for (uint32_t i = 0; i < m_; ++i) {
        out += (va % p_ + vb % p_) % p_ * mult;
        va /= p_; vb /= p_; mult *= p_;
    }
    return from_value(out);
}

Felt Field::neg(Felt a) const {
    if (p_ == 2 || a.is_zero()) return a;
    uint32_t va = value(a), out = 0, mult = 1;
    for (uint32_t i = 0; i < m_; ++i) {
        out += (p_ - va % p_) % p_ * mult;
        va /= p_; mult *= p_;
    }
    return from_value(out);
}

Felt Field::sub(Felt a, Felt b) const { return add(a, neg(b)); }

Felt Field::mul(Felt a, Felt b) const {
    if (a.is_zero() || b.is_zero()) return {};
    return {(uint32_t)(((uint64_t)(a.h - 1) + (b.h - 1)) % (q_ - 1)) + 1};
}

Felt Field::inv(Felt a) const {
    if (a.is_zero()) throw Error(Errc::division_by_zero, "inverse of zero");
    return {(uint32_t)((q_ - 1 - (a.h - 1)) % (q_ - 1)) + 1};
}

Felt Field::pow(Felt a, int64_t e) const {
    if (a.is_zero()) {
        if (e > 0) return {};
        if (e == 0) return one();
        throw Error(Errc::division_by_zero, "negative power of zero");
    }
    int64_t L = q_ - 1;
    int64_t d = ((int64_t)(a.h - 1) * (((e % L) + L) % L)) % L;
    return {(uint32_t)d + 1};
}

Felt Field::element_of_order(uint32_t u) const {
    if (u == 0 || (q_ - 1) % u != 0)
        throw Error(Errc::bad_order, std::to_string(u) + " does not divide q-1 = " + std::to_string(q_ - 1));
    return xi_pow((q_ - 1) / u);
}

uint64_t Field::order(Felt a) const {
    if (a.is_zero()) throw Error(Errc::division_by_zero, "zero has no multiplicative order");
    return (q_ - 1) / std::gcd<uint64_t>(q_ - 1, a.h - 1);
}

} // namespace rackmsr
