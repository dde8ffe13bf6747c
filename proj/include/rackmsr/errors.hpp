#ifndef RACKMSR_ERRORS_HPP
#define RACKMSR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rackmsr {

// Every failure mode gets its own code so callers (and the CLI exit-code
// mapping) can tell validation problems, search exhaustion, and property
// failures apart without parsing messages.
enum class Errc {
    // validation / configuration (CLI exit 2)
    invalid_argument,
    nondivisible_nodes,    // u does not divide n
    storage_out_of_range,  // u outside [1, min(k, n-k)]
    helpers_out_of_range,  // d_bar outside [k_bar, n_bar-1]
    message_out_of_range,  // k outside [1, n-1]
    h_out_of_range,        // repair width outside [1, h_max]
    not_prime,
    bad_modulus,           // wrong degree, non-monic, not primitive
    field_too_large,       // q above the table cap
    bad_order,             // requested order does not divide q-1
    enumeration_too_large, // constraint enumeration beyond group*u cap
    explicit_unavailable,  // explicit lambda assignment out of capacity
    field_mismatch,
    shape_mismatch,
    io_error,
    // linear algebra outcomes
    singular_matrix,
    inconsistent_system,
    division_by_zero,
    // search (CLI exit 3)
    pool_exhausted,
    // property checks (CLI exit 1)
    verification_failed,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc c, const std::string& msg)
        : std::runtime_error(std::string(errc_name(c)) + ": " + msg), code_(c) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

} // namespace rackmsr

#endif
