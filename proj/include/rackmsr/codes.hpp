#ifndef RACKMSR_CODES_HPP
#define RACKMSR_CODES_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "rackmsr/gf.hpp"
#include "rackmsr/kernels.hpp"
#include "rackmsr/lambdas.hpp"
#include "rackmsr/matrix.hpp"
#include "rackmsr/params.hpp"

namespace rackmsr {

// Node-major storage: node i owns entries [i*l, (i+1)*l).
using Codeword = std::vector<Felt>;

struct NodePos {
    uint32_t rack = 0; // node / u
    uint32_t a = 0;    // rack / group
    uint32_t b = 0;    // rack % group
    uint32_t g = 0;    // node % u
};

NodePos node_pos(const CodeParams& p, uint32_t node);

// Block height of the w-th folded code: rbar below the threshold u-v,
// rbar-1 at or above it (where the projection loses one row per column).
uint32_t folded_height(const CodeParams& p, uint32_t w);

// One folded instance: per visible rack, the theta-weighted combination of
// the rack's node columns, twisted by the w-th diagonal power.
struct FoldedView {
    uint32_t w = 0;
    uint32_t m = 0;
    std::vector<Mat> cbar; // nbar columns, each l x 1
};

class RackCode {
  public:
    RackCode(std::shared_ptr<const Field> field, const CodeParams& params, LambdaSet lambdas);

    const CodeParams& params() const { return p_; }
    const Field* field() const { return field_.get(); }
    const std::shared_ptr<const Field>& field_ptr() const { return field_; }
    const LambdaSet& lambdas() const { return lambdas_; }
    KernelCtx kernel_ctx() const { return {field_.get(), p_.sbar, p_.ntil}; }

    // Parity block of a visible node, (l*r) x l.
    const Mat& parity_block(uint32_t node) const;
    // Parity block of a visible rack in the w-th folded code, (l*m) x l.
    Mat folded_parity_block(uint32_t rack, uint32_t w) const;

    // Fills nodes [0,k) with the message and solves the parity equations for
    // the remaining r node columns.
    Codeword encode(const std::vector<Felt>& message) const;
    Mat parity_residual(const Codeword& c) const; // (l*r) x 1
    bool is_codeword(const Codeword& c) const;
    // Recovers up to r erased node columns from the rest.
    Codeword erase_decode(Codeword word, const std::vector<uint32_t>& erased) const;

    FoldedView fold(const Codeword& c, uint32_t w) const;
    Mat folded_residual(const FoldedView& f) const; // (l*m) x 1
    // Recovers erased rack columns of a folded instance (at most nbar - m
    // surviving racks are needed; up to m racks may be erased).
    std::vector<Mat> folded_erase_decode(const FoldedView& f,
                                         const std::vector<uint32_t>& erased) const;

    Codeword random_codeword(uint64_t seed) const;

  private:
    std::shared_ptr<const Field> field_;
    CodeParams p_;
    LambdaSet lambdas_;
    std::vector<Mat> parity_; // n blocks
};

} // namespace rackmsr

#endif
