#ifndef RACKMSR_KERNELS_HPP
#define RACKMSR_KERNELS_HPP

#include <cstdint>
#include <vector>

#include "rackmsr/matrix.hpp"

namespace rackmsr {

// Digit geometry for the blow-up machinery: coordinates in [l] are read as
// ntil base-sbar digits, least significant first.
struct KernelCtx {
    const Field* F = nullptr;
    uint32_t sbar = 0;
    uint32_t ntil = 0;

    size_t l() const {
        size_t v = 1;
        for (uint32_t i = 0; i < ntil; ++i) v *= sbar;
        return v;
    }
    size_t lbar() const { return l() / sbar; }
};

// Column (1, x, x^2, ..., x^{t-1})^T.
Mat moment_vector(const Field* F, Felt x, uint32_t t);

// Kernel map: sbar x sbar grid of t x 1 blocks over evaluation points xs.
// Block (j,j) holds the moment column of xs[j]; for b < sbar, row b holds the
// negated columns of the other points; b == sbar keeps only the diagonal.
Mat phi(const Field* F, uint32_t b, uint32_t t, const std::vector<Felt>& xs);

// Blow-up of an sbar x sbar block matrix U (blocks bh x bw) on digit a:
// I_{sbar^(ntil-a-1)} (x) (I_{sbar^a} boxtimes U).
Mat blowup(const KernelCtx& ctx, uint32_t a, const Mat& U, size_t bh, size_t bw);
// Same with one digit removed (operates on length l/sbar coordinates); only
// defined for ntil >= 2 and a in [ntil-1].
Mat bar_blowup(const KernelCtx& ctx, uint32_t a, const Mat& U, size_t bh, size_t bw);

// One column group of the horizontal concatenations: the kernel index b plus
// its (already twisted) evaluation vectors, one vector of sbar points each.
struct ConcatPart {
    uint32_t b = 0;
    std::vector<std::vector<Felt>> evals;
};

// Horizontal concatenation of phi blocks, one per (b, evaluation vector) in
// order; square exactly when m equals the total number of vectors.
Mat concat_phi(const Field* F, uint32_t sbar, uint32_t m, const std::vector<ConcatPart>& parts);
// Same with every phi pushed through the blow-up on digit a.
Mat concat_blowup(const KernelCtx& ctx, uint32_t a, uint32_t m, const std::vector<ConcatPart>& parts);

// Coordinate selector on digit a: z < sbar picks coordinates whose a-th digit
// equals z (lbar x l); z == sbar sums the selectors (the digit-sum map).
Mat repair_matrix(const KernelCtx& ctx, uint32_t a, uint32_t z);

// Row projection Q_w: rows w, u+w, 2u+w, ... of I_r; rbar rows for w < u-v,
// rbar-1 rows for w in [u-v, u).
Mat projection(const Field* F, uint32_t u, uint32_t v, uint32_t r, uint32_t w);

} // namespace rackmsr

#endif
