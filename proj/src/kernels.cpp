#include "rackmsr/kernels.hpp"

#include <string>

namespace rackmsr {

Mat moment_vector(const Field* F, Felt x, uint32_t t) {
    if (t < 1) throw Error(Errc::invalid_argument, "moment_vector: t must be >= 1");
    Mat L(F, t, 1);
    Felt cur = F->one();
    for (uint32_t i = 0; i < t; ++i) {
        L.at(i, 0) = cur;
        cur = F->mul(cur, x);
    }
    return L;
}

Mat phi(const Field* F, uint32_t b, uint32_t t, const std::vector<Felt>& xs) {
    uint32_t sbar = (uint32_t)xs.size();
    if (sbar < 1) throw Error(Errc::invalid_argument, "phi: need at least one evaluation point");
    if (b > sbar) throw Error(Errc::invalid_argument, "phi: kernel index out of range");
    Mat M(F, (size_t)sbar * t, sbar);
    for (uint32_t j = 0; j < sbar; ++j) {
        Mat L = moment_vector(F, xs[j], t);
        for (uint32_t i = 0; i < t; ++i) M.at((size_t)j * t + i, j) = L.at(i, 0);
        if (b < sbar && b != j)
            for (uint32_t i = 0; i < t; ++i) M.at((size_t)b * t + i, j) = F->neg(L.at(i, 0));
    }
    return M;
}

namespace {

Mat blowup_general(const Field* F, uint32_t sbar, uint32_t digits, uint32_t a,
                   const Mat& U, size_t bh, size_t bw) {
    if (a >= digits) throw Error(Errc::invalid_argument, "blowup: digit position out of range");
    if (U.rows != (size_t)sbar * bh || U.cols != (size_t)sbar * bw)
        throw Error(Errc::shape_mismatch, "blowup: U is not an sbar x sbar block matrix");
    size_t lo = 1, hi = 1;
    for (uint32_t i = 0; i < a; ++i) lo *= sbar;
    for (uint32_t i = a + 1; i < digits; ++i) hi *= sbar;
    return kron(identity(F, hi), boxtimes(identity(F, lo), U, {sbar, sbar, bh, bw}));
}

} // namespace

Mat blowup(const KernelCtx& ctx, uint32_t a, const Mat& U, size_t bh, size_t bw) {
    return blowup_general(ctx.F, ctx.sbar, ctx.ntil, a, U, bh, bw);
}

Mat bar_blowup(const KernelCtx& ctx, uint32_t a, const Mat& U, size_t bh, size_t bw) {
    if (ctx.ntil < 2) throw Error(Errc::invalid_argument, "bar_blowup: needs at least two digits");
    return blowup_general(ctx.F, ctx.sbar, ctx.ntil - 1, a, U, bh, bw);
}

Mat concat_phi(const Field* F, uint32_t sbar, uint32_t m, const std::vector<ConcatPart>& parts) {
    if (parts.empty()) throw Error(Errc::invalid_argument, "concat_phi: empty part list");
    std::vector<Mat> cols;
    for (const ConcatPart& p : parts)
        for (const std::vector<Felt>& xs : p.evals) {
            if (xs.size() != sbar)
                throw Error(Errc::shape_mismatch, "concat_phi: evaluation vector length != sbar");
            cols.push_back(phi(F, p.b, m, xs));
        }
    return hconcat(cols);
}

Mat concat_blowup(const KernelCtx& ctx, uint32_t a, uint32_t m, const std::vector<ConcatPart>& parts) {
    if (parts.empty()) throw Error(Errc::invalid_argument, "concat_blowup: empty part list");
    std::vector<Mat> cols;
    for (const ConcatPart& p : parts)
        for (const std::vector<Felt>& xs : p.evals) {
            if (xs.size() != ctx.sbar)
                throw Error(Errc::shape_mismatch, "concat_blowup: evaluation vector length != sbar");
            cols.push_back(blowup(ctx, a, phi(ctx.F, p.b, m, xs), m, 1));
        }
    return hconcat(cols);
}

Mat repair_matrix(const KernelCtx& ctx, uint32_t a, uint32_t z) {
    if (a >= ctx.ntil) throw Error(Errc::invalid_argument, "repair_matrix: digit position out of range");
    if (z > ctx.sbar) throw Error(Errc::invalid_argument, "repair_matrix: selector index out of range");
    Mat row(ctx.F, 1, ctx.sbar);
    if (z == ctx.sbar)
        for (uint32_t j = 0; j < ctx.sbar; ++j) row.at(0, j) = ctx.F->one();
    else
        row.at(0, z) = ctx.F->one();
    size_t lo = 1, hi = 1;
    for (uint32_t i = 0; i < a; ++i) lo *= ctx.sbar;
    for (uint32_t i = a + 1; i < ctx.ntil; ++i) hi *= ctx.sbar;
    return kron(identity(ctx.F, hi), kron(row, identity(ctx.F, lo)));
}

Mat projection(const Field* F, uint32_t u, uint32_t v, uint32_t r, uint32_t w) {
    if (u < 1 || v >= u || w >= u)
        throw Error(Errc::invalid_argument, "projection: need 0 <= v < u and w in [u]");
    if ((r + v) % u != 0 || r + v < u)
        throw Error(Errc::invalid_argument,
                    "projection: r = " + std::to_string(r) + " inconsistent with (u, v)");
    uint32_t rbar = (r + v) / u;
    uint32_t nrows = (w < u - v) ? rbar : rbar - 1;
    Mat Q(F, nrows, r);
    for (uint32_t g = 0; g < nrows; ++g) Q.at(g, (size_t)g * u + w) = F->one();
    return Q;
}

} // namespace rackmsr
