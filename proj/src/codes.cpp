#include "rackmsr/codes.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace rackmsr {

NodePos node_pos(const CodeParams& p, uint32_t node) {
    if (node >= p.n) throw Error(Errc::invalid_argument, "node index out of range");
    NodePos pos;
    pos.rack = node / p.u;
    pos.g = node % p.u;
    pos.a = pos.rack / p.group;
    pos.b = pos.rack % p.group;
    return pos;
}

uint32_t folded_height(const CodeParams& p, uint32_t w) {
    if (w >= p.u) throw Error(Errc::invalid_argument, "fold index must be below u");
    return w < p.u - p.v ? p.rbar : p.rbar - 1;
}

namespace {

Mat diag_mat(const Field* F, const std::vector<Felt>& d) {
    Mat m = zeros(F, d.size(), d.size());
    for (size_t i = 0; i < d.size(); ++i) m.at(i, i) = d[i];
    return m;
}

} // namespace

RackCode::RackCode(std::shared_ptr<const Field> field, const CodeParams& params,
                   LambdaSet lambdas)
    : field_(std::move(field)), p_(params), lambdas_(std::move(lambdas)) {
    if (!lambdas_.verified)
        throw Error(Errc::verification_failed,
                    "refusing to build from an unverified coefficient set");
    if (lambdas_.lam.size() != static_cast<size_t>(p_.parent_nbar) * p_.sbar)
        throw Error(Errc::shape_mismatch,
                    "coefficient set holds " + std::to_string(lambdas_.lam.size()) +
                        " entries; parameters need " +
                        std::to_string(p_.parent_nbar * p_.sbar));
    const Field* F = field_.get();
    KernelCtx ctx = kernel_ctx();
    parity_.reserve(p_.n);
    for (uint32_t node = 0; node < p_.n; ++node) {
        NodePos pos = node_pos(p_, node);
        Felt tw = F->pow(lambdas_.theta, pos.g);
        std::vector<Felt> ev(p_.sbar);
        for (uint32_t j = 0; j < p_.sbar; ++j)
            ev[j] = F->mul(tw, lambdas_.lam[static_cast<size_t>(pos.rack) * p_.sbar + j]);
        parity_.push_back(blowup(ctx, pos.a, phi(F, pos.b, p_.r, ev), p_.r, 1));
    }
}

const Mat& RackCode::parity_block(uint32_t node) const {
    if (node >= p_.n) throw Error(Errc::invalid_argument, "node index out of range");
    return parity_[node];
}

Mat RackCode::folded_parity_block(uint32_t rack, uint32_t w) const {
    if (rack >= p_.nbar) throw Error(Errc::invalid_argument, "rack index out of range");
    const Field* F = field_.get();
    uint32_t m = folded_height(p_, w);
    uint32_t a = rack / p_.group, b = rack % p_.group;
    std::vector<Felt> ev(p_.sbar);
    for (uint32_t j = 0; j < p_.sbar; ++j)
        ev[j] = F->pow(lambdas_.lam[static_cast<size_t>(rack) * p_.sbar + j], p_.u);
    return blowup(kernel_ctx(), a, phi(F, b, m, ev), m, 1);
}

Codeword RackCode::encode(const std::vector<Felt>& message) const {
    const Field* F = field_.get();
    size_t l = p_.l;
    if (message.size() != static_cast<size_t>(p_.k) * l)
        throw Error(Errc::shape_mismatch, "message must hold k*l = " +
                                              std::to_string(p_.k * l) + " symbols");
    Mat rhs = zeros(F, l * p_.r, 1);
    for (uint32_t i = 0; i < p_.k; ++i) {
        Mat col(F, l, 1);
        std::copy(message.begin() + i * l, message.begin() + (i + 1) * l, col.a.begin());
        rhs = sub(rhs, matmul(parity_[i], col));
    }
    std::vector<Mat> blocks(parity_.begin() + p_.k, parity_.end());
    Mat x = solve(hconcat(blocks), rhs);
    Codeword c(static_cast<size_t>(p_.n) * l);
    std::copy(message.begin(), message.end(), c.begin());
    std::copy(x.a.begin(), x.a.end(), c.begin() + static_cast<size_t>(p_.k) * l);
    return c;
}

Mat RackCode::parity_residual(const Codeword& c) const {
    const Field* F = field_.get();
    size_t l = p_.l;
    if (c.size() != static_cast<size_t>(p_.n) * l)
        throw Error(Errc::shape_mismatch, "codeword must hold n*l symbols");
    Mat acc = zeros(F, l * p_.r, 1);
    for (uint32_t i = 0; i < p_.n; ++i) {
        Mat col(F, l, 1);
        std::copy(c.begin() + i * l, c.begin() + (i + 1) * l, col.a.begin());
        acc = add(acc, matmul(parity_[i], col));
    }
    return acc;
}

bool RackCode::is_codeword(const Codeword& c) const { return is_zero(parity_residual(c)); }

Codeword RackCode::erase_decode(Codeword word, const std::vector<uint32_t>& erased) const {
    const Field* F = field_.get();
    size_t l = p_.l;
    if (word.size() != static_cast<size_t>(p_.n) * l)
        throw Error(Errc::shape_mismatch, "codeword must hold n*l symbols");
    if (erased.empty() || erased.size() > p_.r)
        throw Error(Errc::invalid_argument, "erasure count must be in [1, r]");
    std::vector<bool> gone(p_.n, false);
    for (uint32_t e : erased) {
        if (e >= p_.n) throw Error(Errc::invalid_argument, "erased node out of range");
        if (gone[e]) throw Error(Errc::invalid_argument, "duplicate erased node");
        gone[e] = true;
    }
    Mat rhs = zeros(F, l * p_.r, 1);
    std::vector<Mat> cols;
    for (uint32_t i = 0; i < p_.n; ++i) {
        if (gone[i]) {
            cols.push_back(parity_[i]);
            continue;
        }
        Mat col(F, l, 1);
        std::copy(word.begin() + i * l, word.begin() + (i + 1) * l, col.a.begin());
        rhs = sub(rhs, matmul(parity_[i], col));
    }
    Mat x = solve(hconcat(cols), rhs);
    size_t at = 0;
    for (uint32_t i = 0; i < p_.n; ++i) {
        if (!gone[i]) continue;
        std::copy(x.a.begin() + at * l, x.a.begin() + (at + 1) * l, word.begin() + i * l);
        ++at;
    }
    return word;
}

FoldedView RackCode::fold(const Codeword& c, uint32_t w) const {
    const Field* F = field_.get();
    size_t l = p_.l;
    if (c.size() != static_cast<size_t>(p_.n) * l)
        throw Error(Errc::shape_mismatch, "codeword must hold n*l symbols");
    FoldedView f;
    f.w = w;
    f.m = folded_height(p_, w);
    KernelCtx ctx = kernel_ctx();
    for (uint32_t rack = 0; rack < p_.nbar; ++rack) {
        Mat sum = zeros(F, l, 1);
        for (uint32_t g = 0; g < p_.u; ++g) {
            Felt tw = F->pow(F->pow(lambdas_.theta, g), w);
            Mat col(F, l, 1);
            uint32_t node = rack * p_.u + g;
            std::copy(c.begin() + node * l, c.begin() + (node + 1) * l, col.a.begin());
            sum = add(sum, scale(tw, col));
        }
        std::vector<Felt> dw(p_.sbar);
        for (uint32_t j = 0; j < p_.sbar; ++j)
            dw[j] = F->pow(lambdas_.lam[static_cast<size_t>(rack) * p_.sbar + j], w);
        f.cbar.push_back(matmul(blowup(ctx, rack / p_.group, diag_mat(F, dw), 1, 1), sum));
    }
    return f;
}

Mat RackCode::folded_residual(const FoldedView& f) const {
    const Field* F = field_.get();
    Mat acc = zeros(F, p_.l * f.m, 1);
    for (uint32_t rack = 0; rack < p_.nbar; ++rack)
        acc = add(acc, matmul(folded_parity_block(rack, f.w), f.cbar[rack]));
    return acc;
}

std::vector<Mat> RackCode::folded_erase_decode(const FoldedView& f,
                                               const std::vector<uint32_t>& erased) const {
    const Field* F = field_.get();
    size_t l = p_.l;
    if (erased.empty() || erased.size() > f.m)
        throw Error(Errc::invalid_argument, "folded erasure count must be in [1, m]");
    std::vector<bool> gone(p_.nbar, false);
    for (uint32_t e : erased) {
        if (e >= p_.nbar) throw Error(Errc::invalid_argument, "erased rack out of range");
        if (gone[e]) throw Error(Errc::invalid_argument, "duplicate erased rack");
        gone[e] = true;
    }
    Mat rhs = zeros(F, l * f.m, 1);
    std::vector<Mat> cols;
    for (uint32_t rack = 0; rack < p_.nbar; ++rack) {
        Mat hb = folded_parity_block(rack, f.w);
        if (gone[rack])
            cols.push_back(hb);
        else
            rhs = sub(rhs, matmul(hb, f.cbar[rack]));
    }
    Mat x = solve(hconcat(cols), rhs);
    // unknowns are stacked in increasing rack order; answer in caller order
    std::vector<uint32_t> sorted_erased = erased;
    std::sort(sorted_erased.begin(), sorted_erased.end());
    std::vector<Mat> out;
    for (uint32_t e : erased) {
        size_t slot = std::lower_bound(sorted_erased.begin(), sorted_erased.end(), e) -
                      sorted_erased.begin();
        Mat col(F, l, 1);
        std::copy(x.a.begin() + slot * l, x.a.begin() + (slot + 1) * l, col.a.begin());
        out.push_back(std::move(col));
    }
    return out;
}

Codeword RackCode::random_codeword(uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<uint32_t> pick(0, field_->q() - 1);
    std::vector<Felt> msg(static_cast<size_t>(p_.k) * p_.l);
    for (auto& x : msg) x = Felt{pick(rng)};
    return encode(msg);
}

} // namespace rackmsr
