#include "rackmsr/repair.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace rackmsr {

namespace {

bool host_uses_sum_selector(const CodeParams& p, uint32_t host_b) {
    return p.theorem == Theorem::T2 && host_b == p.sbar;
}

size_t embed_index(const CodeParams& p, uint32_t a, uint32_t z, size_t t) {
    size_t stride = 1;
    for (uint32_t i = 0; i < a; ++i) stride *= p.sbar;
    size_t lo = t % stride, hi = t / stride;
    return lo + stride * (z + static_cast<size_t>(p.sbar) * hi);
}

Mat word_column(const Field* F, const CodeParams& p, const Codeword& word, uint32_t node) {
    Mat col(F, p.l, 1);
    std::copy(word.begin() + static_cast<size_t>(node) * p.l,
              word.begin() + static_cast<size_t>(node + 1) * p.l, col.a.begin());
    return col;
}

} // namespace

RepairPlan plan_repair(const CodeParams& p, uint32_t host,
                       const std::vector<uint32_t>& failed_in_rack,
                       const std::vector<uint32_t>& helpers,
                       std::optional<uint32_t> extra) {
    RepairPlan plan;
    if (host >= p.nbar) throw Error(Errc::invalid_argument, "host rack out of range");
    plan.host = host;
    plan.a = host / p.group;
    plan.b = host % p.group;

    if (failed_in_rack.empty())
        throw Error(Errc::invalid_argument, "at least one failed node is required");
    std::vector<bool> failed(p.u, false);
    for (uint32_t g : failed_in_rack) {
        if (g >= p.u)
            throw Error(Errc::invalid_argument, "failed in-rack index out of range");
        if (failed[g]) throw Error(Errc::invalid_argument, "duplicate failed node");
        failed[g] = true;
    }
    plan.I = failed_in_rack;
    plan.h = static_cast<uint32_t>(plan.I.size());
    if (plan.h > p.h_max)
        throw Error(Errc::h_out_of_range,
                    "cannot repair " + std::to_string(plan.h) + " nodes in one rack; limit is " +
                        std::to_string(p.h_max));
    for (uint32_t g = 0; g < p.u; ++g)
        if (!failed[g]) plan.J.push_back(g);

    if (helpers.size() != p.dbar)
        throw Error(Errc::helpers_out_of_range, "exactly dbar = " + std::to_string(p.dbar) +
                                                    " helper racks are required");
    std::vector<bool> used(p.nbar, false);
    used[host] = true;
    for (uint32_t r : helpers) {
        if (r >= p.nbar) throw Error(Errc::helpers_out_of_range, "helper rack out of range");
        if (used[r])
            throw Error(Errc::helpers_out_of_range,
                        "helper racks must be distinct and differ from the host");
        used[r] = true;
    }
    plan.helpers = helpers;
    std::sort(plan.helpers.begin(), plan.helpers.end());

    bool needs_extra = plan.h > p.u - p.v;
    if (needs_extra) {
        if (extra) {
            if (*extra >= p.nbar || used[*extra])
                throw Error(Errc::helpers_out_of_range,
                            "extra helper must be a fresh surviving rack");
            plan.extra = extra;
        } else {
            for (uint32_t r = 0; r < p.nbar; ++r)
                if (!used[r]) {
                    plan.extra = r;
                    break;
                }
            if (!plan.extra)
                throw Error(Errc::helpers_out_of_range,
                            "no rack left to serve as the extra helper");
        }
    }
    return plan;
}

uint32_t answer_selector(const CodeParams& p, const RepairPlan& plan, uint32_t rack) {
    if (rack == plan.host || rack >= p.nbar)
        throw Error(Errc::invalid_argument, "selector is defined for surviving racks");
    if (!host_uses_sum_selector(p, plan.b)) return plan.b;
    return rack / p.group == plan.a ? rack % p.group : p.sbar;
}

std::vector<size_t> selector_support(const CodeParams& p, uint32_t a, uint32_t z) {
    std::vector<size_t> out;
    if (z == p.sbar) {
        out.resize(p.l);
        for (size_t i = 0; i < p.l; ++i) out[i] = i;
        return out;
    }
    size_t lbar = p.lbar;
    out.reserve(lbar);
    for (size_t t = 0; t < lbar; ++t) out.push_back(embed_index(p, a, z, t));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Felt> helper_payload(const RackCode& code, const Codeword& word,
                                 const RepairPlan& plan, uint32_t rack, uint32_t w) {
    const CodeParams& p = code.params();
    const Field* F = code.field();
    if (word.size() != static_cast<size_t>(p.n) * p.l)
        throw Error(Errc::shape_mismatch, "codeword must hold n*l symbols");
    uint32_t z = answer_selector(p, plan, rack);
    std::vector<Felt> out(p.lbar, F->zero());
    for (uint32_t g = 0; g < p.u; ++g) {
        Felt tw = F->pow(code.lambdas().theta, static_cast<uint64_t>(g) * w);
        size_t base = (static_cast<size_t>(rack) * p.u + g) * p.l;
        for (size_t t = 0; t < p.lbar; ++t) {
            Felt acc = F->zero();
            if (z == p.sbar) {
                for (uint32_t zz = 0; zz < p.sbar; ++zz)
                    acc = F->add(acc, word[base + embed_index(p, plan.a, zz, t)]);
            } else {
                acc = word[base + embed_index(p, plan.a, z, t)];
            }
            out[t] = F->add(out[t], F->mul(tw, acc));
        }
    }
    return out;
}

RepairResult repair(const RackCode& code, const Codeword& word, const RepairPlan& plan) {
    const CodeParams& p = code.params();
    const Field* F = code.field();
    if (word.size() != static_cast<size_t>(p.n) * p.l)
        throw Error(Errc::shape_mismatch, "codeword must hold n*l symbols");
    KernelCtx ctx = code.kernel_ctx();
    size_t l = p.l, lbar = p.lbar;
    uint32_t uv = p.u - p.v;

    // selectors at the host's digit position, plus the coefficient
    // representative (digit 0 stands in for the digit-sum selector)
    std::vector<Mat> Rz;
    for (uint32_t z = 0; z < p.sbar; ++z) Rz.push_back(repair_matrix(ctx, plan.a, z));
    uint32_t host_sel = host_uses_sum_selector(p, plan.b) ? p.sbar : plan.b;
    Mat Rhost = repair_matrix(ctx, plan.a, host_sel);

    auto rep_of = [&](uint32_t rack) -> const Mat& {
        uint32_t z = answer_selector(p, plan, rack);
        return Rz[z == p.sbar ? 0 : z];
    };

    std::vector<uint32_t> bystanders;
    for (uint32_t rack = 0; rack < p.nbar; ++rack) {
        if (rack == plan.host) continue;
        if (std::binary_search(plan.helpers.begin(), plan.helpers.end(), rack)) continue;
        if (plan.extra && *plan.extra == rack) continue;
        bystanders.push_back(rack);
    }

    std::map<std::pair<uint32_t, uint32_t>, Mat> hbar_cache;
    auto hbar = [&](uint32_t rack, uint32_t w) -> const Mat& {
        auto key = std::make_pair(rack, folded_height(p, w));
        auto it = hbar_cache.find(key);
        if (it == hbar_cache.end())
            it = hbar_cache.emplace(key, code.folded_parity_block(rack, w)).first;
        return it->second;
    };

    Mat vrhs = zeros(F, plan.h, l); // row w = combination of the host columns
    for (uint32_t w = 0; w < plan.h; ++w) {
        uint32_t m = folded_height(p, w);
        Mat RIm = kron(Rhost, identity(F, m));

        std::vector<uint32_t> participants = plan.helpers;
        bool extra_round = plan.extra && w >= uv;
        if (extra_round) {
            participants.push_back(*plan.extra);
            std::sort(participants.begin(), participants.end());
        }
        std::vector<uint32_t> unknown_racks;
        for (uint32_t rack : bystanders) unknown_racks.push_back(rack);
        if (plan.extra && !extra_round) unknown_racks.push_back(*plan.extra);
        std::sort(unknown_racks.begin(), unknown_racks.end());

        std::vector<Mat> cols;
        for (uint32_t z = 0; z < p.sbar; ++z)
            cols.push_back(matmul(matmul(RIm, hbar(plan.host, w)), transpose(Rz[z])));
        for (uint32_t rack : unknown_racks)
            cols.push_back(matmul(matmul(RIm, hbar(rack, w)), transpose(rep_of(rack))));

        Mat rhs = zeros(F, lbar * m, 1);
        for (uint32_t rack : participants) {
            const Mat& R = rep_of(rack);
            Mat C = matmul(matmul(RIm, hbar(rack, w)), transpose(R));
            // host-side twiddle of the raw payload
            std::vector<Felt> dw(p.sbar);
            for (uint32_t j = 0; j < p.sbar; ++j)
                dw[j] = F->pow(code.lambdas().lam[static_cast<size_t>(rack) * p.sbar + j], w);
            Mat diag = zeros(F, p.sbar, p.sbar);
            for (uint32_t j = 0; j < p.sbar; ++j) diag.at(j, j) = dw[j];
            Mat D = matmul(matmul(R, blowup(ctx, rack / p.group, diag, 1, 1)), transpose(R));
            std::vector<Felt> payload = helper_payload(code, word, plan, rack, w);
            Mat pv(F, lbar, 1);
            std::copy(payload.begin(), payload.end(), pv.a.begin());
            rhs = sub(rhs, matmul(C, matmul(D, pv)));
        }

        Mat x = solve(hconcat(cols), rhs);
        Mat chost = zeros(F, l, 1);
        for (uint32_t z = 0; z < p.sbar; ++z) {
            Mat piece(F, lbar, 1);
            std::copy(x.a.begin() + static_cast<size_t>(z) * lbar,
                      x.a.begin() + static_cast<size_t>(z + 1) * lbar, piece.a.begin());
            chost = add(chost, matmul(transpose(Rz[z]), piece));
        }

        // undo the host diagonal twist, then strip the surviving columns
        std::vector<Felt> dinv(p.sbar);
        for (uint32_t j = 0; j < p.sbar; ++j)
            dinv[j] = F->inv(
                F->pow(code.lambdas().lam[static_cast<size_t>(plan.host) * p.sbar + j], w));
        Mat diag = zeros(F, p.sbar, p.sbar);
        for (uint32_t j = 0; j < p.sbar; ++j) diag.at(j, j) = dinv[j];
        Mat eta = matmul(blowup(ctx, plan.a, diag, 1, 1), chost);
        for (uint32_t g : plan.J) {
            Felt tw = F->pow(code.lambdas().theta, static_cast<uint64_t>(g) * w);
            eta = sub(eta, scale(tw, word_column(F, p, word, plan.host * p.u + g)));
        }
        for (size_t i = 0; i < l; ++i) vrhs.at(w, i) = eta.at(i, 0);
    }

    // twiddle system across fold indices: row w, column i carries theta^(g_i*w)
    Mat V(F, plan.h, plan.h);
    for (uint32_t w = 0; w < plan.h; ++w)
        for (uint32_t i = 0; i < plan.h; ++i)
            V.at(w, i) = F->pow(code.lambdas().theta, static_cast<uint64_t>(plan.I[i]) * w);
    Mat X = solve(V, vrhs);

    RepairResult res;
    res.plan = plan;
    for (uint32_t i = 0; i < plan.h; ++i) {
        std::vector<Felt> col(l);
        for (size_t t = 0; t < l; ++t) col[t] = X.at(i, t);
        res.recovered.push_back(std::move(col));
    }

    for (uint32_t rack : plan.helpers) {
        RackTraffic t;
        t.rack = rack;
        t.rounds = plan.h;
        t.sent = static_cast<uint64_t>(plan.h) * lbar;
        t.accessed = static_cast<uint64_t>(p.u) *
                     (answer_selector(p, plan, rack) == p.sbar ? l : lbar);
        res.per_rack.push_back(t);
    }
    if (plan.extra && plan.h > uv) {
        RackTraffic t;
        t.rack = *plan.extra;
        t.rounds = plan.h - uv;
        t.sent = static_cast<uint64_t>(plan.h - uv) * lbar;
        t.accessed = static_cast<uint64_t>(p.u) *
                     (answer_selector(p, plan, *plan.extra) == p.sbar ? l : lbar);
        res.per_rack.push_back(t);
    }
    std::sort(res.per_rack.begin(), res.per_rack.end(),
              [](const RackTraffic& x, const RackTraffic& y) { return x.rack < y.rack; });
    for (const auto& t : res.per_rack) {
        res.bandwidth += t.sent;
        res.access += t.accessed;
    }
    res.bound_bw = bandwidth_bound(p, plan.h);
    res.bound_access = access_bound(p, plan.h);
    res.optimal_bw = res.bandwidth == res.bound_bw;
    res.optimal_access =
        res.access * res.bound_access.den == res.bound_access.num;
    res.ratio = Frac::make(res.bandwidth, res.bound_bw);
    return res;
}

} // namespace rackmsr
