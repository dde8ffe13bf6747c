#include "rackmsr/lambdas.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "rackmsr/kernels.hpp"
#include "rackmsr/matrix.hpp"

namespace rackmsr {

namespace {

std::string subset_str(const std::vector<uint32_t>& s) {
    std::ostringstream os;
    os << '{';
    for (size_t i = 0; i < s.size(); ++i) {
        if (i) os << ',';
        os << s[i];
    }
    os << '}';
    return os.str();
}

std::vector<uint32_t> bits_of(uint32_t mask) {
    std::vector<uint32_t> out;
    for (uint32_t i = 0; mask >> i; ++i)
        if ((mask >> i) & 1u) out.push_back(i);
    return out;
}

// Square concatenation for one case on a candidate of group*sbar elements.
Mat case_matrix(const Field* F, const CodeParams& p, const ConstraintCase& cc,
                const std::vector<Felt>& lam, Felt theta) {
    std::vector<ConcatPart> parts;
    uint32_t m = 0;
    if (cc.family == ConstraintCase::Family::twisted) {
        for (const auto& g : cc.G) m += static_cast<uint32_t>(g.size());
        for (size_t i = 0; i < cc.B.size(); ++i) {
            ConcatPart part;
            part.b = cc.B[i];
            for (uint32_t g : cc.G[i]) {
                Felt tw = F->pow(theta, g);
                std::vector<Felt> ev(p.sbar);
                for (uint32_t j = 0; j < p.sbar; ++j)
                    ev[j] = F->mul(tw, lam[cc.B[i] * p.sbar + j]);
                part.evals.push_back(std::move(ev));
            }
            parts.push_back(std::move(part));
        }
    } else {
        m = static_cast<uint32_t>(cc.B.size());
        for (uint32_t b : cc.B) {
            ConcatPart part;
            part.b = b;
            std::vector<Felt> ev(p.sbar);
            for (uint32_t j = 0; j < p.sbar; ++j) ev[j] = F->pow(lam[b * p.sbar + j], p.u);
            part.evals.push_back(std::move(ev));
            parts.push_back(std::move(part));
        }
    }
    return concat_phi(F, p.sbar, m, parts);
}

// Case shapes for a single group (a left at 0); shared by enumeration, the
// checker, and the incremental search pruning.
std::vector<ConstraintCase> group_shapes(const CodeParams& p) {
    if (static_cast<uint64_t>(p.group) * p.u > 8)
        throw Error(Errc::enumeration_too_large,
                    "constraint family is exponential in group*u = " +
                        std::to_string(p.group * p.u) + "; limit is 8");
    std::vector<ConstraintCase> out;
    uint32_t rack_masks = (1u << p.group) - 1;
    uint32_t twist_masks = (1u << p.u) - 1;
    for (uint32_t bm = 1; bm <= rack_masks; ++bm) {
        std::vector<uint32_t> B = bits_of(bm);
        // every assignment of a nonempty twist set to each rack in B
        std::vector<uint32_t> gsel(B.size(), 1);
        for (;;) {
            ConstraintCase cc;
            cc.family = ConstraintCase::Family::twisted;
            cc.B = B;
            for (uint32_t gm : gsel) cc.G.push_back(bits_of(gm));
            out.push_back(std::move(cc));
            size_t pos = 0;
            while (pos < gsel.size() && gsel[pos] == twist_masks) gsel[pos++] = 1;
            if (pos == gsel.size()) break;
            ++gsel[pos];
        }
        ConstraintCase pu;
        pu.family = ConstraintCase::Family::power_u;
        pu.B = B;
        out.push_back(std::move(pu));
    }
    return out;
}

uint64_t group_seed(uint64_t seed, uint32_t a) {
    return seed ^ (0x9E3779B97F4A7C15ull * (static_cast<uint64_t>(a) + 1));
}

} // namespace

std::string ConstraintCase::label() const {
    std::ostringstream os;
    os << "group " << a;
    if (family == Family::twisted) {
        os << " twisted B=" << subset_str(B) << " G=";
        for (const auto& g : G) os << subset_str(g);
    } else {
        os << " power-u B=" << subset_str(B);
    }
    return os.str();
}

std::vector<ConstraintCase> enumerate_constraints(const CodeParams& p) {
    std::vector<ConstraintCase> shapes = group_shapes(p);
    std::vector<ConstraintCase> out;
    out.reserve(shapes.size() * p.ntil);
    for (uint32_t a = 0; a < p.ntil; ++a)
        for (const auto& s : shapes) {
            ConstraintCase cc = s;
            cc.a = a;
            out.push_back(std::move(cc));
        }
    return out;
}

CheckResult check_constraints(const Field* F, const CodeParams& p,
                              const std::vector<Felt>& group_candidate, Felt theta) {
    if (group_candidate.size() != static_cast<size_t>(p.group) * p.sbar)
        throw Error(Errc::shape_mismatch, "candidate must hold group*sbar = " +
                                              std::to_string(p.group * p.sbar) + " elements");
    CheckResult res;
    for (const auto& cc : group_shapes(p)) {
        ++res.cases_checked;
        Mat M = case_matrix(F, p, cc, group_candidate, theta);
        if (det(M).is_zero()) {
            res.ok = false;
            res.first_failure = cc.label();
            return res;
        }
    }
    return res;
}

LambdaSet search_lambdas(const Field* F, const CodeParams& p, SearchStrategy strategy,
                         uint64_t seed, uint64_t max_tries) {
    Felt theta = F->element_of_order(p.u);
    uint32_t pool_size = (F->q() - 1) / p.u;
    uint32_t c = p.group * p.sbar; // elements per group
    std::vector<ConstraintCase> shapes = group_shapes(p);
    // incremental pruning: a case is decidable once its highest rack is filled
    std::vector<std::vector<const ConstraintCase*>> by_last(p.group);
    for (const auto& cc : shapes) by_last[cc.B.back()].push_back(&cc);

    LambdaSet ls;
    ls.mode = LambdaSet::Mode::searched;
    ls.strategy = strategy == SearchStrategy::greedy ? "greedy" : "random";
    ls.seed = seed;
    ls.theta = theta;
    ls.lam.assign(static_cast<size_t>(p.parent_nbar) * p.sbar, F->zero());

    uint64_t tries = 0;
    for (uint32_t a = 0; a < p.ntil; ++a) {
        uint64_t lo = static_cast<uint64_t>(a) * pool_size / p.ntil;
        uint64_t hi = static_cast<uint64_t>(a + 1) * pool_size / p.ntil;
        if (hi - lo < c)
            throw Error(Errc::pool_exhausted, "pool chunk for group " + std::to_string(a) +
                                                  " holds " + std::to_string(hi - lo) +
                                                  " elements; need " + std::to_string(c));
        std::vector<uint32_t> chunk(hi - lo);
        std::iota(chunk.begin(), chunk.end(), static_cast<uint32_t>(lo));

        std::vector<Felt> cand(c, F->zero());
        bool found = false;
        auto rack_ok = [&](uint32_t rack) {
            for (const ConstraintCase* cc : by_last[rack]) {
                ++tries;
                if (tries > max_tries)
                    throw Error(Errc::pool_exhausted,
                                "constraint-check budget of " + std::to_string(max_tries) +
                                    " exhausted in group " + std::to_string(a));
                if (det(case_matrix(F, p, *cc, cand, theta)).is_zero()) return false;
            }
            return true;
        };
        if (strategy == SearchStrategy::greedy) {
            std::vector<bool> used(chunk.size(), false);
            auto dfs = [&](auto&& self, uint32_t slot) -> bool {
                if (slot == c) return true;
                for (size_t i = 0; i < chunk.size(); ++i) {
                    if (used[i]) continue;
                    used[i] = true;
                    cand[slot] = F->xi_pow(chunk[i]);
                    bool ok = (slot + 1) % p.sbar != 0 || rack_ok(slot / p.sbar);
                    if (ok && self(self, slot + 1)) return true;
                    used[i] = false;
                }
                return false;
            };
            found = dfs(dfs, 0);
        } else {
            std::mt19937_64 rng(group_seed(seed, a));
            while (!found) {
                std::vector<uint32_t> draw = chunk;
                for (uint32_t i = 0; i < c; ++i) {
                    std::uniform_int_distribution<size_t> pick(i, draw.size() - 1);
                    std::swap(draw[i], draw[pick(rng)]);
                }
                for (uint32_t i = 0; i < c; ++i) cand[i] = F->xi_pow(draw[i]);
                found = true;
                for (uint32_t rack = 0; rack < p.group && found; ++rack)
                    found = rack_ok(rack);
            }
        }
        if (!found)
            throw Error(Errc::pool_exhausted,
                        "no admissible assignment in the pool chunk of group " +
                            std::to_string(a));
        for (uint32_t i = 0; i < c; ++i) ls.lam[static_cast<size_t>(a) * c + i] = cand[i];
    }
    ls.verified = true;
    return ls;
}

LambdaSet explicit_lambdas(const Field* F, const CodeParams& p) {
    Felt theta = F->element_of_order(p.u);
    uint32_t pool_size = (F->q() - 1) / p.u;
    size_t need = static_cast<size_t>(p.parent_nbar) * p.sbar;
    if (need > pool_size)
        throw Error(Errc::explicit_unavailable,
                    "explicit assignment needs " + std::to_string(need) +
                        " consecutive powers but the pool holds " + std::to_string(pool_size));
    LambdaSet ls;
    ls.mode = LambdaSet::Mode::explicit_assignment;
    ls.theta = theta;
    ls.lam.resize(need);
    for (size_t i = 0; i < need; ++i) ls.lam[i] = F->xi_pow(static_cast<uint32_t>(i));
    uint32_t c = p.group * p.sbar;
    for (uint32_t a = 0; a < p.ntil; ++a) {
        std::vector<Felt> cand(ls.lam.begin() + static_cast<size_t>(a) * c,
                               ls.lam.begin() + static_cast<size_t>(a + 1) * c);
        CheckResult res = check_constraints(F, p, cand, theta);
        if (!res.ok) {
            // the checker labels everything group 0; restore the real index
            std::string tail = res.first_failure.substr(std::string("group 0 ").size());
            throw Error(Errc::verification_failed,
                        "explicit assignment fails constraint: group " + std::to_string(a) +
                            " " + tail);
        }
    }
    ls.verified = true;
    return ls;
}

CheckResult validate_lambda_set(const Field* F, const CodeParams& p, const LambdaSet& ls) {
    CheckResult res;
    auto fail = [&](const std::string& why) {
        res.ok = false;
        res.first_failure = why;
        return res;
    };
    size_t need = static_cast<size_t>(p.parent_nbar) * p.sbar;
    if (ls.lam.size() != need)
        return fail("coefficient count " + std::to_string(ls.lam.size()) + " != " +
                    std::to_string(need));
    if (!(ls.theta == F->element_of_order(p.u))) return fail("theta does not have order u");
    uint32_t pool_size = (F->q() - 1) / p.u;
    std::vector<uint32_t> exps(need);
    for (size_t i = 0; i < need; ++i) {
        if (ls.lam[i].is_zero()) return fail("lambda " + std::to_string(i) + " is zero");
        exps[i] = F->dlog(ls.lam[i]);
        if (exps[i] >= pool_size)
            return fail("lambda " + std::to_string(i) + " outside the pool");
    }
    std::vector<uint32_t> sorted = exps;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        return fail("duplicate pool exponent");
    uint32_t c = p.group * p.sbar;
    for (uint32_t a = 0; a < p.ntil; ++a) {
        std::vector<Felt> cand(ls.lam.begin() + static_cast<size_t>(a) * c,
                               ls.lam.begin() + static_cast<size_t>(a + 1) * c);
        CheckResult g = check_constraints(F, p, cand, ls.theta);
        res.cases_checked += g.cases_checked;
        if (!g.ok) {
            // the checker labels everything group 0; restore the real index
            std::string tail = g.first_failure.substr(std::string("group 0 ").size());
            return fail("group " + std::to_string(a) + " " + tail);
        }
    }
    return res;
}

std::vector<Felt> rack_lambdas(const CodeParams& p, const LambdaSet& ls, uint32_t rack) {
    if (rack >= p.parent_nbar)
        throw Error(Errc::invalid_argument, "rack index out of range");
    return {ls.lam.begin() + static_cast<size_t>(rack) * p.sbar,
            ls.lam.begin() + static_cast<size_t>(rack + 1) * p.sbar};
}

} // namespace rackmsr
