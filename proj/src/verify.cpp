#include "rackmsr/verify.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "rackmsr/repair.hpp"

namespace rackmsr::verify {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

uint64_t case_seed(uint64_t seed, uint64_t i) {
    uint64_t x = seed ^ (0x9E3779B97F4A7C15ull * (i + 1));
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    return x;
}

// C(n, r) but never past cap (returns cap + 1 on overflow).
uint64_t binom_capped(uint64_t n, uint64_t r, uint64_t cap) {
    if (r > n) return 0;
    r = std::min(r, n - r);
    uint64_t out = 1;
    for (uint64_t i = 1; i <= r; ++i) {
        uint64_t num = n - r + i;
        if (out > (cap + 1) / num * i) return cap + 1; // conservative
        out = out * num / i; // exact: out is C(n-r+i, i) at each step
        if (out > cap) return cap + 1;
    }
    return out;
}

// Lexicographic unranking of the idx-th r-subset of [n].
std::vector<uint32_t> unrank_subset(uint32_t n, uint32_t r, uint64_t idx) {
    std::vector<uint32_t> out;
    uint32_t c = 0;
    while (r > 0) {
        uint64_t block = binom_capped(n - 1 - c, r - 1, UINT64_MAX / 2);
        if (idx < block) {
            out.push_back(c);
            --r;
        } else {
            idx -= block;
        }
        ++c;
    }
    return out;
}

std::vector<uint32_t> sample_subset(uint32_t n, uint32_t r, std::mt19937_64& rng) {
    std::vector<uint32_t> all(n);
    std::iota(all.begin(), all.end(), 0u);
    for (uint32_t i = 0; i < r; ++i) {
        std::uniform_int_distribution<uint32_t> pick(i, n - 1);
        std::swap(all[i], all[pick(rng)]);
    }
    all.resize(r);
    std::sort(all.begin(), all.end());
    return all;
}

Felt random_nonzero(const Field* F, std::mt19937_64& rng) {
    std::uniform_int_distribution<uint32_t> pick(1, F->q() - 1);
    return Felt{pick(rng)};
}

Mat random_mat(const Field* F, size_t rows, size_t cols, std::mt19937_64& rng) {
    Mat A(F, rows, cols);
    std::uniform_int_distribution<uint32_t> pick(0, F->q() - 1);
    for (auto& x : A.a) x = Felt{pick(rng)};
    return A;
}

std::string describe(const std::vector<uint32_t>& v) {
    std::ostringstream os;
    os << '{';
    for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << '}';
    return os.str();
}

} // namespace

bool Report::ok() const {
    for (const auto& c : checks)
        if (!c.ok) return false;
    return true;
}

uint32_t thread_count() {
    if (const char* env = std::getenv("RACKMSR_THREADS")) {
        char* end = nullptr;
        unsigned long v = std::strtoul(env, &end, 10);
        if (end && *end == '\0' && v > 0 && v < 1024) return static_cast<uint32_t>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

std::optional<std::pair<uint64_t, std::string>>
parallel_scan(uint64_t count, const std::function<std::string(uint64_t)>& fn) {
    auto guarded = [&fn](uint64_t i) -> std::string {
        try {
            return fn(i);
        } catch (const Error& e) {
            return e.what();
        } catch (const std::exception& e) {
            return std::string("unexpected exception: ") + e.what();
        }
    };

    uint32_t workers = thread_count();
    std::mutex mu;
    uint64_t best = UINT64_MAX;
    std::string best_msg;
    std::atomic<uint64_t> next{0};
    std::atomic<uint64_t> stop_at{UINT64_MAX};

    auto worker = [&] {
        for (;;) {
            uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count || i > stop_at.load(std::memory_order_relaxed)) break;
            std::string msg = guarded(i);
            if (!msg.empty()) {
                std::lock_guard<std::mutex> lock(mu);
                if (i < best) {
                    best = i;
                    best_msg = std::move(msg);
                }
                uint64_t cur = stop_at.load();
                while (i < cur && !stop_at.compare_exchange_weak(cur, i)) {
                }
            }
        }
    };

    if (workers <= 1 || count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        uint32_t spawn = static_cast<uint32_t>(std::min<uint64_t>(workers, count));
        pool.reserve(spawn);
        for (uint32_t t = 0; t < spawn; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    if (best == UINT64_MAX) return std::nullopt;
    return std::make_pair(best, best_msg);
}

CheckOutcome kernel_suite(const Field* F, uint32_t sbar, uint32_t ntil,
                          uint32_t trials, uint64_t seed) {
    CheckOutcome out;
    out.name = "kernel identities";
    out.cases = trials;
    auto start = clock_type::now();

    KernelCtx ctx{F, sbar, ntil};
    uint64_t l = ctx.l(), lbar = ctx.lbar();

    auto one_trial = [&](uint64_t i) -> std::string {
        std::mt19937_64 rng(case_seed(seed, i));
        std::uniform_int_distribution<uint32_t> pick_a(0, ntil - 1);
        std::uniform_int_distribution<uint32_t> pick_b(0, sbar);
        std::uniform_int_distribution<uint32_t> pick_row(0, sbar);
        std::uniform_int_distribution<uint32_t> pick_z(0, sbar - 1);
        std::uniform_int_distribution<uint32_t> pick_t(1, 3);
        uint32_t a = pick_a(rng), t = pick_t(rng);

        // blow-up is multiplicative
        Mat U0 = random_mat(F, sbar, sbar, rng);
        Mat U1 = random_mat(F, sbar, sbar, rng);
        if (!equal(blowup(ctx, a, matmul(U0, U1), 1, 1),
                   matmul(blowup(ctx, a, U0, 1, 1), blowup(ctx, a, U1, 1, 1))))
            return "blow-up multiplicativity failed at digit " + std::to_string(a);

        // the selectors partition the identity
        Mat part = zeros(F, l, l);
        Mat rsum = zeros(F, lbar, l);
        for (uint32_t z = 0; z < sbar; ++z) {
            Mat R = repair_matrix(ctx, a, z);
            part = add(part, matmul(transpose(R), R));
            rsum = add(rsum, R);
            if (!equal(matmul(R, transpose(R)), identity(F, lbar)))
                return "selector rows are not orthonormal at digit " + std::to_string(a);
        }
        if (!equal(part, identity(F, l)))
            return "selector partition failed at digit " + std::to_string(a);
        if (!equal(rsum, repair_matrix(ctx, a, sbar)))
            return "digit-sum selector mismatch at digit " + std::to_string(a);

        // conjugation through the same digit
        std::vector<Felt> xs(sbar);
        for (auto& x : xs) x = random_nonzero(F, rng);
        uint32_t b = pick_b(rng), row = pick_row(rng), z = pick_z(rng);
        Mat big = blowup(ctx, a, phi(F, b, t, xs), t, 1);
        Mat lhs = matmul(matmul(kron(repair_matrix(ctx, a, row), identity(F, t)), big),
                         transpose(repair_matrix(ctx, a, z)));
        Mat want = zeros(F, lbar * t, lbar);
        Mat Il = identity(F, lbar);
        if (b == sbar) {
            if (row == sbar || z == row) want = kron(Il, moment_vector(F, xs[z], t));
        } else if (row == b) {
            want = z == b ? kron(Il, moment_vector(F, xs[z], t))
                          : neg(kron(Il, moment_vector(F, xs[z], t)));
        } else if (row == sbar) {
            if (z == b) want = kron(Il, moment_vector(F, xs[b], t));
        } else if (z == row) {
            want = kron(Il, moment_vector(F, xs[row], t));
        }
        if (!equal(lhs, want))
            return "in-digit conjugation failed (a=" + std::to_string(a) +
                   " b=" + std::to_string(b) + " row=" + std::to_string(row) +
                   " z=" + std::to_string(z) + ")";

        // conjugation across digits drops one digit from the blow-up
        if (ntil >= 2) {
            uint32_t e = pick_a(rng);
            if (e == a) e = (e + 1) % ntil;
            Mat cross = blowup(ctx, e, phi(F, b, t, xs), t, 1);
            Mat got = matmul(
                matmul(kron(repair_matrix(ctx, a, row), identity(F, t)), cross),
                transpose(repair_matrix(ctx, a, z)));
            Mat bar = bar_blowup(ctx, e < a ? e : e - 1, phi(F, b, t, xs), t, 1);
            Mat expect = (row == sbar || z == row) ? bar : zeros(F, lbar * t, lbar);
            if (!equal(got, expect))
                return "cross-digit conjugation failed (a=" + std::to_string(a) +
                       " e=" + std::to_string(e) + ")";
        }

        // projection chain: folding a kernel gives the power-u kernel
        uint32_t u = 2;
        while (u < F->q() && (F->q() - 1) % u != 0) ++u;
        if (u < F->q()) {
            std::uniform_int_distribution<uint32_t> pick_v(0, u - 1);
            std::uniform_int_distribution<uint32_t> pick_rb(2, 3);
            uint32_t v = pick_v(rng), rbar = pick_rb(rng), r = rbar * u - v;
            std::uniform_int_distribution<uint32_t> pick_w(0, u - 1);
            std::uniform_int_distribution<uint32_t> pick_g(0, u - 1);
            uint32_t w = pick_w(rng), g = pick_g(rng);
            uint32_t mfold = w < u - v ? rbar : rbar - 1;
            Felt theta = F->element_of_order(u);
            std::vector<Felt> lam(sbar), twisted(sbar), lam_u(sbar);
            for (uint32_t j = 0; j < sbar; ++j) {
                lam[j] = random_nonzero(F, rng);
                twisted[j] = F->mul(F->pow(theta, g), lam[j]);
                lam_u[j] = F->pow(lam[j], u);
            }
            Mat lhs2 = matmul(kron(identity(F, sbar), projection(F, u, v, r, w)),
                              phi(F, b, r, twisted));
            Mat dw = zeros(F, sbar, sbar);
            for (uint32_t j = 0; j < sbar; ++j) dw.at(j, j) = F->pow(lam[j], w);
            Mat rhs2 = scale(F->pow(theta, static_cast<int64_t>(g) * w),
                             matmul(phi(F, b, mfold, lam_u), dw));
            if (!equal(lhs2, rhs2))
                return "projection chain failed (u=" + std::to_string(u) +
                       " v=" + std::to_string(v) + " w=" + std::to_string(w) + ")";
        }
        return {};
    };

    auto fail = parallel_scan(trials, one_trial);
    if (fail) {
        out.ok = false;
        out.detail = "trial " + std::to_string(fail->first) + ": " + fail->second;
    }
    out.seconds = seconds_since(start);
    return out;
}

CheckOutcome constraint_sweep(const RackCode& code) {
    CheckOutcome out;
    out.name = "coefficient constraints";
    auto start = clock_type::now();
    CheckResult res =
        validate_lambda_set(code.field(), code.params(), code.lambdas());
    out.cases = res.cases_checked;
    out.ok = res.ok;
    out.detail = res.first_failure;
    out.seconds = seconds_since(start);
    return out;
}

CheckOutcome mds_sweep(const RackCode& code, std::optional<uint64_t> sample,
                       uint64_t seed) {
    const CodeParams& p = code.params();
    const Field* F = code.field();
    CheckOutcome out;
    out.name = "erasure decoding";
    auto start = clock_type::now();

    constexpr uint64_t limit = 1ull << 22;
    uint64_t total;
    if (sample) {
        total = *sample;
        out.detail = "sampled";
    } else {
        total = binom_capped(p.n, p.r, limit);
        if (total > limit)
            throw Error(Errc::invalid_argument,
                        "exhaustive erasure sweep is too large; use sample:N");
        out.detail = "exhaustive";
    }
    out.cases = total;

    auto one_case = [&](uint64_t i) -> std::string {
        std::mt19937_64 rng(case_seed(seed, i));
        std::vector<uint32_t> erased =
            sample ? sample_subset(p.n, p.r, rng) : unrank_subset(p.n, p.r, i);
        Codeword c = code.random_codeword(case_seed(seed ^ 0x5555, i));
        Codeword damaged = c;
        std::uniform_int_distribution<uint32_t> pick(0, F->q() - 1);
        for (uint32_t node : erased)
            for (uint64_t t = 0; t < p.l; ++t)
                damaged[node * p.l + t] = Felt{pick(rng)};
        Codeword fixed = code.erase_decode(damaged, erased);
        if (fixed != c) return "erased " + describe(erased) + ": wrong recovery";
        return {};
    };

    auto fail = parallel_scan(total, one_case);
    if (fail) {
        out.ok = false;
        out.detail = "case " + std::to_string(fail->first) + ": " + fail->second;
    }
    out.seconds = seconds_since(start);
    return out;
}

CheckOutcome folded_sweep(const RackCode& code, uint64_t seed) {
    const CodeParams& p = code.params();
    const Field* F = code.field();
    CheckOutcome out;
    out.name = "folded instances";
    auto start = clock_type::now();

    // per projection index: residual identity on an arbitrary word, vanishing
    // residual on a codeword, then every maximal erasure pattern
    struct Case {
        uint32_t w;
        uint64_t sub; // subset rank, or UINT64_MAX for the residual checks
    };
    std::vector<Case> cases;
    for (uint32_t w = 0; w < p.u; ++w) {
        cases.push_back({w, UINT64_MAX});
        uint64_t m = folded_height(p, w);
        uint64_t count = binom_capped(p.nbar, m, 1ull << 22);
        for (uint64_t s = 0; s < count; ++s) cases.push_back({w, s});
    }
    out.cases = cases.size();

    auto one_case = [&](uint64_t i) -> std::string {
        const Case& cs = cases[i];
        std::mt19937_64 rng(case_seed(seed, i));
        std::uniform_int_distribution<uint32_t> pick(0, F->q() - 1);
        uint32_t m = folded_height(p, cs.w);
        if (cs.sub == UINT64_MAX) {
            Codeword word(static_cast<size_t>(p.n) * p.l);
            for (auto& x : word) x = Felt{pick(rng)};
            FoldedView f = code.fold(word, cs.w);
            Mat lhs = matmul(kron(identity(F, p.l), projection(F, p.u, p.v, p.r, cs.w)),
                             code.parity_residual(word));
            if (!equal(lhs, code.folded_residual(f)))
                return "fold/projection identity failed at w=" + std::to_string(cs.w);
            Codeword c = code.random_codeword(case_seed(seed ^ 0xF01D, i));
            if (!is_zero(code.folded_residual(code.fold(c, cs.w))))
                return "codeword has nonzero folded residual at w=" + std::to_string(cs.w);
            return {};
        }
        std::vector<uint32_t> erased =
            unrank_subset(p.nbar, static_cast<uint32_t>(m), cs.sub);
        Codeword c = code.random_codeword(case_seed(seed ^ 0xFEED, i));
        FoldedView f = code.fold(c, cs.w);
        FoldedView damaged = f;
        for (uint32_t rack : erased)
            for (auto& x : damaged.cbar[rack].a) x = Felt{pick(rng)};
        std::vector<Mat> got = code.folded_erase_decode(damaged, erased);
        for (size_t j = 0; j < erased.size(); ++j)
            if (!equal(got[j], f.cbar[erased[j]]))
                return "w=" + std::to_string(cs.w) + " erased racks " + describe(erased) +
                       ": wrong folded recovery";
        return {};
    };

    auto fail = parallel_scan(cases.size(), one_case);
    if (fail) {
        out.ok = false;
        out.detail = "case " + std::to_string(fail->first) + ": " + fail->second;
    }
    out.seconds = seconds_since(start);
    return out;
}

CheckOutcome repair_sweep(const RackCode& code, const std::vector<uint32_t>& hs,
                          uint32_t trials, uint64_t seed) {
    const CodeParams& p = code.params();
    CheckOutcome out;
    out.name = "repair round-trips";
    auto start = clock_type::now();
    out.cases = static_cast<uint64_t>(hs.size()) * trials;

    auto one_case = [&](uint64_t i) -> std::string {
        uint32_t h = hs[i % hs.size()];
        std::mt19937_64 rng(case_seed(seed, i));
        std::uniform_int_distribution<uint32_t> pick_host(0, p.nbar - 1);
        uint32_t host = pick_host(rng);
        std::vector<uint32_t> I = sample_subset(p.u, h, rng);
        std::vector<uint32_t> survivors;
        for (uint32_t rck = 0; rck < p.nbar; ++rck)
            if (rck != host) survivors.push_back(rck);
        std::vector<uint32_t> idx = sample_subset(
            static_cast<uint32_t>(survivors.size()), p.dbar, rng);
        std::vector<uint32_t> helpers;
        for (uint32_t j : idx) helpers.push_back(survivors[j]);

        std::string tag = "host " + std::to_string(host) + " failed " + describe(I) +
                          " helpers " + describe(helpers);
        RepairPlan plan = plan_repair(p, host, I, helpers);
        Codeword c = code.random_codeword(case_seed(seed ^ 0xACCE55, i));
        RepairResult res = repair(code, c, plan);
        for (size_t j = 0; j < I.size(); ++j) {
            uint32_t node = host * p.u + I[j];
            std::vector<Felt> want(c.begin() + node * p.l, c.begin() + (node + 1) * p.l);
            if (res.recovered[j] != want) return tag + ": wrong column " + std::to_string(I[j]);
        }
        uint64_t expect_bw =
            res.bound_bw + (h > p.u - p.v ? (h - (p.u - p.v)) * p.lbar : 0);
        if (res.bandwidth != expect_bw) return tag + ": bandwidth off the model";
        if (res.optimal_bw != (res.bandwidth == res.bound_bw))
            return tag + ": bandwidth flag inconsistent";
        if (res.optimal_access != (Frac{res.access, 1} == res.bound_access))
            return tag + ": access flag inconsistent";
        uint64_t sent = 0, rounds_max = 0;
        for (const auto& t : res.per_rack) {
            sent += t.sent;
            rounds_max = std::max<uint64_t>(rounds_max, t.rounds);
        }
        if (sent != res.bandwidth) return tag + ": per-rack ledger does not add up";
        if (rounds_max != h) return tag + ": round count off";
        return {};
    };

    auto fail = parallel_scan(out.cases, one_case);
    if (fail) {
        out.ok = false;
        out.detail = "case " + std::to_string(fail->first) + ": " + fail->second;
    }
    out.seconds = seconds_since(start);
    return out;
}

Report run_all(const RackCode& code, const io::Experiment& exp, uint64_t seed) {
    const CodeParams& p = code.params();
    Report rep;
    if (exp.verify.kernels)
        rep.checks.push_back(
            kernel_suite(code.field(), p.sbar, p.ntil, 64, case_seed(seed, 1)));
    rep.checks.push_back(constraint_sweep(code));
    rep.checks.push_back(
        mds_sweep(code, io::parse_mds(exp.verify.mds), case_seed(seed, 2)));
    if (exp.verify.folded)
        rep.checks.push_back(folded_sweep(code, case_seed(seed, 3)));
    std::vector<uint32_t> hs = exp.repair.h;
    if (hs.empty()) {
        // past u - v a spare rack must exist, so cap the default when every
        // survivor is already a helper
        uint32_t cap = p.dbar + 1 < p.nbar ? p.h_max : std::min(p.h_max, p.u - p.v);
        for (uint32_t h = 1; h <= cap; ++h) hs.push_back(h);
    }
    rep.checks.push_back(
        repair_sweep(code, hs, exp.repair.trials, case_seed(seed, 4)));
    return rep;
}

} // namespace rackmsr::verify
