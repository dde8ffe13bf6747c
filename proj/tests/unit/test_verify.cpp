#include "doctest.h"

#include <atomic>
#include <cstdlib>

#include "rackmsr/verify.hpp"

using namespace rackmsr;

namespace {

RackCode reference_code() {
    auto F = Field::make(3, 3);
    CodeParams p = derive(8, 4, 2, 3, Theorem::T1);
    return RackCode(F, p, explicit_lambdas(F.get(), p));
}

} // namespace

TEST_CASE("thread count follows the environment") {
    setenv("RACKMSR_THREADS", "3", 1);
    CHECK(verify::thread_count() == 3);
    setenv("RACKMSR_THREADS", "0", 1);
    CHECK(verify::thread_count() >= 1); // falls back to hardware
    setenv("RACKMSR_THREADS", "abc", 1);
    CHECK(verify::thread_count() >= 1);
    unsetenv("RACKMSR_THREADS");
    CHECK(verify::thread_count() >= 1);
}

TEST_CASE("parallel scan reports the lowest failing index") {
    auto none = verify::parallel_scan(1000, [](uint64_t) { return std::string(); });
    CHECK(!none.has_value());

    auto some = verify::parallel_scan(1000, [](uint64_t i) {
        if (i == 7 || i == 3 || i == 11) return "broke at " + std::to_string(i);
        return std::string();
    });
    REQUIRE(some.has_value());
    CHECK(some->first == 3);
    CHECK(some->second == "broke at 3");

    auto thrown = verify::parallel_scan(10, [](uint64_t i) -> std::string {
        if (i == 4) throw Error(Errc::singular_matrix, "planted");
        return {};
    });
    REQUIRE(thrown.has_value());
    CHECK(thrown->first == 4);
    CHECK(thrown->second == std::string("singular matrix: planted"));

    CHECK(!verify::parallel_scan(0, [](uint64_t) { return std::string("x"); }));

    std::atomic<uint64_t> visits{0};
    verify::parallel_scan(257, [&](uint64_t) {
        ++visits;
        return std::string();
    });
    CHECK(visits == 257);
}

TEST_CASE("kernel suite passes on random inputs") {
    auto F27 = Field::make(3, 3);
    verify::CheckOutcome a = verify::kernel_suite(F27.get(), 2, 2, 20, 99);
    CHECK(a.ok);
    CHECK(a.cases == 20);
    CHECK(a.detail.empty());

    auto F16 = Field::make(2, 4); // chain identity runs with u = 3 here
    CHECK(verify::kernel_suite(F16.get(), 2, 3, 10, 5).ok);

    auto F49 = Field::make(7, 2);
    CHECK(verify::kernel_suite(F49.get(), 3, 2, 6, 1).ok);
}

TEST_CASE("sweeps pass on the reference code") {
    RackCode code = reference_code();

    verify::CheckOutcome cons = verify::constraint_sweep(code);
    CHECK(cons.ok);
    CHECK(cons.cases == 36);

    verify::CheckOutcome mds = verify::mds_sweep(code, std::nullopt, 17);
    CHECK(mds.ok);
    CHECK(mds.cases == 70);
    CHECK(mds.detail == "exhaustive");

    verify::CheckOutcome sampled = verify::mds_sweep(code, 25, 18);
    CHECK(sampled.ok);
    CHECK(sampled.cases == 25);

    verify::CheckOutcome folded = verify::folded_sweep(code, 19);
    CHECK(folded.ok);
    CHECK(folded.cases == 14); // two projections: residual pair + C(4,2) each

    verify::CheckOutcome rep = verify::repair_sweep(code, {1, 2}, 10, 20);
    CHECK(rep.ok);
    CHECK(rep.cases == 20);
}

TEST_CASE("oversized exhaustive sweeps are refused") {
    // scalar-branch code with an astronomically large erasure space
    auto F = Field::make(31, 1);
    CodeParams p = derive(30, 15, 2, 7, Theorem::T1);
    CHECK(p.l == 1);
    RackCode code(F, p, explicit_lambdas(F.get(), p));
    CHECK_THROWS_AS(verify::mds_sweep(code, std::nullopt, 0), Error);
    CHECK(verify::mds_sweep(code, 40, 3).ok);
}

TEST_CASE("run_all follows the experiment plan") {
    RackCode code = reference_code();
    io::Experiment exp; // defaults: kernels on, folded on, exhaustive, 10 trials
    verify::Report rep = verify::run_all(code, exp, 7);
    CHECK(rep.ok());
    REQUIRE(rep.checks.size() == 5);
    CHECK(rep.checks[0].name == "kernel identities");
    CHECK(rep.checks[1].name == "coefficient constraints");
    CHECK(rep.checks[2].name == "erasure decoding");
    CHECK(rep.checks[3].name == "folded instances");
    CHECK(rep.checks[4].name == "repair round-trips");
    CHECK(rep.checks[4].cases == 20); // h in {1, 2}, ten trials each

    io::Experiment lean;
    lean.verify.kernels = false;
    lean.verify.folded = false;
    lean.verify.mds = "sample:8";
    lean.repair.trials = 2;
    lean.repair.h = {1};
    verify::Report quick = verify::run_all(code, lean, 7);
    CHECK(quick.ok());
    REQUIRE(quick.checks.size() == 3);
    CHECK(quick.checks[1].cases == 8);
    CHECK(quick.checks[2].cases == 2);
}
