#include "doctest.h"

#include <fcntl.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rackmsr/cli.hpp"

namespace {

// Redirects a process-level stream into a file for the duration of one run.
class Capture {
  public:
    explicit Capture(FILE* stream) : stream_(stream), fd_(fileno(stream)) {
        std::fflush(stream_);
        saved_ = dup(fd_);
        path_ = fd_ == 1 ? "cli_capture_out.txt" : "cli_capture_err.txt";
        int file = open(path_.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        dup2(file, fd_);
        close(file);
    }
    ~Capture() {
        if (saved_ >= 0) restore();
    }
    std::string stop() {
        restore();
        std::ifstream in(path_);
        return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    }

  private:
    void restore() {
        std::fflush(stream_);
        dup2(saved_, fd_);
        close(saved_);
        saved_ = -1;
    }

  private:
    FILE* stream_;
    int fd_;
    int saved_ = -1;
    std::string path_;
};

int run_quiet(std::vector<std::string> args, std::string* out = nullptr,
              std::string* err = nullptr) {
    Capture cout_cap(stdout);
    Capture cerr_cap(stderr);
    int rc = rackmsr::cli::run(std::move(args));
    std::string e = cerr_cap.stop();
    std::string o = cout_cap.stop();
    if (out) *out = o;
    if (err) *err = e;
    return rc;
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const char* reference_config = R"({
    "field": {"p": 3, "m": 3, "modulus": [1, 2, 0, 1]},
    "params": {"n": 8, "k": 4, "u": 2, "d_bar": 3, "theorem": "T1"},
    "lambda": {"mode": "explicit"},
    "experiment": {
        "verify": {"mds": "exhaustive", "folded": true, "kernels": true},
        "repair": {"trials": 5, "h": [1, 2]}
    }
})";

} // namespace

TEST_CASE("build is deterministic and records its mode") {
    spit("cli_cfg.json", reference_config);
    std::string out;
    CHECK(run_quiet({"build", "--config", "cli_cfg.json", "--out", "cli_b1.json"}, &out) == 0);
    CHECK(out.find("explicit assignment") != std::string::npos);
    CHECK(out.find("threshold       q >= ") != std::string::npos);
    CHECK(out.find("this q is 27") != std::string::npos);
    CHECK(out.find("parity hash     fnv1a64:") != std::string::npos);
    CHECK(run_quiet({"build", "--config", "cli_cfg.json", "--out", "cli_b2.json"}) == 0);
    CHECK(slurp("cli_b1.json") == slurp("cli_b2.json"));

    nlohmann::json j = nlohmann::json::parse(slurp("cli_b1.json"));
    CHECK(j["lambda"]["mode"] == "explicit");
    CHECK(j["lambda"]["values"].size() == 8);
    CHECK(j["params"]["theorem"] == "T1");
}

TEST_CASE("verify replays the embedded experiment and applies overrides") {
    spit("cli_cfg.json", reference_config);
    REQUIRE(run_quiet({"build", "--config", "cli_cfg.json", "--out", "cli_ver.json"}) == 0);
    std::string out;
    CHECK(run_quiet({"verify", "--bundle", "cli_ver.json"}, &out) == 0);
    CHECK(out.find("PASS kernel identities") != std::string::npos);
    CHECK(out.find("PASS erasure decoding") != std::string::npos);
    CHECK(out.find("[exhaustive]") != std::string::npos);
    CHECK(out.find("PASS folded instances") != std::string::npos);
    CHECK(out.find("PASS repair round-trips") != std::string::npos);
    CHECK(out.find("verification passed (5 checks)") != std::string::npos);

    CHECK(run_quiet({"verify", "--bundle", "cli_ver.json", "--mds", "sample:12",
                     "--no-kernels", "--no-folded", "--trials", "2"},
                    &out) == 0);
    CHECK(out.find("kernel identities") == std::string::npos);
    CHECK(out.find("folded instances") == std::string::npos);
    CHECK(out.find("[sampled]") != std::string::npos);
    CHECK(out.find("verification passed (3 checks)") != std::string::npos);
}

TEST_CASE("verify renders the same report as JSON") {
    spit("cli_cfg.json", reference_config);
    REQUIRE(run_quiet({"build", "--config", "cli_cfg.json", "--out", "cli_vj.json"}) == 0);
    std::string out;
    CHECK(run_quiet({"verify", "--bundle", "cli_vj.json", "--json"}, &out) == 0);
    nlohmann::json j = nlohmann::json::parse(out);
    CHECK(j["ok"] == true);
    CHECK(j["instance"]["theorem"] == "T1");
    CHECK(j["instance"]["n"] == 8);
    CHECK(j["instance"]["q"] == 27);
    CHECK(j["instance"]["l"] == 4);
    REQUIRE(j["checks"].size() == 5);
    for (const auto& c : j["checks"]) {
        CHECK(c["ok"] == true);
        CHECK(c["cases"].get<uint64_t>() > 0);
        CHECK(!c["name"].get<std::string>().empty());
    }
}

TEST_CASE("a tampered bundle fails verification with the detail named") {
    spit("cli_cfg.json", reference_config);
    REQUIRE(run_quiet({"build", "--config", "cli_cfg.json", "--out", "cli_tamper.json"}) == 0);
    nlohmann::json j = nlohmann::json::parse(slurp("cli_tamper.json"));
    j["lambda"]["values"][3] = j["lambda"]["values"][2];
    spit("cli_tamper.json", j.dump(2) + "\n");
    std::string err;
    CHECK(run_quiet({"verify", "--bundle", "cli_tamper.json"}, nullptr, &err) == 1);
    CHECK(err.find("verification failed") != std::string::npos);
    CHECK(err.find("duplicate pool exponent") != std::string::npos);
}

TEST_CASE("repair prints a full ledger and checks the recovery") {
    spit("cli_cfg.json", reference_config);
    REQUIRE(run_quiet({"build", "--config", "cli_cfg.json", "--out", "cli_rep.json"}) == 0);
    std::string out;
    CHECK(run_quiet({"repair", "--bundle", "cli_rep.json", "--host", "0", "--failed",
                     "0,1", "--helpers", "1,2,3"},
                    &out) == 0);
    CHECK(out.find("matching the stored word") != std::string::npos);
    CHECK(out.find("bandwidth       12 symbols (bound 12, ratio 1, optimal)") !=
          std::string::npos);
    CHECK(out.find("access          12 symbols (bound 12, optimal)") != std::string::npos);

    CHECK(run_quiet({"repair", "--bundle", "cli_rep.json", "--host", "2", "--failed", "1",
                     "--helpers", "0,1,3", "--json"},
                    &out) == 0);
    nlohmann::json j = nlohmann::json::parse(out);
    CHECK(j["recovered_match"] == true);
    CHECK(j["bandwidth"]["symbols"] == 6);
    CHECK(j["bandwidth"]["optimal"] == true);
    CHECK(j["per_rack"].size() == 3);

    CHECK(run_quiet({"repair", "--bundle", "cli_rep.json", "--trials", "4"}, &out) == 0);
    CHECK(out.find("PASS repair round-trips") != std::string::npos);

    std::string err;
    CHECK(run_quiet({"repair", "--bundle", "cli_rep.json", "--trials", "4", "--host", "0"},
                    nullptr, &err) == 2);
}

TEST_CASE("report prints one measured row per bundle, text and JSON agreeing") {
    // Same parameters, plain vs grouped construction: the grouped variant
    // needs half the sub-packetization (8 vs 4) at equal rack counts.
    const char* six_racks = R"({
        "field": {"p": 3, "m": 4},
        "params": {"n": 12, "k": 6, "u": 2, "d_bar": 4, "theorem": "%s"},
        "lambda": {"mode": "explicit"}
    })";
    auto with_theorem = [&](const char* name) {
        std::string cfg = six_racks;
        cfg.replace(cfg.find("%s"), 2, name);
        return cfg;
    };
    spit("cli_rt1.json", with_theorem("T1"));
    spit("cli_rt2.json", with_theorem("T2"));
    REQUIRE(run_quiet({"build", "--config", "cli_rt1.json", "--out", "cli_rb1.json"}) == 0);
    REQUIRE(run_quiet({"build", "--config", "cli_rt2.json", "--out", "cli_rb2.json"}) == 0);

    std::string out;
    CHECK(run_quiet({"report", "cli_rb1.json", "cli_rb2.json", "--json"}, &out) == 0);
    nlohmann::json rows = nlohmann::json::parse(out);
    REQUIRE(rows.is_array());
    REQUIRE(rows.size() == 2);
    CHECK(rows[0]["theorem"] == "T1");
    CHECK(rows[0]["l"] == 8);
    CHECK(rows[1]["theorem"] == "T2");
    CHECK(rows[1]["l"] == 4);
    for (const auto& row : rows) {
        CHECK(row["n"] == 12);
        CHECK(row["s_bar"] == 2);
        CHECK(row["q"] == 81);
        CHECK(row["bandwidth"] == "1"); // measured, not assumed
        CHECK(row["access"] == "1");
    }

    // The text rendering must carry the same fields in the same order.
    std::string text;
    CHECK(run_quiet({"report", "cli_rb1.json", "cli_rb2.json"}, &text) == 0);
    std::istringstream lines(text);
    std::string header;
    REQUIRE(static_cast<bool>(std::getline(lines, header)));
    const char* cols[] = {"theorem", "n",     "k", "u", "d_bar",
                          "s_bar",   "l",     "q", "bandwidth", "access"};
    {
        std::istringstream h(header);
        for (const char* col : cols) {
            std::string got;
            REQUIRE(static_cast<bool>(h >> got));
            CHECK(got == col);
        }
    }
    for (const auto& row : rows) {
        std::string line;
        REQUIRE(static_cast<bool>(std::getline(lines, line)));
        std::istringstream cells(line);
        for (const char* col : cols) {
            std::string got;
            REQUIRE(static_cast<bool>(cells >> got));
            const nlohmann::json& v = row.at(col);
            std::string want = v.is_string() ? v.get<std::string>() : v.dump();
            CHECK(got == want);
        }
    }

    // No bundles: an empty table, not an error.
    CHECK(run_quiet({"report"}, &out) == 0);
    CHECK(out.find("theorem") != std::string::npos);
    CHECK(out.find('\n') == out.size() - 1); // header only
    CHECK(run_quiet({"report", "--json"}, &out) == 0);
    CHECK(nlohmann::json::parse(out) == nlohmann::json::array());

    // A missing bundle is still a config error.
    CHECK(run_quiet({"report", "cli_absent.json"}) == 2);
}

TEST_CASE("exit codes separate config errors from exhaustion") {
    CHECK(run_quiet({"verify", "--bundle", "cli_missing.json"}) == 2);
    CHECK(run_quiet({"bogus"}) == 2);
    CHECK(run_quiet({}) == 2);
    CHECK(run_quiet({"--help"}) == 0);

    // a field whose coefficient pool cannot host the instance
    spit("cli_tiny.json", R"({
        "field": {"p": 7, "m": 1},
        "params": {"n": 8, "k": 4, "u": 2, "d_bar": 3, "theorem": "T1"}
    })");
    std::string err;
    CHECK(run_quiet({"build", "--config", "cli_tiny.json", "--out", "cli_tiny_b.json"},
                    nullptr, &err) == 3);
    CHECK(err.find("pool exhausted") != std::string::npos);
}
