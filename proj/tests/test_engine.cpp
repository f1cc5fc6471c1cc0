#include <filesystem>
#include <fstream>

#include <catch2/catch_amalgamated.hpp>

#include "npsurf/config.hpp"
#include "npsurf/engine.hpp"
#include "npsurf/report.hpp"

using namespace npsurf;
using Catch::Matchers::ContainsSubstring;

namespace {

std::vector<PrimeField> two_primes() {
    return {PrimeField(2147483647ull), PrimeField(2147483629ull)};
}

FatPointScheme pts2() { return FatPointScheme({{1, 0, 0}, {0, 1, 0}}, {1, 1}); }
FatPointScheme pts3() {
    return FatPointScheme({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {1, 1, 1});
}
FatPointScheme pts22() { return FatPointScheme({{1, 0, 0}, {0, 1, 0}}, {2, 2}); }
FatPointScheme pts5() {
    return FatPointScheme({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}, {1, 2, 3}},
                          {1, 1, 1, 1, 1});
}

} // namespace

TEST_CASE("instance summary carries the agreed invariants") {
    InstanceAnalysis<PrimeField> an(two_primes(), pts2(), 3);
    const InstanceSummary s = an.summarize();
    CHECK(s.s == 2);
    CHECK(s.d == 2);
    CHECK(s.degz == 2);
    CHECK(s.sigma == 2);
    CHECK(s.n_star == 1);
    CHECK(s.n_w == 8);
    CHECK(s.big_n == 7);
    CHECK(s.ambient_lower == 7);
    CHECK(s.very_ample);
    REQUIRE(s.rr_predicted.has_value());
    CHECK(*s.rr_predicted == 1);
    CHECK(*s.rr_direct == 1);
    CHECK(s.h0_kd == 1);
}

TEST_CASE("full verification passes at the predicted bound") {
    InstanceAnalysis<PrimeField> an(two_primes(), pts2(), 3);
    const NpVerification v = an.check_np(1);
    CHECK(v.bound.t_min == 3);
    CHECK(v.bound.binding == BindingTerm::kSigmaPlusOne);
    CHECK(v.theorem_applies);
    CHECK(v.pass);
    CHECK_FALSE(v.refused);
    REQUIRE(v.cells.size() == 6); // q = 1..3 at i = 0, then q = 0, 2, 3 at i = 1
    for (const auto& c : v.cells) {
        CHECK(c.ok());
        CHECK(c.dim == 0);
    }
    for (const auto& c : v.checks) CHECK(c.pass);
}

TEST_CASE("verification preconditions") {
    InstanceAnalysis<PrimeField> low(two_primes(), pts2(), 2);
    CHECK_THROWS_AS(low.check_np(1), std::invalid_argument);
    CHECK_THROWS_AS(low.duality(0), std::invalid_argument);

    InstanceAnalysis<PrimeField> sub(two_primes(), pts22(), 3);
    CHECK_THROWS_AS(sub.betti(2, 2), std::invalid_argument);
}

TEST_CASE("cell evaluations are cached") {
    InstanceAnalysis<PrimeField> an(two_primes(), pts2(), 3);
    const CellResult a = an.cell(1, 2, false);
    const CellResult b = an.cell(1, 2, false);
    CHECK(a.dim == b.dim);
    CHECK(a.ms == b.ms); // second call returns the stored result
}

TEST_CASE("size-guard refusal is per cell, not per run") {
    EngineOptions opt;
    opt.limits.max_dense_bytes = 64ull << 20;
    InstanceAnalysis<PrimeField> an(two_primes(), pts5(), 5, opt);
    const NpVerification v = an.check_np(2);
    CHECK(v.refused);
    CHECK_FALSE(v.pass);
    bool saw_refused = false, saw_ok = false;
    for (const auto& c : v.cells) {
        if (!c.ok()) {
            saw_refused = true;
            CHECK_THAT(c.note, ContainsSubstring("size guard"));
        } else {
            saw_ok = true;
        }
    }
    CHECK(saw_refused);
    CHECK(saw_ok);
}

TEST_CASE("green duality on the del pezzo, including out-of-range partners") {
    InstanceAnalysis<PrimeField> an(two_primes(), pts3(), 3);
    const DualityResult d4 = an.duality(4);
    CHECK(d4.partner == 0);
    CHECK(d4.comparable);
    CHECK(d4.equal);
    CHECK(d4.lhs.dim == 1);
    CHECK(d4.rhs.dim == 1);

    const DualityResult d5 = an.duality(5);
    CHECK(d5.partner == -1);
    CHECK(d5.comparable);
    CHECK(d5.equal);
    CHECK(d5.lhs.dim == 0);
    CHECK(d5.rhs.dim == 0);
}

TEST_CASE("degree scan classifies each row") {
    const auto fields = two_primes();
    const ScanResult s = scan_np(fields, pts2(), 1, 1, 4);
    REQUIRE(s.rows.size() == 4);
    CHECK(s.rows[0].status == ScanStatus::kNotVeryAmple); // one section only
    CHECK(s.rows[1].status == ScanStatus::kNotVeryAmple); // t = sigma
    CHECK(s.rows[2].status == ScanStatus::kPass);
    CHECK(s.rows[3].status == ScanStatus::kPass);
    REQUIRE(s.first_pass.has_value());
    CHECK(*s.first_pass == 3);
    CHECK(s.predicted_all_pass);
    CHECK_FALSE(s.any_refused);
    CHECK(s.bound.t_min == 3);
    CHECK_THROWS_AS(scan_np(fields, pts2(), 1, 4, 3), std::invalid_argument);
}

TEST_CASE("rank cache round-trips through disk") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "npsurf_rank_cache_test";
    fs::remove_all(dir);
    fs::create_directories(dir);

    {
        InstanceAnalysis<PrimeField> an(two_primes(), pts2(), 3);
        an.check_np(1);
        an.save_rank_cache(dir.string());
    }
    u64 files = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        ++files;
        CHECK_THAT(e.path().filename().string(), ContainsSubstring("_char"));
    }
    CHECK(files == 2);

    {
        InstanceAnalysis<PrimeField> an(two_primes(), pts2(), 3);
        an.load_rank_cache(dir.string());
        const NpVerification v = an.check_np(1);
        CHECK(v.pass);
    }
    fs::remove_all(dir);
}

TEST_CASE("audit dumps are readable sms files") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "npsurf_dump_test";
    fs::remove_all(dir);
    fs::create_directories(dir);

    InstanceAnalysis<PrimeField> an(two_primes(), pts2(), 3);
    const auto files = an.dump_cell(1, 1, false, (dir / "cell").string());
    CHECK(files.size() == 4); // top and side differential for each field
    const PrimeField f1(2147483647ull);
    for (const auto& name : files) {
        std::ifstream is(name);
        REQUIRE(is.good());
        if (name.find("char2147483647") == std::string::npos) continue;
        const auto m = read_sms_fp(is, f1);
        CHECK(m.rows() > 0);
        CHECK(m.cols() > 0);
    }
    fs::remove_all(dir);
}

TEST_CASE("field disagreement reports both characteristics") {
    const PrimeDisagreement e("rank of a test block", 31, 37, 5, 6);
    CHECK_THAT(e.what(), ContainsSubstring("rank of a test block"));
    CHECK_THAT(e.what(), ContainsSubstring("31"));
    CHECK_THAT(e.what(), ContainsSubstring("37"));
}

TEST_CASE("config: minimal document and defaults") {
    const auto j = nlohmann::json::parse(
        R"({"points": {"coords": [[1,0,0],[0,1,0]]}, "mults": [1,1]})");
    const RunConfig c = parse_config(j);
    CHECK(c.mode == RunMode::kVerify);
    CHECK(c.p == 1);
    CHECK(c.q_max == 3);
    CHECK_FALSE(c.t.has_value());
    CHECK(c.primes.empty());
    const FatPointScheme z = c.scheme();
    CHECK(z.size() == 2);
}

TEST_CASE("config: every rejection names the offending field") {
    auto reject = [](const char* doc, const char* needle) {
        CHECK_THROWS_WITH(parse_config(nlohmann::json::parse(doc)),
                          ContainsSubstring(needle));
    };
    reject(R"({"mults": [1]})", "points");
    reject(R"({"points": {"coords": [[1,0,0]], "count": 3}, "mults": [1]})",
           "exactly one");
    reject(R"({"points": {"coords": [[1,0,0],[2,0,0]]}, "mults": [1,1]})",
           "points 0 and 1");
    reject(R"({"points": {"coords": [[0,0,0]]}, "mults": [1]})", "projective point");
    reject(R"({"points": {"coords": [[1,0,0]]}, "mults": [1,1]})", "length 1");
    reject(R"({"points": {"coords": [[1,0,0]]}, "mults": [0]})", "mults[0]");
    reject(R"({"points": {"coords": [[1,0,0]]}, "mults": [1], "t": 0})", "t");
    reject(R"({"points": {"coords": [[1,0,0]]}, "mults": [1], "primes": [97]})",
           "primes[0]");
    reject(R"({"points": {"coords": [[1,0,0]]}, "mults": [1], "primes": [1073741827, 1073741827]})",
           "must differ");
    reject(R"({"points": {"coords": [[1,0,0]]}, "mults": [1], "primes": [1073741825]})",
           "not prime");
    reject(R"({"points": {"coords": [[1,0,0]]}, "mults": [1], "t_range": [4,3]})",
           "t_range");
    reject(R"({"points": {"coords": [[1,0,0]]}, "mults": [1], "mode": "scan"})",
           "t_range");
    reject(R"({"points": {"count": 3}, "mults": [1,1,1]})", "seed");
    reject(R"({"points": {"empty": true}, "mults": [1]})", "mults");
    reject(R"({"points": {"empty": true}, "mode": "scan", "t_range": [2,3]})",
           "empty");
    reject(R"({"points": {"coords": [[1073741824,0,1]]}, "mults": [1]})", "2^30");
}

TEST_CASE("config: prime-versus-degree check uses the resolved t") {
    const auto j = nlohmann::json::parse(
        R"({"points": {"coords": [[1,0,0]]}, "mults": [1], "primes": [1073741827]})");
    RunConfig c = parse_config(j);
    CHECK_NOTHROW(check_prime_vs_degrees(c, 100));
    CHECK_THROWS_WITH(check_prime_vs_degrees(c, 300000000),
                      ContainsSubstring("strand degree"));
}

TEST_CASE("config echo reproduces the instance") {
    const auto j = nlohmann::json::parse(
        R"({"points": {"count": 3, "seed": 42}, "mults": [1,1,1], "t": 4})");
    const RunConfig c = parse_config(j);
    const FatPointScheme z = c.scheme();
    const nlohmann::json echo = echo_config(c, z, 4);
    CHECK(echo["points"]["seed"] == 42);
    REQUIRE(echo["points"].contains("coords"));

    nlohmann::json again = echo;
    const RunConfig c2 = parse_config(again);
    const FatPointScheme z2 = c2.scheme();
    REQUIRE(z2.size() == z.size());
    for (u64 i = 0; i < z.size(); ++i) {
        CHECK(z.points[i].x == z2.points[i].x);
        CHECK(z.points[i].y == z2.points[i].y);
        CHECK(z.points[i].z == z2.points[i].z);
    }
}

TEST_CASE("betti rendering marks zeros, values, and refusals") {
    BettiResult b;
    b.i_max = 2;
    b.q_max = 1;
    b.cells = {{{true, 1, ""}, {true, 0, ""}, {true, 0, ""}},
               {{true, 0, ""}, {true, 14, ""}, {false, 0, "size guard"}}};
    const std::string art = ascii_betti(b);
    CHECK_THAT(art, ContainsSubstring("14"));
    CHECK_THAT(art, ContainsSubstring("?"));
    CHECK_THAT(art, ContainsSubstring("."));
    CHECK_THAT(art, ContainsSubstring("0:"));

    const nlohmann::json bj = json_of(b);
    CHECK(bj["rows"][1][1] == 14);
    CHECK(bj["rows"][1][2].is_null());
}

TEST_CASE("report json captures the verification") {
    InstanceAnalysis<PrimeField> an(two_primes(), pts2(), 3);
    const NpVerification v = an.check_np(1);
    const nlohmann::json j = json_of(v);
    CHECK(j["pass"] == true);
    CHECK(j["bound"]["t_min"] == 3);
    CHECK(j["bound"]["binding_term"] == "sigma+1");
    CHECK(j["instance"]["sigma"] == 2);
    CHECK(j["cells"].size() == 6);
    for (const auto& c : j["cells"]) CHECK(c["dim"] == 0);
}
