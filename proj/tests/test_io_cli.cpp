#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ddae/bench.hpp"
#include "ddae/json_io.hpp"
#include "ddae/levelset.hpp"
#include "ddae/model.hpp"
#include "test_systems.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ddae;
using fixtures::mk;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir() {
    fs::path d = fs::temp_directory_path() / "ddae_cli_test";
    fs::create_directories(d);
    return d;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p);
    REQUIRE(f.good());
    f << text;
}

int run_cli(const std::string& args, const fs::path& out) {
    std::string cmd = std::string(DDAE_CLI_PATH) + " " + args + " >" + out.string() + " 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("DDAE JSON round trip preserves the system exactly") {
    DdaeSystem s = fixtures::benchmark_loop();
    DdaeSystem t = ddae_from_json(ddae_to_json(s));
    CHECK(t.n == s.n);
    REQUIRE(t.delays == s.delays);
    CHECK((t.E - s.E).norm() == 0.0);
    for (std::size_t i = 0; i < s.A.size(); ++i) CHECK((t.A[i] - s.A[i]).norm() == 0.0);
    CHECK((t.B - s.B).norm() == 0.0);
    CHECK((t.C - s.C).norm() == 0.0);
    CHECK(ddae_checksum(t) == ddae_checksum(s));
}

TEST_CASE("template masks: free and frozen entries") {
    fs::path dir = temp_dir();
    write_file(dir / "tmpl.json", R"({
      "nK": 0,
      "DK": [{"delay": 0.0, "matrix": [[0.25, -0.5]]}],
      "mask": {"DK": [[["free", {"frozen": -0.5}]]]}
    })");
    ControllerTemplate k = load_template_json((dir / "tmpl.json").string());
    REQUIRE(k.DK.size() == 1);
    CHECK(k.DK[0].free(0, 0) == 1.0);
    CHECK(k.DK[0].free(0, 1) == 0.0);
    CHECK(k.DK[0].value(0, 1) == -0.5);
    REQUIRE(k.p0.size() == 1);
    CHECK(k.p0(0) == 0.25);
}

TEST_CASE("benchmark transcriptions are locked by checksums") {
    // Values recorded from the transcription of the published problem data;
    // any edit to the embedded matrices must be deliberate.
    struct Lock { const char* name; unsigned long long sum; };
    const Lock locks[] = {
        {"c1_fridman2002_ex4", 13779729776475843075ULL},
        {"c2_fridman1998_ex1", 2198509974043502806ULL},
        {"c3_fridman_ex2", 10263883702657835729ULL},
        {"c4_fridman_ex3", 11542943585438250971ULL},
        {"c5_fridman_ex4_h0999", 11366048374911526538ULL},
        {"c5_fridman_ex4_h128", 8691851972048417226ULL},
        {"c6_robust", 12699680052962404102ULL},
        {"c7_heat11", 8598162902636657378ULL},
        {"c8_bfg_ex2", 4136118160784297174ULL},
    };
    for (const Lock& l : locks) {
        const BenchCase* c = find_bench(l.name);
        REQUIRE(c != nullptr);
        ParamClosedLoop pcl = assemble(c->plant, c->rows.front().ctrl);
        const unsigned long long got = ddae_checksum(pcl.base);
        INFO(l.name << " checksum 0x" << std::hex << got);
        CHECK(got == l.sum);
    }
}

TEST_CASE("cli: validate, norm, sweep and error paths") {
    fs::path dir = temp_dir();
    write_file(dir / "loop.json", ddae_to_json(fixtures::benchmark_loop()));

    fs::path log = dir / "out.txt";
    CHECK(run_cli("validate " + (dir / "loop.json").string(), log) == 0);
    CHECK(slurp(log).find("nullity = 1") != std::string::npos);

    CHECK(run_cli("norm " + (dir / "loop.json").string() + " --json", log) == 0);
    CHECK(slurp(log).find("\"branch\": \"asymptotic\"") != std::string::npos);

    // sweep: usage error when the range is inverted
    CHECK(run_cli("sweep " + (dir / "loop.json").string() + " --wmin 10 --wmax 1", log) == 1);

    // sweep: single row
    CHECK(run_cli("sweep " + (dir / "loop.json").string() +
                      " --wmin 1 --wmax 2 --points 1 -o " + (dir / "c.csv").string(),
                  log) == 0);
    {
        std::string csv = slurp(dir / "c.csv");
        CHECK(csv.rfind("omega,sigma1\n", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    }

    // malformed JSON is an input error
    write_file(dir / "bad.json", "{ not json");
    CHECK(run_cli("validate " + (dir / "bad.json").string(), log) == 1);

    // index-assumption violation names the compressed block
    DdaeSystem bad;
    bad.n = 2;
    bad.E = Mat::Zero(2, 2);
    bad.A = {mk({{0, 1}, {0, 0}})};
    bad.B = mk({{1}, {0}});
    bad.C = mk({{1, 0}});
    write_file(dir / "adv.json", ddae_to_json(bad));
    CHECK(run_cli("validate " + (dir / "adv.json").string(), log) == 1);
    CHECK(slurp(log).find("A0") != std::string::npos);

    // unstable system: exit 3 from norm and stability
    DdaeSystem uns;
    uns.n = 1;
    uns.E = mk({{1}});
    uns.A = {mk({{0.5}})};
    uns.B = mk({{1}});
    uns.C = mk({{1}});
    write_file(dir / "uns.json", ddae_to_json(uns));
    CHECK(run_cli("norm " + (dir / "uns.json").string(), log) == 3);
    CHECK(run_cli("stability " + (dir / "uns.json").string(), log) == 3);
}

TEST_CASE("cli: assemble output revalidates and keeps the norm") {
    fs::path dir = temp_dir();
    write_file(dir / "plant.json", R"({
      "nG": 2, "nw": 1, "nu": 1, "ny": 2, "nz": 1,
      "E": [[1, 0], [0, 0]],
      "A":  [{"delay": 0.0, "matrix": [[-0.1, -1], [1, -1]]}],
      "B1": [{"delay": 0.0, "matrix": [[0], [1]]}],
      "B2": [{"delay": 0.0, "matrix": [[0], [1]]}],
      "C1": [{"delay": 0.0, "matrix": [[2, -1]]}],
      "C2": [{"delay": 1.0, "matrix": [[0, 1], [0, 0]]},
             {"delay": 2.0, "matrix": [[0, 0], [0, 1]]}]
    })");
    write_file(dir / "gain.json", R"({
      "nK": 0,
      "DK": [{"delay": 0.0, "matrix": [[0.25, -0.5]]}]
    })");
    fs::path log = temp_dir() / "out2.txt";
    CHECK(run_cli("assemble " + (dir / "plant.json").string() + " " + (dir / "gain.json").string() +
                      " -o " + (dir / "closed.json").string(),
                  log) == 0);
    DdaeSystem closed = load_ddae_json((dir / "closed.json").string());
    validate(closed);
    StrongNormResult direct = strong_hinf_norm(fixtures::benchmark_loop(), {});
    StrongNormResult through = strong_hinf_norm(closed, {});
    CHECK(std::abs(direct.value - through.value) <= 1e-9 * std::max(1.0, direct.value));
}

TEST_CASE("cli: bench registry lists and runs") {
    fs::path log = temp_dir() / "bench.txt";
    CHECK(run_cli("bench list", log) == 0);
    CHECK(slurp(log).find("c6_robust") != std::string::npos);
    CHECK(run_cli("bench nosuch", log) == 1);
    CHECK(run_cli("bench c6_robust", log) == 0);
    std::string out = slurp(log);
    CHECK(out.find("achieved 3.314") != std::string::npos);
}
